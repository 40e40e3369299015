use num_complex::Complex64;

use crate::dynamics::{compute_at_over_a, rhs, Derived, Guards, Rhs, WaveState};
use crate::error::DiagnosticsError;
use crate::spectral::{dealias_cutoff, derivative, hhalf_norm, holo_residual, top_band_fraction, GridFunction, I};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyOptions {
    /// Square the last term of `E_b` (it is unsquared by default).
    pub eb_last_squared: bool,
    /// Top-third spectral fraction above which `E_k` is refused.
    pub resolution_fraction: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            eb_last_squared: false,
            resolution_fraction: 0.1,
        }
    }
}

/// `int |f|^2 w` over one period.
pub fn weighted_l2_sq(f: &GridFunction, w: &GridFunction) -> f64 {
    f.zip_map(w, |a, b| Complex64::new(a.norm_sqr() * b.re, 0.0))
        .integrate()
        .re
}

/// Fields and time derivatives shared by every energy.
///
/// `_t` denotes `d/dt` at fixed `a'`; the material derivative is
/// `mat(f, f_t) = f_t + b df`.
#[derive(Clone, Debug)]
pub struct Kinematics {
    pub derived: Derived,
    pub rhs: Rhs,
    /// `1/A1`
    pub inv_a1: GridFunction,
    /// `|Z_a'|^2 / A1 = 1/cal_A`
    pub inv_cal_a: GridFunction,
    pub zt_bar_t: GridFunction,
    pub inv_zalpha_t: GridFunction,
    /// `D Zbar_t`
    pub d1: GridFunction,
    pub d1_t: GridFunction,
    /// `D^2 Zbar_t`
    pub d2: GridFunction,
    pub d2_t: GridFunction,
}

impl Kinematics {
    pub fn new(state: &WaveState, guards: &Guards) -> Result<Self, DiagnosticsError> {
        let r = rhs(state, guards)?;
        let d = state.derived().clone();
        let inv = &d.inv_zalpha;
        let zalpha_t = derivative(&r.dp);
        let inv_zalpha_t = inv.zip_map(&zalpha_t, |v, z| -v * v * z);
        let zt_bar_t = r.dzt.conj();
        let d1 = inv * &d.zt_bar_alpha;
        let d1_t = &(&inv_zalpha_t * &d.zt_bar_alpha) + &(inv * &derivative(&zt_bar_t));
        let d2 = inv * &derivative(&d1);
        let d2_t = &(&inv_zalpha_t * &derivative(&d1)) + &(inv * &derivative(&d1_t));
        let inv_a1 = d.a1.map(|a| Complex64::new(1.0 / a.re, 0.0));
        let inv_cal_a = d.a1.zip_map(&d.zalpha, |a, z| Complex64::new(z.norm_sqr() / a.re, 0.0));
        Ok(Self {
            derived: d,
            rhs: r,
            inv_a1,
            inv_cal_a,
            zt_bar_t,
            inv_zalpha_t,
            d1,
            d1_t,
            d2,
            d2_t,
        })
    }

    /// `(d_t + b d) f` given `f` and its fixed-frame time derivative.
    pub fn material(&self, f: &GridFunction, f_t: &GridFunction) -> GridFunction {
        f_t + &(&self.derived.b * &derivative(f))
    }

    /// `Zbar_tt`
    pub fn ztt_bar(&self) -> GridFunction {
        self.derived.ztt.conj()
    }
}

/// The three addends of `E_a`.
pub fn energy_ea_terms(k: &Kinematics) -> [f64; 3] {
    let m = k.material(&k.d2, &k.d2_t);
    [
        weighted_l2_sq(&m, &k.inv_a1),
        hhalf_norm(&(&k.derived.inv_zalpha * &k.d2)).powi(2),
        weighted_l2_sq(&k.d2, &k.inv_a1),
    ]
}

/// The three addends of `E_b`; the last one unsquared unless requested.
pub fn energy_eb_terms(k: &Kinematics, opts: &EnergyOptions) -> [f64; 3] {
    let m = k.material(&k.d1, &k.d1_t);
    let last = k.derived.zt_bar_alpha.norm_l2();
    [
        weighted_l2_sq(&m, &k.inv_cal_a),
        hhalf_norm(&k.d1).powi(2),
        if opts.eb_last_squared { last * last } else { last },
    ]
}

pub fn energy_ea(k: &Kinematics) -> f64 {
    energy_ea_terms(k).iter().sum()
}

pub fn energy_eb(k: &Kinematics, opts: &EnergyOptions) -> f64 {
    energy_eb_terms(k, opts).iter().sum()
}

/// `E_a + E_b + ||Zbar_tt - i||_inf`
pub fn energy_frak_e(k: &Kinematics, opts: &EnergyOptions) -> f64 {
    energy_ea(k) + energy_eb(k, opts) + k.ztt_bar().add_const(-I).norm_linf()
}

/// The seven addends of the boundary energy `calE`, in order.
pub fn energy_cal_e_terms(k: &Kinematics) -> [f64; 7] {
    let d = &k.derived;
    let inv = &d.inv_zalpha;
    let d_inv = derivative(inv);
    let dd_inv = inv * &derivative(&(inv * &d_inv));
    [
        d.zt_bar_alpha.norm_l2().powi(2),
        k.d2.norm_l2().powi(2),
        d_inv.norm_l2().powi(2),
        dd_inv.norm_l2().powi(2),
        hhalf_norm(&(inv * &k.d2)).powi(2),
        hhalf_norm(&k.d1).powi(2),
        inv.norm_linf().powi(2),
    ]
}

pub fn energy_cal_e(k: &Kinematics) -> f64 {
    energy_cal_e_terms(k).iter().sum()
}

/// `E_k` for `k` in `{2, 3}` with `W = d^k Zbar_t`, `V = W / Z_a'`:
/// `int (|W|^2 + |Z_a' (d_t + b d) V|^2) / A1 + ||V||^2_{H^1/2}`.
pub fn energy_ek(k: &Kinematics, order: u32, opts: &EnergyOptions) -> Result<f64, DiagnosticsError> {
    assert!(order == 2 || order == 3, "E_k is defined for k = 2, 3");
    let d = &k.derived;
    let mut w = d.zt_bar.clone();
    let mut w_t = k.zt_bar_t.clone();
    for _ in 0..order {
        w = derivative(&w);
        w_t = derivative(&w_t);
    }
    let cut = dealias_cutoff(w.n());
    for (what, f) in [("d^k Zbar_t", &w), ("d^k Zbar_t time derivative", &w_t)] {
        let fraction = top_band_fraction(f, cut);
        if fraction > opts.resolution_fraction {
            return Err(DiagnosticsError::UnderResolved { what, fraction });
        }
    }
    let inv = &d.inv_zalpha;
    let v = inv * &w;
    let v_t = &(&k.inv_zalpha_t * &w) + &(inv * &w_t);
    let mv = &d.zalpha * &k.material(&v, &v_t);
    Ok(weighted_l2_sq(&w, &k.inv_a1) + weighted_l2_sq(&mv, &k.inv_a1) + hhalf_norm(&v).powi(2))
}

/// Basic energy of a quantity `theta` with `(I - H) theta = 0`:
/// `int (|theta_t|^2 + |theta|^2) / cal_A + ||theta||^2_{H^1/2}`,
/// with `theta_t` the material derivative in the `a'` frame.
pub fn energy_etheta(
    theta: &GridFunction,
    theta_t: &GridFunction,
    inv_cal_a: &GridFunction,
    tol: f64,
) -> Result<f64, DiagnosticsError> {
    let residual = holo_residual(theta);
    if residual > tol {
        return Err(DiagnosticsError::Holomorphicity { residual, tol });
    }
    Ok(weighted_l2_sq(theta_t, inv_cal_a) + weighted_l2_sq(theta, inv_cal_a) + hhalf_norm(theta).powi(2))
}

/// `Hdot^{1/2}` pairing form `Re int i H(df) conj(f)`.
pub fn hhalf_pairing(f: &GridFunction) -> f64 {
    let hdf = crate::spectral::hilbert(&derivative(f));
    hdf.zip_map(f, |a, b| I * a * b.conj()).integrate().re
}

/// `sup |a_t/a|`.
pub fn at_over_a_sup(state: &WaveState) -> f64 {
    compute_at_over_a(state.zt(), state.derived()).norm_linf()
}
