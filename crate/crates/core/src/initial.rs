//! Admissible initial data: flat, smooth travelling waves and near-crest
//! profiles, with Poisson mollification and validation.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::polyline_self_intersects;
use crate::dynamics::{compute_a1, compute_ztt, Guards, WaveState};
use crate::error::DataError;
use crate::spectral::{
    antiderivative, check_size, dealias_cutoff, derivative, holo_residual, node, GridFunction, Spectrum, I,
};

const HOLO_TOL: f64 = 1e-10;
const MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Flat,
    SmoothWave { a: f64, m: i64, velocity_scale: f64 },
    NearCrest { r: f64, q: f64, velocity_scale: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Flat => "flat",
            Family::SmoothWave { .. } => "smooth_wave",
            Family::NearCrest { .. } => "near_crest",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    /// `||(I - H) Zbar_t||_2`
    pub holo_zt: f64,
    /// `||(I - H)(Z_a' - 1)||_2`
    pub holo_za: f64,
    pub mean_zt_bar: f64,
    pub min_jacobian: f64,
    /// `||conj(Z_a')(Z_tt + i) - i A1||_inf`
    pub acceleration: f64,
    pub self_intersecting: bool,
    pub passed: bool,
}

impl Validation {
    fn failure(&self) -> Option<String> {
        if !(self.holo_zt < HOLO_TOL) {
            return Some(format!("Zbar_t is not holomorphic: residual {:.3e}", self.holo_zt));
        }
        if !(self.holo_za < HOLO_TOL) {
            return Some(format!("Z_a' - 1 is not holomorphic: residual {:.3e}", self.holo_za));
        }
        if !(self.mean_zt_bar < MEAN_TOL) {
            return Some(format!("mean of Zbar_t is {:.3e}", self.mean_zt_bar));
        }
        if !(self.min_jacobian > Guards::default().jacobian_min) {
            return Some(format!("Jacobian degenerates: min |Z_a'| = {:.3e}", self.min_jacobian));
        }
        if self.self_intersecting {
            return Some("interface crosses itself".to_string());
        }
        None
    }
}

/// Validated `(P(0), Z_t(0))` with its construction record.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub p0: GridFunction,
    pub zt0: GridFunction,
    pub family: Family,
    /// total mollification depth applied so far
    pub epsilon: f64,
    pub validation: Validation,
}

/// Computes every residual of the data constraints; never fails.
pub fn validate(p0: &GridFunction, zt0: &GridFunction) -> Validation {
    let zalpha = derivative(p0).add_const(1.0);
    let zt_bar = zt0.conj();
    let a1 = compute_a1(zt0, &derivative(&zt_bar));
    let ztt = compute_ztt(&a1, &zalpha);
    let lhs = zalpha.conj().zip_map(&ztt, |z, a| z * (a + I));
    let acceleration = lhs.zip_map(&a1, |l, a| l - I * a).norm_linf();
    let mut v = Validation {
        holo_zt: holo_residual(&zt_bar),
        holo_za: holo_residual(&zalpha.add_const(-1.0)),
        mean_zt_bar: zt_bar.mean().norm(),
        min_jacobian: zalpha.min_abs(),
        acceleration,
        self_intersecting: polyline_self_intersects(
            (&GridFunction::from_fn(p0.n(), |x| Complex64::new(x, 0.0)) + p0).values(),
        ),
        passed: false,
    };
    v.passed = v.failure().is_none();
    v
}

impl InitialData {
    fn build(p0: GridFunction, zt0: GridFunction, family: Family, epsilon: f64) -> Result<Self, DataError> {
        let validation = validate(&p0, &zt0);
        if let Some(msg) = validation.failure() {
            return Err(DataError::Validation(msg));
        }
        Ok(Self {
            p0,
            zt0,
            family,
            epsilon,
            validation,
        })
    }

    pub fn n(&self) -> usize {
        self.p0.n()
    }

    pub fn to_state(&self) -> WaveState {
        WaveState::new(0.0, self.p0.clone(), self.zt0.clone())
    }

    /// Writes `alpha, Re P, Im P, Re Z_t, Im Z_t`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "alpha,P_re,P_im,Zt_re,Zt_im")?;
        let n = self.n();
        for j in 0..n {
            let (p, z) = (self.p0.values()[j], self.zt0.values()[j]);
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", node(j, n), p.re, p.im, z.re, z.im)?;
        }
        Ok(())
    }
}

pub fn make_flat(n: usize) -> Result<InitialData, DataError> {
    check_size(n)?;
    InitialData::build(GridFunction::zeros(n), GridFunction::zeros(n), Family::Flat, 0.0)
}

/// `P = a e^{-i m a'}` with the linear travelling-wave velocity
/// `Zbar_t = i v sqrt(m) P`, `v = velocity_scale`.
pub fn make_smooth_wave(n: usize, a: f64, m: i64, velocity_scale: f64) -> Result<InitialData, DataError> {
    check_size(n)?;
    if m < 1 || m as usize > dealias_cutoff(n) {
        return Err(DataError::Parameter {
            name: "m",
            value: m as f64,
            reason: "mode must lie in 1..=n/3",
        });
    }
    if !a.is_finite() || !velocity_scale.is_finite() {
        return Err(DataError::Parameter {
            name: "a",
            value: a,
            reason: "must be finite",
        });
    }
    let p0 = GridFunction::mode(n, -m, Complex64::new(a, 0.0));
    let w = (m as f64).sqrt();
    let zt0 = GridFunction::mode(n, m, Complex64::new(0.0, -velocity_scale * w * a));
    InitialData::build(
        p0,
        zt0,
        Family::SmoothWave {
            a,
            m,
            velocity_scale,
        },
        0.0,
    )
}

/// Coefficients of `(1 - q e^{-i a'})^beta`: mode `-j` carries
/// `(-q)^j binom(beta, j)`, truncated at `j = n/3`.
pub fn binomial_profile(n: usize, beta: f64, q: f64) -> GridFunction {
    let mut spec = Spectrum::zeros(n);
    let mut coef = 1.0;
    for j in 0..=dealias_cutoff(n) {
        spec.set(-(j as i64), Complex64::new(coef, 0.0));
        coef *= -q * (beta - j as f64) / (j as f64 + 1.0);
    }
    spec.to_physical()
}

/// `Psi_z = (1 - q e^{-iz'})^{r-1}` without range checks on `r`.
pub fn near_crest_profile(n: usize, r: f64, q: f64) -> GridFunction {
    binomial_profile(n, r - 1.0, q)
}

/// Near-crest data of interior angle `r pi` sharpened by `q`. Released from
/// rest when `velocity_scale = 0`; otherwise `Zbar_t = v (1/Psi_z - 1)`.
pub fn make_near_crest(n: usize, r: f64, q: f64, velocity_scale: f64) -> Result<InitialData, DataError> {
    check_size(n)?;
    if !(r > 0.0 && r < 0.5) {
        return Err(DataError::Parameter {
            name: "r",
            value: r,
            reason: "crest exponent must lie in (0, 1/2)",
        });
    }
    if !(0.0..1.0).contains(&q) {
        return Err(DataError::Parameter {
            name: "q",
            value: q,
            reason: "sharpness must lie in [0, 1)",
        });
    }
    let psi_z = near_crest_profile(n, r, q);
    let p0 = antiderivative(&psi_z.add_const(-1.0));
    let zt0 = if velocity_scale == 0.0 {
        GridFunction::zeros(n)
    } else {
        binomial_profile(n, 1.0 - r, q)
            .add_const(-1.0)
            .scale(velocity_scale)
            .conj()
    };
    InitialData::build(
        p0,
        zt0,
        Family::NearCrest {
            r,
            q,
            velocity_scale,
        },
        0.0,
    )
}

/// Evaluates the holomorphic extensions at depth `eps`: mode `k` of `P` and
/// of `Zbar_t` times `e^{-|k| eps}`.
pub fn mollify(data: &InitialData, eps: f64) -> Result<InitialData, DataError> {
    if !(eps > 0.0) {
        return Err(DataError::Parameter {
            name: "epsilon",
            value: eps,
            reason: "must be positive",
        });
    }
    let damp = |k: i64| Complex64::new((-(k.unsigned_abs() as f64) * eps).exp(), 0.0);
    InitialData::build(
        data.p0.multiplier(damp),
        data.zt0.multiplier(damp),
        data.family,
        data.epsilon + eps,
    )
}
