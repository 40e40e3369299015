use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::DynamicsError;
use crate::singular::{commutator_h, commutator_h_dg, double_bracket_spectral};
use crate::spectral::{derivative, GridFunction, I};

/// Thresholds for the degenerate-Jacobian and `A1 >= 1` guards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guards {
    pub tol_a1: f64,
    pub jacobian_min: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            tol_a1: 1e-10,
            jacobian_min: 1e-6,
        }
    }
}

/// Boundary quantities derived from `(P, Z_t)` in the Riemann-mapping frame.
#[derive(Clone, Debug)]
pub struct Derived {
    /// `Z_{,a'} = 1 + dP`
    pub zalpha: GridFunction,
    pub inv_zalpha: GridFunction,
    pub zt_bar: GridFunction,
    /// `d Zbar_t`
    pub zt_bar_alpha: GridFunction,
    /// real-valued, stored with zero imaginary part
    pub a1: GridFunction,
    pub b: GridFunction,
    pub ztt: GridFunction,
}

impl Derived {
    pub fn compute(p: &GridFunction, zt: &GridFunction) -> Self {
        let zalpha = derivative(p).add_const(1.0);
        let inv_zalpha = zalpha.recip();
        let zt_bar = zt.conj();
        let zt_bar_alpha = derivative(&zt_bar);
        let a1 = compute_a1(zt, &zt_bar_alpha);
        let b = compute_b(zt, &inv_zalpha);
        let ztt = compute_ztt(&a1, &zalpha);
        Self {
            zalpha,
            inv_zalpha,
            zt_bar,
            zt_bar_alpha,
            a1,
            b,
            ztt,
        }
    }

    pub fn min_jacobian(&self) -> f64 {
        self.zalpha.min_abs()
    }

    pub fn min_a1(&self) -> f64 {
        self.a1.min_re()
    }

    pub fn check(&self, guards: &Guards) -> Result<(), DynamicsError> {
        let min = self.min_jacobian();
        if !min.is_finite() {
            return Err(DynamicsError::NonFinite("Z_alpha"));
        }
        if min <= guards.jacobian_min {
            return Err(DynamicsError::Jacobian {
                min,
                threshold: guards.jacobian_min,
            });
        }
        if !self.a1.is_finite() {
            return Err(DynamicsError::NonFinite("A1"));
        }
        if !self.b.is_finite() {
            return Err(DynamicsError::NonFinite("b"));
        }
        if !self.ztt.is_finite() {
            return Err(DynamicsError::NonFinite("Z_tt"));
        }
        let a1_min = self.min_a1();
        if a1_min < 1.0 - 10.0 * guards.tol_a1 {
            return Err(DynamicsError::A1Violation { min: a1_min });
        }
        Ok(())
    }
}

/// `A1 = 1 - Im [Z_t, H] Zbar_{t,a'}`.
pub fn compute_a1(zt: &GridFunction, zt_bar_alpha: &GridFunction) -> GridFunction {
    commutator_h(zt, zt_bar_alpha).map(|v| Complex64::new(1.0 - v.im, 0.0))
}

/// `b = Re([Z_t, H](1/Z_{,a'} - 1)) + 2 Re Z_t`.
pub fn compute_b(zt: &GridFunction, inv_zalpha: &GridFunction) -> GridFunction {
    let g = inv_zalpha.add_const(-1.0);
    commutator_h(zt, &g).zip_map(zt, |c, z| Complex64::new(c.re + 2.0 * z.re, 0.0))
}

/// `Z_tt = i A1 / conj(Z_{,a'}) - i`.
pub fn compute_ztt(a1: &GridFunction, zalpha: &GridFunction) -> GridFunction {
    a1.zip_map(zalpha, |a, z| I * a / z.conj() - I)
}

/// Same acceleration through `Z_tt + i = i (A1/|Z_{,a'}|^2) Z_{,a'}`.
pub fn compute_ztt_via_cal_a(a1: &GridFunction, zalpha: &GridFunction) -> GridFunction {
    a1.zip_map(zalpha, |a, z| I * (a / z.norm_sqr()) * z - I)
}

/// `a_t/a o h^{-1}` from
/// `-Im(2[Z_t,H] Zbar_{tt,a'} + 2[Z_tt,H] d Zbar_t - [Z_t, Z_t; D Zbar_t]) / A1`.
pub fn compute_at_over_a(zt: &GridFunction, d: &Derived) -> GridFunction {
    let ztt_bar = d.ztt.conj();
    let t1 = commutator_h_dg(zt, &ztt_bar).scale(2.0);
    let t2 = commutator_h(&d.ztt, &d.zt_bar_alpha).scale(2.0);
    let dzt_bar = &d.inv_zalpha * &d.zt_bar_alpha;
    let t3 = double_bracket_spectral(zt, zt, &dzt_bar);
    let num = &(&t1 + &t2) - &t3;
    num.zip_map(&d.a1, |v, a| Complex64::new(-v.im / a.re, 0.0))
}

/// The evolved pair `(Z = a' + P, Z_t)` at time `t`.
#[derive(Debug)]
pub struct WaveState {
    pub t: f64,
    p: GridFunction,
    zt: GridFunction,
    cache: OnceLock<Derived>,
}

impl Clone for WaveState {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(d) = self.cache.get() {
            let _ = cache.set(d.clone());
        }
        Self {
            t: self.t,
            p: self.p.clone(),
            zt: self.zt.clone(),
            cache,
        }
    }
}

impl WaveState {
    pub fn new(t: f64, p: GridFunction, zt: GridFunction) -> Self {
        assert_eq!(p.n(), zt.n(), "P and Z_t must share a grid");
        Self {
            t,
            p,
            zt,
            cache: OnceLock::new(),
        }
    }

    /// Flat interface at rest.
    pub fn flat(n: usize) -> Self {
        Self::new(0.0, GridFunction::zeros(n), GridFunction::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn p(&self) -> &GridFunction {
        &self.p
    }

    pub fn zt(&self) -> &GridFunction {
        &self.zt
    }

    /// Interface positions `Z(a'_j) = a'_j + P_j`.
    pub fn z(&self) -> GridFunction {
        let n = self.n();
        let x = GridFunction::from_fn(n, |a| Complex64::new(a, 0.0));
        &x + &self.p
    }

    pub fn with_fields(&self, t: f64, p: GridFunction, zt: GridFunction) -> Self {
        Self::new(t, p, zt)
    }

    /// Cached derived quantities (unchecked).
    pub fn derived(&self) -> &Derived {
        self.cache.get_or_init(|| Derived::compute(&self.p, &self.zt))
    }

    /// Derived quantities after passing the guards.
    pub fn checked(&self, guards: &Guards) -> Result<&Derived, DynamicsError> {
        let d = self.derived();
        d.check(guards)?;
        Ok(d)
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.zt.is_finite()
    }
}
