use num_complex::Complex64;

use crate::spectral::{dealias_cutoff, GridFunction};

use super::state::WaveState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    /// 2/3-rule truncation of `P` and `Z_t`
    pub dealias: bool,
    /// Krasny-style floor: coefficients with `|c_k|` below it are zeroed
    pub floor: Option<f64>,
    /// Re-project onto the constraint set: `Zbar_t` keeps only `k < 0`,
    /// `P` keeps `k <= 0`.
    pub project: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            dealias: true,
            floor: None,
            project: false,
        }
    }
}

fn filter_field(f: &GridFunction, cfg: &FilterConfig, keep: impl Fn(i64) -> bool) -> GridFunction {
    let n = f.n() as i64;
    let cut = dealias_cutoff(f.n()) as i64;
    let mut spec = f.spectrum();
    let ks: Vec<i64> = spec.iter().map(|(k, _)| k).collect();
    for k in ks {
        let c = spec.get(k);
        let drop = (cfg.dealias && (k.abs() > cut || k == -n / 2))
            || cfg.floor.is_some_and(|eps| c.norm() < eps)
            || (cfg.project && !keep(k));
        if drop {
            spec.set(k, Complex64::new(0.0, 0.0));
        }
    }
    spec.to_physical()
}

/// Applied once per accepted step.
pub fn apply_filter(state: &WaveState, cfg: &FilterConfig) -> WaveState {
    let p = filter_field(state.p(), cfg, |k| k <= 0);
    // Z_t has modes k >= 1 exactly when Zbar_t has modes k <= -1
    let zt = filter_field(state.zt(), cfg, |k| k >= 1);
    state.with_fields(state.t, p, zt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{holo_residual, GridFunction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn band_limited_state_unchanged() {
        let n = 64;
        let p = GridFunction::mode(n, -2, c(0.05, 0.0));
        let zt = GridFunction::mode(n, 3, c(0.0, 0.02));
        let s = WaveState::new(0.0, p.clone(), zt.clone());
        let f = apply_filter(&s, &FilterConfig::default());
        assert!(f.p().dist_linf(&p) < 1e-15);
        assert!(f.zt().dist_linf(&zt) < 1e-15);
    }

    #[test]
    fn super_cutoff_mode_removed() {
        let n = 64;
        let low = GridFunction::mode(n, -2, c(0.05, 0.0));
        let high = GridFunction::mode(n, -30, c(1e-3, 0.0));
        let s = WaveState::new(0.0, &low + &high, GridFunction::zeros(n));
        let f = apply_filter(&s, &FilterConfig::default());
        assert!(f.p().dist_linf(&low) < 1e-15);
    }

    #[test]
    fn projection_restores_holomorphicity() {
        let n = 64;
        let good = GridFunction::mode(n, 2, c(0.01, 0.0));
        let bad = GridFunction::mode(n, -3, c(1e-4, 0.0));
        let s = WaveState::new(0.0, GridFunction::zeros(n), &good + &bad);
        let cfg = FilterConfig {
            project: true,
            ..FilterConfig::default()
        };
        let f = apply_filter(&s, &cfg);
        assert!(holo_residual(&f.zt().conj()) < 1e-14);
        assert!(crate::spectral::i_minus_h(&f.zt().conj()).norm_l2() < 1e-14);
    }

    #[test]
    fn floor_zeroes_small_modes() {
        let n = 64;
        let big = GridFunction::mode(n, -1, c(0.1, 0.0));
        let tiny = GridFunction::mode(n, -4, c(1e-15, 0.0));
        let s = WaveState::new(0.0, &big + &tiny, GridFunction::zeros(n));
        let cfg = FilterConfig {
            floor: Some(1e-13),
            ..FilterConfig::default()
        };
        let f = apply_filter(&s, &cfg);
        assert!(f.p().spectrum().get(-4).norm() == 0.0);
        assert!((f.p().spectrum().get(-1) - c(0.1, 0.0)).norm() < 1e-15);
    }
}
