use waterwave::diagnostics::taylor_sign;
use waterwave::dynamics::{integrate_to, reverse, DtPolicy, FilterConfig, Guards, WaveState};
use waterwave::initial::make_smooth_wave;
use waterwave::spectral::holo_residual;
use waterwave::trajectory::{run_with, RunOptions};

fn smooth(n: usize, a: f64, m: i64) -> WaveState {
    make_smooth_wave(n, a, m, 1.0).unwrap().to_state()
}

#[test]
fn holomorphicity_drift_without_projection() {
    let s0 = smooth(1024, 0.05, 1);
    let r0 = holo_residual(&s0.zt().conj());
    assert!(r0 < 1e-12, "{r0}");
    let f = FilterConfig::default();
    assert!(!f.project);
    let mut worst: f64 = 0.0;
    let mut s = s0;
    for k in 1..=10 {
        s = integrate_to(&s, 0.1 * k as f64, DtPolicy::Cfl(0.5), &Guards::default(), &f).unwrap();
        worst = worst.max(holo_residual(&s.zt().conj()));
    }
    assert!(worst - r0 < 1e-6, "drift {worst:e}");
}

#[test]
fn resolution_doubling_changes_little() {
    let g = Guards::default();
    let f = FilterConfig::default();
    let coarse = integrate_to(&smooth(256, 0.05, 2), 1.0, DtPolicy::Fixed(0.005), &g, &f).unwrap();
    let fine = integrate_to(&smooth(512, 0.05, 2), 1.0, DtPolicy::Fixed(0.005), &g, &f).unwrap();
    let dp = fine.p().resample(256).dist_linf(coarse.p());
    let dzt = fine.zt().resample(256).dist_linf(coarse.zt());
    assert!(dp < 1e-6 && dzt < 1e-6, "{dp:e} {dzt:e}");
}

#[test]
fn reversal_recovers_initial_data_at_512() {
    let g = Guards::default();
    let f = FilterConfig::default();
    let s0 = smooth(512, 0.05, 1);
    let fwd = integrate_to(&s0, 0.5, DtPolicy::Fixed(0.004), &g, &f).unwrap();
    let mut back = reverse(&fwd);
    back.t = 0.0;
    let home = reverse(&integrate_to(&back, 0.5, DtPolicy::Fixed(0.004), &g, &f).unwrap());
    assert!(home.p().dist_linf(s0.p()) < 1e-6);
    assert!(home.zt().dist_linf(s0.zt()) < 1e-6);
}

#[test]
fn taylor_sign_positive_along_run() {
    let opts = RunOptions {
        t_end: 1.0,
        filter: FilterConfig {
            project: true,
            ..FilterConfig::default()
        },
        ..RunOptions::default()
    };
    let mut min_taylor = f64::INFINITY;
    let tr = run_with(&smooth(256, 0.05, 2), &opts, |s, _| {
        min_taylor = min_taylor.min(taylor_sign(s).min_re());
    });
    assert!(tr.termination.is_completed(), "{}", tr.termination.as_string());
    assert!(min_taylor > 0.0);
    assert!(tr.min_a1 >= 1.0 - 1e-10);
}
