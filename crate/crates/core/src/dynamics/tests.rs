use num_complex::Complex64;

use super::*;
use crate::spectral::{derivative, i_minus_h, GridFunction, I};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Linear travelling wave `P = a e^{-i m a'}`, `Zbar_t = i sqrt(m) P`.
fn travelling(n: usize, a: f64, m: i64) -> WaveState {
    let p = GridFunction::mode(n, -m, c(a, 0.0));
    let w = (m as f64).sqrt();
    let zt = GridFunction::mode(n, m, c(0.0, -w * a));
    WaveState::new(0.0, p, zt)
}

fn cal_a(d: &Derived) -> GridFunction {
    d.a1.zip_map(&d.zalpha, |a, z| c(a.re / z.norm_sqr(), 0.0))
}

#[test]
fn flat_state_is_stationary() {
    let s = WaveState::flat(64);
    let r = rhs(&s, &Guards::default()).unwrap();
    assert!(r.dp.norm_linf() < 1e-15);
    assert!(r.dzt.norm_linf() < 1e-15);
    let d = s.derived();
    assert!(d.a1.dist_linf(&GridFunction::constant(64, c(1.0, 0.0))) < 1e-15);
}

#[test]
fn small_wave_follows_linear_dispersion() {
    let (n, a, m) = (64, 1e-5, 3);
    let s = travelling(n, a, m);
    let t_end = 1.0;
    let out = integrate_to(
        &s,
        t_end,
        DtPolicy::Fixed(0.01),
        &Guards::default(),
        &FilterConfig::default(),
    )
    .unwrap();
    let w = (m as f64).sqrt();
    let want = GridFunction::mode(n, -m, c(a, 0.0) * Complex64::from_polar(1.0, -w * t_end));
    // nonlinear corrections are O(a^2)
    assert!(out.p().dist_linf(&want) < 1e-3 * a, "{}", out.p().dist_linf(&want));
}

#[test]
fn rk4_is_fourth_order() {
    let s = travelling(64, 0.05, 1);
    let g = Guards::default();
    let f = FilterConfig::default();
    let run = |dt: f64| integrate_to(&s, 0.5, DtPolicy::Fixed(dt), &g, &f).unwrap();
    let reference = run(0.05 / 16.0);
    let e1 = run(0.05).p().dist_linf(reference.p());
    let e2 = run(0.025).p().dist_linf(reference.p());
    let rate = (e1 / e2).log2();
    assert!(rate > 3.7 && rate < 4.5, "rate {rate}");
}

#[test]
fn reversal_returns_to_start() {
    let s = travelling(64, 0.05, 2);
    let g = Guards::default();
    let f = FilterConfig::default();
    let fwd = integrate_to(&s, 0.4, DtPolicy::Fixed(0.005), &g, &f).unwrap();
    let mut back = reverse(&fwd);
    back.t = 0.0;
    let back = integrate_to(&back, 0.4, DtPolicy::Fixed(0.005), &g, &f).unwrap();
    let home = reverse(&back);
    assert!(home.p().dist_linf(s.p()) < 1e-9);
    assert!(home.zt().dist_linf(s.zt()) < 1e-9);
}

#[test]
fn acceleration_forms_agree() {
    let s = travelling(128, 0.1, 2);
    let d = s.derived();
    let alt = compute_ztt_via_cal_a(&d.a1, &d.zalpha);
    assert!(d.ztt.dist_linf(&alt) < 1e-13);
}

#[test]
fn b_matches_projection_form() {
    let s = travelling(128, 0.05, 2);
    let d = s.derived();
    let q = s.zt() * &d.inv_zalpha;
    let alt = i_minus_h(&q).map(|v| c(v.re, 0.0));
    assert!(d.b.dist_linf(&alt) < 1e-10, "{}", d.b.dist_linf(&alt));
}

#[test]
fn a1_at_least_one_for_holomorphic_velocity() {
    let s = travelling(64, 0.3, 4);
    assert!(s.derived().min_a1() >= 1.0 - 1e-12);
}

#[test]
fn at_over_a_matches_finite_difference() {
    let s = travelling(128, 0.05, 2);
    let g = Guards::default();
    let tau = 1e-3;
    let plus = step_rk4(&s, tau, &g).unwrap();
    let minus = reverse(&step_rk4(&reverse(&s), tau, &g).unwrap());
    let d = s.derived();
    let a0 = cal_a(d);
    let dt_a = (&cal_a(plus.derived()) - &cal_a(minus.derived())).scale(0.5 / tau);
    let mat = &dt_a + &(&d.b * &derivative(&a0));
    let fd = &mat.zip_map(&a0, |x, y| x / y) - &derivative(&d.b);
    let at = compute_at_over_a(s.zt(), d);
    let err = at.dist_linf(&fd);
    let scale = at.norm_linf();
    assert!(scale > 1e-4);
    assert!(err < 1e-5 * scale.max(1.0), "err {err} scale {scale}");
}

#[test]
fn guard_trips_on_degenerate_jacobian() {
    let n = 64;
    // Z_alpha = 1 - e^{-ia'} vanishes at a' = 0
    let p = GridFunction::mode(n, -1, c(0.0, -1.0));
    let s = WaveState::new(0.0, p, GridFunction::zeros(n));
    assert!(s.derived().zalpha.values()[0].norm() < 1e-12);
    assert!(matches!(
        s.checked(&Guards::default()),
        Err(crate::error::DynamicsError::Jacobian { .. })
    ));
}

#[test]
fn markers_follow_b() {
    let s = travelling(64, 0.05, 1);
    let g = Guards::default();
    let mut m = MarkerSet::uniform(16);
    let mut st = s.clone();
    for _ in 0..20 {
        let (next, mk) = advance(&st, Some(&m), 0.01, &g, &FilterConfig::default()).unwrap();
        st = next;
        m = mk.unwrap();
    }
    m.check_order().unwrap();
    let moved = m
        .positions()
        .iter()
        .zip(MarkerSet::uniform(16).positions())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(moved > 0.0 && moved < 0.2 * 0.05 * 4.0);
    let _ = I;
}
