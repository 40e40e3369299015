use num_complex::Complex64;

use super::*;
use crate::dynamics::{compute_at_over_a, reverse, step_rk4, Guards, WaveState};
use crate::singular::quadrature;
use crate::spectral::{derivative, GridFunction, I};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn wave(n: usize, a: f64, m: i64, v: f64) -> WaveState {
    let p = GridFunction::mode(n, -m, c(a, 0.0))
        + GridFunction::mode(n, -2 * m, c(0.3 * a * a, 0.1 * a * a));
    let zt = GridFunction::mode(n, m, c(0.0, -v * a)) + GridFunction::mode(n, 1, c(0.2 * a, 0.0));
    WaveState::new(0.0, p, zt)
}

fn report(s: &WaveState) -> EnergyReport {
    compute_report(s, &Guards::default(), &EnergyOptions::default()).unwrap()
}

/// State at `t + tau` (or `t - tau` for negative `tau`) by small RK4 steps.
fn flow(s: &WaveState, tau: f64) -> WaveState {
    let g = Guards::default();
    let steps = 4;
    let h = tau.abs() / steps as f64;
    let mut x = if tau < 0.0 { reverse(s) } else { s.clone() };
    for _ in 0..steps {
        x = step_rk4(&x, h, &g).unwrap();
    }
    if tau < 0.0 {
        reverse(&x)
    } else {
        x
    }
}

/// Fourth-order centred time derivative of `f` along the flow.
fn time_derivative(s: &WaveState, f: impl Fn(&WaveState) -> GridFunction) -> GridFunction {
    let tau = 2e-3;
    let fp1 = f(&flow(s, tau));
    let fm1 = f(&flow(s, -tau));
    let fp2 = f(&flow(s, 2.0 * tau));
    let fm2 = f(&flow(s, -2.0 * tau));
    let d1 = &fp1 - &fm1;
    let d2 = &fp2 - &fm2;
    (&d1.scale(8.0) - &d2).scale(1.0 / (12.0 * tau))
}

fn d2_zt_bar(s: &WaveState) -> GridFunction {
    let inv = &s.derived().inv_zalpha;
    let z = s.zt().conj();
    inv * &derivative(&(inv * &derivative(&z)))
}

fn d1_zt_bar(s: &WaveState) -> GridFunction {
    &s.derived().inv_zalpha * &derivative(&s.zt().conj())
}

fn sum_weighted(f: &GridFunction, w: &[f64]) -> f64 {
    let h = 2.0 * std::f64::consts::PI / f.n() as f64;
    f.values().iter().zip(w).map(|(v, w)| v.norm_sqr() * w).sum::<f64>() * h
}

#[test]
fn flat_rest_values() {
    let r = report(&WaveState::flat(64));
    assert_eq!(r.ea, 0.0);
    assert_eq!(r.eb, 0.0);
    assert!((r.frak_e - 1.0).abs() < 1e-15);
    assert!((r.cal_e - 1.0).abs() < 1e-15);
    assert_eq!(r.e2, 0.0);
    assert_eq!(r.e3, 0.0);
    assert!((r.taylor_min - 1.0).abs() < 1e-15);
    assert!((r.chord_arc_delta - 1.0).abs() < 1e-12);
    assert!(r.is_finite());
}

#[test]
fn frak_e_assembly() {
    let s = wave(64, 0.05, 2, 1.4);
    let r = report(&s);
    let ztt = s.derived().ztt.conj().add_const(-I).norm_linf();
    assert_eq!(r.frak_e, r.ea + r.eb + ztt);
}

#[test]
fn ea_matches_independent_assembly() {
    let s = wave(128, 0.05, 2, 1.4);
    let d = s.derived();
    let a1: Vec<f64> = d.a1.values().iter().map(|a| 1.0 / a.re).collect();
    // material derivative: d/dt at fixed a' by finite differences, plus transport
    let w = d2_zt_bar(&s);
    let w_t = time_derivative(&s, d2_zt_bar);
    let mat = &w_t + &(&d.b * &derivative(&w));
    let t1 = sum_weighted(&mat, &a1);
    let t2 = quadrature::hhalf_norm(&(&d.inv_zalpha * &w)).powi(2);
    let t3 = sum_weighted(&w, &a1);
    let r = report(&s);
    for (got, want) in r.ea_terms.iter().zip([t1, t2, t3]) {
        assert!((got - want).abs() < 1e-8 * want.max(1e-300), "{got} vs {want}");
    }
}

#[test]
fn eb_matches_independent_assembly() {
    let s = wave(128, 0.05, 2, 1.4);
    let d = s.derived();
    let weight: Vec<f64> = d
        .a1
        .values()
        .iter()
        .zip(d.zalpha.values())
        .map(|(a, z)| z.norm_sqr() / a.re)
        .collect();
    let w = d1_zt_bar(&s);
    let w_t = time_derivative(&s, d1_zt_bar);
    let mat = &w_t + &(&d.b * &derivative(&w));
    let t1 = sum_weighted(&mat, &weight);
    let t2 = quadrature::hhalf_norm(&w).powi(2);
    let t3 = derivative(&s.zt().conj()).norm_l2();
    let r = report(&s);
    for (got, want) in r.eb_terms.iter().zip([t1, t2, t3]) {
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }
}

#[test]
fn eb_squared_variant() {
    let s = wave(64, 0.05, 1, 1.0);
    let k = Kinematics::new(&s, &Guards::default()).unwrap();
    let plain = energy_eb(&k, &EnergyOptions::default());
    let sq = energy_eb(
        &k,
        &EnergyOptions {
            eb_last_squared: true,
            ..EnergyOptions::default()
        },
    );
    let x = k.derived.zt_bar_alpha.norm_l2();
    assert!(((sq - plain) - (x * x - x)).abs() < 1e-14);
}

#[test]
fn translation_invariance() {
    let s = wave(64, 0.05, 2, 1.4);
    let shifted = WaveState::new(0.0, s.p().shift(7), s.zt().shift(7));
    let (a, b) = (report(&s), report(&shifted));
    for (x, y) in [(a.ea, b.ea), (a.eb, b.eb), (a.frak_e, b.frak_e), (a.cal_e, b.cal_e)] {
        assert!((x - y).abs() < 1e-12 * x.max(1.0));
    }
    assert!((a.taylor_min - b.taylor_min).abs() < 1e-14);
}

#[test]
fn horizontal_shift_invariance() {
    let s = wave(64, 0.05, 2, 1.4);
    let moved = WaveState::new(0.0, s.p().add_const(0.7), s.zt().clone());
    let (a, b) = (report(&s), report(&moved));
    assert!((a.frak_e - b.frak_e).abs() < 1e-12 * a.frak_e);
    assert!((a.cal_e - b.cal_e).abs() < 1e-12 * a.cal_e);
}

#[test]
fn quadratic_terms_scale_with_velocity() {
    let n = 64;
    let zt = GridFunction::mode(n, 2, c(0.03, 0.0));
    let one = WaveState::new(0.0, GridFunction::zeros(n), zt.clone());
    let two = WaveState::new(0.0, GridFunction::zeros(n), zt.scale(2.0));
    let (a, b) = (report(&one), report(&two));
    assert!((b.cal_e_terms[0] / a.cal_e_terms[0] - 4.0).abs() < 1e-12);
    assert!((b.cal_e_terms[5] / a.cal_e_terms[5] - 4.0).abs() < 1e-12);
    assert!(b.eb_terms[1] > a.eb_terms[1]);
}

#[test]
fn ek_shares_middle_term_at_flat_geometry() {
    let n = 64;
    let zt = GridFunction::mode(n, 3, c(0.01, 0.02));
    let s = WaveState::new(0.0, GridFunction::zeros(n), zt);
    let k = Kinematics::new(&s, &Guards::default()).unwrap();
    let ea = energy_ea_terms(&k);
    let v = derivative(&derivative(&s.zt().conj()));
    assert!((ea[1] - crate::spectral::hhalf_norm(&v).powi(2)).abs() < 1e-14 * ea[1]);
    assert!(energy_ek(&k, 2, &EnergyOptions::default()).unwrap() > ea[1]);
}

#[test]
fn ek_refuses_rough_state() {
    let n = 64;
    let zt = GridFunction::mode(n, 19, c(0.01, 0.0)) + GridFunction::mode(n, 2, c(0.01, 0.0));
    let s = WaveState::new(0.0, GridFunction::zeros(n), zt);
    let k = Kinematics::new(&s, &Guards::default()).unwrap();
    assert!(matches!(
        energy_ek(&k, 3, &EnergyOptions::default()),
        Err(crate::error::DiagnosticsError::UnderResolved { .. })
    ));
    assert!(report(&s).under_resolved);
}

#[test]
fn etheta_pairing_and_multiplier_agree() {
    let s = wave(64, 0.05, 2, 1.4);
    let th = s.zt().conj();
    let pairing = hhalf_pairing(&th);
    let mult = crate::spectral::hhalf_norm(&th).powi(2);
    assert!((pairing - mult).abs() < 1e-9 * mult);
    let k = Kinematics::new(&s, &Guards::default()).unwrap();
    assert_eq!(
        energy_etheta(&GridFunction::zeros(64), &GridFunction::zeros(64), &k.inv_cal_a, 1e-10).unwrap(),
        0.0
    );
    let bad = GridFunction::mode(64, 3, c(1.0, 0.0));
    assert!(energy_etheta(&bad, &bad, &k.inv_cal_a, 1e-10).is_err());
}

#[test]
fn basic_energy_inequality_along_run() {
    let g = Guards::default();
    let etheta = |s: &WaveState| {
        let k = Kinematics::new(s, &g).unwrap();
        energy_etheta(&s.zt().conj(), &k.ztt_bar(), &k.inv_cal_a, 1e-8).unwrap()
    };
    let mut s = wave(128, 0.05, 2, 1.4);
    let tau = 1e-3;
    for _ in 0..5 {
        let d = s.derived();
        let inv_cal_a: Vec<f64> = d
            .a1
            .values()
            .iter()
            .zip(d.zalpha.values())
            .map(|(a, z)| z.norm_sqr() / a.re)
            .collect();
        let at = compute_at_over_a(s.zt(), d);
        let g_theta = at.zip_map(&d.ztt.conj(), |a, z| a.re * (z - I));
        let e = etheta(&s);
        let de = (etheta(&flow(&s, tau)) - etheta(&flow(&s, -tau))) / (2.0 * tau);
        let bound = (at.norm_linf() + 1.0) * e + 2.0 * e.sqrt() * sum_weighted(&g_theta, &inv_cal_a).sqrt();
        assert!(de <= bound, "{de} > {bound}");
        s = flow(&s, 0.05);
    }
}

#[test]
fn panel_has_all_columns() {
    let r = report(&wave(64, 0.05, 1, 1.0));
    assert_eq!(r.panel.len(), PANEL_COLUMNS.len());
    assert!(r.panel_value("A1_min").unwrap() >= 1.0 - 1e-12);
    let header = EnergyReport::csv_header();
    assert!(header.starts_with("t,Ea,Eb,frakE,calE,E2,E3,taylor_min,chord_arc_delta,holo_Zt,holo_Za,at_over_a_sup,"));
    assert_eq!(header.split(',').count(), r.csv_row().split(',').count());
}
