use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{advance_markers, compute_ztt, compute_ztt_via_cal_a, reverse, step_rk4_stages, Guards, MarkerSet, WaveState};
use crate::random::BandLimited;
use crate::singular::{commutator_h, commutator_h_dg, commutator_with, double_bracket, quadrature};
use crate::spectral::{derivative, hhalf_norm, hilbert, i_minus_h, proj_anti, proj_holo, GridFunction};

pub const SPECTRAL_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-6;
/// A negative control counts as failed once its residual exceeds this.
pub const CONTROL_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityClass {
    Spectral,
    Quadrature,
    FiniteDifference,
}

impl IdentityClass {
    pub fn tolerance(self) -> f64 {
        match self {
            IdentityClass::Spectral => SPECTRAL_TOL,
            _ => ORACLE_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub class: IdentityClass,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlResult {
    pub residual: f64,
    pub failed_as_expected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub seed: u64,
    /// time step of the finite-difference checks (fourth-order centred stencil)
    pub fd_dt: f64,
    pub identities: BTreeMap<String, IdentityResult>,
    pub negative_controls: BTreeMap<String, ControlResult>,
    /// exercised through the Euler residual and the energy oracles
    pub covered_by_composite: Vec<String>,
}

impl IdentityReport {
    pub fn identities_pass(&self) -> bool {
        self.identities.values().all(|r| r.passed)
    }

    pub fn controls_fail(&self) -> bool {
        self.negative_controls.values().all(|c| c.failed_as_expected)
    }

    pub fn passed(&self) -> bool {
        self.identities_pass() && self.controls_fail()
    }

    pub fn worst(&self, class: IdentityClass) -> f64 {
        self.identities
            .values()
            .filter(|r| r.class == class)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    fn record(&mut self, name: &str, class: IdentityClass, residual: f64) {
        let tolerance = class.tolerance();
        self.identities.insert(
            name.to_string(),
            IdentityResult {
                class,
                residual,
                tolerance,
                passed: residual <= tolerance,
            },
        );
    }

    fn control(&mut self, name: &str, residual: f64) {
        self.negative_controls.insert(
            name.to_string(),
            ControlResult {
                residual,
                failed_as_expected: residual > CONTROL_FLOOR,
            },
        );
    }
}

pub const COVERED_BY_COMPOSITE: [&str; 11] = [
    "commutator_dt_riemann_derivative_squared",
    "commutator_dt_squared_riemann_derivative",
    "commutator_wave_operator_riemann_derivative",
    "commutator_dt_lagrangian_derivative",
    "commutator_dt_squared_lagrangian_derivative",
    "commutator_taylor_term_lagrangian_derivative",
    "commutator_wave_operator_lagrangian_derivative",
    "material_derivative_of_commutator",
    "commutator_zalpha_material_derivative",
    "commutator_dt_inverse_jacobian",
    "commutator_wave_operator_inverse_jacobian",
];

/// `max |a - b| / (1 + max(|a|, |b|))`.
pub fn rel_dist(a: &GridFunction, b: &GridFunction) -> f64 {
    a.dist_linf(b) / (1.0 + a.norm_linf().max(b.norm_linf()))
}

/// `max |a - b| / max(|a|, |b|)`, scale-free for negative controls.
fn pure_rel(a: &GridFunction, b: &GridFunction) -> f64 {
    let scale = a.norm_linf().max(b.norm_linf());
    if scale == 0.0 {
        0.0
    } else {
        a.dist_linf(b) / scale
    }
}

/// Smooth small-amplitude state with holomorphic `Zbar_t` and `Z_a' - 1`.
pub fn random_admissible_state(n: usize, rng: &mut ChaCha8Rng) -> WaveState {
    let kmax = (n / 8).clamp(1, 12);
    let gen = BandLimited::new(n, kmax).holomorphic().decay(2.0).amplitude(0.1);
    let p = gen.sample(rng);
    let zt = gen.sample(rng).conj();
    WaveState::new(0.0, p, zt)
}

pub fn run_identity_battery(n: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state = random_admissible_state(n, &mut rng);
    identity_battery_on(&state, seed, true)
}

/// Runs every identity on `state`; operand functions are drawn from `seed`.
pub fn identity_battery_on(state: &WaveState, seed: u64, with_controls: bool) -> IdentityReport {
    let n = state.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let kmax = (n / 8).clamp(1, 12);
    let gen = BandLimited::new(n, kmax).decay(1.5);
    let f = gen.sample(&mut rng);
    let g = gen.sample(&mut rng);
    let u = gen.sample(&mut rng);
    let fd_dt = 1e-2;
    let mut rep = IdentityReport {
        n,
        seed,
        fd_dt,
        identities: BTreeMap::new(),
        negative_controls: BTreeMap::new(),
        covered_by_composite: COVERED_BY_COMPOSITE.iter().map(|s| s.to_string()).collect(),
    };
    let one = GridFunction::constant(n, Complex64::new(1.0, 0.0));
    let d = state.derived();
    let zt = state.zt();
    let zt_bar = zt.conj();

    // operator algebra
    rep.record("hilbert_kills_constants", IdentityClass::Spectral, hilbert(&one).norm_linf());
    let f0 = f.add_const(-f.mean());
    rep.record("hilbert_involution", IdentityClass::Spectral, rel_dist(&hilbert(&hilbert(&f0)), &f0));
    rep.record("projection_sum", IdentityClass::Spectral, rel_dist(&(&proj_holo(&f) + &proj_anti(&f)), &f));
    rep.record(
        "projection_difference",
        IdentityClass::Spectral,
        rel_dist(&(&proj_holo(&f) - &proj_anti(&f)), &hilbert(&f)),
    );
    rep.record("operator_product_expansion", IdentityClass::Spectral, operator_expansion(&f, &g, &u, 3));

    // holomorphicity of the state
    let zalpha_m1 = d.zalpha.add_const(-1.0);
    let inv_m1 = d.inv_zalpha.add_const(-1.0);
    let holo = [&zt_bar, &zalpha_m1, &inv_m1]
        .iter()
        .map(|h| i_minus_h(h).norm_linf() / (1.0 + h.norm_linf()))
        .fold(0.0, f64::max);
    rep.record("holomorphic_constraints", IdentityClass::Spectral, holo);

    // transport velocity: commutator form against both projection forms
    let ratio = zt * &d.inv_zalpha;
    let b_proj = i_minus_h(&ratio).re();
    rep.record("transport_velocity_forms", IdentityClass::Spectral, rel_dist(&d.b, &b_proj));
    let b_alt = &ratio + &proj_holo(&(&ratio.conj() - &ratio));
    rep.record(
        "transport_velocity_projection_forms",
        IdentityClass::Spectral,
        rel_dist(&b_proj, &b_alt),
    );

    // acceleration: the A1 form against the cal_A form and the a'-multiplied form
    let ztt_a = compute_ztt(&d.a1, &d.zalpha);
    let ztt_b = compute_ztt_via_cal_a(&d.a1, &d.zalpha);
    rep.record("acceleration_forms", IdentityClass::Spectral, rel_dist(&ztt_a, &ztt_b));
    let lhs = &d.zalpha.conj() * &ztt_a.add_const(Complex64::new(0.0, 1.0));
    let rhs = d.a1.scale(Complex64::new(0.0, 1.0));
    rep.record("acceleration_times_conj_jacobian", IdentityClass::Spectral, rel_dist(&lhs, &rhs));

    // quadrature oracles
    rep.record("hilbert_quadrature", IdentityClass::Quadrature, rel_dist(&hilbert(&f), &quadrature::hilbert(&f)));
    rep.record(
        "commutator_quadrature",
        IdentityClass::Quadrature,
        rel_dist(&commutator_h(&f, &g), &quadrature::commutator_h(&f, &g)),
    );
    let a1_quad = quadrature::a1_integral(zt);
    rep.record("a1_forms", IdentityClass::Quadrature, rel_dist(&d.a1, &a1_quad));
    let (hs, hq) = (hhalf_norm(&f), quadrature::hhalf_norm(&f));
    rep.record("hhalf_forms", IdentityClass::Quadrature, (hs - hq).abs() / (1.0 + hs));
    let db_lhs = &commutator_h_dg(&f, &(&f * &g)).scale(-2.0) + &commutator_h_dg(&(&f * &f), &g);
    let db_rhs = -&double_bracket(&f, &f, &g);
    rep.record("double_bracket_commutator_form", IdentityClass::Quadrature, rel_dist(&db_lhs, &db_rhs));

    // finite differences along the flow, Lagrangian derivative from markers
    match lagrangian_checks(state, fd_dt) {
        Ok(fd) => {
            for (name, r) in fd.identities {
                rep.record(name, IdentityClass::FiniteDifference, r);
            }
            if with_controls {
                rep.control("frozen_markers", fd.frozen_control);
            }
        }
        Err(_) => {
            rep.record("lagrangian_flow", IdentityClass::FiniteDifference, f64::INFINITY);
        }
    }

    if with_controls {
        let flip = |x: &GridFunction| -&hilbert(x);
        let b_flip = commutator_with(zt, &inv_m1, flip).zip_map(zt, |c, z| Complex64::new(c.re + 2.0 * z.re, 0.0));
        let b_proj_flip = (&ratio + &hilbert(&ratio)).re();
        rep.control("flipped_hilbert_transport_velocity", pure_rel(&b_flip, &b_proj_flip));
        let a1_flip = commutator_with(zt, &d.zt_bar_alpha, flip).map(|v| Complex64::new(1.0 - v.im, 0.0));
        rep.control(
            "flipped_hilbert_a1",
            pure_rel(&a1_flip.add_const(-1.0), &a1_quad.add_const(-1.0)),
        );
        rep.control(
            "flipped_hilbert_constraint",
            pure_rel(&zt_bar, &flip(&zt_bar)),
        );
        rep.control("flipped_hilbert_quadrature", pure_rel(&flip(&f), &quadrature::hilbert(&f)));
    }
    rep
}

/// `[A, B C^k] = [A, B] C^k + sum_i B C^{i-1} [A, C] C^{k-i}` with `A = H`,
/// `B` multiplication by `f`, `C = g d`.
fn operator_expansion(f: &GridFunction, g: &GridFunction, u: &GridFunction, k: usize) -> f64 {
    let a = |x: &GridFunction| hilbert(x);
    let b = |x: &GridFunction| f * x;
    let c = |x: &GridFunction| g * &derivative(x);
    let c_pow = |x: &GridFunction, p: usize| (0..p).fold(x.clone(), |acc, _| c(&acc));
    let ac = |x: &GridFunction| &a(&c(x)) - &c(&a(x));
    let lhs = &a(&b(&c_pow(u, k))) - &b(&c_pow(&a(u), k));
    let cku = c_pow(u, k);
    let mut rhs = &a(&b(&cku)) - &b(&a(&cku));
    for i in 1..=k {
        rhs = &rhs + &b(&c_pow(&ac(&c_pow(u, k - i)), i - 1));
    }
    rel_dist(&lhs, &rhs)
}

struct LagrangianChecks {
    identities: Vec<(&'static str, f64)>,
    frozen_control: f64,
}

/// States and marker positions at `t + j dt`, `j = -2..=2`.
fn stencil(state: &WaveState, dt: f64) -> Result<Vec<(WaveState, MarkerSet)>, crate::error::DynamicsError> {
    let guards = Guards::default();
    let m0 = MarkerSet::uniform(state.n());
    let walk = |start: WaveState| -> Result<Vec<(WaveState, MarkerSet)>, crate::error::DynamicsError> {
        let mut out = Vec::new();
        let (mut s, mut m) = (start, m0.clone());
        for _ in 0..2 {
            let (next, bs) = step_rk4_stages(&s, dt, &guards)?;
            m = advance_markers(&m, &bs, dt)?;
            s = next;
            out.push((s.clone(), m.clone()));
        }
        Ok(out)
    };
    let fwd = walk(state.clone())?;
    let bwd: Vec<_> = walk(reverse(state))?
        .into_iter()
        .map(|(s, m)| (reverse(&s), m))
        .collect();
    Ok(vec![
        bwd[1].clone(),
        bwd[0].clone(),
        (state.clone(), m0),
        fwd[0].clone(),
        fwd[1].clone(),
    ])
}

/// Fourth-order derivative in time of `field` following the markers.
fn follow(
    st: &[(WaveState, MarkerSet)],
    dt: f64,
    field: impl Fn(&WaveState) -> GridFunction,
    frozen: bool,
) -> GridFunction {
    let vals: Vec<Vec<Complex64>> = st
        .iter()
        .map(|(s, m)| {
            let m = if frozen { &st[2].1 } else { m };
            m.sample(&field(s))
        })
        .collect();
    let n = vals[0].len();
    let out = (0..n)
        .map(|j| (vals[0][j] - vals[1][j] * 8.0 + vals[3][j] * 8.0 - vals[4][j]) / (12.0 * dt))
        .collect();
    GridFunction::new(out).expect("marker count is the grid size")
}

fn lagrangian_checks(state: &WaveState, dt: f64) -> Result<LagrangianChecks, crate::error::DynamicsError> {
    let st = stencil(state, dt)?;
    let d = state.derived();
    let g_field = |s: &WaveState| s.zt() * s.p();
    let g = g_field(state);
    let dg = derivative(&g);
    let b = &d.b;
    let b_alpha = derivative(b);

    // material derivative of the velocity is the acceleration
    let mat_zt_bar = follow(&st, dt, |s| s.zt().conj(), false);
    let r_vel = rel_dist(&mat_zt_bar, &d.ztt.conj());

    // [Dt, d] g = -b_a' d g
    let mat_g = follow(&st, dt, g_field, false);
    let mat_dg = follow(&st, dt, |s| derivative(&g_field(s)), false);
    let lhs = &mat_dg - &derivative(&mat_g);
    let r_frame = rel_dist(&lhs, &rhs_frame(&b_alpha, &dg));

    // [Dt, D] f = -(D Z_t) D f, with D = (1/Z_a') d and f = Zbar_t
    let dd = |s: &WaveState, x: &GridFunction| &s.derived().inv_zalpha * &derivative(x);
    let mat_d_zt_bar = follow(&st, dt, |s| dd(s, &s.zt().conj()), false);
    let lhs = &mat_d_zt_bar - &dd(state, &mat_zt_bar);
    let rhs = -&(&dd(state, state.zt()) * &dd(state, &state.zt().conj()));
    let r_riemann = rel_dist(&lhs, &rhs);

    // [Dt, H] g = [b, H] d g
    let mat_hg = follow(&st, dt, |s| hilbert(&g_field(s)), false);
    let lhs = &mat_hg - &hilbert(&mat_g);
    let r_hilbert = rel_dist(&lhs, &commutator_h(b, &dg));

    let frozen_g = follow(&st, dt, g_field, true);
    let frozen_dg = follow(&st, dt, |s| derivative(&g_field(s)), true);
    let frozen = pure_rel(&(&frozen_dg - &derivative(&frozen_g)), &rhs_frame(&b_alpha, &dg));

    Ok(LagrangianChecks {
        identities: vec![
            ("material_derivative_of_velocity", r_vel),
            ("commutator_material_derivative_d", r_frame),
            ("commutator_material_derivative_riemann_d", r_riemann),
            ("commutator_material_derivative_hilbert", r_hilbert),
        ],
        frozen_control: frozen,
    })
}

fn rhs_frame(b_alpha: &GridFunction, dg: &GridFunction) -> GridFunction {
    -&(b_alpha * dg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_state_has_zero_residuals() {
        let rep = identity_battery_on(&WaveState::flat(64), 1, false);
        for (name, r) in &rep.identities {
            assert!(r.residual < 1e-13, "{name}: {:e}", r.residual);
        }
        assert!(rep.negative_controls.is_empty());
    }

    #[test]
    fn random_state_battery_passes() {
        let rep = run_identity_battery(128, 7);
        for (name, r) in &rep.identities {
            assert!(r.passed, "{name}: {:e}", r.residual);
        }
        for (name, c) in &rep.negative_controls {
            assert!(c.failed_as_expected, "{name}: {:e}", c.residual);
        }
        assert!(rep.passed());
        assert_eq!(rep.covered_by_composite.len(), COVERED_BY_COMPOSITE.len());
    }

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&run_identity_battery(64, 3)).unwrap();
        let b = serde_json::to_string(&run_identity_battery(64, 3)).unwrap();
        assert_eq!(a, b);
    }
}
