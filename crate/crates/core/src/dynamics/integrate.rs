use std::f64::consts::PI;

use crate::error::DynamicsError;
use crate::spectral::GridFunction;

use super::filter::{apply_filter, FilterConfig};
use super::markers::{advance_markers, MarkerSet};
use super::rhs::{rhs, Rhs};
use super::state::{Guards, WaveState};

/// How the step size is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = c_cfl * min(1/||b||_inf, 1) * 2 pi / n`
    Cfl(f64),
}

impl DtPolicy {
    pub fn dt(&self, state: &WaveState) -> f64 {
        match *self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl(c) => {
                let bmax = state.derived().b.norm_linf();
                let speed = if bmax > 1.0 { 1.0 / bmax } else { 1.0 };
                c * speed * 2.0 * PI / state.n() as f64
            }
        }
    }
}

fn axpy(state: &WaveState, k: &Rhs, h: f64) -> WaveState {
    let p = state.p().zip_map(&k.dp, |a, b| a + b * h);
    let zt = state.zt().zip_map(&k.dzt, |a, b| a + b * h);
    WaveState::new(state.t + h, p, zt)
}

/// Classical RK4 step; also returns `b` at the four stage states for
/// marker transport.
pub fn step_rk4_stages(
    state: &WaveState,
    dt: f64,
    guards: &Guards,
) -> Result<(WaveState, [GridFunction; 4]), DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    let k1 = rhs(state, guards)?;
    let y2 = axpy(state, &k1, 0.5 * dt);
    let k2 = rhs(&y2, guards)?;
    let y3 = axpy(state, &k2, 0.5 * dt);
    let k3 = rhs(&y3, guards)?;
    let y4 = axpy(state, &k3, dt);
    let k4 = rhs(&y4, guards)?;
    let w = dt / 6.0;
    let p = GridFunction::new(
        (0..state.n())
            .map(|j| {
                state.p().values()[j]
                    + (k1.dp.values()[j]
                        + 2.0 * k2.dp.values()[j]
                        + 2.0 * k3.dp.values()[j]
                        + k4.dp.values()[j])
                        * w
            })
            .collect(),
    )?;
    let zt = GridFunction::new(
        (0..state.n())
            .map(|j| {
                state.zt().values()[j]
                    + (k1.dzt.values()[j]
                        + 2.0 * k2.dzt.values()[j]
                        + 2.0 * k3.dzt.values()[j]
                        + k4.dzt.values()[j])
                        * w
            })
            .collect(),
    )?;
    let next = WaveState::new(state.t + dt, p, zt);
    if !next.is_finite() {
        return Err(DynamicsError::NonFinite("state"));
    }
    let bs = [
        state.derived().b.clone(),
        y2.derived().b.clone(),
        y3.derived().b.clone(),
        y4.derived().b.clone(),
    ];
    Ok((next, bs))
}

pub fn step_rk4(state: &WaveState, dt: f64, guards: &Guards) -> Result<WaveState, DynamicsError> {
    step_rk4_stages(state, dt, guards).map(|(s, _)| s)
}

/// One accepted step: RK4, then the filter; markers ride along when given.
pub fn advance(
    state: &WaveState,
    markers: Option<&MarkerSet>,
    dt: f64,
    guards: &Guards,
    filter: &FilterConfig,
) -> Result<(WaveState, Option<MarkerSet>), DynamicsError> {
    let (next, bs) = step_rk4_stages(state, dt, guards)?;
    let moved = match markers {
        Some(m) => Some(advance_markers(m, &bs, dt)?),
        None => None,
    };
    Ok((apply_filter(&next, filter), moved))
}

/// Integrates to `t_end` without diagnostics, landing exactly on `t_end`.
pub fn integrate_to(
    state: &WaveState,
    t_end: f64,
    policy: DtPolicy,
    guards: &Guards,
    filter: &FilterConfig,
) -> Result<WaveState, DynamicsError> {
    let mut s = state.clone();
    while s.t < t_end - 1e-14 {
        let dt = policy.dt(&s).min(t_end - s.t);
        s = advance(&s, None, dt, guards, filter)?.0;
    }
    Ok(s)
}

/// Time reversal: `(P, Z_t) -> (P, -Z_t)`.
pub fn reverse(state: &WaveState) -> WaveState {
    WaveState::new(state.t, state.p().clone(), -state.zt())
}
