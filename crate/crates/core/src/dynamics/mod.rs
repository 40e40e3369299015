//! The evolved boundary system in the Riemann-mapping frame: derived
//! quantities `b`, `A1`, `Z_tt`, `a_t/a`, the right-hand side, RK4 stepping,
//! filtering and Lagrangian markers.

mod filter;
mod integrate;
mod markers;
mod rhs;
mod state;

pub use filter::{apply_filter, FilterConfig};
pub use integrate::{advance, integrate_to, reverse, step_rk4, step_rk4_stages, DtPolicy};
pub use markers::{advance_markers, MarkerSet};
pub use rhs::{rhs, Rhs};
pub use state::{
    compute_a1, compute_at_over_a, compute_b, compute_ztt, compute_ztt_via_cal_a, Derived, Guards,
    WaveState,
};

#[cfg(test)]
mod tests;
