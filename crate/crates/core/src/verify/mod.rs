//! Identity and inequality batteries.

mod identities;
mod inequalities;

pub use identities::{
    identity_battery_on, random_admissible_state, rel_dist, run_identity_battery, ControlResult, IdentityClass,
    IdentityReport, IdentityResult, CONTROL_FLOOR, COVERED_BY_COMPOSITE, ORACLE_TOL, SPECTRAL_TOL,
};
pub use inequalities::{
    constant_input_lhs, run_inequality_battery, stored_baseline, trial_ratios, trial_seed, InequalityEntry,
    InequalityReport, ARTIFACT_BOUND, INEQUALITIES, MIN_TRIALS, SOBOLEV_BOUND,
};
