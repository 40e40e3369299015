//! Energies, geometric monitors and the per-step report.

mod energies;
mod geometry;
mod monitor;
mod report;

pub use energies::{
    at_over_a_sup, energy_cal_e, energy_cal_e_terms, energy_ea, energy_ea_terms, energy_eb,
    energy_eb_terms, energy_ek, energy_etheta, energy_frak_e, hhalf_pairing, weighted_l2_sq,
    EnergyOptions, Kinematics,
};
pub use geometry::{chord_arc_delta, chord_arc_of, polyline_self_intersects, taylor_sign, ChordArc};
pub use monitor::{blowup_monitor, Decision, MonitorPolicy, StopReason};
pub use report::{compute_report, EnergyReport, CSV_HEADER, PANEL_COLUMNS};

#[cfg(test)]
mod tests;
