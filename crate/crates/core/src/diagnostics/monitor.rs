use serde::{Deserialize, Serialize};

use super::report::EnergyReport;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorPolicy {
    /// stop when `frakE(t) > kappa * frakE(0)`
    pub kappa: f64,
    pub taylor_floor: f64,
    pub chord_arc_floor: f64,
}

impl Default for MonitorPolicy {
    fn default() -> Self {
        Self {
            kappa: 50.0,
            taylor_floor: 1e-8,
            chord_arc_floor: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    EnergyGrowth,
    TaylorFloor,
    ChordArcFloor,
    SelfIntersection,
    UnderResolved,
    NonFinite,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::EnergyGrowth => "energy_growth",
            StopReason::TaylorFloor => "taylor_floor",
            StopReason::ChordArcFloor => "chord_arc_floor",
            StopReason::SelfIntersection => "self_intersection",
            StopReason::UnderResolved => "under_resolved",
            StopReason::NonFinite => "non_finite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Stop(StopReason),
}

/// Compares one report against the policy and the run's initial `frakE`.
pub fn blowup_monitor(report: &EnergyReport, frak_e0: f64, policy: &MonitorPolicy) -> Decision {
    if !report.is_finite() {
        return Decision::Stop(StopReason::NonFinite);
    }
    if report.self_intersection {
        return Decision::Stop(StopReason::SelfIntersection);
    }
    if report.under_resolved {
        return Decision::Stop(StopReason::UnderResolved);
    }
    if report.frak_e > policy.kappa * frak_e0 {
        return Decision::Stop(StopReason::EnergyGrowth);
    }
    if report.taylor_min < policy.taylor_floor {
        return Decision::Stop(StopReason::TaylorFloor);
    }
    if report.chord_arc_delta < policy.chord_arc_floor {
        return Decision::Stop(StopReason::ChordArcFloor);
    }
    Decision::Continue
}
