//! Time integration with diagnostics at a fixed report cadence.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{blowup_monitor, compute_report, Decision, EnergyOptions, EnergyReport, MonitorPolicy, StopReason};
use crate::dynamics::{advance, DtPolicy, FilterConfig, Guards, MarkerSet, WaveState};
use crate::error::{DiagnosticsError, DynamicsError};
use crate::spectral::derivative;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub dt: DtPolicy,
    pub report_every: f64,
    pub guards: Guards,
    pub filter: FilterConfig,
    pub energy: EnergyOptions,
    pub monitor: MonitorPolicy,
    /// number of Lagrangian markers, if any
    pub markers: Option<usize>,
    pub keep_snapshots: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt: DtPolicy::Cfl(0.5),
            report_every: 0.1,
            guards: Guards::default(),
            filter: FilterConfig::default(),
            energy: EnergyOptions::default(),
            monitor: MonitorPolicy::default(),
            markers: None,
            keep_snapshots: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowupMonitor(StopReason),
    JacobianGuard,
    A1Violation,
    SelfIntersection,
    NonFinite,
    MarkerCollision,
}

impl Termination {
    pub fn as_string(&self) -> String {
        match self {
            Termination::Completed => "completed".into(),
            Termination::BlowupMonitor(r) => format!("blowup_monitor:{}", r.as_str()),
            Termination::JacobianGuard => "jacobian_guard".into(),
            Termination::A1Violation => "a1_violation".into(),
            Termination::SelfIntersection => "self_intersection".into(),
            Termination::NonFinite => "non_finite".into(),
            Termination::MarkerCollision => "marker_collision".into(),
        }
    }

    pub fn is_completed(&self) -> bool {
        *self == Termination::Completed
    }

    fn from_dynamics(e: &DynamicsError) -> Self {
        match e {
            DynamicsError::Jacobian { .. } => Termination::JacobianGuard,
            DynamicsError::A1Violation { .. } => Termination::A1Violation,
            DynamicsError::MarkerCollision(_) => Termination::MarkerCollision,
            DynamicsError::NonFinite(_) | DynamicsError::BadStep(_) | DynamicsError::Grid(_) => Termination::NonFinite,
        }
    }

    fn from_diagnostics(e: &DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Dynamics(d) => Self::from_dynamics(d),
            DiagnosticsError::UnderResolved { .. } => Termination::BlowupMonitor(StopReason::UnderResolved),
            DiagnosticsError::Holomorphicity { .. } => Termination::NonFinite,
        }
    }

    fn from_stop(r: StopReason) -> Self {
        match r {
            StopReason::SelfIntersection => Termination::SelfIntersection,
            StopReason::NonFinite => Termination::NonFinite,
            other => Termination::BlowupMonitor(other),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub reports: Vec<EnergyReport>,
    pub termination: Termination,
    pub steps: usize,
    pub final_state: WaveState,
    /// states at report times, when requested
    pub snapshots: Vec<WaveState>,
    pub markers: Option<MarkerSet>,
    /// smallest `min A1` over every accepted step
    pub min_a1: f64,
    /// `int_0^t ||b_a'||_inf ds` along the accepted steps
    pub b_alpha_integral: f64,
}

impl Trajectory {
    pub fn frak_e_growth(&self) -> f64 {
        let e0 = self.reports.first().map_or(f64::NAN, |r| r.frak_e);
        self.reports.iter().map(|r| r.frak_e / e0).fold(0.0, f64::max)
    }

    /// Discrete marker stretch lies in `[e^{-I}, e^{I}]` widened by `slack`.
    pub fn marker_envelope_ok(&self, slack: f64) -> Option<bool> {
        let m = self.markers.as_ref()?;
        let bound = self.b_alpha_integral.exp();
        Some(
            m.stretch()
                .iter()
                .all(|&s| s <= bound * (1.0 + slack) && s >= (1.0 - slack) / bound),
        )
    }
}

pub fn run(initial: &WaveState, opts: &RunOptions) -> Trajectory {
    run_with(initial, opts, |_, _| {})
}

/// Integrates to `t_end`, calling `on_report` after every report.
pub fn run_with(
    initial: &WaveState,
    opts: &RunOptions,
    mut on_report: impl FnMut(&WaveState, &EnergyReport),
) -> Trajectory {
    let mut state = initial.clone();
    let mut markers = opts.markers.map(MarkerSet::uniform);
    let mut traj = Trajectory {
        reports: Vec::new(),
        termination: Termination::Completed,
        steps: 0,
        final_state: state.clone(),
        snapshots: Vec::new(),
        markers: None,
        min_a1: f64::INFINITY,
        b_alpha_integral: 0.0,
    };
    let t0 = state.t;
    let t_end = t0 + opts.t_end;
    let mut frak_e0 = f64::NAN;
    let mut k_report = 0usize;

    let termination = loop {
        let t_report = (t0 + k_report as f64 * opts.report_every).min(t_end);
        if state.t >= t_report - 1e-12 {
            match compute_report(&state, &opts.guards, &opts.energy) {
                Ok(report) => {
                    if k_report == 0 {
                        frak_e0 = report.frak_e;
                    }
                    on_report(&state, &report);
                    let decision = blowup_monitor(&report, frak_e0, &opts.monitor);
                    traj.reports.push(report);
                    if opts.keep_snapshots {
                        traj.snapshots.push(state.clone());
                    }
                    if let Decision::Stop(reason) = decision {
                        break Termination::from_stop(reason);
                    }
                }
                Err(e) => break Termination::from_diagnostics(&e),
            }
            if state.t >= t_end - 1e-12 {
                break Termination::Completed;
            }
            k_report += 1;
            continue;
        }
        let dt = opts.dt.dt(&state).min(t_report - state.t);
        let b_alpha = derivative(&state.derived().b).norm_linf();
        match advance(&state, markers.as_ref(), dt, &opts.guards, &opts.filter) {
            Ok((next, moved)) => {
                traj.steps += 1;
                traj.b_alpha_integral += dt * 0.5 * (b_alpha + derivative(&next.derived().b).norm_linf());
                let mut next = next;
                if t_report - next.t < 1e-12 {
                    next.t = t_report;
                }
                if let Err(e) = next.checked(&opts.guards) {
                    state = next;
                    break Termination::from_dynamics(&e);
                }
                traj.min_a1 = traj.min_a1.min(next.derived().min_a1());
                state = next;
                markers = moved;
            }
            Err(e) => break Termination::from_dynamics(&e),
        }
    };
    traj.termination = termination;
    traj.final_state = state;
    traj.markers = markers;
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{make_flat, make_smooth_wave};

    #[test]
    fn flat_run_is_stationary() {
        let s = make_flat(64).unwrap().to_state();
        let opts = RunOptions {
            t_end: 1.0,
            report_every: 0.25,
            ..RunOptions::default()
        };
        let t = run(&s, &opts);
        assert!(t.termination.is_completed());
        assert_eq!(t.reports.len(), 5);
        assert!(t.final_state.p().norm_linf() < 1e-15);
        assert!((t.final_state.t - 1.0).abs() < 1e-12);
        for r in &t.reports {
            assert_eq!(r.ea, 0.0);
            assert!((r.frak_e - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reports_land_on_cadence() {
        let s = make_smooth_wave(64, 0.05, 1, 1.0).unwrap().to_state();
        let opts = RunOptions {
            t_end: 0.5,
            report_every: 0.1,
            dt: DtPolicy::Fixed(0.03),
            ..RunOptions::default()
        };
        let t = run(&s, &opts);
        assert!(t.termination.is_completed());
        let times: Vec<f64> = t.reports.iter().map(|r| r.t).collect();
        for (k, tk) in times.iter().enumerate() {
            assert!((tk - 0.1 * k as f64).abs() < 1e-12, "{times:?}");
        }
        assert_eq!(times.len(), 6);
        assert!(t.min_a1 >= 1.0 - 1e-10);
    }

    #[test]
    fn markers_obey_stretch_envelope() {
        let s = make_smooth_wave(128, 0.05, 2, 1.0).unwrap().to_state();
        let opts = RunOptions {
            t_end: 0.5,
            report_every: 0.25,
            markers: Some(32),
            ..RunOptions::default()
        };
        let t = run(&s, &opts);
        assert!(t.termination.is_completed());
        assert_eq!(t.marker_envelope_ok(0.1), Some(true));
    }

    #[test]
    fn monitor_stops_run() {
        let s = make_smooth_wave(64, 0.05, 1, 1.0).unwrap().to_state();
        let opts = RunOptions {
            t_end: 0.5,
            report_every: 0.1,
            monitor: MonitorPolicy {
                taylor_floor: 2.0,
                ..MonitorPolicy::default()
            },
            ..RunOptions::default()
        };
        let t = run(&s, &opts);
        assert_eq!(t.termination, Termination::BlowupMonitor(StopReason::TaylorFloor));
        assert_eq!(t.reports.len(), 1);
        assert_eq!(t.termination.as_string(), "blowup_monitor:taylor_floor");
    }

    #[test]
    fn deterministic() {
        let s = make_smooth_wave(64, 0.05, 1, 1.0).unwrap().to_state();
        let opts = RunOptions {
            t_end: 0.3,
            ..RunOptions::default()
        };
        let (a, b) = (run(&s, &opts), run(&s, &opts));
        let rows = |t: &Trajectory| t.reports.iter().map(|r| r.csv_row()).collect::<Vec<_>>();
        assert_eq!(rows(&a), rows(&b));
    }
}
