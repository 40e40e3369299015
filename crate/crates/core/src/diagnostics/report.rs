use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{compute_at_over_a, Guards, WaveState};
use crate::error::DiagnosticsError;
use crate::spectral::{derivative, hilbert, holo_residual, GridFunction, I};

use super::energies::{
    energy_cal_e_terms, energy_ea_terms, energy_eb_terms, energy_ek, EnergyOptions, Kinematics,
};
use super::geometry::{chord_arc_delta, taylor_sign};

pub const CSV_HEADER: [&str; 12] = [
    "t",
    "Ea",
    "Eb",
    "frakE",
    "calE",
    "E2",
    "E3",
    "taylor_min",
    "chord_arc_delta",
    "holo_Zt",
    "holo_Za",
    "at_over_a_sup",
];

/// Quantities controlled by `frakE`, appended to every CSV row in this order.
pub const PANEL_COLUMNS: [&str; 18] = [
    "D2_Ztt_bar_L2",
    "D2_Zt_bar_L2",
    "Ztt_bar_alpha_L2",
    "Zt_bar_alpha_L2",
    "D_Ztt_bar_Linf",
    "D_Zt_bar_Linf",
    "inv_Zalpha_Linf",
    "Ztt_plus_i_Linf",
    "A1_Linf",
    "d_inv_Zalpha_L2",
    "D_inv_Zalpha_Linf",
    "Ztt_d_inv_Zalpha_Linf",
    "b_alpha_Linf",
    "at_over_a_Linf",
    "I_plus_H_D_Zt_Linf",
    "D_b_alpha_L2",
    "A1_min",
    "Zt_mean_abs",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub ea: f64,
    pub eb: f64,
    pub frak_e: f64,
    pub cal_e: f64,
    /// NaN when the state is too rough for the higher energies
    pub e2: f64,
    pub e3: f64,
    pub taylor_min: f64,
    pub chord_arc_delta: f64,
    pub self_intersection: bool,
    pub holo_zt: f64,
    pub holo_za: f64,
    pub at_over_a_sup: f64,
    pub under_resolved: bool,
    pub ea_terms: [f64; 3],
    pub eb_terms: [f64; 3],
    pub cal_e_terms: [f64; 7],
    /// values for [`PANEL_COLUMNS`]
    pub panel: Vec<f64>,
}

impl EnergyReport {
    pub fn is_finite(&self) -> bool {
        let mut core = vec![
            self.t,
            self.ea,
            self.eb,
            self.frak_e,
            self.cal_e,
            self.taylor_min,
            self.chord_arc_delta,
            self.holo_zt,
            self.holo_za,
            self.at_over_a_sup,
        ];
        if !self.under_resolved {
            core.extend([self.e2, self.e3]);
        }
        core.iter().chain(&self.panel).all(|v| v.is_finite())
    }

    pub fn csv_header() -> String {
        CSV_HEADER
            .iter()
            .chain(PANEL_COLUMNS.iter())
            .copied()
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.ea,
            self.eb,
            self.frak_e,
            self.cal_e,
            self.e2,
            self.e3,
            self.taylor_min,
            self.chord_arc_delta,
            self.holo_zt,
            self.holo_za,
            self.at_over_a_sup,
        ]
        .iter()
        .chain(&self.panel)
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn panel_value(&self, name: &str) -> Option<f64> {
        PANEL_COLUMNS
            .iter()
            .position(|c| *c == name)
            .and_then(|i| self.panel.get(i).copied())
    }
}

fn panel(k: &Kinematics, state: &WaveState, at: &GridFunction) -> Vec<f64> {
    let d = &k.derived;
    let inv = &d.inv_zalpha;
    let dd = |f: &GridFunction| inv * &derivative(f);
    let ztt_bar = k.ztt_bar();
    let d_inv = derivative(inv);
    let b_alpha = derivative(&d.b);
    let ztt_i = d.ztt.add_const(I);
    let d_zt = dd(state.zt());
    let i_plus_h = &d_zt + &hilbert(&d_zt);
    vec![
        dd(&dd(&ztt_bar)).norm_l2(),
        k.d2.norm_l2(),
        derivative(&ztt_bar).norm_l2(),
        d.zt_bar_alpha.norm_l2(),
        dd(&ztt_bar).norm_linf(),
        k.d1.norm_linf(),
        inv.norm_linf(),
        ztt_i.norm_linf(),
        d.a1.norm_linf(),
        d_inv.norm_l2(),
        (inv * &d_inv).norm_linf(),
        (&ztt_i * &d_inv).norm_linf(),
        b_alpha.norm_linf(),
        at.norm_linf(),
        i_plus_h.norm_linf(),
        dd(&b_alpha).norm_l2(),
        d.a1.min_re(),
        state.zt().mean().norm(),
    ]
}

/// Evaluates every diagnostic on one state.
pub fn compute_report(
    state: &WaveState,
    guards: &Guards,
    opts: &EnergyOptions,
) -> Result<EnergyReport, DiagnosticsError> {
    let k = Kinematics::new(state, guards)?;
    let ea_terms = energy_ea_terms(&k);
    let eb_terms = energy_eb_terms(&k, opts);
    let cal_e_terms = energy_cal_e_terms(&k);
    let ea: f64 = ea_terms.iter().sum();
    let eb: f64 = eb_terms.iter().sum();
    let frak_e = ea + eb + k.ztt_bar().add_const(-I).norm_linf();
    let (e2, e3, under_resolved) = match (energy_ek(&k, 2, opts), energy_ek(&k, 3, opts)) {
        (Ok(a), Ok(b)) => (a, b, false),
        (Err(DiagnosticsError::UnderResolved { .. }), _)
        | (_, Err(DiagnosticsError::UnderResolved { .. })) => (f64::NAN, f64::NAN, true),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let chord = chord_arc_delta(state);
    let at = compute_at_over_a(state.zt(), &k.derived);
    let d = &k.derived;
    Ok(EnergyReport {
        t: state.t,
        ea,
        eb,
        frak_e,
        cal_e: cal_e_terms.iter().sum(),
        e2,
        e3,
        taylor_min: taylor_sign(state).min_re(),
        chord_arc_delta: chord.delta,
        self_intersection: chord.self_intersection,
        holo_zt: holo_residual(&d.zt_bar),
        holo_za: holo_residual(&d.zalpha.add_const(Complex64::new(-1.0, 0.0))),
        at_over_a_sup: at.norm_linf(),
        under_resolved,
        ea_terms,
        eb_terms,
        cal_e_terms,
        panel: panel(&k, state, &at),
    })
}
