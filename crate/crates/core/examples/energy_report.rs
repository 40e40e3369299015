//! Every diagnostic of one state, including the panel quantities.

use waterwave::diagnostics::{compute_report, EnergyOptions, PANEL_COLUMNS};
use waterwave::dynamics::Guards;
use waterwave::initial::make_smooth_wave;

fn main() {
    let state = make_smooth_wave(256, 0.05, 1, 1.0).expect("valid data").to_state();
    let r = compute_report(&state, &Guards::default(), &EnergyOptions::default()).expect("admissible");
    println!("Ea {:.6}  Eb {:.6}  frakE {:.6}  calE {:.6}", r.ea, r.eb, r.frak_e, r.cal_e);
    println!("E2 {:.6}  E3 {:.6}  under-resolved {}", r.e2, r.e3, r.under_resolved);
    println!("taylor_min {:.6}  chord_arc {:.6}", r.taylor_min, r.chord_arc_delta);
    println!("Ea terms {:?}", r.ea_terms);
    println!("Eb terms {:?}", r.eb_terms);
    for (name, v) in PANEL_COLUMNS.iter().zip(&r.panel) {
        println!("  {name:<24} {v:.6e}");
    }
}
