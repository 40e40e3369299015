//! Near-crest data at decreasing mollification depth: the Taylor sign
//! degenerates at the crest as the depth shrinks, and short runs stay simple.

use waterwave::diagnostics::{chord_arc_delta, taylor_sign};
use waterwave::dynamics::FilterConfig;
use waterwave::initial::{make_near_crest, mollify};
use waterwave::trajectory::{run, RunOptions};

fn main() {
    let n = 2048;
    let raw = make_near_crest(n, 0.4, 0.99, 0.0).expect("valid data");
    let opts = RunOptions {
        t_end: 0.25,
        report_every: 0.05,
        filter: FilterConfig {
            project: true,
            ..FilterConfig::default()
        },
        ..RunOptions::default()
    };
    println!("{:>8} {:>12} {:>10} {:>12} {:>10}", "eps", "taylor_min", "chord_arc", "frakE(0)", "growth");
    for eps in [0.2, 0.1, 0.05, 0.025] {
        let s = mollify(&raw, eps).expect("eps > 0").to_state();
        let tr = run(&s, &opts);
        println!(
            "{:>8.3} {:>12.6} {:>10.6} {:>12.4} {:>10.4}  {}",
            eps,
            taylor_sign(&s).min_re(),
            chord_arc_delta(&s).delta,
            tr.reports[0].frak_e,
            tr.frak_e_growth(),
            tr.termination.as_string()
        );
    }
}
