//! Evolves a travelling wave and prints the energy history.
//!
//! Usage: evolve_smooth_wave [N] [A] [M] [T]

use waterwave::dynamics::FilterConfig;
use waterwave::initial::make_smooth_wave;
use waterwave::trajectory::{run, RunOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: f64| args.get(i).map_or(d, |s| s.parse().expect("number"));
    let n = arg(0, 256.0) as usize;
    let (a, m, t_end) = (arg(1, 0.05), arg(2, 1.0) as i64, arg(3, 1.0));

    let data = make_smooth_wave(n, a, m, 1.0).expect("valid data");
    let opts = RunOptions {
        t_end,
        filter: FilterConfig {
            project: true,
            ..FilterConfig::default()
        },
        ..RunOptions::default()
    };
    let tr = run(&data.to_state(), &opts);
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "t", "frakE", "calE", "taylor_min", "chord_arc");
    for r in &tr.reports {
        println!(
            "{:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>10.6}",
            r.t, r.frak_e, r.cal_e, r.taylor_min, r.chord_arc_delta
        );
    }
    println!(
        "{} after {} steps, growth {:.4}, min A1 {:.12}",
        tr.termination.as_string(),
        tr.steps,
        tr.frak_e_growth(),
        tr.min_a1
    );
}
