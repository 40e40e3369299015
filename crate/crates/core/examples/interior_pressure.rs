//! Interior fields below a travelling wave: pressure profile, Euler and
//! Laplacian residuals per height.

use waterwave::dynamics::{rhs, Guards};
use waterwave::initial::make_smooth_wave;
use waterwave::interior::{euler_residual, laplacian_residual, InteriorOptions, InteriorSlice};

fn main() {
    let state = make_smooth_wave(512, 0.05, 2, 1.0).expect("valid data").to_state();
    let opts = InteriorOptions::default();
    let guards = Guards::default();
    let r = rhs(&state, &guards).expect("admissible");
    let heights = [-0.1, -0.2, -0.5, -1.0];
    let euler = euler_residual(&state, &heights, &guards, &opts).expect("holomorphic traces");
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "y", "min p", "max p", "euler", "laplacian");
    for (y, e) in euler.per_height {
        let s = InteriorSlice::new(&state, &r, y, &opts).expect("holomorphic traces");
        let lap = laplacian_residual(&state, y, &opts).expect("holomorphic traces");
        println!(
            "{:>6.2} {:>12.6} {:>12.6} {:>12.3e} {:>12.3e}",
            y,
            s.pressure.min_re(),
            s.pressure.max_re(),
            e,
            lap
        );
    }
}
