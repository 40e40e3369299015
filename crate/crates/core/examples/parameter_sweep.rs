//! Cartesian sweep over amplitude and mode, written to a scratch directory.

use waterwave::harness::{sweep, Ini};

const BASE: &str = "
[grid]
n = 128
[time]
T = 0.5
cfl = 0.5
report_every = 0.1
[data]
family = smooth_wave
[sweep]
data.a = 0.02, 0.05
data.m = 1, 2
";

fn main() {
    let out = std::env::temp_dir().join("waterwave_sweep_example");
    let ini = Ini::parse(BASE).expect("valid grammar");
    let res = sweep(&ini, &out, 2).expect("sweep runs");
    print!("{}", res.summary_csv());
    println!("cells written under {}", out.display());
}
