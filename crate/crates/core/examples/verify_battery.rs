//! Identity and inequality batteries as JSON.
//!
//! `cargo run --release --example verify_battery [-- N TRIALS SEED [BASELINE_OUT]]`

use waterwave::verify::{run_identity_battery, run_inequality_battery};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: u64| args.get(i).map_or(d, |s| s.parse().expect("integer argument"));
    let (n, trials, seed) = (arg(0, 128) as usize, arg(1, 100) as usize, arg(2, 1));

    let ids = run_identity_battery(n.max(64), seed);
    println!("{}", serde_json::to_string_pretty(&ids).unwrap());
    let ineq = run_inequality_battery(n, trials, seed);
    println!("{}", serde_json::to_string_pretty(&ineq).unwrap());
    println!("identities pass: {}, controls fail: {}", ids.identities_pass(), ids.controls_fail());
    if let Some(path) = args.get(3) {
        std::fs::write(path, serde_json::to_string_pretty(&ineq).unwrap() + "\n").unwrap();
        eprintln!("baseline written to {path}");
    }
}
