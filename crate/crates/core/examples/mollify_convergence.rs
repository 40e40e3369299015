//! Cauchy differences between mollification depths `eps` and `eps/2`.

use waterwave::harness::{mollify_study, SimConfig};

const CONFIG: &str = "
[grid]
n = 2048
[time]
T = 0.1
cfl = 0.5
report_every = 0.025
[data]
family = near_crest
r = 0.4
q = 0.99
[study]
epsilons = 0.1, 0.05, 0.025
";

fn main() {
    let out = std::env::temp_dir().join("waterwave_mollify_example");
    let config = SimConfig::from_text(CONFIG, &[format!("run.out={}", out.display())]).expect("valid config");
    let table = mollify_study(&config, 2).expect("study runs");
    print!("{}", table.csv());
    println!("strictly decreasing: {}", table.strictly_decreasing());
}
