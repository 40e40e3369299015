use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use waterwave::harness::{self, ConfigError, HarnessError, Ini, Origin, SimConfig};

#[derive(Parser)]
#[command(name = "wavesim", version, about = "Periodic 2D gravity water waves in Riemann-mapping variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory with monitors
    Simulate(Common),
    /// Run every cell of the [sweep] grid
    Sweep(Common),
    /// Cauchy differences across mollification depths
    MollifyStudy(Common),
    /// Identity and inequality batteries
    Verify(Common),
    /// Interior Euler and Laplacian residuals after each report
    EulerCheck(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = 1)]
    workers: usize,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// `section.key=value`, repeatable
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

const VERIFY_DEFAULT: &str = "[grid]\nn = 64\n[time]\nT = 1\ncfl = 0.5\n[data]\nfamily = flat\n";

impl Common {
    fn ini(&self, fallback: Option<&str>) -> Result<Ini, HarnessError> {
        let text = match (&self.config, fallback) {
            (Some(path), _) => std::fs::read_to_string(path).map_err(|e| {
                ConfigError {
                    origin: Origin::Default,
                    field: "--config".into(),
                    message: format!("{}: {e}", path.display()),
                }
            })?,
            (None, Some(text)) => text.to_string(),
            (None, None) => {
                return Err(ConfigError {
                    origin: Origin::Default,
                    field: "--config".into(),
                    message: "required".into(),
                }
                .into())
            }
        };
        let mut ini = Ini::parse(&text)?;
        for o in &self.overrides {
            ini.apply_override(o)?;
        }
        if let Some(out) = &self.out {
            ini.set("run.out", &out.display().to_string(), Origin::Override)?;
        }
        if let Some(seed) = self.seed {
            ini.set("run.seed", &seed.to_string(), Origin::Override)?;
        }
        Ok(ini)
    }

    fn config(&self, fallback: Option<&str>) -> Result<SimConfig, HarnessError> {
        Ok(SimConfig::from_ini(&self.ini(fallback)?)?)
    }
}

fn execute(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Simulate(c) => {
            let config = c.config(None)?;
            let rec = harness::simulate(&config)?;
            let s = rec.summary();
            println!(
                "{}: {} steps to t={:.6}, frakE growth {:.4}, output in {}",
                s.termination,
                s.steps,
                s.final_t,
                s.frak_e_growth,
                config.out.display()
            );
            if rec.trajectory.termination.is_completed() {
                Ok(0)
            } else {
                eprintln!("terminated: {}", s.termination);
                Ok(3)
            }
        }
        Command::Sweep(c) => {
            let ini = c.ini(None)?;
            let out = PathBuf::from(ini.get("run.out").map_or("out", |v| v.0));
            let res = harness::sweep(&ini, &out, c.workers)?;
            let failed = res.cells.iter().filter(|x| x.outcome.is_err()).count();
            println!(
                "{} cells ({} failed), summary in {}",
                res.cells.len(),
                failed,
                out.join("summary.csv").display()
            );
            Ok(0)
        }
        Command::MollifyStudy(c) => {
            let config = c.config(None)?;
            let table = harness::mollify_study(&config, c.workers)?;
            print!("{}", table.csv());
            println!(
                "d_eps strictly decreasing: {}, chord-arc margin kept: {}",
                table.strictly_decreasing(),
                table.chord_arc_ok()
            );
            Ok(0)
        }
        Command::Verify(c) => {
            let config = c.config(Some(VERIFY_DEFAULT))?;
            let v = harness::verify(&config)?;
            for (name, r) in &v.identities.identities {
                println!("{:<48} {:>10.3e}  {}", name, r.residual, if r.passed { "ok" } else { "FAIL" });
            }
            for (name, r) in &v.identities.negative_controls {
                let tag = if r.failed_as_expected { "fails (expected)" } else { "PASSES (bad control)" };
                println!("{:<48} {:>10.3e}  {}", name, r.residual, tag);
            }
            for (name, e) in &v.inequalities.ratios {
                println!("{:<48} {:>10.4}  bound {}", name, e.max_ratio, e.bound);
            }
            match &v.regressions {
                Some(r) if !r.is_empty() => println!("above 1.2x baseline: {}", r.join(", ")),
                Some(_) => println!("all ratios within 1.2x of the stored baseline"),
                None => println!("baseline comparison skipped: grid size differs from the baseline"),
            }
            println!("{}", if v.passed() { "PASS" } else { "FAIL" });
            Ok(if v.passed() { 0 } else { 1 })
        }
        Command::EulerCheck(c) => {
            let config = c.config(None)?;
            let t = harness::euler_check(&config)?;
            println!(
                "max Euler residual {:.3e}, max Laplacian residual {:.3e} over {} rows ({})",
                t.max_euler(),
                t.max_laplacian(),
                t.rows.len(),
                t.termination
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
