use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConfigError, Ini, Origin, SimConfig};
use crate::diagnostics::EnergyReport;
use crate::dynamics::WaveState;
use crate::error::{DataError, InteriorError};
use crate::initial::{make_flat, make_near_crest, make_smooth_wave, mollify, Family, InitialData};
use crate::interior::{euler_residual, laplacian_residual};
use crate::spectral::node;
use crate::trajectory::{run, run_with, Termination, Trajectory};
use crate::verify::{run_identity_battery, run_inequality_battery, stored_baseline, IdentityReport, InequalityReport};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("initial data: {0}")]
    Data(#[from] DataError),
    #[error("interior fields: {0}")]
    Interior(#[from] InteriorError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Data(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Constructs and validates the configured initial data.
pub fn build_initial(config: &SimConfig) -> Result<InitialData, DataError> {
    let data = match config.family {
        Family::Flat => make_flat(config.n)?,
        Family::SmoothWave { a, m, velocity_scale } => make_smooth_wave(config.n, a, m, velocity_scale)?,
        Family::NearCrest { r, q, velocity_scale } => make_near_crest(config.n, r, q, velocity_scale)?,
    };
    if config.epsilon > 0.0 {
        mollify(&data, config.epsilon)
    } else {
        Ok(data)
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: SimConfig,
    pub hash: String,
    pub initial: InitialData,
    pub trajectory: Trajectory,
    pub wall_clock: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub family: &'static str,
    pub n: usize,
    pub epsilon: f64,
    pub termination: String,
    pub steps: usize,
    pub reports: usize,
    pub final_t: f64,
    pub frak_e0: f64,
    pub frak_e_growth: f64,
    pub min_a1: f64,
    pub min_taylor: f64,
    pub min_chord_arc: f64,
    pub wall_clock_s: f64,
}

impl RunRecord {
    pub fn summary(&self) -> RunSummary {
        let t = &self.trajectory;
        let fold_min = |f: fn(&EnergyReport) -> f64| t.reports.iter().map(f).fold(f64::INFINITY, f64::min);
        RunSummary {
            config_hash: self.hash.clone(),
            family: self.config.family.name(),
            n: self.config.n,
            epsilon: self.config.epsilon,
            termination: t.termination.as_string(),
            steps: t.steps,
            reports: t.reports.len(),
            final_t: t.final_state.t,
            frak_e0: t.reports.first().map_or(f64::NAN, |r| r.frak_e),
            frak_e_growth: t.frak_e_growth(),
            min_a1: t.min_a1,
            min_taylor: fold_min(|r| r.taylor_min),
            min_chord_arc: fold_min(|r| r.chord_arc_delta),
            wall_clock_s: self.wall_clock.as_secs_f64(),
        }
    }

    pub fn energy_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&EnergyReport::csv_header());
        s.push('\n');
        for r in &self.trajectory.reports {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }

    /// Writes the run directory: config snapshot, CSVs, summary and
    /// termination reason.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        create_dir(dir)?;
        write_file(&dir.join("config.ini"), self.config.to_ini())?;
        write_file(&dir.join("energy.csv"), self.energy_csv())?;
        write_file(&dir.join("summary.json"), to_json(&self.summary()))?;
        write_file(&dir.join("termination.txt"), self.trajectory.termination.as_string() + "\n")?;
        let path = dir.join("initial.csv");
        let f = fs::File::create(&path).map_err(io_err(&path))?;
        self.initial.write_csv(BufWriter::new(f)).map_err(io_err(&path))?;
        if !self.trajectory.snapshots.is_empty() {
            let path = dir.join("interface.csv");
            let f = fs::File::create(&path).map_err(io_err(&path))?;
            write_snapshots(BufWriter::new(f), &self.trajectory.snapshots).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

fn write_snapshots<W: Write>(mut w: W, snaps: &[WaveState]) -> std::io::Result<()> {
    writeln!(w, "t,alpha,Z_re,Z_im,Zt_re,Zt_im")?;
    for s in snaps {
        let z = s.z();
        let n = s.n();
        for j in 0..n {
            let (zj, vj) = (z.values()[j], s.zt().values()[j]);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t,
                node(j, n),
                zj.re,
                zj.im,
                vj.re,
                vj.im
            )?;
        }
    }
    w.flush()
}

/// Runs one trajectory without touching the file system.
pub fn run_config(config: &SimConfig) -> Result<RunRecord, HarnessError> {
    let initial = build_initial(config)?;
    let start = Instant::now();
    let trajectory = run(&initial.to_state(), &config.run_options());
    Ok(RunRecord {
        config: config.clone(),
        hash: config.hash(),
        initial,
        trajectory,
        wall_clock: start.elapsed(),
    })
}

/// Runs one trajectory and writes its directory under `config.out`.
pub fn simulate(config: &SimConfig) -> Result<RunRecord, HarnessError> {
    let rec = run_config(config)?;
    rec.write(&config.out)?;
    Ok(rec)
}

/// `sup |Z_a - Z_b|` on the finer grid, the coarser state resampled.
pub fn interface_distance(a: &WaveState, b: &WaveState) -> f64 {
    let n = a.n().max(b.n());
    a.p().resample(n).dist_linf(&b.p().resample(n))
}

/// `sup` over shared report times of `interface_distance`.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory) -> Option<f64> {
    let mut best: Option<f64> = None;
    for sa in &a.snapshots {
        if let Some(sb) = b.snapshots.iter().find(|s| (s.t - sa.t).abs() < 1e-9) {
            let d = interface_distance(sa, sb);
            best = Some(best.map_or(d, |x: f64| x.max(d)));
        }
    }
    best
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))
}

/// One grid point of a sweep.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub index: usize,
    pub params: Vec<(String, String)>,
    pub outcome: Result<RunRecord, String>,
    pub cauchy_diff: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axes: Vec<String>,
    pub cauchy_axis: Option<String>,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("cell");
        for a in &self.axes {
            s.push(',');
            s.push_str(a);
        }
        s.push_str(",termination,steps,final_t,frakE_growth,min_a1,min_chord_arc,cauchy_diff\n");
        for c in &self.cells {
            s.push_str(&format!("{}", c.index));
            for (_, v) in &c.params {
                s.push(',');
                s.push_str(v);
            }
            let cauchy = c.cauchy_diff.map_or(String::new(), |d| format!("{d:.16e}"));
            match &c.outcome {
                Ok(rec) => {
                    let sm = rec.summary();
                    s.push_str(&format!(
                        ",{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                        sm.termination, sm.steps, sm.final_t, sm.frak_e_growth, sm.min_a1, sm.min_chord_arc, cauchy
                    ));
                }
                Err(msg) => {
                    let msg = msg.replace([',', '\n'], ";");
                    s.push_str(&format!(",error: {msg},,,,,,\n"));
                }
            }
        }
        s
    }
}

fn cartesian(axes: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    if axes.is_empty() {
        return Vec::new();
    }
    let mut cells: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (field, values) in axes {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((field.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    cells
}

/// Runs every cell of the `[sweep]` grid on `workers` threads. Cells are
/// isolated: a failing cell is recorded and its siblings still run. With
/// `data.epsilon` among the axes (else the first axis), each cell's
/// `cauchy_diff` is its distance to the cell with the next value on that
/// axis and equal values elsewhere.
pub fn sweep(base: &Ini, out: &Path, workers: usize) -> Result<SweepResult, HarnessError> {
    let axes = base.sweep_axes()?;
    let mut template = base.clone();
    for (field, _) in &axes {
        template.remove(&format!("sweep.{field}"));
    }
    let grid = cartesian(&axes);
    create_dir(out)?;
    let run_cell = |i: usize, params: &[(String, String)]| -> Result<RunRecord, String> {
        let mut ini = template.clone();
        for (field, v) in params {
            ini.set(field, v, Origin::Override).map_err(|e| e.to_string())?;
        }
        ini.set("run.snapshots", "true", Origin::Override).map_err(|e| e.to_string())?;
        let dir = out.join(format!("cell_{i:03}"));
        ini.set("run.out", &dir.display().to_string(), Origin::Override)
            .map_err(|e| e.to_string())?;
        let config = SimConfig::from_ini(&ini).map_err(|e| e.to_string())?;
        let rec = std::panic::catch_unwind(|| simulate(&config))
            .map_err(|_| "panicked".to_string())?
            .map_err(|e| e.to_string())?;
        Ok(rec)
    };
    let outcomes: Vec<Result<RunRecord, String>> = pool(workers)?.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, params)| run_cell(i, params))
            .collect()
    });
    let axis_names: Vec<String> = axes.iter().map(|a| a.0.clone()).collect();
    let cauchy_axis = if axis_names.iter().any(|a| a == "data.epsilon") {
        Some("data.epsilon".to_string())
    } else {
        axis_names.first().cloned()
    };
    let mut cells: Vec<SweepCell> = grid
        .into_iter()
        .zip(outcomes)
        .enumerate()
        .map(|(index, (params, outcome))| SweepCell {
            index,
            params,
            outcome,
            cauchy_diff: None,
        })
        .collect();
    if let Some(axis) = &cauchy_axis {
        let pos = axis_names.iter().position(|a| a == axis).expect("axis present");
        let values = &axes[pos].1;
        for i in 0..cells.len() {
            let Some(k) = values.iter().position(|v| *v == cells[i].params[pos].1) else {
                continue;
            };
            let Some(next) = values.get(k + 1) else {
                continue;
            };
            let partner = cells.iter().position(|c| {
                c.params
                    .iter()
                    .enumerate()
                    .all(|(j, (_, v))| if j == pos { v == next } else { *v == cells[i].params[j].1 })
            });
            if let Some(p) = partner {
                if let (Ok(a), Ok(b)) = (&cells[i].outcome, &cells[p].outcome) {
                    cells[i].cauchy_diff = trajectory_distance(&a.trajectory, &b.trajectory);
                }
            }
        }
    }
    let result = SweepResult {
        axes: axis_names,
        cauchy_axis,
        cells,
    };
    write_file(&out.join("summary.csv"), result.summary_csv())?;
    Ok(result)
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub epsilon: f64,
    /// `sup_t sup |Z^eps - Z^{eps/2}|`
    pub d_eps: f64,
    /// `d_eps / d_{previous eps}`
    pub ratio: Option<f64>,
    pub chord_arc_initial: f64,
    pub chord_arc_min: f64,
    pub chord_arc_ok: bool,
    pub termination: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyTable {
    pub t_end: f64,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.iter().all(|r| r.d_eps.is_finite())
            && self.rows.windows(2).all(|w| w[1].d_eps < w[0].d_eps)
    }

    pub fn chord_arc_ok(&self) -> bool {
        self.rows.iter().all(|r| r.chord_arc_ok)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("epsilon,d_eps,ratio,chord_arc_initial,chord_arc_min,chord_arc_ok,termination\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{},{}\n",
                r.epsilon,
                r.d_eps,
                r.ratio.map_or(String::new(), |x| format!("{x:.16e}")),
                r.chord_arc_initial,
                r.chord_arc_min,
                r.chord_arc_ok,
                r.termination
            ));
        }
        s
    }
}

/// Runs the configured data at every `eps` in `study.epsilons` and at
/// `eps/2`, tabulating the Cauchy differences and the chord-arc margin.
pub fn mollify_study(config: &SimConfig, workers: usize) -> Result<StudyTable, HarnessError> {
    let mut levels: Vec<f64> = Vec::new();
    for &e in &config.study_epsilons {
        for x in [e, 0.5 * e] {
            if !levels.iter().any(|l| (l - x).abs() <= 1e-12 * x) {
                levels.push(x);
            }
        }
    }
    let runs: Vec<Result<RunRecord, HarnessError>> = pool(workers)?.install(|| {
        levels
            .par_iter()
            .map(|&eps| {
                let mut c = config.clone();
                c.epsilon = eps;
                c.snapshots = true;
                c.out = config.out.join(format!("eps_{eps}"));
                simulate(&c)
            })
            .collect()
    });
    let runs: Vec<RunRecord> = runs.into_iter().collect::<Result<_, _>>()?;
    let find = |x: f64| {
        levels
            .iter()
            .position(|l| (l - x).abs() <= 1e-12 * x)
            .map(|i| &runs[i])
            .expect("level scheduled")
    };
    let mut rows: Vec<StudyRow> = Vec::new();
    for &e in &config.study_epsilons {
        let (a, b) = (find(e), find(0.5 * e));
        let d_eps = trajectory_distance(&a.trajectory, &b.trajectory).unwrap_or(f64::NAN);
        let deltas: Vec<f64> = a.trajectory.reports.iter().map(|r| r.chord_arc_delta).collect();
        let chord_arc_initial = deltas.first().copied().unwrap_or(f64::NAN);
        let chord_arc_min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let termination = if a.trajectory.termination.is_completed() && b.trajectory.termination.is_completed() {
            Termination::Completed.as_string()
        } else {
            format!("{}/{}", a.trajectory.termination.as_string(), b.trajectory.termination.as_string())
        };
        rows.push(StudyRow {
            epsilon: e,
            d_eps,
            ratio: rows.last().map(|p| d_eps / p.d_eps),
            chord_arc_initial,
            chord_arc_min,
            chord_arc_ok: chord_arc_min >= 0.5 * chord_arc_initial,
            termination,
        });
    }
    let table = StudyTable {
        t_end: config.t_end,
        rows,
    };
    create_dir(&config.out)?;
    write_file(&config.out.join("mollify_table.csv"), table.csv())?;
    write_file(&config.out.join("mollify_study.json"), to_json(&table))?;
    Ok(table)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub identities: IdentityReport,
    pub inequalities: InequalityReport,
    /// inequalities above 1.2x the stored baseline; `None` when the baseline
    /// was taken at another grid size
    pub regressions: Option<Vec<String>>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.identities.passed()
            && self.inequalities.within_bounds()
            && self.regressions.as_ref().is_none_or(|r| r.is_empty())
    }
}

/// Identity battery at `verify.n`, inequality battery at
/// `verify.inequality_n`, both seeded by `run.seed`.
pub fn verify(config: &SimConfig) -> Result<VerifyOutcome, HarnessError> {
    let identities = run_identity_battery(config.verify_n, config.seed);
    let inequalities = run_inequality_battery(config.inequality_n, config.verify_trials, config.seed);
    let baseline = stored_baseline();
    let regressions = (baseline.n == inequalities.n).then(|| inequalities.regressions(&baseline, 1.2));
    let outcome = VerifyOutcome {
        identities,
        inequalities,
        regressions,
    };
    create_dir(&config.out)?;
    write_file(&config.out.join("identities.json"), to_json(&outcome.identities))?;
    write_file(&config.out.join("inequalities.json"), to_json(&outcome.inequalities))?;
    Ok(outcome)
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerRow {
    pub t: f64,
    pub y: f64,
    pub euler_residual: f64,
    pub laplacian_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerTable {
    pub rows: Vec<EulerRow>,
    pub termination: String,
}

impl EulerTable {
    pub fn max_euler(&self) -> f64 {
        self.rows.iter().map(|r| r.euler_residual).fold(0.0, f64::max)
    }

    pub fn max_laplacian(&self) -> f64 {
        self.rows.iter().map(|r| r.laplacian_residual).fold(0.0, f64::max)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("t,y,euler_residual,laplacian_residual\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.t, r.y, r.euler_residual, r.laplacian_residual
            ));
        }
        s
    }
}

/// Interior Euler and Laplacian residuals at `interior.heights` after every
/// report step of the configured run.
pub fn euler_check(config: &SimConfig) -> Result<EulerTable, HarnessError> {
    let initial = build_initial(config)?;
    let mut rows = Vec::new();
    let mut failure: Option<InteriorError> = None;
    let traj = run_with(&initial.to_state(), &config.run_options(), |state, _| {
        if failure.is_some() {
            return;
        }
        let step = || -> Result<Vec<EulerRow>, InteriorError> {
            let e = euler_residual(state, &config.heights, &config.guards, &config.interior)?;
            e.per_height
                .iter()
                .map(|&(y, r)| {
                    Ok(EulerRow {
                        t: state.t,
                        y,
                        euler_residual: r,
                        laplacian_residual: laplacian_residual(state, y, &config.interior)?,
                    })
                })
                .collect()
        };
        match step() {
            Ok(r) => rows.extend(r),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let table = EulerTable {
        rows,
        termination: traj.termination.as_string(),
    };
    create_dir(&config.out)?;
    write_file(&config.out.join("euler.csv"), table.csv())?;
    Ok(table)
}
