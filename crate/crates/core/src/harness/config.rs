//! Line-oriented sectioned key-value configuration.
//!
//! ```text
//! # comment            ; also a comment
//! [section]
//! key = value          # trailing comments are not stripped
//! list = 0.1, 0.05     # comma-separated where a list is expected
//! ```
//!
//! Keys are addressed as `section.key`. Unknown sections or keys, duplicates
//! and malformed values are errors naming the line and the field.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::diagnostics::{EnergyOptions, MonitorPolicy};
use crate::dynamics::{DtPolicy, FilterConfig, Guards};
use crate::initial::Family;
use crate::interior::InteriorOptions;
use crate::trajectory::RunOptions;

/// Where a value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(l) => write!(f, "line {l}"),
            Origin::Override => write!(f, "--override"),
            Origin::Default => write!(f, "default"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{origin}, field `{field}`: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(origin: Origin, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            origin,
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Raw `section.key -> value` table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ini {
    entries: BTreeMap<String, (String, Origin)>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut ini = Ini::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(origin, line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError::new(origin, name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(origin, line, "expected `key = value`"))?;
            let key = key.trim();
            let sec = section
                .as_deref()
                .ok_or_else(|| ConfigError::new(origin, key, "key outside any section"))?;
            if key.is_empty() {
                return Err(ConfigError::new(origin, sec, "empty key"));
            }
            let field = format!("{sec}.{key}");
            if sec != "sweep" && !KEYS.contains(&field.as_str()) {
                return Err(ConfigError::new(origin, field, "unknown key"));
            }
            if ini.entries.contains_key(&field) {
                return Err(ConfigError::new(origin, field, "duplicate key"));
            }
            ini.entries.insert(field, (value.trim().to_string(), origin));
        }
        Ok(ini)
    }

    /// Applies `section.key=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (field, value) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError::new(Origin::Override, spec, "expected `section.key=value`"))?;
        self.set(field.trim(), value.trim(), Origin::Override)
    }

    pub fn set(&mut self, field: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if !KEYS.contains(&field) && !field.starts_with("sweep.") {
            return Err(ConfigError::new(origin, field, "unknown key"));
        }
        self.entries.insert(field.to_string(), (value.to_string(), origin));
        Ok(())
    }

    pub fn get(&self, field: &str) -> Option<(&str, Origin)> {
        self.entries.get(field).map(|(v, o)| (v.as_str(), *o))
    }

    pub fn remove(&mut self, field: &str) {
        self.entries.remove(field);
    }

    /// `sweep.*` entries as `(field, values)`, in file order of field name.
    pub fn sweep_axes(&self) -> Result<Vec<(String, Vec<String>)>, ConfigError> {
        self.entries
            .iter()
            .filter_map(|(k, (v, o))| k.strip_prefix("sweep.").map(|f| (f, v, *o)))
            .map(|(field, v, o)| {
                if !KEYS.contains(&field) {
                    return Err(ConfigError::new(o, format!("sweep.{field}"), "sweeps an unknown key"));
                }
                let values: Vec<String> = v
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                Ok((field.to_string(), values))
            })
            .collect()
    }
}

pub const SECTIONS: [&str; 12] = [
    "grid", "time", "data", "filter", "guards", "monitor", "energy", "run", "interior", "verify", "study", "sweep",
];

pub const KEYS: [&str; 33] = [
    "grid.n",
    "time.T",
    "time.dt",
    "time.cfl",
    "time.report_every",
    "data.family",
    "data.a",
    "data.m",
    "data.r",
    "data.q",
    "data.velocity_scale",
    "data.epsilon",
    "filter.dealias",
    "filter.floor",
    "filter.project",
    "guards.tol_a1",
    "guards.jacobian_min",
    "monitor.kappa",
    "monitor.taylor_floor",
    "monitor.chord_arc_floor",
    "energy.eb_last_squared",
    "energy.resolution_fraction",
    "run.seed",
    "run.out",
    "run.markers",
    "run.snapshots",
    "interior.heights",
    "interior.holo_tol",
    "interior.dy",
    "verify.n",
    "verify.trials",
    "verify.inequality_n",
    "study.epsilons",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepChoice {
    Dt(f64),
    Cfl(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub step: StepChoice,
    pub t_end: f64,
    pub report_every: f64,
    pub family: Family,
    pub epsilon: f64,
    pub filter: FilterConfig,
    pub guards: Guards,
    pub monitor: MonitorPolicy,
    pub energy: EnergyOptions,
    pub seed: u64,
    pub out: PathBuf,
    pub markers: Option<usize>,
    pub snapshots: bool,
    pub heights: Vec<f64>,
    pub interior: InteriorOptions,
    pub verify_n: usize,
    pub verify_trials: usize,
    pub inequality_n: usize,
    pub study_epsilons: Vec<f64>,
}

struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn raw(&self, field: &str) -> Option<(&str, Origin)> {
        self.ini.get(field)
    }

    fn parse<T: std::str::FromStr>(&self, field: &str, what: &str) -> Result<Option<(T, Origin)>, ConfigError> {
        match self.raw(field) {
            None => Ok(None),
            Some((v, o)) => v
                .parse::<T>()
                .map(|x| Some((x, o)))
                .map_err(|_| ConfigError::new(o, field, format!("expected {what}, got `{v}`"))),
        }
    }

    fn f64_or(&self, field: &str, default: f64) -> Result<(f64, Origin), ConfigError> {
        Ok(self.parse(field, "a number")?.unwrap_or((default, Origin::Default)))
    }

    fn positive(&self, field: &str, default: f64) -> Result<f64, ConfigError> {
        let (v, o) = self.f64_or(field, default)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(ConfigError::new(o, field, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn required_f64(&self, field: &str) -> Result<(f64, Origin), ConfigError> {
        self.parse(field, "a number")?
            .ok_or_else(|| ConfigError::new(Origin::Default, field, "required"))
    }

    fn bool_or(&self, field: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(field) {
            None => Ok(default),
            Some((v, o)) => match v {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(ConfigError::new(o, field, format!("expected a boolean, got `{v}`"))),
            },
        }
    }

    fn usize_or(&self, field: &str, default: usize) -> Result<(usize, Origin), ConfigError> {
        Ok(self
            .parse(field, "a non-negative integer")?
            .unwrap_or((default, Origin::Default)))
    }

    fn list_or(&self, field: &str, default: &[f64]) -> Result<(Vec<f64>, Origin), ConfigError> {
        match self.raw(field) {
            None => Ok((default.to_vec(), Origin::Default)),
            Some((v, o)) => v
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| ConfigError::new(o, field, format!("expected a number list, got `{s}`")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(|l| (l, o)),
        }
    }
}

impl SimConfig {
    pub fn from_text(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut ini = Ini::parse(text)?;
        for o in overrides {
            ini.apply_override(o)?;
        }
        Self::from_ini(&ini)
    }

    pub fn from_ini(ini: &Ini) -> Result<Self, ConfigError> {
        let r = Reader { ini };
        let (n, n_origin) = r
            .parse::<usize>("grid.n", "a power of two")?
            .ok_or_else(|| ConfigError::new(Origin::Default, "grid.n", "required"))?;
        if !n.is_power_of_two() || n < 16 {
            return Err(ConfigError::new(n_origin, "grid.n", format!("must be a power of two >= 16, got {n}")));
        }
        let (t_end, t_origin) = r.required_f64("time.T")?;
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(ConfigError::new(t_origin, "time.T", format!("must be positive, got {t_end}")));
        }
        let step = match (r.raw("time.dt"), r.raw("time.cfl")) {
            (Some(_), Some((_, o))) => {
                return Err(ConfigError::new(o, "time.cfl", "exactly one of time.dt and time.cfl may be set"))
            }
            (None, None) => {
                return Err(ConfigError::new(Origin::Default, "time.dt", "one of time.dt and time.cfl is required"))
            }
            (Some(_), None) => StepChoice::Dt(r.positive("time.dt", 0.0)?),
            (None, Some(_)) => StepChoice::Cfl(r.positive("time.cfl", 0.0)?),
        };
        let report_every = r.positive("time.report_every", t_end / 10.0)?;

        let (family_name, f_origin) = r
            .raw("data.family")
            .ok_or_else(|| ConfigError::new(Origin::Default, "data.family", "required"))?;
        let allowed: &[&str] = match family_name {
            "flat" => &[],
            "smooth_wave" => &["data.a", "data.m", "data.velocity_scale"],
            "near_crest" => &["data.r", "data.q", "data.velocity_scale"],
            other => {
                return Err(ConfigError::new(
                    f_origin,
                    "data.family",
                    format!("unknown family `{other}` (flat, smooth_wave, near_crest)"),
                ))
            }
        };
        for field in ["data.a", "data.m", "data.r", "data.q", "data.velocity_scale"] {
            if let Some((_, o)) = r.raw(field) {
                if !allowed.contains(&field) {
                    return Err(ConfigError::new(o, field, format!("not a parameter of family {family_name}")));
                }
            }
        }
        let family = match family_name {
            "flat" => Family::Flat,
            "smooth_wave" => Family::SmoothWave {
                a: r.required_f64("data.a")?.0,
                m: r
                    .parse::<i64>("data.m", "an integer")?
                    .ok_or_else(|| ConfigError::new(Origin::Default, "data.m", "required"))?
                    .0,
                velocity_scale: r.f64_or("data.velocity_scale", 1.0)?.0,
            },
            _ => Family::NearCrest {
                r: r.required_f64("data.r")?.0,
                q: r.required_f64("data.q")?.0,
                velocity_scale: r.f64_or("data.velocity_scale", 0.0)?.0,
            },
        };
        let (epsilon, e_origin) = r.f64_or("data.epsilon", 0.0)?;
        if !(epsilon >= 0.0) {
            return Err(ConfigError::new(e_origin, "data.epsilon", format!("must be >= 0, got {epsilon}")));
        }

        let floor = match r.raw("filter.floor") {
            None | Some(("none", _)) => None,
            Some(_) => Some(r.positive("filter.floor", 0.0)?),
        };
        let filter = FilterConfig {
            dealias: r.bool_or("filter.dealias", true)?,
            floor,
            project: r.bool_or("filter.project", true)?,
        };
        let gd = Guards::default();
        let guards = Guards {
            tol_a1: r.positive("guards.tol_a1", gd.tol_a1)?,
            jacobian_min: r.positive("guards.jacobian_min", gd.jacobian_min)?,
        };
        let md = MonitorPolicy::default();
        let monitor = MonitorPolicy {
            kappa: r.positive("monitor.kappa", md.kappa)?,
            taylor_floor: r.positive("monitor.taylor_floor", md.taylor_floor)?,
            chord_arc_floor: r.positive("monitor.chord_arc_floor", md.chord_arc_floor)?,
        };
        let ed = EnergyOptions::default();
        let energy = EnergyOptions {
            eb_last_squared: r.bool_or("energy.eb_last_squared", ed.eb_last_squared)?,
            resolution_fraction: r.positive("energy.resolution_fraction", ed.resolution_fraction)?,
        };
        let seed = r.parse::<u64>("run.seed", "a non-negative integer")?.map_or(0, |v| v.0);
        let out = PathBuf::from(r.raw("run.out").map_or("out", |v| v.0));
        let markers = match r.usize_or("run.markers", 0)?.0 {
            0 => None,
            m => Some(m),
        };
        let snapshots = r.bool_or("run.snapshots", false)?;
        let (heights, h_origin) = r.list_or("interior.heights", &[-0.2, -0.5, -1.0])?;
        if heights.is_empty() || heights.iter().any(|&y| !(y < 0.0)) {
            return Err(ConfigError::new(h_origin, "interior.heights", "heights must be negative"));
        }
        let id = InteriorOptions::default();
        let interior = InteriorOptions {
            holo_tol: r.positive("interior.holo_tol", id.holo_tol)?,
            dy: r.positive("interior.dy", id.dy)?,
        };
        let pow2 = |field: &str, default: usize| -> Result<usize, ConfigError> {
            let (v, o) = r.usize_or(field, default)?;
            if !v.is_power_of_two() || v < 16 {
                return Err(ConfigError::new(o, field, format!("must be a power of two >= 16, got {v}")));
            }
            Ok(v)
        };
        let verify_n = pow2("verify.n", 512)?;
        let inequality_n = pow2("verify.inequality_n", 128)?;
        let (verify_trials, vt_origin) = r.usize_or("verify.trials", 100)?;
        if verify_trials < crate::verify::MIN_TRIALS {
            return Err(ConfigError::new(
                vt_origin,
                "verify.trials",
                format!("at least {} trials required", crate::verify::MIN_TRIALS),
            ));
        }
        let (study_epsilons, s_origin) = r.list_or("study.epsilons", &[0.1, 0.05, 0.025, 0.0125])?;
        if study_epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(ConfigError::new(s_origin, "study.epsilons", "values must be positive"));
        }
        Ok(Self {
            n,
            step,
            t_end,
            report_every,
            family,
            epsilon,
            filter,
            guards,
            monitor,
            energy,
            seed,
            out,
            markers,
            snapshots,
            heights,
            interior,
            verify_n,
            verify_trials,
            inequality_n,
            study_epsilons,
        })
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            t_end: self.t_end,
            dt: match self.step {
                StepChoice::Dt(dt) => DtPolicy::Fixed(dt),
                StepChoice::Cfl(c) => DtPolicy::Cfl(c),
            },
            report_every: self.report_every,
            guards: self.guards,
            filter: self.filter,
            energy: self.energy,
            monitor: self.monitor,
            markers: self.markers,
            keep_snapshots: self.snapshots,
        }
    }

    /// Every resolved value, defaults included, in canonical order.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let mut sec = |name: &str, kv: Vec<(&str, String)>| {
            s.push_str(&format!("[{name}]\n"));
            for (k, v) in kv {
                s.push_str(&format!("{k} = {v}\n"));
            }
            s.push('\n');
        };
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        sec("grid", vec![("n", self.n.to_string())]);
        let step = match self.step {
            StepChoice::Dt(dt) => ("dt", format!("{dt:?}")),
            StepChoice::Cfl(c) => ("cfl", format!("{c:?}")),
        };
        sec(
            "time",
            vec![("T", format!("{:?}", self.t_end)), step, ("report_every", format!("{:?}", self.report_every))],
        );
        let mut data = vec![("family", self.family.name().to_string())];
        match self.family {
            Family::Flat => {}
            Family::SmoothWave { a, m, velocity_scale } => {
                data.push(("a", format!("{a:?}")));
                data.push(("m", m.to_string()));
                data.push(("velocity_scale", format!("{velocity_scale:?}")));
            }
            Family::NearCrest { r, q, velocity_scale } => {
                data.push(("r", format!("{r:?}")));
                data.push(("q", format!("{q:?}")));
                data.push(("velocity_scale", format!("{velocity_scale:?}")));
            }
        }
        data.push(("epsilon", format!("{:?}", self.epsilon)));
        sec("data", data);
        sec(
            "filter",
            vec![
                ("dealias", self.filter.dealias.to_string()),
                ("floor", self.filter.floor.map_or("none".into(), |f| format!("{f:?}"))),
                ("project", self.filter.project.to_string()),
            ],
        );
        sec(
            "guards",
            vec![
                ("tol_a1", format!("{:?}", self.guards.tol_a1)),
                ("jacobian_min", format!("{:?}", self.guards.jacobian_min)),
            ],
        );
        sec(
            "monitor",
            vec![
                ("kappa", format!("{:?}", self.monitor.kappa)),
                ("taylor_floor", format!("{:?}", self.monitor.taylor_floor)),
                ("chord_arc_floor", format!("{:?}", self.monitor.chord_arc_floor)),
            ],
        );
        sec(
            "energy",
            vec![
                ("eb_last_squared", self.energy.eb_last_squared.to_string()),
                ("resolution_fraction", format!("{:?}", self.energy.resolution_fraction)),
            ],
        );
        sec(
            "run",
            vec![
                ("seed", self.seed.to_string()),
                ("out", self.out.display().to_string()),
                ("markers", self.markers.unwrap_or(0).to_string()),
                ("snapshots", self.snapshots.to_string()),
            ],
        );
        sec(
            "interior",
            vec![
                ("heights", list(&self.heights)),
                ("holo_tol", format!("{:?}", self.interior.holo_tol)),
                ("dy", format!("{:?}", self.interior.dy)),
            ],
        );
        sec(
            "verify",
            vec![
                ("n", self.verify_n.to_string()),
                ("trials", self.verify_trials.to_string()),
                ("inequality_n", self.inequality_n.to_string()),
            ],
        );
        sec("study", vec![("epsilons", list(&self.study_epsilons))]);
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    }

    /// SHA-256 over the crate version and the canonical snapshot with the
    /// output directory left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(c.to_ini().as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
# smooth wave
[grid]
n = 64

[time]
T = 0.5
cfl = 0.5

[data]
family = smooth_wave
a = 0.05
m = 1
";

    #[test]
    fn parses_with_defaults() {
        let c = SimConfig::from_text(BASE, &[]).unwrap();
        assert_eq!(c.n, 64);
        assert_eq!(c.step, StepChoice::Cfl(0.5));
        assert_eq!(c.family, Family::SmoothWave { a: 0.05, m: 1, velocity_scale: 1.0 });
        assert!((c.report_every - 0.05).abs() < 1e-15);
        assert!(c.filter.dealias);
        assert_eq!(c.study_epsilons, vec![0.1, 0.05, 0.025, 0.0125]);
    }

    #[test]
    fn snapshot_round_trips() {
        let c = SimConfig::from_text(BASE, &["filter.floor=1e-14".into()]).unwrap();
        let again = SimConfig::from_text(&c.to_ini(), &[]).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
        let other = SimConfig::from_text(BASE, &["data.a=0.06".into()]).unwrap();
        assert_ne!(c.hash(), other.hash());
    }

    #[test]
    fn errors_name_line_and_field() {
        let text = BASE.replace("m = 1", "m = one");
        let e = SimConfig::from_text(&text, &[]).unwrap_err();
        assert_eq!(e.origin, Origin::Line(12));
        assert_eq!(e.field, "data.m");
        let e = SimConfig::from_text(&format!("{BASE}bogus = 1\n"), &[]).unwrap_err();
        assert_eq!((e.origin, e.field.as_str()), (Origin::Line(13), "data.bogus"));
        let e = SimConfig::from_text(&format!("{BASE}[nope]\n"), &[]).unwrap_err();
        assert_eq!(e.message, "unknown section");
        let e = Ini::parse("n = 3\n").unwrap_err();
        assert_eq!(e.message, "key outside any section");
        let e = SimConfig::from_text(&format!("{BASE}a = 0.1\n"), &[]).unwrap_err();
        assert_eq!(e.message, "duplicate key");
    }

    #[test]
    fn invariants_enforced() {
        let e = SimConfig::from_text(BASE, &["time.dt=0.01".into()]).unwrap_err();
        assert_eq!(e.field, "time.cfl");
        let e = SimConfig::from_text(&BASE.replace("cfl = 0.5\n", ""), &[]).unwrap_err();
        assert!(e.message.contains("required"));
        let e = SimConfig::from_text(BASE, &["grid.n=100".into()]).unwrap_err();
        assert_eq!((e.origin, e.field.as_str()), (Origin::Override, "grid.n"));
        let e = SimConfig::from_text(BASE, &["guards.tol_a1=-1".into()]).unwrap_err();
        assert_eq!(e.field, "guards.tol_a1");
        let e = SimConfig::from_text(BASE, &["data.q=0.9".into()]).unwrap_err();
        assert!(e.message.contains("not a parameter"));
        let e = SimConfig::from_text(BASE, &["data.family=wavy".into()]).unwrap_err();
        assert_eq!(e.origin, Origin::Override);
        assert!(SimConfig::from_text(BASE, &["nokey".into()]).is_err());
        assert!(SimConfig::from_text(BASE, &["time.bogus=1".into()]).is_err());
    }

    #[test]
    fn sweep_axes_listed() {
        let text = format!("{BASE}[sweep]\ndata.a = 0.01, 0.02\ntime.cfl = 0.25,0.5\n");
        let ini = Ini::parse(&text).unwrap();
        let axes = ini.sweep_axes().unwrap();
        assert_eq!(axes[0], ("data.a".to_string(), vec!["0.01".to_string(), "0.02".to_string()]));
        assert_eq!(axes[1].1.len(), 2);
        let bad = Ini::parse(&format!("{BASE}[sweep]\ndata.zz = 1\n")).unwrap();
        assert!(bad.sweep_axes().is_err());
    }
}
