//! Experiment configuration.
//!
//! A config is a TOML document:
//!
//! ```toml
//! seed = 2024                      # validation sampling seed
//! output_dir = "out/paper_repro"   # relative to the working directory
//! schemes = ["picard", "mann", "ishikawa", "s", "normal_s", "ky"]
//! comparisons = [["ky", "s"], ["ky", "normal_s"]]
//! tail_fraction = 0.2              # optional, residual decay window
//!
//! [stop]
//! residual_tol = 1e-12
//! max_iter = 2000
//! divergence_cap = 1e9             # optional
//!
//! [berinde]                        # optional, all keys optional
//! slope_tol = 1e-3
//! ratio_band = 10.0
//! noise_floor = 1e-13
//! burn_in = 5
//!
//! [[problems]]
//! builtin = "halving"              # a built-in problem...
//! start = [4.0]                    # ...with an optional start override
//!
//! [[problems]]                     # ...or an inline definition
//! name = "quarter"
//! kind = "affine"                  # affine | rotation2d | coordinate_swap | table
//! matrix = [[0.25]]
//! offset = [3.0]
//! class = { contraction = 0.25 }   # or "nonexpansive"
//! fixed_points = [[4.0]]
//! start = [0.0]
//! condition_a = { kind = "linear", c = 0.75 }
//!
//! [[schedules]]
//! name = "half"
//! alpha = 0.5                                             # constant...
//! beta = { rule = "decay", floor = 0.3, amplitude = 0.4, exponent = 1.0 }
//! lambda = 0.3
//! ```

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::{Path, PathBuf};

use fpiter::analysis::BerindeConfig;
use fpiter::{
    builtin, load_problem, Point, ProblemConfig, ProblemSpec, Rule, Schedule, SchemeId, StopRule,
};
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

/// A config that failed to parse or validate. `line` is 1-based.
#[derive(Debug, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(src: &str, span: Range<usize>, message: impl Into<String>) -> Self {
        Self {
            line: Some(line_of(src, span.start)),
            message: message.into(),
        }
    }

    fn bare(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())]
        .bytes()
        .filter(|b| *b == b'\n')
        .count()
        + 1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    output_dir: Option<PathBuf>,
    #[serde(default)]
    schemes: Option<Spanned<Vec<Spanned<String>>>>,
    #[serde(default)]
    comparisons: Vec<Spanned<(String, String)>>,
    #[serde(default)]
    problems: Option<Spanned<Vec<Spanned<toml::Table>>>>,
    #[serde(default)]
    schedules: Vec<Spanned<RawSchedule>>,
    stop: Spanned<RawStop>,
    #[serde(default)]
    berinde: BerindeConfig,
    tail_fraction: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    name: String,
    alpha: Rule,
    beta: Option<Rule>,
    lambda: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStop {
    residual_tol: f64,
    max_iter: usize,
    divergence_cap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct NamedSchedule {
    pub name: String,
    pub schedule: Schedule,
}

/// A validated experiment grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub problems: Vec<ProblemSpec>,
    pub schemes: Vec<SchemeId>,
    pub schedules: Vec<NamedSchedule>,
    pub stop: StopRule,
    pub comparisons: Vec<(SchemeId, SchemeId)>,
    pub berinde: BerindeConfig,
    pub tail_fraction: f64,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::bare(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of(src, s.start)),
            message: e.message().trim().to_string(),
        })?;

        let schemes = match &raw.schemes {
            None => return Err(ConfigError::bare("schemes: empty")),
            Some(list) if list.get_ref().is_empty() => {
                return Err(ConfigError::at(src, list.span(), "schemes: empty"))
            }
            Some(list) => {
                let mut out = Vec::new();
                for s in list.get_ref() {
                    let id: SchemeId = s.get_ref().parse().map_err(|_| {
                        ConfigError::at(
                            src,
                            s.span(),
                            format!("schemes: unknown scheme '{}'", s.get_ref()),
                        )
                    })?;
                    if out.contains(&id) {
                        return Err(ConfigError::at(
                            src,
                            s.span(),
                            format!("schemes: '{id}' listed twice"),
                        ));
                    }
                    out.push(id);
                }
                out
            }
        };

        let mut comparisons = Vec::new();
        for pair in &raw.comparisons {
            let (a, b) = pair.get_ref();
            let resolve = |name: &str| -> Result<SchemeId, ConfigError> {
                let id: SchemeId = name.parse().map_err(|_| {
                    ConfigError::at(
                        src,
                        pair.span(),
                        format!("comparisons: unknown scheme '{name}'"),
                    )
                })?;
                if !schemes.contains(&id) {
                    return Err(ConfigError::at(
                        src,
                        pair.span(),
                        format!("comparisons: '{name}' is not listed in schemes"),
                    ));
                }
                Ok(id)
            };
            let (a, b) = (resolve(a)?, resolve(b)?);
            comparisons.push((a, b));
        }

        let problems = match &raw.problems {
            None => return Err(ConfigError::bare("problems: empty")),
            Some(list) if list.get_ref().is_empty() => {
                return Err(ConfigError::at(src, list.span(), "problems: empty"))
            }
            Some(list) => {
                let mut out: Vec<ProblemSpec> = Vec::new();
                for entry in list.get_ref() {
                    let p = resolve_problem(entry.get_ref()).map_err(|m| {
                        ConfigError::at(src, entry.span(), format!("problems: {m}"))
                    })?;
                    if !is_safe_name(&p.name) {
                        return Err(ConfigError::at(
                            src,
                            entry.span(),
                            format!("problems: name '{}' must be [A-Za-z0-9_.-]", p.name),
                        ));
                    }
                    if out.iter().any(|q| q.name == p.name) {
                        return Err(ConfigError::at(
                            src,
                            entry.span(),
                            format!("problems: duplicate name '{}'", p.name),
                        ));
                    }
                    out.push(p);
                }
                out
            }
        };

        let mut schedules: Vec<NamedSchedule> = Vec::new();
        for s in &raw.schedules {
            let r = s.get_ref();
            let beta = r.beta.unwrap_or(r.alpha);
            let schedule = Schedule::new(r.alpha, beta, r.lambda).map_err(|e| {
                ConfigError::at(src, s.span(), format!("schedules: '{}': {e}", r.name))
            })?;
            if !is_safe_name(&r.name) {
                return Err(ConfigError::at(
                    src,
                    s.span(),
                    format!("schedules: name '{}' must be [A-Za-z0-9_.-]", r.name),
                ));
            }
            if schedules.iter().any(|q| q.name == r.name) {
                return Err(ConfigError::at(
                    src,
                    s.span(),
                    format!("schedules: duplicate name '{}'", r.name),
                ));
            }
            schedules.push(NamedSchedule {
                name: r.name.clone(),
                schedule,
            });
        }
        let needs_schedule = schemes.iter().any(|s| s.uses_alpha());
        if schedules.is_empty() {
            if needs_schedule {
                return Err(ConfigError::bare(
                    "schedules: empty (required by averaged schemes)",
                ));
            }
            schedules.push(NamedSchedule {
                name: "none".into(),
                schedule: Schedule::constant(0.5).expect("valid"),
            });
        }

        let stop_raw = raw.stop.get_ref();
        let mut stop = StopRule::new(stop_raw.residual_tol, stop_raw.max_iter)
            .map_err(|e| ConfigError::at(src, raw.stop.span(), format!("stop: {e}")))?;
        if let Some(cap) = stop_raw.divergence_cap {
            stop = stop
                .with_divergence_cap(cap)
                .map_err(|e| ConfigError::at(src, raw.stop.span(), format!("stop: {e}")))?;
        }

        let tail_fraction = raw.tail_fraction.unwrap_or(DEFAULT_TAIL_FRACTION);
        if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
            return Err(ConfigError::bare(format!(
                "tail_fraction: {tail_fraction} not in (0,1)"
            )));
        }
        let b = raw.berinde;
        if !(b.slope_tol > 0.0 && b.ratio_band > 1.0 && b.noise_floor >= 0.0) {
            return Err(ConfigError::bare(
                "berinde: need slope_tol > 0, ratio_band > 1, noise_floor >= 0",
            ));
        }

        Ok(Self {
            seed: raw.seed,
            output_dir: raw
                .output_dir
                .unwrap_or_else(|| PathBuf::from("fpiter-out")),
            problems,
            schemes,
            schedules,
            stop,
            comparisons,
            berinde: raw.berinde,
            tail_fraction,
        })
    }

    pub fn scheme_names(&self) -> BTreeSet<&'static str> {
        self.schemes.iter().map(|s| s.as_str()).collect()
    }

    /// Number of runs in the grid.
    pub fn run_count(&self) -> usize {
        self.problems.len() * self.schedules.len() * self.schemes.len()
    }
}

// Names end up in artifact file names.
fn is_safe_name(name: &str) -> bool {
    !name.is_empty()
        && !name.contains("__")
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && name != "."
        && name != ".."
}

fn resolve_problem(table: &toml::Table) -> Result<ProblemSpec, String> {
    if let Some(name) = table.get("builtin") {
        let name = name.as_str().ok_or("builtin must be a string")?;
        if let Some(extra) = table.keys().find(|k| *k != "builtin" && *k != "start") {
            return Err(format!("unexpected key '{extra}' next to builtin"));
        }
        let mut spec = builtin(name).ok_or_else(|| format!("unknown builtin '{name}'"))?;
        if let Some(start) = table.get("start") {
            let start: Point = start
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| e.message().to_string())?;
            start
                .check_dim(spec.mapping.dim())
                .map_err(|e| e.to_string())?;
            spec.default_start = start;
        }
        return Ok(spec);
    }
    let cfg: ProblemConfig = toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| e.message().trim().to_string())?;
    load_problem(&cfg).map_err(|e| e.to_string())
}
