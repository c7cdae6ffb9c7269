//! TOML experiment configuration.
//!
//! Every key is optional except `problem` and `dim`. [`parse_config`] fills
//! omitted keys with defaults and records their paths, so the resolved
//! configuration written next to a run's artifacts is complete. Unknown keys
//! are rejected with the closest known key suggested.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use shapeopt_core::graph::{default_eps_constant, Kernel};
use shapeopt_core::levelset::analytic::{AnalyticShape, Ball, BoxShape, Ellipse, Shell};
use shapeopt_core::optimizer::{default_tau, NetworkSpec, RunConfig};
use shapeopt_core::problems::{ProblemKind, Source};

use crate::error::{CliError, CliResult};

/// A configuration diagnostic. `line` is 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
    pub suggestion: Option<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error")?;
        if let Some(l) = self.line {
            write!(f, " at line {l}")?;
        }
        if let Some(k) = &self.key {
            write!(f, ": key `{k}`")?;
        }
        write!(f, ": {}", self.message)?;
        if let Some(s) = &self.suggestion {
            write!(f, " (did you mean `{s}`?)")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// A number or the literal string `"auto"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AutoF64 {
    Auto,
    Value(f64),
}

impl AutoF64 {
    pub fn value(self) -> Option<f64> {
        match self {
            AutoF64::Auto => None,
            AutoF64::Value(v) => Some(v),
        }
    }

    fn from_option(v: Option<f64>) -> Self {
        v.map_or(AutoF64::Auto, AutoF64::Value)
    }
}

impl Serialize for AutoF64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            AutoF64::Auto => s.serialize_str("auto"),
            AutoF64::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for AutoF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = AutoF64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"auto\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<AutoF64, E> {
                Ok(AutoF64::Value(v))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<AutoF64, E> {
                Ok(AutoF64::Value(v as f64))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<AutoF64, E> {
                Ok(AutoF64::Value(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<AutoF64, E> {
                if v == "auto" {
                    Ok(AutoF64::Auto)
                } else {
                    Err(E::invalid_value(serde::de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSection {
    pub beta: Option<AutoF64>,
    pub delta_cluster: Option<f64>,
    pub eps: Option<AutoF64>,
    pub eps_constant: Option<f64>,
    pub k_buffer: Option<usize>,
    pub kernel: Option<String>,
    pub volume_samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSection {
    Constant { value: f64 },
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub steps: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub domain_samples: Option<usize>,
    pub boundary_samples: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControlSection {
    pub enabled: Option<bool>,
    pub tolerance: Option<f64>,
    pub max_halvings: Option<usize>,
    pub growth: Option<f64>,
    pub grow_after: Option<usize>,
    pub underflow_patience: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSection {
    Ball { center: Vec<f64>, radius: f64 },
    Shell { center: Vec<f64>, r_inner: f64, r_outer: f64 },
    Box { center: Vec<f64>, half: Vec<f64> },
    Ellipse { center: Vec<f64>, a: f64, b: f64 },
    Balls { centers: Vec<Vec<f64>>, radii: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSection {
    Siren { hidden: Vec<usize>, omega: f64 },
    Convex { width: usize, sharpness: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszSection {
    pub s: Option<AutoF64>,
    pub iterations: Option<usize>,
    pub band: Option<f64>,
    pub projection_tol: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub grid_resolution: Option<usize>,
    /// Axis levels of the 3D grid slices (`z = level`).
    pub slice_levels: Option<Vec<f64>>,
    pub boundary_csv: Option<bool>,
    pub grid: Option<bool>,
    pub svg: Option<bool>,
    pub checkpoint: Option<bool>,
    /// Also save `checkpoints/iter_{k}.json` every this many iterations; `0` disables.
    pub checkpoint_every: Option<usize>,
    pub shape_gradient: Option<bool>,
    /// Drop timing fields from `history.jsonl`.
    pub normalize_history: Option<bool>,
}

/// The file layout. After [`parse_config`] every field is `Some`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Option<String>,
    pub k: Option<usize>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub k_max: Option<usize>,
    pub k_sample: Option<usize>,
    pub n: Option<usize>,
    pub n_x: Option<usize>,
    pub n_y: Option<usize>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub projection_tol: Option<f64>,
    pub pde: Option<PdeSection>,
    pub source: Option<SourceSection>,
    pub train: Option<TrainSection>,
    pub initial_train: Option<TrainSection>,
    pub step_control: Option<StepControlSection>,
    pub initial_shape: Option<ShapeSection>,
    pub network: Option<NetworkSection>,
    pub riesz: Option<RieszSection>,
    pub output: Option<OutputSection>,
}

/// A parsed, validated configuration.
#[derive(Clone, Debug)]
pub struct Resolved {
    /// Fully populated file layout.
    pub config: ExperimentConfig,
    /// Dotted paths of the keys filled with defaults.
    pub defaulted: Vec<String>,
    pub run: RunConfig,
    pub output: Output,
    /// SHA-256 of the resolved configuration without the `output` section.
    pub hash: String,
}

/// Resolved `[output]` section.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub dir: String,
    pub grid_resolution: usize,
    pub slice_levels: Vec<f64>,
    pub boundary_csv: bool,
    pub grid: bool,
    pub svg: bool,
    pub checkpoint: bool,
    pub checkpoint_every: usize,
    pub shape_gradient: bool,
    pub normalize_history: bool,
}

impl Resolved {
    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.config).expect("resolved configuration serializes")
    }
}

/// Reads and resolves a configuration file. A path without extension also
/// tries `path.toml`.
pub fn load_config(path: &Path) -> CliResult<Resolved> {
    let candidates = [path.to_path_buf(), path.with_extension("toml")];
    let found = candidates.iter().find(|p| p.is_file()).unwrap_or(&candidates[0]);
    let src = std::fs::read_to_string(found).map_err(|e| CliError::io(found, e))?;
    Ok(parse_config(&src)?)
}

/// Parses, fills defaults and validates.
pub fn parse_config(src: &str) -> Result<Resolved, ConfigError> {
    let mut cfg: ExperimentConfig = toml::from_str(src).map_err(|e| from_toml_error(src, &e))?;
    let defaulted = fill_defaults(&mut cfg, src)?;
    let (run, output) = build(&cfg, src)?;
    let hash = config_hash(&cfg);
    Ok(Resolved {
        config: cfg,
        defaulted,
        run,
        output,
        hash,
    })
}

/// SHA-256 (hex) of the canonical JSON of `cfg` without its output section.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut c = cfg.clone();
    c.output = None;
    let json = serde_json::to_string(&c).expect("configuration serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Backtick-quoted words of a serde message, in order.
fn quoted(msg: &str) -> Vec<&str> {
    msg.split('`').skip(1).step_by(2).collect()
}

fn from_toml_error(src: &str, e: &toml::de::Error) -> ConfigError {
    let msg = e.message().to_string();
    let line = e.span().map(|s| line_of_offset(src, s.start));
    let key_on_line = line.and_then(|l| {
        let text = src.lines().nth(l - 1)?;
        let (k, _) = text.split_once('=')?;
        Some(k.trim().trim_matches('"').to_string())
    });
    if msg.starts_with("unknown field") || msg.starts_with("unknown variant") {
        let q = quoted(&msg);
        let key = q.first().map(|s| s.to_string());
        let suggestion = key.as_ref().and_then(|k| {
            q[1..]
                .iter()
                .map(|cand| (strsim::damerau_levenshtein(k, cand), *cand))
                .filter(|(dist, _)| *dist <= (k.chars().count() / 3).max(1))
                .min_by_key(|(dist, _)| *dist)
                .map(|(_, c)| c.to_string())
        });
        let what = if msg.starts_with("unknown field") {
            "unknown key"
        } else {
            "unknown kind"
        };
        return ConfigError {
            key,
            line,
            message: format!("{what}; {}", msg.split_once(", ").map_or("", |(_, rest)| rest)),
            suggestion,
        };
    }
    if msg.starts_with("missing field") {
        return ConfigError {
            key: quoted(&msg).first().map(|s| s.to_string()),
            line,
            message: "missing required key".into(),
            suggestion: None,
        };
    }
    ConfigError {
        key: key_on_line,
        line,
        message: friendly_types(&msg),
        suggestion: None,
    }
}

/// Rust type names in serde messages as config vocabulary.
fn friendly_types(msg: &str) -> String {
    [
        ("expected usize", "expected a non-negative integer"),
        ("expected u64", "expected a non-negative integer"),
        ("expected f64", "expected a number"),
        ("expected a boolean", "expected true or false"),
    ]
    .iter()
    .fold(msg.to_string(), |m, (from, to)| m.replace(from, to))
}

/// Line of `key = …` inside `[section]` (or the top level for `None`).
fn find_key_line(src: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in src.lines().enumerate() {
        let t = raw.trim();
        if let Some(h) = t.strip_prefix('[') {
            current = Some(h.trim_end_matches(']').trim().to_string());
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some((k, _)) = t.split_once('=') {
            if k.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    None
}

fn invalid(src: &str, path: &str, message: impl Into<String>) -> ConfigError {
    let (section, key) = match path.rsplit_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (None, path),
    };
    ConfigError {
        key: Some(path.to_string()),
        line: find_key_line(src, section, key),
        message: message.into(),
        suggestion: None,
    }
}

fn missing(key: &str, expected: &str) -> ConfigError {
    ConfigError {
        key: Some(key.to_string()),
        line: None,
        message: format!("missing required key (expected {expected})"),
        suggestion: None,
    }
}

fn default_shape(kind: ProblemKind, dim: usize) -> ShapeSection {
    let c = vec![0.5; dim];
    match kind {
        ProblemKind::NeumannMax => ShapeSection::Shell {
            center: c,
            r_inner: 0.1,
            r_outer: 0.3,
        },
        ProblemKind::PoissonDirichlet => ShapeSection::Box {
            center: c,
            half: vec![0.3; dim],
        },
        ProblemKind::ConvexNeumannMin if dim == 2 => ShapeSection::Ellipse {
            center: c,
            a: 0.3,
            b: 0.15,
        },
        ProblemKind::ConvexNeumannMin => ShapeSection::Ball { center: c, radius: 0.25 },
    }
}

fn network_section(spec: &NetworkSpec) -> NetworkSection {
    match spec {
        NetworkSpec::Siren { hidden, omega } => NetworkSection::Siren {
            hidden: hidden.clone(),
            omega: *omega,
        },
        NetworkSpec::Convex { width, sharpness } => NetworkSection::Convex {
            width: *width,
            sharpness: *sharpness,
        },
    }
}

fn fill<T: Clone>(slot: &mut Option<T>, value: T, path: &str, defaulted: &mut Vec<String>) {
    if slot.is_none() {
        *slot = Some(value);
        defaulted.push(path.to_string());
    }
}

/// Fills every omitted key; returns the filled paths.
fn fill_defaults(cfg: &mut ExperimentConfig, src: &str) -> Result<Vec<String>, ConfigError> {
    let tag = cfg
        .problem
        .clone()
        .ok_or_else(|| missing("problem", "string: neumann_max | poisson_dirichlet | convex_neumann_min"))?;
    let kind = ProblemKind::from_tag(&tag)
        .ok_or_else(|| invalid(src, "problem", "expected one of neumann_max, poisson_dirichlet, convex_neumann_min"))?;
    let dim = cfg.dim.ok_or_else(|| missing("dim", "integer 2 or 3"))?;
    if !(2..=3).contains(&dim) {
        return Err(invalid(src, "dim", "must be 2 or 3"));
    }
    let mut d = Vec::new();
    let default_k = if kind == ProblemKind::ConvexNeumannMin { 2 } else { 1 };
    fill(&mut cfg.k, default_k, "k", &mut d);
    let shape = cfg.initial_shape.clone().unwrap_or_else(|| default_shape(kind, dim));
    let base = RunConfig::new(kind, cfg.k.unwrap(), dim, to_shape(&shape, dim, src)?);

    fill(&mut cfg.seed, base.seed, "seed", &mut d);
    fill(&mut cfg.k_max, base.k_max, "k_max", &mut d);
    fill(&mut cfg.k_sample, base.k_sample, "k_sample", &mut d);
    fill(&mut cfg.n, base.problem.n, "n", &mut d);
    fill(&mut cfg.n_x, base.n_x, "n_x", &mut d);
    fill(&mut cfg.n_y, base.n_y, "n_y", &mut d);
    fill(&mut cfg.tau, default_tau(kind), "tau", &mut d);
    fill(&mut cfg.alpha, base.alpha, "alpha", &mut d);
    fill(&mut cfg.projection_tol, base.projection_tol, "projection_tol", &mut d);

    fill(&mut cfg.pde, PdeSection::default(), "pde", &mut d);
    let p = cfg.pde.as_mut().unwrap();
    let bp = &base.problem;
    fill(&mut p.beta, AutoF64::from_option(bp.beta), "pde.beta", &mut d);
    fill(&mut p.delta_cluster, bp.delta_cluster, "pde.delta_cluster", &mut d);
    fill(&mut p.eps, AutoF64::from_option(bp.eps), "pde.eps", &mut d);
    fill(&mut p.eps_constant, default_eps_constant(dim), "pde.eps_constant", &mut d);
    fill(&mut p.k_buffer, bp.k_buffer, "pde.k_buffer", &mut d);
    fill(&mut p.kernel, bp.kernel.tag().to_string(), "pde.kernel", &mut d);
    fill(&mut p.volume_samples, bp.volume_samples, "pde.volume_samples", &mut d);

    fill(&mut cfg.source, SourceSection::Constant { value: 1.0 }, "source", &mut d);

    for (slot, defaults, name) in [
        (&mut cfg.train, &base.train, "train"),
        (&mut cfg.initial_train, &base.initial_train, "initial_train"),
    ] {
        fill(slot, TrainSection::default(), name, &mut d);
        let t = slot.as_mut().unwrap();
        fill(&mut t.steps, defaults.steps, &format!("{name}.steps"), &mut d);
        fill(&mut t.learning_rate, defaults.learning_rate, &format!("{name}.learning_rate"), &mut d);
        fill(&mut t.batch_size, defaults.batch_size, &format!("{name}.batch_size"), &mut d);
        fill(&mut t.domain_samples, defaults.domain_samples, &format!("{name}.domain_samples"), &mut d);
        fill(&mut t.boundary_samples, defaults.boundary_samples, &format!("{name}.boundary_samples"), &mut d);
    }

    fill(&mut cfg.step_control, StepControlSection::default(), "step_control", &mut d);
    let s = cfg.step_control.as_mut().unwrap();
    let bs = &base.step_control;
    fill(&mut s.enabled, bs.enabled, "step_control.enabled", &mut d);
    fill(&mut s.tolerance, bs.tolerance, "step_control.tolerance", &mut d);
    fill(&mut s.max_halvings, bs.max_halvings, "step_control.max_halvings", &mut d);
    fill(&mut s.growth, bs.growth, "step_control.growth", &mut d);
    fill(&mut s.grow_after, bs.grow_after, "step_control.grow_after", &mut d);
    fill(&mut s.underflow_patience, bs.underflow_patience, "step_control.underflow_patience", &mut d);

    fill(&mut cfg.initial_shape, shape, "initial_shape", &mut d);
    fill(&mut cfg.network, network_section(&base.network), "network", &mut d);

    fill(&mut cfg.riesz, RieszSection::default(), "riesz", &mut d);
    let r = cfg.riesz.as_mut().unwrap();
    let br = &base.riesz;
    fill(&mut r.s, AutoF64::from_option(br.s), "riesz.s", &mut d);
    fill(&mut r.iterations, br.iterations, "riesz.iterations", &mut d);
    fill(&mut r.band, br.band, "riesz.band", &mut d);
    fill(&mut r.projection_tol, br.projection_tol, "riesz.projection_tol", &mut d);
    fill(&mut r.step, br.step, "riesz.step", &mut d);

    fill(&mut cfg.output, OutputSection::default(), "output", &mut d);
    let o = cfg.output.as_mut().unwrap();
    fill(&mut o.dir, format!("out/{tag}_{dim}d"), "output.dir", &mut d);
    fill(&mut o.grid_resolution, 129, "output.grid_resolution", &mut d);
    fill(&mut o.slice_levels, vec![0.25, 0.5, 0.75], "output.slice_levels", &mut d);
    fill(&mut o.boundary_csv, true, "output.boundary_csv", &mut d);
    fill(&mut o.grid, true, "output.grid", &mut d);
    fill(&mut o.svg, true, "output.svg", &mut d);
    fill(&mut o.checkpoint, true, "output.checkpoint", &mut d);
    fill(&mut o.checkpoint_every, 0, "output.checkpoint_every", &mut d);
    fill(&mut o.shape_gradient, true, "output.shape_gradient", &mut d);
    fill(&mut o.normalize_history, false, "output.normalize_history", &mut d);
    Ok(d)
}

fn check_point(src: &str, path: &str, v: &[f64], dim: usize) -> Result<(), ConfigError> {
    if v.len() != dim {
        return Err(invalid(src, path, format!("expected {dim} coordinates, found {}", v.len())));
    }
    Ok(())
}

fn positive(src: &str, path: &str, v: f64, symbol: &str) -> Result<(), ConfigError> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(src, path, format!("must satisfy {symbol} > 0")));
    }
    Ok(())
}

fn to_shape(s: &ShapeSection, dim: usize, src: &str) -> Result<AnalyticShape, ConfigError> {
    let p = "initial_shape.center";
    Ok(match s {
        ShapeSection::Ball { center, radius } => {
            check_point(src, p, center, dim)?;
            positive(src, "initial_shape.radius", *radius, "radius")?;
            AnalyticShape::Ball(Ball::new(center, *radius))
        }
        ShapeSection::Shell { center, r_inner, r_outer } => {
            check_point(src, p, center, dim)?;
            positive(src, "initial_shape.r_inner", *r_inner, "r_inner")?;
            if !(r_outer > r_inner) {
                return Err(invalid(src, "initial_shape.r_outer", "must satisfy r_outer > r_inner"));
            }
            AnalyticShape::Shell(Shell::new(center, *r_inner, *r_outer))
        }
        ShapeSection::Box { center, half } => {
            check_point(src, p, center, dim)?;
            check_point(src, "initial_shape.half", half, dim)?;
            for h in half {
                positive(src, "initial_shape.half", *h, "half")?;
            }
            AnalyticShape::Box(BoxShape::new(center, half))
        }
        ShapeSection::Ellipse { center, a, b } => {
            if dim != 2 {
                return Err(invalid(src, "initial_shape.kind", "ellipse is 2D only"));
            }
            check_point(src, p, center, 2)?;
            positive(src, "initial_shape.a", *a, "a")?;
            positive(src, "initial_shape.b", *b, "b")?;
            AnalyticShape::Ellipse(Ellipse::new([center[0], center[1]], *a, *b))
        }
        ShapeSection::Balls { centers, radii } => {
            if centers.is_empty() || centers.len() != radii.len() {
                return Err(invalid(src, "initial_shape.radii", "need one radius per center"));
            }
            let mut balls = Vec::new();
            for (c, r) in centers.iter().zip(radii) {
                check_point(src, "initial_shape.centers", c, dim)?;
                positive(src, "initial_shape.radii", *r, "radius")?;
                balls.push(Ball::new(c, *r));
            }
            AnalyticShape::Balls(balls)
        }
    })
}

/// Core run configuration and output settings from a filled layout.
fn build(cfg: &ExperimentConfig, src: &str) -> Result<(RunConfig, Output), ConfigError> {
    let kind = ProblemKind::from_tag(cfg.problem.as_deref().unwrap()).unwrap();
    let dim = cfg.dim.unwrap();
    let shape = to_shape(cfg.initial_shape.as_ref().unwrap(), dim, src)?;
    let mut run = RunConfig::new(kind, cfg.k.unwrap(), dim, shape);

    positive(src, "tau", cfg.tau.unwrap(), "τ")?;
    run.tau = cfg.tau.unwrap();
    run.seed = cfg.seed.unwrap();
    run.k_max = cfg.k_max.unwrap();
    for (path, v) in [("k_sample", cfg.k_sample), ("n_x", cfg.n_x), ("n_y", cfg.n_y)] {
        if v.unwrap() == 0 {
            return Err(invalid(src, path, "must be at least 1"));
        }
    }
    run.k_sample = cfg.k_sample.unwrap();
    run.n_x = cfg.n_x.unwrap();
    run.n_y = cfg.n_y.unwrap();
    let alpha = cfg.alpha.unwrap();
    if !(alpha >= 0.0) {
        return Err(invalid(src, "alpha", "must satisfy α ≥ 0"));
    }
    run.alpha = alpha;
    positive(src, "projection_tol", cfg.projection_tol.unwrap(), "projection_tol")?;
    run.projection_tol = cfg.projection_tol.unwrap();

    let p = cfg.pde.as_ref().unwrap();
    run.problem.n = cfg.n.unwrap();
    if run.problem.n < 16 {
        return Err(invalid(src, "n", "must be at least 16"));
    }
    run.problem.beta = p.beta.unwrap().value();
    if let Some(b) = run.problem.beta {
        positive(src, "pde.beta", b, "β")?;
    }
    run.problem.delta_cluster = p.delta_cluster.unwrap();
    if !(run.problem.delta_cluster >= 0.0) {
        return Err(invalid(src, "pde.delta_cluster", "must satisfy δ_cluster ≥ 0"));
    }
    run.problem.eps = p.eps.unwrap().value();
    if let Some(e) = run.problem.eps {
        positive(src, "pde.eps", e, "ε")?;
    }
    positive(src, "pde.eps_constant", p.eps_constant.unwrap(), "eps_constant")?;
    run.problem.eps_constant = Some(p.eps_constant.unwrap());
    run.problem.k_buffer = p.k_buffer.unwrap();
    let kernel = p.kernel.as_deref().unwrap();
    run.problem.kernel =
        Kernel::from_tag(kernel).ok_or_else(|| invalid(src, "pde.kernel", "expected indicator or gaussian"))?;
    run.problem.volume_samples = p.volume_samples.unwrap();
    if run.problem.volume_samples == 0 {
        return Err(invalid(src, "pde.volume_samples", "must be at least 1"));
    }
    run.problem.source = match cfg.source.as_ref().unwrap() {
        SourceSection::Constant { value } => Source::Constant(*value),
        SourceSection::Gaussian {
            center,
            width,
            amplitude,
            offset,
        } => {
            check_point(src, "source.center", center, dim)?;
            positive(src, "source.width", *width, "width")?;
            let mut c = [0.0; 3];
            c[..dim].copy_from_slice(center);
            Source::Gaussian {
                center: c,
                width: *width,
                amplitude: *amplitude,
                offset: *offset,
            }
        }
    };

    for (t, target, name) in [
        (cfg.train.as_ref().unwrap(), &mut run.train, "train"),
        (cfg.initial_train.as_ref().unwrap(), &mut run.initial_train, "initial_train"),
    ] {
        target.steps = t.steps.unwrap();
        target.learning_rate = t.learning_rate.unwrap();
        positive(src, &format!("{name}.learning_rate"), target.learning_rate, "learning_rate")?;
        target.batch_size = t.batch_size.unwrap();
        target.domain_samples = t.domain_samples.unwrap();
        target.boundary_samples = t.boundary_samples.unwrap();
    }
    if run.initial_train.domain_samples == 0 {
        return Err(invalid(src, "initial_train.domain_samples", "must be at least 1"));
    }

    let s = cfg.step_control.as_ref().unwrap();
    run.step_control.enabled = s.enabled.unwrap();
    run.step_control.tolerance = s.tolerance.unwrap();
    if !(run.step_control.tolerance >= 0.0) {
        return Err(invalid(src, "step_control.tolerance", "must be ≥ 0"));
    }
    run.step_control.max_halvings = s.max_halvings.unwrap();
    run.step_control.growth = s.growth.unwrap();
    if !(run.step_control.growth >= 1.0) {
        return Err(invalid(src, "step_control.growth", "must be ≥ 1"));
    }
    run.step_control.grow_after = s.grow_after.unwrap();
    run.step_control.underflow_patience = s.underflow_patience.unwrap();

    run.network = match cfg.network.as_ref().unwrap() {
        NetworkSection::Siren { hidden, omega } => {
            if hidden.is_empty() || hidden.contains(&0) {
                return Err(invalid(src, "network.hidden", "layer widths must be positive"));
            }
            positive(src, "network.omega", *omega, "ω")?;
            NetworkSpec::Siren {
                hidden: hidden.clone(),
                omega: *omega,
            }
        }
        NetworkSection::Convex { width, sharpness } => {
            if *width == 0 {
                return Err(invalid(src, "network.width", "must be at least 1"));
            }
            positive(src, "network.sharpness", *sharpness, "sharpness")?;
            NetworkSpec::Convex {
                width: *width,
                sharpness: *sharpness,
            }
        }
    };

    let r = cfg.riesz.as_ref().unwrap();
    run.riesz.s = r.s.unwrap().value();
    run.riesz.iterations = r.iterations.unwrap();
    run.riesz.band = r.band.unwrap();
    run.riesz.projection_tol = r.projection_tol.unwrap();
    run.riesz.step = r.step.unwrap();

    let o = cfg.output.as_ref().unwrap();
    let output = Output {
        dir: o.dir.clone().unwrap(),
        grid_resolution: o.grid_resolution.unwrap(),
        slice_levels: o.slice_levels.clone().unwrap(),
        boundary_csv: o.boundary_csv.unwrap(),
        grid: o.grid.unwrap(),
        svg: o.svg.unwrap(),
        checkpoint: o.checkpoint.unwrap(),
        checkpoint_every: o.checkpoint_every.unwrap(),
        shape_gradient: o.shape_gradient.unwrap(),
        normalize_history: o.normalize_history.unwrap(),
    };
    if output.grid_resolution < 2 {
        return Err(invalid(src, "output.grid_resolution", "must be at least 2"));
    }

    run.validate().map_err(|e| {
        let key = match e {
            shapeopt_core::Error::NonConvexArchitecture => "network",
            _ => "problem",
        };
        invalid(src, key, e.to_string())
    })?;
    Ok((run, output))
}

#[cfg(test)]
mod tests;
