//! Executes a configured run and writes its artifacts.
//!
//! | file | contents |
//! |------|----------|
//! | `history.jsonl` | header line, then one record per iterate; rewritten atomically after every record |
//! | `checkpoint.json` | final network |
//! | `checkpoints/iter_{k}.json` | network of iterate `k`, with `output.checkpoint_every > 0` |
//! | `boundary.csv` (+ `.meta.json`) | final boundary samples |
//! | `grid.csv`, `contour.svg` | 2D level-set grid and zero contour |
//! | `grid_z{level}.csv`, `contour_z{level}.svg` | 3D slices `x₂ = level` |
//! | `shape_gradient.csv`, `shape_gradient.jsonl` | final Hadamard density and diagnostics |
//! | `config.toml` | resolved configuration |
//! | `metadata.json` | config echo, defaulted keys, hash, build, termination |

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use shapeopt_core::optimizer::{self, HistoryRecord, Observer, OptimizationState, Termination};
use shapeopt_core::LevelSetNetwork;

use crate::atomic::{create_dir, write_atomic};
use crate::checkpoint;
use crate::config::Resolved;
use crate::contour::{marching_squares, render_svg, stats, ContourStats};
use crate::csvio::{write_gradient, write_points, Grid};
use crate::error::{CliError, CliResult};
use crate::history::{Header, History};
use crate::meta::Stamp;

/// Resolution of the grid used for the per-iteration contour count.
pub const TRACK_RESOLUTION: usize = 97;

/// Zero-contour statistics of a 2D network on an `R × R` grid.
pub fn contour_stats(net: &LevelSetNetwork, resolution: usize) -> ContourStats {
    stats(&marching_squares(&Grid::evaluate(net, resolution, None)))
}

struct Recorder<'a> {
    start: Instant,
    history: History,
    path: PathBuf,
    dim: usize,
    verbose: bool,
    /// Directory and period of per-iterate checkpoints.
    snapshots: Option<(PathBuf, usize)>,
    stamp: Stamp,
    error: Option<CliError>,
    on_record: Option<&'a mut dyn FnMut(&OptimizationState, &HistoryRecord)>,
}

impl Recorder<'_> {
    fn flush(&mut self) {
        if self.error.is_none() {
            if let Err(e) = write_atomic(&self.path, self.history.as_str().as_bytes()) {
                self.error = Some(e);
            }
        }
    }
}

impl Observer for Recorder<'_> {
    fn now_ms(&mut self) -> f64 {
        self.start.elapsed().as_secs_f64() * 1e3
    }

    fn on_record(&mut self, state: &OptimizationState, r: &HistoryRecord) {
        let regions = (self.dim == 2).then(|| contour_stats(&state.net, TRACK_RESOLUTION).regions);
        self.history.push(r, regions);
        self.flush();
        if let Some((dir, every)) = &self.snapshots {
            if r.k % every == 0 && self.error.is_none() {
                let path = dir.join(snapshot_name(r.k));
                if let Err(e) = checkpoint::save(&path, &state.net, self.stamp.clone(), Some(r.k)) {
                    self.error = Some(e);
                }
            }
        }
        if self.verbose {
            eprintln!(
                "k {:>4}  J {:.6}  vol {:.4}  tau {:.2e}  accepted {}  rmse {:.1e}  residual {:.1e}  {:.1} s",
                r.k,
                r.objective,
                r.volume,
                r.tau,
                r.accepted,
                r.refit_rmse,
                r.boundary_residual,
                r.elapsed_ms / 1e3
            );
        }
        if let Some(f) = self.on_record.as_mut() {
            f(state, r);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    #[serde(flatten)]
    pub stamp: Stamp,
    pub termination: String,
    pub termination_detail: Option<String>,
    pub iterations: usize,
    pub final_objective: Option<f64>,
    pub contour: Option<ContourSummary>,
    pub wall_seconds: f64,
    /// Keys absent from the file and filled with defaults.
    pub defaulted: Vec<String>,
    pub config: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContourSummary {
    pub loops: usize,
    pub regions: usize,
    pub length: f64,
    pub area: f64,
    pub isoperimetric_ratio: f64,
}

impl From<&ContourStats> for ContourSummary {
    fn from(s: &ContourStats) -> Self {
        Self {
            loops: s.loops,
            regions: s.regions,
            length: s.length,
            area: s.area,
            isoperimetric_ratio: s.isoperimetric_ratio(),
        }
    }
}

pub struct RunOutcome {
    pub state: OptimizationState,
    pub termination: Termination,
    pub dir: PathBuf,
    pub contour: Option<ContourStats>,
}

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Overrides `output.dir`.
    pub out_dir: Option<PathBuf>,
    /// Progress lines on stderr.
    pub verbose: bool,
    /// Called after every history record.
    pub on_record: Option<&'a mut dyn FnMut(&OptimizationState, &HistoryRecord)>,
}

/// Runs `cfg` to completion. A run that stops with a failure termination
/// still writes every artifact of its last iterate and returns `Ok`; only
/// configuration, initialization and IO errors are `Err`, after the partial
/// history and metadata are flushed.
pub fn run(cfg: &Resolved, opts: RunOptions<'_>) -> CliResult<RunOutcome> {
    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    create_dir(&dir)?;
    let stamp = Stamp::new(&cfg.hash);
    write_atomic(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    let header = Header {
        stamp: stamp.clone(),
        problem: cfg.run.problem.kind.tag().to_string(),
        k: cfg.run.problem.k,
        dim: cfg.run.dim,
        seed: cfg.run.seed,
        normalized: cfg.output.normalize_history,
    };
    let snapshots = match cfg.output.checkpoint_every {
        0 => None,
        every => {
            let d = dir.join("checkpoints");
            create_dir(&d)?;
            Some((d, every))
        }
    };
    let mut rec = Recorder {
        start: Instant::now(),
        history: History::new(&header),
        path: dir.join("history.jsonl"),
        dim: cfg.run.dim,
        verbose: opts.verbose,
        snapshots,
        stamp: stamp.clone(),
        error: None,
        on_record: opts.on_record,
    };
    rec.flush();

    let mut state = match optimizer::initialize(&cfg.run, &mut rec) {
        Ok(s) => s,
        Err(e) => {
            write_metadata(&dir, cfg, &stamp, "failed", Some(e.to_string()), None, &rec)?;
            return Err(e.into());
        }
    };
    while state.termination.is_none() {
        if let Some(e) = rec.error.take() {
            return Err(e);
        }
        if state.k >= cfg.run.k_max {
            state.termination = Some(Termination::MaxIterations);
            break;
        }
        optimizer::step(&mut state, &cfg.run, &mut rec);
    }
    if let Some(e) = rec.error.take() {
        return Err(e);
    }
    let termination = state.termination.clone().unwrap();
    let contour = write_artifacts(&dir, cfg, &stamp, &state)?;
    let detail = match &termination {
        Termination::Failed(m) => Some(m.clone()),
        _ => None,
    };
    write_metadata(&dir, cfg, &stamp, termination.code(), detail, Some((&state, contour.as_ref())), &rec)?;
    Ok(RunOutcome {
        state,
        termination,
        dir,
        contour,
    })
}

/// File name of the iterate-`k` checkpoint inside `checkpoints/`.
pub fn snapshot_name(k: usize) -> String {
    format!("iter_{k:04}.json")
}

fn slice_name(stem: &str, level: f64, ext: &str) -> String {
    format!("{stem}_z{level}.{ext}")
}

fn write_artifacts(dir: &Path, cfg: &Resolved, stamp: &Stamp, state: &OptimizationState) -> CliResult<Option<ContourStats>> {
    let out = &cfg.output;
    if out.checkpoint {
        checkpoint::save(&dir.join("checkpoint.json"), &state.net, stamp.clone(), Some(state.k))?;
    }
    if out.boundary_csv {
        write_points(&dir.join("boundary.csv"), &state.boundary, stamp)?;
    }
    if out.shape_gradient {
        write_gradient(dir, "shape_gradient", &state.current, stamp)?;
    }
    let overlay = |level: Option<f64>| -> Vec<[f64; 2]> {
        state
            .boundary
            .iter()
            .filter(|y| level.is_none_or(|l| (y[2] - l).abs() < 0.02))
            .map(|y| [y[0], y[1]])
            .collect()
    };
    let mut contour = None;
    let levels: Vec<Option<f64>> = if cfg.run.dim == 2 {
        vec![None]
    } else {
        out.slice_levels.iter().map(|&l| Some(l)).collect()
    };
    for level in levels {
        let grid = Grid::evaluate(&state.net, out.grid_resolution, level);
        let (grid_name, svg_name) = match level {
            None => ("grid.csv".to_string(), "contour.svg".to_string()),
            Some(l) => (slice_name("grid", l, "csv"), slice_name("contour", l, "svg")),
        };
        if out.grid {
            write_atomic(&dir.join(grid_name), &grid.to_csv(stamp))?;
        }
        let lines = marching_squares(&grid);
        if level.is_none() {
            contour = Some(stats(&lines));
        }
        if out.svg {
            let title = format!("{} k={} iteration {}", cfg.run.problem.kind.tag(), cfg.run.problem.k, state.k);
            write_atomic(&dir.join(svg_name), render_svg(&lines, &overlay(level), stamp, &title).as_bytes())?;
        }
    }
    Ok(contour)
}

fn write_metadata(
    dir: &Path,
    cfg: &Resolved,
    stamp: &Stamp,
    termination: &str,
    detail: Option<String>,
    end: Option<(&OptimizationState, Option<&ContourStats>)>,
    rec: &Recorder<'_>,
) -> CliResult<()> {
    let meta = Metadata {
        stamp: stamp.clone(),
        termination: termination.to_string(),
        termination_detail: detail,
        iterations: end.map_or(0, |(s, _)| s.k),
        final_objective: end.map(|(s, _)| s.current.objective),
        contour: end.and_then(|(_, c)| c.map(ContourSummary::from)),
        wall_seconds: rec.start.elapsed().as_secs_f64(),
        defaulted: cfg.defaulted.clone(),
        config: serde_json::to_value(&cfg.config).expect("configuration serializes"),
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');
    write_atomic(&dir.join("metadata.json"), json.as_bytes())
}
