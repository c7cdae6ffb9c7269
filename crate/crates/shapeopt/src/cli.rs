//! Subcommands of the `shapeopt` binary.
//!
//! Exit codes: `0` success, `1` runtime failure (IO, numerical failure,
//! failed run, failed self-test), `2` bad input (arguments, configuration,
//! malformed files). Diagnostics go to stderr as `error: …` lines.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use shapeopt_core::graph::{neumann_eigen, Kernel};
use shapeopt_core::levelset::analytic::Ball;
use shapeopt_core::levelset::LevelSet;

use crate::atomic::write_atomic;
use crate::checkpoint;
use crate::config::load_config;
use crate::contour::{marching_squares, render_svg, stats};
use crate::csvio::{read_points, Grid};
use crate::error::{CliError, CliResult};
use crate::meta::Stamp;
use crate::runner::{self, RunOptions};
use crate::selftest::{self, J11P};

#[derive(Debug, Parser)]
#[command(name = "shapeopt", version = crate::meta::BUILD_ID, about = "Meshless level-set shape optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment from a TOML configuration (`.toml` may be omitted).
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// No per-iteration progress on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Evaluate a checkpoint on the regular grid over the unit box.
    EvalGrid {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 129)]
        res: usize,
        /// Output file (2D) or file stem (3D slices `{stem}_z{level}.csv`).
        #[arg(long, default_value = "grid.csv")]
        out: PathBuf,
        /// Slice levels `x₂ = level` for 3D checkpoints.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        levels: Vec<f64>,
    },
    /// Render the zero contour of a grid CSV as SVG.
    Plot {
        grid: PathBuf,
        /// Boundary point CSV to overlay.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Output SVG (default: the grid path with `.svg`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph Neumann eigenvalues of a checkpoint or an exact disk.
    Spectrum(SpectrumArgs),
    /// Run the built-in oracle checks.
    Selftest,
}

#[derive(Clone, Debug, Args)]
pub struct SpectrumArgs {
    /// Network checkpoint; omit with `--disk`.
    pub checkpoint: Option<PathBuf>,
    /// Exact disk (ball in 3D) of this radius centered in the box.
    #[arg(long, conflicts_with = "checkpoint")]
    pub disk: Option<f64>,
    /// Dimension of `--disk`.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    /// Eigenvalues above zero to report.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub volume_samples: usize,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Run { config, out, quiet } => cmd_run(&config, out, quiet),
        Command::EvalGrid {
            checkpoint,
            res,
            out,
            levels,
        } => cmd_eval_grid(&checkpoint, res, &out, &levels),
        Command::Plot { grid, points, out } => cmd_plot(&grid, points.as_deref(), out),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Selftest => Ok(cmd_selftest()),
    }
}

fn cmd_run(config: &Path, out: Option<PathBuf>, quiet: bool) -> CliResult<i32> {
    let cfg = load_config(config)?;
    let outcome = runner::run(
        &cfg,
        RunOptions {
            out_dir: out,
            verbose: !quiet,
            on_record: None,
        },
    )?;
    println!("termination: {}", outcome.termination.code());
    println!("iterations: {}", outcome.state.k);
    println!("objective: {}", outcome.state.current.objective);
    if let Some(c) = &outcome.contour {
        println!(
            "contour: {} loop(s), {} region(s), isoperimetric ratio {:.4}",
            c.loops,
            c.regions,
            c.isoperimetric_ratio()
        );
    }
    println!("artifacts: {}", outcome.dir.display());
    if let shapeopt_core::optimizer::Termination::Failed(m) = &outcome.termination {
        eprintln!("error: run failed: {m}");
    }
    Ok(if outcome.termination.is_failure() { 1 } else { 0 })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn cmd_eval_grid(path: &Path, res: usize, out: &Path, levels: &[f64]) -> CliResult<i32> {
    if res < 2 {
        return Err(usage("--res must be at least 2"));
    }
    let (net, c) = checkpoint::load(path)?;
    let stamp = Stamp::new(&c.stamp.config_hash);
    if net.dim() == 2 {
        write_atomic(out, &Grid::evaluate(&net, res, None).to_csv(&stamp))?;
        println!("{}", out.display());
    } else {
        let stem = out.with_extension("");
        for &l in levels {
            let p = PathBuf::from(format!("{}_z{l}.csv", stem.display()));
            write_atomic(&p, &Grid::evaluate(&net, res, Some(l)).to_csv(&stamp))?;
            println!("{}", p.display());
        }
    }
    Ok(0)
}

fn cmd_plot(path: &Path, points: Option<&Path>, out: Option<PathBuf>) -> CliResult<i32> {
    let grid = Grid::read(path)?;
    let overlay: Vec<[f64; 2]> = match points {
        Some(p) => read_points(p)?.iter().map(|x| [x[0], x[1]]).collect(),
        None => Vec::new(),
    };
    let lines = marching_squares(&grid);
    let s = stats(&lines);
    let title = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let svg = render_svg(&lines, &overlay, &Stamp::standalone(), &title);
    let out = out.unwrap_or_else(|| path.with_extension("svg"));
    write_atomic(&out, svg.as_bytes())?;
    println!("loops: {}", s.loops);
    println!("open: {}", s.open);
    println!("regions: {}", s.regions);
    println!("length: {}", s.length);
    println!("area: {}", s.area);
    if s.area > 0.0 {
        println!("isoperimetric_ratio: {}", s.isoperimetric_ratio());
    }
    println!("svg: {}", out.display());
    Ok(0)
}

/// Per-seed `(Vol, μ̂_1..=k)`.
pub fn spectrum_runs(ls: &impl LevelSet, a: &SpectrumArgs) -> CliResult<Vec<(f64, Vec<f64>)>> {
    (a.seed..a.seed + a.seeds)
        .map(|seed| {
            let ne = neumann_eigen(ls, a.n, None, a.k, seed, Kernel::Indicator, a.volume_samples)?;
            Ok((ne.volume, ne.mu[1..=a.k].to_vec()))
        })
        .collect()
}

fn cmd_spectrum(a: &SpectrumArgs) -> CliResult<i32> {
    if a.k == 0 || a.seeds == 0 || a.n <= a.k {
        return Err(usage("need --k ≥ 1, --seeds ≥ 1 and --n > k"));
    }
    let runs = match (&a.checkpoint, a.disk) {
        (Some(p), None) => spectrum_runs(&checkpoint::load(p)?.0, a)?,
        (None, Some(r)) => {
            if !(2..=3).contains(&a.dim) || !(r > 0.0 && r <= 0.5) {
                return Err(usage("--disk needs 0 < R ≤ 0.5 and --dim 2 or 3"));
            }
            spectrum_runs(&Ball::new(&vec![0.5; a.dim], r), a)?
        }
        _ => return Err(usage("give a checkpoint or --disk R")),
    };
    for (s, (vol, mu)) in runs.iter().enumerate() {
        let mu_s: Vec<String> = mu.iter().map(|m| format!("{m:.6}")).collect();
        let norm: Vec<String> = mu.iter().map(|m| format!("{:.6}", vol * m)).collect();
        println!(
            "seed {}: vol {vol:.6}  mu {}  vol*mu {}",
            a.seed + s as u64,
            mu_s.join(" "),
            norm.join(" ")
        );
    }
    let m = runs.len() as f64;
    let mean_norm: f64 = runs.iter().map(|(v, mu)| v * mu[0]).sum::<f64>() / m;
    let mean_mu: f64 = runs.iter().map(|(_, mu)| mu[0]).sum::<f64>() / m;
    println!("mean mu_1: {mean_mu:.6}");
    println!("mean vol*mu_1: {mean_norm:.6}");
    if a.disk.is_some() && a.dim == 2 {
        let exact = std::f64::consts::PI * J11P * J11P;
        println!("disk reference pi*j'11^2: {exact:.6} (relative error {:+.2}%)", 100.0 * (mean_norm / exact - 1.0));
    }
    Ok(0)
}

fn cmd_selftest() -> i32 {
    let checks = selftest::run_checks();
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    i32::from(failed > 0)
}
