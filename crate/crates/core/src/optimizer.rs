//! The outer gradient-flow loop.
//!
//! One iteration evaluates the Hadamard density `f` on the current shape,
//! advects uniform samples of `D` and the boundary samples along
//! `V = ±f_NN n`, refits the network to the proxy signed distance of the
//! advected boundary, and re-projects the boundary samples onto the new
//! zero level set. A backtracking rule compares the objective before and
//! after the step on common random numbers and halves `τ` when the step
//! makes things worse.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::levelset::analytic::AnalyticShape;
use crate::levelset::{
    fit_signed_distance, fit_to_analytic_sdf, norm, normal, LevelSet, LevelSetNetwork, TrainConfig,
    SIREN_OMEGA_FIRST, SIREN_OMEGA_HIDDEN,
};
use crate::problems::{evaluate_on, ProblemKind, ProblemSamples, ProblemSpec, ShapeGradient};
use crate::rng::derive_seed;
use crate::sampling::{advect, project_to_boundary, riesz_boundary_sample, sample_uniform_domain, PointCloud, RieszConfig, Role};
use crate::spatial::KdTree;

/// Network family and size for the level set.
#[derive(Clone, Debug, PartialEq)]
pub enum NetworkSpec {
    Siren { hidden: Vec<usize>, omega: f64 },
    /// Input-convex network; initialized near a ball of the initial shape's
    /// extent, then fitted to it.
    Convex { width: usize, sharpness: f64 },
}

impl Default for NetworkSpec {
    fn default() -> Self {
        NetworkSpec::Siren {
            hidden: vec![80, 80],
            omega: SIREN_OMEGA_FIRST,
        }
    }
}

impl NetworkSpec {
    pub fn convex_default() -> Self {
        NetworkSpec::Convex {
            width: 64,
            sharpness: 40.0,
        }
    }

    fn build(&self, dim: usize, init: &AnalyticShape, seed: u64) -> LevelSetNetwork {
        match self {
            NetworkSpec::Siren { hidden, omega } => LevelSetNetwork::siren(dim, hidden, *omega, SIREN_OMEGA_HIDDEN, seed),
            NetworkSpec::Convex { width, sharpness } => {
                let (center, radius) = bounding_ball(init);
                LevelSetNetwork::convex(dim, *width, &center[..dim], radius, *sharpness, seed)
            }
        }
    }
}

fn bounding_ball(shape: &AnalyticShape) -> ([f64; 3], f64) {
    let mut c = [0.0; 3];
    match shape {
        AnalyticShape::Ball(b) => {
            c[..b.center.len()].copy_from_slice(&b.center);
            (c, b.radius)
        }
        AnalyticShape::Shell(s) => {
            c[..s.center.len()].copy_from_slice(&s.center);
            (c, s.r_outer)
        }
        AnalyticShape::Box(b) => {
            c[..b.center.len()].copy_from_slice(&b.center);
            (c, norm(&b.half))
        }
        AnalyticShape::Ellipse(e) => {
            c[..2].copy_from_slice(&e.center);
            (c, libm::sqrt(e.a * e.b))
        }
        AnalyticShape::Balls(bs) => {
            let d = bs[0].center.len();
            for b in bs {
                for k in 0..d {
                    c[k] += b.center[k] / bs.len() as f64;
                }
            }
            let r = bs
                .iter()
                .map(|b| libm::sqrt(crate::spatial::dist2(&b.center, &c[..d])) + b.radius)
                .fold(0.0, f64::max);
            (c, r)
        }
    }
}

/// Backtracking on the objective.
#[derive(Clone, Debug, PartialEq)]
pub struct StepControl {
    pub enabled: bool,
    /// Relative worsening tolerated before a step is rejected.
    pub tolerance: f64,
    pub max_halvings: usize,
    pub growth: f64,
    /// Consecutive accepted steps before `τ` grows.
    pub grow_after: usize,
    /// Consecutive iterations whose every halving was rejected before the
    /// run stops with [`Termination::StepUnderflow`].
    pub underflow_patience: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            enabled: true,
            tolerance: 0.005,
            max_halvings: 5,
            growth: 1.2,
            grow_after: 2,
            underflow_patience: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    /// Outer iterations.
    pub k_max: usize,
    /// Boundary samples are regenerated by Riesz sampling every `k_sample`
    /// iterations.
    pub k_sample: usize,
    /// Uniform samples of `D` advected and refitted each iteration.
    pub n_x: usize,
    /// Boundary samples.
    pub n_y: usize,
    /// Initial step size `τ₀`.
    pub tau: f64,
    /// Boundary weight of the refit loss.
    pub alpha: f64,
    /// Problem definition; `problem.n` is the PDE sample size.
    pub problem: ProblemSpec,
    pub seed: u64,
    /// Refit schedule (warm-started every iteration).
    pub train: TrainConfig,
    /// Fit of the initial shape from a fresh network.
    pub initial_train: TrainConfig,
    pub step_control: StepControl,
    pub initial_shape: AnalyticShape,
    pub network: NetworkSpec,
    pub riesz: RieszConfig,
    /// Residual tolerance for re-projected boundary samples.
    pub projection_tol: f64,
}

impl RunConfig {
    /// Defaults for `kind` in dimension `dim`, starting from `initial_shape`.
    pub fn new(kind: ProblemKind, k: usize, dim: usize, initial_shape: AnalyticShape) -> Self {
        let network = if kind == ProblemKind::ConvexNeumannMin {
            NetworkSpec::convex_default()
        } else {
            NetworkSpec::default()
        };
        Self {
            dim,
            k_max: 150,
            k_sample: 10,
            n_x: if dim == 2 { 2000 } else { 4000 },
            n_y: if dim == 2 { 200 } else { 600 },
            tau: default_tau(kind),
            alpha: 10.0,
            problem: ProblemSpec::new(kind, k),
            seed: 0,
            train: TrainConfig {
                domain_samples: 0,
                boundary_samples: 0,
                ..TrainConfig::default()
            },
            initial_train: TrainConfig::initial(),
            step_control: StepControl::default(),
            initial_shape,
            network,
            riesz: RieszConfig::default(),
            projection_tol: 1e-9,
        }
    }

    pub fn n(&self) -> usize {
        self.problem.n
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::invalid("dimension must be 2 or 3"));
        }
        if self.initial_shape.dim() != self.dim {
            return Err(Error::invalid("initial shape dimension does not match dim"));
        }
        if self.k_sample == 0 || self.n_x == 0 || self.n_y == 0 {
            return Err(Error::invalid("k_sample, n_x and n_y must be at least 1"));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid("τ must satisfy τ > 0"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid("α must satisfy α ≥ 0"));
        }
        if !(self.projection_tol > 0.0) {
            return Err(Error::invalid("projection_tol must be positive"));
        }
        let sc = &self.step_control;
        if !(sc.tolerance >= 0.0) || !(sc.growth >= 1.0) {
            return Err(Error::invalid("step control needs tolerance ≥ 0 and growth ≥ 1"));
        }
        if self.problem.kind == ProblemKind::ConvexNeumannMin && !matches!(self.network, NetworkSpec::Convex { .. }) {
            return Err(Error::NonConvexArchitecture);
        }
        if let NetworkSpec::Siren { hidden, .. } = &self.network {
            if hidden.is_empty() || hidden.contains(&0) {
                return Err(Error::invalid("hidden layer widths must be positive"));
            }
        }
        self.problem.validate()
    }
}

/// Calibrated initial step sizes (the density scales differ by orders of
/// magnitude between problems).
pub fn default_tau(kind: ProblemKind) -> f64 {
    match kind {
        ProblemKind::NeumannMax => 2e-4,
        ProblemKind::PoissonDirichlet => 0.5,
        ProblemKind::ConvexNeumannMin => 1e-5,
    }
}

/// One line of the run history, describing the iterate `Ω_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryRecord {
    pub k: usize,
    pub objective: f64,
    pub volume: f64,
    pub perimeter: Option<f64>,
    /// Leading graph eigenvalues `μ̂_0, μ̂_1, …` (eigenvalue problems).
    pub spectrum_head: Vec<f64>,
    pub normalized_eigenvalue: Option<f64>,
    pub cluster_size: usize,
    /// Step size that produced this iterate (`0` for the initial shape).
    pub tau: f64,
    /// Refits tried for this iterate.
    pub attempts: usize,
    /// `false` when every halving was rejected and the shape was kept.
    pub accepted: bool,
    /// RMS misfit of the network to its fitting targets.
    pub refit_rmse: f64,
    /// `max_j |φ_θ(y_j)|` over the boundary samples.
    pub boundary_residual: f64,
    pub boundary_points: usize,
    /// Projection failures discarded while producing this iterate.
    pub discarded: usize,
    pub resampled: bool,
    /// Fraction of test points in `|φ| < 0.2` with `|∇φ| ∈ [0.8, 1.2]`.
    pub eikonal_fraction: f64,
    /// `J(Ω_{k-1})` and `J(Ω_k)` on the samples of iteration `k-1`; the
    /// step-control comparison.
    pub j_reference: Option<f64>,
    pub j_candidate: Option<f64>,
    pub components: usize,
    pub eps: f64,
    /// Wall-clock time of the iteration in milliseconds (observer-provided).
    pub elapsed_ms: f64,
}

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    MaxIterations,
    StepUnderflow,
    ShapeVanished,
    ProjectionFailure,
    Failed(String),
}

impl Termination {
    pub fn code(&self) -> &'static str {
        match self {
            Termination::MaxIterations => "max_iterations",
            Termination::StepUnderflow => "step_underflow",
            Termination::ShapeVanished => "shape_vanished",
            Termination::ProjectionFailure => "projection_failure",
            Termination::Failed(_) => "failed",
        }
    }

    pub fn is_failure(&self) -> bool {
        !matches!(self, Termination::MaxIterations | Termination::StepUnderflow)
    }
}

#[derive(Clone, Debug)]
pub struct OptimizationState {
    pub k: usize,
    pub net: LevelSetNetwork,
    pub boundary: PointCloud,
    pub history: Vec<HistoryRecord>,
    /// Step size for the next iteration.
    pub tau: f64,
    /// Density and objective of the current iterate.
    pub current: ShapeGradient,
    pub accepts_in_row: usize,
    pub stalls_in_row: usize,
    pub termination: Option<Termination>,
}

/// Hooks for timing and streaming; the default does nothing.
pub trait Observer {
    /// Monotone clock in milliseconds.
    fn now_ms(&mut self) -> f64 {
        0.0
    }

    fn on_record(&mut self, _state: &OptimizationState, _record: &HistoryRecord) {}
}

impl Observer for () {}

const STREAM_INIT_NET: u64 = 1;
const STREAM_INIT_FIT: u64 = 2;
const STREAM_BOUNDARY: u64 = 3;
const STREAM_PDE: u64 = 4;
const STREAM_DOMAIN: u64 = 5;
const STREAM_REFIT: u64 = 6;
const STREAM_EIKONAL: u64 = 7;

fn iteration_seed(master: u64, stream: u64, k: usize) -> u64 {
    derive_seed(derive_seed(master, stream), k as u64)
}

/// `d̂(x̃_i) = sign(φ(x_i)) · dist(x̃_i, {ỹ_j})`, the sign taken at the
/// pre-advection position `x_i`.
pub fn proxy_signed_distance(
    prev: &impl LevelSet,
    original: &PointCloud,
    advected: &PointCloud,
    boundary: &[f64],
) -> Result<Vec<f64>> {
    let d = original.dim();
    if boundary.is_empty() {
        return Err(Error::EmptySamples);
    }
    if original.len() != advected.len() {
        return Err(Error::invalid("original and advected clouds differ in size"));
    }
    let tree = KdTree::new(boundary, d);
    Ok(original
        .iter()
        .zip(advected.iter())
        .map(|(x, xt)| {
            let dist = tree.nearest(xt).map(|(_, d2)| libm::sqrt(d2)).unwrap_or(0.0);
            if prev.eval(x) < 0.0 {
                -dist
            } else {
                dist
            }
        })
        .collect())
}

/// Fits the initial network and boundary, evaluates the first density and
/// records iteration 0.
pub fn initialize(cfg: &RunConfig, obs: &mut impl Observer) -> Result<OptimizationState> {
    cfg.validate()?;
    let t0 = obs.now_ms();
    let net0 = cfg.network.build(cfg.dim, &cfg.initial_shape, derive_seed(cfg.seed, STREAM_INIT_NET));
    let mut init_cfg = cfg.initial_train.clone();
    init_cfg.seed = derive_seed(cfg.seed, STREAM_INIT_FIT);
    let (net, _) = fit_to_analytic_sdf(&net0, &cfg.initial_shape, &init_cfg)?;
    let check = sample_uniform_domain(derive_seed(init_cfg.seed, 1), init_cfg.domain_samples, cfg.dim);
    let rmse = rms(check.iter().map(|x| net.eval(x) - cfg.initial_shape.eval(x)));
    let boundary = riesz_boundary_sample(&net, cfg.n_y, iteration_seed(cfg.seed, STREAM_BOUNDARY, 0), &cfg.riesz)?;
    let current = evaluate_at(&net, cfg, &boundary, 0)?;
    let mut state = OptimizationState {
        k: 0,
        net,
        boundary,
        history: Vec::new(),
        tau: cfg.tau,
        current,
        accepts_in_row: 0,
        stalls_in_row: 0,
        termination: None,
    };
    let record = make_record(&state, cfg, RecordExtras {
        tau: 0.0,
        attempts: 1,
        accepted: true,
        refit_rmse: rmse,
        discarded: 0,
        resampled: true,
        j_reference: None,
        j_candidate: None,
        elapsed_ms: obs.now_ms() - t0,
    });
    state.history.push(record);
    obs.on_record(&state, state.history.last().unwrap());
    Ok(state)
}

/// Runs up to `k_max` iterations from the configured initial shape. Errors
/// during the loop end the run with a failure [`Termination`] and the
/// partial history; only invalid configurations and initialization
/// failures are returned as `Err`.
pub fn run(cfg: &RunConfig, obs: &mut impl Observer) -> Result<OptimizationState> {
    let mut state = initialize(cfg, obs)?;
    while state.termination.is_none() {
        if state.k >= cfg.k_max {
            state.termination = Some(Termination::MaxIterations);
            break;
        }
        step(&mut state, cfg, obs);
    }
    Ok(state)
}

/// One outer iteration. On failure the state is left at the last iterate
/// and `termination` is set.
pub fn step(state: &mut OptimizationState, cfg: &RunConfig, obs: &mut impl Observer) {
    let sign = cfg.problem.kind.velocity_sign();
    let current = state.current.clone();
    let density = move |x: &[f64]| sign * current.density_at(x);
    if let Err(e) = step_with(state, cfg, obs, &density) {
        state.termination = Some(match e {
            Error::ShapeVanished { .. } => Termination::ShapeVanished,
            Error::ProjectionFailed { .. } | Error::BoundaryTooSmall { .. } => Termination::ProjectionFailure,
            other => Termination::Failed(other.to_string()),
        });
    }
}

struct Candidate {
    net: LevelSetNetwork,
    boundary: PointCloud,
    rmse: f64,
    discarded: usize,
}

/// `signed_speed(x)` is the normal speed: `V(x) = signed_speed(x) n(x)`.
pub(crate) fn step_with(
    state: &mut OptimizationState,
    cfg: &RunConfig,
    obs: &mut impl Observer,
    signed_speed: &dyn Fn(&[f64]) -> f64,
) -> Result<()> {
    let t0 = obs.now_ms();
    let k = state.k;
    let d = cfg.dim;
    let net = state.net.clone();
    let velocity = |x: &[f64], v: &mut [f64]| {
        let mut nrm = [0.0; 3];
        let s = signed_speed(x);
        if normal(&net, x, &mut nrm).is_err() || !s.is_finite() {
            v[..d].iter_mut().for_each(|c| *c = 0.0);
            return;
        }
        for c in 0..d {
            v[c] = s * nrm[c];
        }
    };
    let domain = sample_uniform_domain(iteration_seed(cfg.seed, STREAM_DOMAIN, k), cfg.n_x, d);
    let j_ref = state.current.objective;
    let maximize = cfg.problem.kind.maximize();
    let sc = &cfg.step_control;

    let mut tau = state.tau;
    let mut attempts = 0;
    let mut outcome: Option<(Candidate, Option<f64>)> = None;
    let mut last_err = None;
    for attempt in 0..=sc.max_halvings {
        attempts = attempt + 1;
        let cand = match advance(state, cfg, &domain, &velocity, tau, attempt) {
            Ok(c) => c,
            Err(e @ (Error::ShapeVanished { .. } | Error::ProjectionFailed { .. } | Error::BoundaryTooSmall { .. })) => {
                last_err = Some(e);
                tau *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !sc.enabled {
            outcome = Some((cand, None));
            break;
        }
        // common random numbers: the candidate is scored on iteration k's seed
        let j_cand = match evaluate_at(&cand.net, cfg, &cand.boundary, k) {
            Ok(g) => g.objective,
            Err(Error::ShapeVanished { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        let band = sc.tolerance * libm::fabs(j_ref);
        let ok = if maximize {
            j_cand >= j_ref - band
        } else {
            j_cand <= j_ref + band
        };
        if ok {
            outcome = Some((cand, Some(j_cand)));
            break;
        }
        last_err = None;
        if attempt < sc.max_halvings {
            tau *= 0.5;
        }
    }

    let next_k = k + 1;
    let (accepted, extras) = match outcome {
        Some((cand, j_cand)) => {
            state.net = cand.net;
            let resampled = next_k % cfg.k_sample == 0;
            state.boundary = if resampled {
                riesz_boundary_sample(&state.net, cfg.n_y, iteration_seed(cfg.seed, STREAM_BOUNDARY, next_k), &cfg.riesz)?
            } else {
                cand.boundary
            };
            state.accepts_in_row += 1;
            state.stalls_in_row = 0;
            let used = tau;
            if state.accepts_in_row >= sc.grow_after && sc.enabled {
                state.accepts_in_row = 0;
                tau = (tau * sc.growth).min(cfg.tau);
            }
            state.tau = tau;
            (
                true,
                RecordExtras {
                    tau: used,
                    attempts,
                    accepted: true,
                    refit_rmse: cand.rmse,
                    discarded: cand.discarded,
                    resampled,
                    j_reference: j_cand.map(|_| j_ref),
                    j_candidate: j_cand,
                    elapsed_ms: 0.0,
                },
            )
        }
        None => {
            if let Some(e) = last_err {
                return Err(e);
            }
            state.accepts_in_row = 0;
            state.stalls_in_row += 1;
            state.tau = tau;
            let resampled = next_k % cfg.k_sample == 0;
            if resampled {
                state.boundary =
                    riesz_boundary_sample(&state.net, cfg.n_y, iteration_seed(cfg.seed, STREAM_BOUNDARY, next_k), &cfg.riesz)?;
            }
            let rmse = state.history.last().map(|r| r.refit_rmse).unwrap_or(0.0);
            (
                false,
                RecordExtras {
                    tau,
                    attempts,
                    accepted: false,
                    refit_rmse: rmse,
                    discarded: 0,
                    resampled,
                    j_reference: Some(j_ref),
                    j_candidate: None,
                    elapsed_ms: 0.0,
                },
            )
        }
    };

    state.current = evaluate_at(&state.net, cfg, &state.boundary, next_k)?;
    state.k = next_k;
    let mut extras = extras;
    extras.elapsed_ms = obs.now_ms() - t0;
    let record = make_record(state, cfg, extras);
    state.history.push(record);
    if !accepted && state.stalls_in_row >= sc.underflow_patience {
        state.termination = Some(Termination::StepUnderflow);
    }
    obs.on_record(state, state.history.last().unwrap());
    Ok(())
}

/// Advects, refits and re-projects with step `tau`.
fn advance(
    state: &OptimizationState,
    cfg: &RunConfig,
    domain: &PointCloud,
    velocity: &dyn Fn(&[f64], &mut [f64]),
    tau: f64,
    attempt: usize,
) -> Result<Candidate> {
    let d = cfg.dim;
    let moved = advect(domain, velocity, tau);
    let mut moved_boundary = advect(&state.boundary, velocity, tau);
    let flags = moved_boundary.clamped().to_vec();
    moved_boundary.retain_indices(|i| !flags[i]);
    if moved_boundary.is_empty() {
        return Err(Error::BoundaryTooSmall {
            requested: state.boundary.len(),
            projected: 0,
        });
    }
    let targets = proxy_signed_distance(&state.net, domain, &moved, moved_boundary.coords())?;
    let mut train = cfg.train.clone();
    train.seed = derive_seed(iteration_seed(cfg.seed, STREAM_REFIT, state.k), attempt as u64);
    let (net, _) = fit_signed_distance(&state.net, moved.coords(), &targets, moved_boundary.coords(), cfg.alpha, &train)?;
    let rmse = rms(moved.iter().zip(&targets).map(|(x, t)| net.eval(x) - t));

    let mut boundary = PointCloud::new(d, Role::Boundary, state.boundary.seed);
    boundary.meta = state.boundary.meta.clone();
    let mut discarded = 0;
    for y in moved_boundary.iter() {
        match project_to_boundary(&net, y, cfg.projection_tol) {
            Ok(p) if p[..d].iter().all(|v| (0.0..=1.0).contains(v)) => boundary.push(&p[..d]),
            _ => discarded += 1,
        }
    }
    if 2 * discarded > moved_boundary.len() || boundary.is_empty() {
        return Err(Error::ProjectionFailed {
            steps: crate::sampling::PROJECTION_MAX_STEPS,
            residual: f64::NAN,
        });
    }
    // the density is reported at the boundary samples; refill the cloud when
    // too many were lost
    if boundary.len() < cfg.n_y / 2 {
        boundary = riesz_boundary_sample(&net, cfg.n_y, iteration_seed(cfg.seed, STREAM_BOUNDARY, state.k + 1), &cfg.riesz)?;
    }
    Ok(Candidate {
        net,
        boundary,
        rmse,
        discarded,
    })
}

fn evaluate_at(net: &LevelSetNetwork, cfg: &RunConfig, boundary: &PointCloud, k: usize) -> Result<ShapeGradient> {
    let samples = ProblemSamples::draw(net, &cfg.problem, iteration_seed(cfg.seed, STREAM_PDE, k))?;
    evaluate_on(net, &cfg.problem, &samples, boundary.coords())
}

struct RecordExtras {
    tau: f64,
    attempts: usize,
    accepted: bool,
    refit_rmse: f64,
    discarded: usize,
    resampled: bool,
    j_reference: Option<f64>,
    j_candidate: Option<f64>,
    elapsed_ms: f64,
}

fn make_record(state: &OptimizationState, cfg: &RunConfig, x: RecordExtras) -> HistoryRecord {
    let g = &state.current;
    let residual = state
        .boundary
        .iter()
        .map(|y| libm::fabs(state.net.eval(y)))
        .fold(0.0, f64::max);
    HistoryRecord {
        k: state.k,
        objective: g.objective,
        volume: g.volume,
        perimeter: g.perimeter,
        spectrum_head: g.spectrum.iter().copied().take(8).collect(),
        normalized_eigenvalue: g.normalized_eigenvalue,
        cluster_size: g.cluster_size,
        tau: x.tau,
        attempts: x.attempts,
        accepted: x.accepted,
        refit_rmse: x.refit_rmse,
        boundary_residual: residual,
        boundary_points: state.boundary.len(),
        discarded: x.discarded,
        resampled: x.resampled,
        eikonal_fraction: eikonal_fraction(&state.net, iteration_seed(cfg.seed, STREAM_EIKONAL, state.k)),
        j_reference: x.j_reference,
        j_candidate: x.j_candidate,
        components: g.components,
        eps: g.eps,
        elapsed_ms: x.elapsed_ms,
    }
}

/// Fraction of uniform test points with `|φ| < 0.2` whose gradient norm
/// lies in `[0.8, 1.2]`.
pub fn eikonal_fraction(ls: &impl LevelSet, seed: u64) -> f64 {
    let d = ls.dim();
    let cloud = sample_uniform_domain(seed, 2000, d);
    let mut g = [0.0; 3];
    let (mut total, mut good) = (0usize, 0usize);
    for x in cloud.iter() {
        let v = ls.gradient(x, &mut g);
        if libm::fabs(v) < 0.2 {
            total += 1;
            let n = norm(&g[..d]);
            if (0.8..=1.2).contains(&n) {
                good += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        good as f64 / total as f64
    }
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for v in values {
        s += v * v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        libm::sqrt(s / n as f64)
    }
}

#[cfg(test)]
mod tests;
