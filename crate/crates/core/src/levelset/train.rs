//! Signed-distance fitting of network parameters with Adam.
//!
//! Minimizes `(1/N_x) Σ |φ(x_i) - t_i|² + (α/N_y) Σ |φ(y_j)|²`, warm-started
//! from the network passed in.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{LevelSet, LevelSetNetwork};
use crate::error::{Error, Result};
use crate::rng;
use crate::sampling::{self, PointCloud};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub steps: usize,
    pub learning_rate: f64,
    /// Minibatch size; `0` means full batch.
    pub batch_size: usize,
    pub seed: u64,
    /// Boundary weight `α ≥ 0`.
    pub alpha: f64,
    /// Uniform samples of `D` used by [`fit_to_analytic_sdf`].
    pub domain_samples: usize,
    /// Boundary samples used by [`fit_to_analytic_sdf`].
    pub boundary_samples: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 500,
            learning_rate: 1e-4,
            batch_size: 0,
            seed: 0,
            alpha: 10.0,
            domain_samples: 4000,
            boundary_samples: 256,
        }
    }
}

impl TrainConfig {
    /// Budget for fitting an initial shape from a random initialization.
    pub fn initial() -> Self {
        Self {
            steps: 3000,
            learning_rate: 3e-4,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Euclidean norm of the loss gradient at the starting parameters.
    pub initial_grad_norm: f64,
    pub steps: usize,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(Self::B1, self.t as f64);
        let c2 = 1.0 - libm::pow(Self::B2, self.t as f64);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = Self::B1 * self.m[i] + (1.0 - Self::B1) * g;
            self.v[i] = Self::B2 * self.v[i] + (1.0 - Self::B2) * g * g;
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            theta[i] -= self.lr * mh / (libm::sqrt(vh) + Self::EPS);
        }
    }
}

/// Fits `net` to signed-distance targets at `points` (row-major, `d` per
/// point) and to zero at `boundary` with weight `alpha`.
///
/// Returns the parameters with the lowest full-batch loss seen, so the final
/// loss never exceeds the initial one. A non-finite loss aborts with
/// [`Error::TrainingDiverged`] carrying the last finite parameters.
pub fn fit_signed_distance(
    net: &LevelSetNetwork,
    points: &[f64],
    targets: &[f64],
    boundary: &[f64],
    alpha: f64,
    cfg: &TrainConfig,
) -> Result<(LevelSetNetwork, FitReport)> {
    let d = net.dim();
    let nx = targets.len();
    let ny = boundary.len() / d;
    if points.len() != nx * d || boundary.len() % d != 0 {
        return Err(Error::invalid("point/target length mismatch"));
    }
    if nx + ny == 0 {
        return Err(Error::EmptySamples);
    }
    if !(alpha >= 0.0) || targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("targets must be finite and α ≥ 0"));
    }

    let mut all_points = Vec::with_capacity(points.len() + boundary.len());
    all_points.extend_from_slice(points);
    all_points.extend_from_slice(boundary);
    let mut all_targets = Vec::with_capacity(nx + ny);
    all_targets.extend_from_slice(targets);
    all_targets.resize(nx + ny, 0.0);
    let mut weights = Vec::with_capacity(nx + ny);
    if nx > 0 {
        weights.resize(nx, 1.0 / nx as f64);
    }
    if ny > 0 {
        weights.resize(nx + ny, alpha / ny as f64);
    }

    let mut work = net.clone();
    let mut grad = net.params().zeros_like();
    let mut theta = net.params().to_flat();
    let mut adam = Adam::new(theta.len(), cfg.learning_rate);

    let total = nx + ny;
    let full_batch = cfg.batch_size == 0 || cfg.batch_size >= total;
    let mut r = rng::seeded(cfg.seed);
    let mut bp = Vec::new();
    let mut bt = Vec::new();
    let mut bw = Vec::new();

    let initial_loss = work.weighted_sq_loss_grad(&all_points, &all_targets, &weights, &mut grad);
    if !initial_loss.is_finite() {
        return Err(Error::TrainingDiverged {
            step: 0,
            last_finite: Box::new(net.clone()),
        });
    }
    let initial_grad_norm = libm::sqrt(grad.to_flat().iter().map(|g| g * g).sum());
    let mut best_loss = initial_loss;
    let mut best = theta.clone();
    let mut last_finite = theta.clone();
    let mut gflat = grad.to_flat();

    for step in 0..cfg.steps {
        if step > 0 {
            let loss = if full_batch {
                work.weighted_sq_loss_grad(&all_points, &all_targets, &weights, &mut grad)
            } else {
                bp.clear();
                bt.clear();
                bw.clear();
                let scale = total as f64 / cfg.batch_size as f64;
                for _ in 0..cfg.batch_size {
                    let i = r.random_range(0..total);
                    bp.extend_from_slice(&all_points[i * d..(i + 1) * d]);
                    bt.push(all_targets[i]);
                    bw.push(weights[i] * scale);
                }
                work.weighted_sq_loss_grad(&bp, &bt, &bw, &mut grad)
            };
            if !loss.is_finite() {
                let mut out = net.clone();
                out.params_mut().set_from_flat(&last_finite);
                return Err(Error::TrainingDiverged {
                    step,
                    last_finite: Box::new(out),
                });
            }
            gflat = grad.to_flat();
            if full_batch && loss < best_loss {
                best_loss = loss;
                best.copy_from_slice(&theta);
            }
        }
        last_finite.copy_from_slice(&theta);
        adam.step(&mut theta, &gflat);
        work.params_mut().set_from_flat(&theta);
    }

    // loss of the parameters after the last update
    let final_params_loss = work.weighted_sq_loss(&all_points, &all_targets, &weights);
    if final_params_loss.is_finite() && final_params_loss < best_loss {
        best_loss = final_params_loss;
        best.copy_from_slice(&theta);
    } else if !full_batch && !final_params_loss.is_finite() {
        let mut out = net.clone();
        out.params_mut().set_from_flat(&last_finite);
        return Err(Error::TrainingDiverged {
            step: cfg.steps,
            last_finite: Box::new(out),
        });
    }
    work.params_mut().set_from_flat(&best);
    Ok((
        work,
        FitReport {
            initial_loss,
            final_loss: best_loss,
            initial_grad_norm,
            steps: cfg.steps,
        },
    ))
}

/// Fits `net` to an analytic signed distance: uniform samples of `D` with
/// targets `sdf(x)`, plus boundary samples projected onto `{sdf = 0}`.
pub fn fit_to_analytic_sdf(
    net: &LevelSetNetwork,
    sdf: &impl LevelSet,
    cfg: &TrainConfig,
) -> Result<(LevelSetNetwork, FitReport)> {
    let d = net.dim();
    if sdf.dim() != d {
        return Err(Error::invalid("dimension mismatch between network and shape"));
    }
    let domain = sampling::sample_uniform_domain(rng::derive_seed(cfg.seed, 1), cfg.domain_samples, d);
    let targets: Vec<f64> = domain.iter().map(|x| sdf.eval(x)).collect();
    let boundary = if cfg.boundary_samples > 0 && cfg.alpha > 0.0 {
        analytic_boundary(sdf, cfg.boundary_samples, rng::derive_seed(cfg.seed, 2))
    } else {
        PointCloud::new(d, sampling::Role::Boundary, 0)
    };
    fit_signed_distance(net, domain.coords(), &targets, boundary.coords(), cfg.alpha, cfg)
}

fn analytic_boundary(sdf: &impl LevelSet, n: usize, seed: u64) -> PointCloud {
    let d = sdf.dim();
    let mut out = PointCloud::new(d, sampling::Role::Boundary, seed);
    let mut r = rng::seeded(seed);
    let mut x = [0.0; 3];
    let mut tries = 0usize;
    while out.len() < n && tries < 10_000 * n {
        tries += 1;
        for xk in x[..d].iter_mut() {
            *xk = rng::uniform(&mut r, 0.0, 1.0);
        }
        if libm::fabs(sdf.eval(&x[..d])) > 0.05 {
            continue;
        }
        if let Ok(y) = sampling::project_to_boundary(sdf, &x[..d], 1e-10) {
            out.push(&y[..d]);
        }
    }
    out
}

/// Root-mean-square error of `net` against `sdf` on `n` fresh uniform
/// samples of `D`.
pub fn holdout_rmse(net: &impl LevelSet, sdf: &impl LevelSet, n: usize, seed: u64) -> f64 {
    let cloud = sampling::sample_uniform_domain(seed, n, net.dim());
    let sq: f64 = cloud
        .iter()
        .map(|x| {
            let e = net.eval(x) - sdf.eval(x);
            e * e
        })
        .sum();
    libm::sqrt(sq / n as f64)
}
