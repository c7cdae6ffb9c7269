//! Boundary samples that (locally) minimize the Riesz `s`-energy
//! `E = Σ_{i≠j} |y_i - y_j|^{-s}` subject to `φ(y_i) = 0`.

use alloc::vec::Vec;

use super::{project_to_boundary, PointCloud, Role};
use crate::error::{Error, Result};
use crate::levelset::{normal, LevelSet};
use crate::rng;

/// Pairwise distances are floored here before taking powers.
pub const DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RieszConfig {
    /// Riesz exponent; `None` uses `s = d`.
    pub s: Option<f64>,
    pub iterations: usize,
    /// Initial candidates are drawn from `|φ| < band` before projection.
    pub band: f64,
    /// Residual tolerance of the Newton projection.
    pub projection_tol: f64,
    /// Initial step length, as a fraction of the mean nearest-neighbor spacing.
    pub step: f64,
}

impl Default for RieszConfig {
    fn default() -> Self {
        Self {
            s: None,
            iterations: 1000,
            band: 0.05,
            projection_tol: 1e-10,
            step: 0.25,
        }
    }
}

fn kernel(r2: f64, s: f64) -> f64 {
    let r2 = r2.max(DISTANCE_FLOOR * DISTANCE_FLOOR);
    if s == 2.0 {
        1.0 / r2
    } else if s == 1.0 {
        1.0 / libm::sqrt(r2)
    } else if s == 3.0 {
        1.0 / (r2 * libm::sqrt(r2))
    } else {
        libm::pow(r2, -0.5 * s)
    }
}

/// `Σ_{i≠j} |y_i - y_j|^{-s}` over an `n × d` row-major array.
pub fn riesz_energy(points: &[f64], dim: usize, s: f64) -> f64 {
    let n = points.len() / dim;
    let mut e = 0.0;
    for i in 0..n {
        let pi = &points[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let pj = &points[j * dim..(j + 1) * dim];
            e += kernel(crate::spatial::dist2(pi, pj), s);
        }
    }
    2.0 * e
}

fn riesz_gradient(points: &[f64], dim: usize, s: f64, grad: &mut [f64]) {
    let n = points.len() / dim;
    grad.iter_mut().for_each(|g| *g = 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let mut diff = [0.0; 3];
            let mut r2 = 0.0;
            for k in 0..dim {
                diff[k] = points[i * dim + k] - points[j * dim + k];
                r2 += diff[k] * diff[k];
            }
            let r2 = r2.max(DISTANCE_FLOOR * DISTANCE_FLOOR);
            // d/dy_i of 2 r^{-s} = -2 s r^{-s-2} (y_i - y_j)
            let c = -2.0 * s * kernel(r2, s) / r2;
            for k in 0..dim {
                grad[i * dim + k] += c * diff[k];
                grad[j * dim + k] -= c * diff[k];
            }
        }
    }
}

fn mean_nn_spacing(points: &[f64], dim: usize) -> f64 {
    let n = points.len() / dim;
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let p = &points[i * dim..(i + 1) * dim];
        let best = (0..n)
            .filter(|&j| j != i)
            .map(|j| crate::spatial::dist2(p, &points[j * dim..(j + 1) * dim]))
            .fold(f64::INFINITY, f64::min);
        total += libm::sqrt(best);
    }
    total / n as f64
}

fn initial_boundary(ls: &impl LevelSet, n: usize, cfg: &RieszConfig, seed: u64) -> Result<Vec<f64>> {
    let d = ls.dim();
    let mut r = rng::seeded(seed);
    let mut out = Vec::with_capacity(n * d);
    let mut x = [0.0; 3];
    let budget = 2000 * n + 100_000;
    let mut count = 0;
    for _ in 0..budget {
        if count == n {
            break;
        }
        for xk in x[..d].iter_mut() {
            *xk = rng::uniform(&mut r, 0.0, 1.0);
        }
        if libm::fabs(ls.eval(&x[..d])) >= cfg.band {
            continue;
        }
        if let Ok(y) = project_to_boundary(ls, &x[..d], cfg.projection_tol) {
            if y[..d].iter().all(|v| (0.0..=1.0).contains(v)) {
                out.extend_from_slice(&y[..d]);
                count += 1;
            }
        }
    }
    if count < n {
        return Err(Error::BoundaryTooSmall {
            requested: n,
            projected: count,
        });
    }
    Ok(out)
}

/// `n` points on `{φ = 0}` spread out by projected gradient descent on the
/// Riesz energy. Each accepted iteration decreases the energy; rejected
/// steps halve the step length.
pub fn riesz_boundary_sample(
    ls: &impl LevelSet,
    n: usize,
    seed: u64,
    cfg: &RieszConfig,
) -> Result<PointCloud> {
    let d = ls.dim();
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let s = cfg.s.unwrap_or(d as f64);
    if !(s > 0.0) {
        return Err(Error::invalid("Riesz exponent must be positive"));
    }
    let mut y = initial_boundary(ls, n, cfg, seed)?;
    let mut energy = riesz_energy(&y, d, s);
    let mut eta = cfg.step * mean_nn_spacing(&y, d);
    let eta_max = eta;
    let mut grad = alloc::vec![0.0; n * d];
    let mut trial = alloc::vec![0.0; n * d];
    let mut nrm = [0.0; 3];
    let mut iterations = 0;

    'outer: for _ in 0..cfg.iterations {
        if n < 2 || !(eta > 1e-14) {
            break;
        }
        riesz_gradient(&y, d, s, &mut grad);
        // tangential component
        let mut gmax: f64 = 0.0;
        for i in 0..n {
            let g = &mut grad[i * d..(i + 1) * d];
            if normal(ls, &y[i * d..(i + 1) * d], &mut nrm).is_ok() {
                let dot: f64 = (0..d).map(|k| g[k] * nrm[k]).sum();
                for k in 0..d {
                    g[k] -= dot * nrm[k];
                }
            } else {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
            gmax = gmax.max(crate::levelset::norm(g));
        }
        if !(gmax > 0.0) {
            break;
        }
        loop {
            let scale = eta / gmax;
            let mut ok = true;
            for i in 0..n {
                let mut x = [0.0; 3];
                for k in 0..d {
                    x[k] = y[i * d + k] - scale * grad[i * d + k];
                }
                match project_to_boundary(ls, &x[..d], cfg.projection_tol) {
                    Ok(p) => trial[i * d..(i + 1) * d].copy_from_slice(&p[..d]),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let e = riesz_energy(&trial, d, s);
                if e < energy {
                    core::mem::swap(&mut y, &mut trial);
                    energy = e;
                    iterations += 1;
                    eta = (eta * 1.2).min(eta_max);
                    continue 'outer;
                }
            }
            eta *= 0.5;
            if eta < 1e-14 {
                break 'outer;
            }
        }
    }

    let mut cloud = PointCloud::from_coords(d, y, Role::Boundary);
    cloud.seed = seed;
    cloud.meta.iterations = iterations;
    Ok(cloud)
}
