//! `-Δu = f` in `Ω`, `u = 0` on the band `Ω^ε \ Ω`.
//!
//! Vertices are uniform samples of the dilation `Ω^ε`. Band rows of the graph
//! system are identity rows with zero data, so the band unknowns are
//! eliminated and the interior block (an irreducibly diagonally dominant
//! M-matrix) is solved by preconditioned conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

use super::{build_graph, GeometricGraph, Kernel, VertexField};
use crate::error::{Error, Result};
use crate::levelset::LevelSet;
use crate::sampling::{sample_uniform_band, PointCloud, Role};

pub const CG_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// `‖b - A x‖ / ‖b‖` at exit.
    pub relative_residual: f64,
}

/// Jacobi-preconditioned CG for the SPD operator `apply`, starting from `x`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgReport> {
    let n = b.len();
    let bnorm = libm::sqrt(b.iter().map(|v| v * v).sum());
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgReport {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut res = libm::sqrt(r.iter().map(|v| v * v).sum()) / bnorm;
    for it in 0..max_iter {
        if res < tol {
            return Ok(CgReport {
                iterations: it,
                relative_residual: res,
            });
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            break;
        }
        let a = rz / pap;
        for i in 0..n {
            x[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        res = libm::sqrt(r.iter().map(|v| v * v).sum()) / bnorm;
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // true residual, in case the recurrence drifted
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let true_res = libm::sqrt(b.iter().zip(&ax).map(|(bi, ai)| (bi - ai) * (bi - ai)).sum()) / bnorm;
    if true_res < tol {
        return Ok(CgReport {
            iterations: max_iter,
            relative_residual: true_res,
        });
    }
    Err(Error::SolveFailed {
        residual: true_res,
        iterations: max_iter,
    })
}

/// Graph, interior mask and density for repeated Dirichlet solves on one
/// vertex set.
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub graph: GeometricGraph,
    /// `true` for vertices in `Ω`, `false` for band vertices.
    pub inside: Vec<bool>,
    /// Sampling density `1/Vol(Ω^ε)` that scales the right-hand side.
    pub density: f64,
    interior: Vec<usize>,
    slot: Vec<usize>,
}

impl DirichletProblem {
    /// `points` carry [`Role::Interior`] / [`Role::Band`] labels; the graph
    /// uses scale `eps`. `band_volume` is `Vol(Ω^ε)`.
    pub fn new(points: &PointCloud, eps: f64, kernel: Kernel, band_volume: f64) -> Result<Self> {
        if !(band_volume > 0.0) {
            return Err(Error::invalid("Vol(Ω^ε) must be positive"));
        }
        let graph = build_graph(points, eps, kernel)?;
        let inside: Vec<bool> = points.roles().iter().map(|r| *r == Role::Interior).collect();
        if inside.iter().all(|&b| b) {
            return Err(Error::invalid("no band vertices: the Dirichlet band is empty"));
        }
        let interior: Vec<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
        let mut slot = vec![usize::MAX; inside.len()];
        for (a, &i) in interior.iter().enumerate() {
            slot[i] = a;
            if graph.degree()[i] <= 0.0 {
                return Err(Error::IsolatedVertex(i));
            }
        }
        Ok(Self {
            graph,
            inside,
            density: 1.0 / band_volume,
            interior,
            slot,
        })
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    fn apply_interior(&self, x: &[f64], y: &mut [f64]) {
        let deg = self.graph.degree();
        for (a, &i) in self.interior.iter().enumerate() {
            let (cols, ws) = self.graph.row(i);
            let mut s = deg[i] * x[a];
            for (&j, &w) in cols.iter().zip(ws) {
                let b = self.slot[j];
                if b != usize::MAX {
                    s -= w * x[b];
                }
            }
            y[a] = s;
        }
    }

    /// Solves `L̄ ū = ρ f̄` with `f̄_i = f(x_i)` on interior vertices and
    /// `ū_i = 0` on band vertices. Returns values for all vertices.
    pub fn solve(&self, rhs: impl Fn(&[f64]) -> f64) -> Result<(Vec<f64>, CgReport)> {
        let b: Vec<f64> = self
            .interior
            .iter()
            .map(|&i| self.density * rhs(self.graph.position(i)))
            .collect();
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("source term must be finite"));
        }
        let diag: Vec<f64> = self.interior.iter().map(|&i| self.graph.degree()[i]).collect();
        let mut x = vec![0.0; b.len()];
        let max_iter = 20 * b.len() + 100;
        let report = conjugate_gradient(|p, q| self.apply_interior(p, q), &diag, &b, &mut x, CG_TOLERANCE, max_iter)?;
        let mut u = vec![0.0; self.inside.len()];
        for (a, &i) in self.interior.iter().enumerate() {
            u[i] = x[a];
        }
        Ok((u, report))
    }
}

/// A solved Dirichlet problem.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub problem: DirichletProblem,
    /// One value per vertex; exactly zero on band vertices.
    pub values: Vec<f64>,
    pub report: CgReport,
    pub samples: PointCloud,
}

impl DirichletSolution {
    pub fn field(&self) -> Result<VertexField> {
        VertexField::scalar(self.problem.graph.positions(), self.problem.graph.dim(), self.values.clone())
    }
}

/// Solves on explicit samples of `Ω^ε` with known `Vol(Ω^ε)`.
pub fn dirichlet_solve_on(
    points: PointCloud,
    eps: f64,
    kernel: Kernel,
    band_volume: f64,
    rhs: impl Fn(&[f64]) -> f64,
) -> Result<DirichletSolution> {
    let problem = DirichletProblem::new(&points, eps, kernel, band_volume)?;
    let (values, report) = problem.solve(rhs)?;
    Ok(DirichletSolution {
        problem,
        values,
        report,
        samples: points,
    })
}

/// Samples `n` points of `Ω^ε = {φ < ε}`, uses `ε` as both band width and
/// graph scale, and solves `-Δu = rhs`. `Vol(Ω^ε)` is estimated from the
/// rejection sampler as `(n - 1)/(trials - 1)`.
pub fn dirichlet_solve(
    ls: &impl LevelSet,
    rhs: impl Fn(&[f64]) -> f64,
    eps: f64,
    n: usize,
    seed: u64,
    kernel: Kernel,
) -> Result<DirichletSolution> {
    let points = sample_uniform_band(ls, eps, seed, n)?;
    let band_volume = inverse_sampling_volume(n, points.meta.trials);
    dirichlet_solve_on(points, eps, kernel, band_volume, rhs)
}

/// Unbiased acceptance-probability estimate for inverse (stop after `n`
/// successes) sampling.
pub fn inverse_sampling_volume(n: usize, trials: usize) -> f64 {
    if n < 2 || trials < 2 {
        return n as f64 / trials.max(1) as f64;
    }
    (n - 1) as f64 / (trials - 1) as f64
}
