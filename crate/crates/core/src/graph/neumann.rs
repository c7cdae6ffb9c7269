use alloc::vec::Vec;

use super::{build_graph, default_eps_constant, eps_rule, smallest_eigenpairs, GeometricGraph, Kernel, VertexField};
use crate::error::{Error, Result};
use crate::levelset::{volume, LevelSet};
use crate::rng::derive_seed;
use crate::sampling::{sample_uniform_domain, sample_uniform_shape, PointCloud};

/// Neumann eigenpairs of a shape from the graph Laplacian on uniform samples.
#[derive(Clone, Debug)]
pub struct NeumannEigen {
    /// `mu[k] = Vol(Ω) λ_k` for `k = 0..=K`; `mu[0] ≈ 0`.
    pub mu: Vec<f64>,
    /// Eigenvector `k` (same indexing as `mu`) is `vectors[k*n..(k+1)*n]`,
    /// scaled so that `(Vol/n) Σ_i v_i² = 1`.
    pub vectors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub volume: f64,
    pub graph: GeometricGraph,
    pub samples: PointCloud,
    /// Connected components of the graph; more than one makes `mu[1] ≈ 0`.
    pub components: usize,
}

impl NeumannEigen {
    pub fn n(&self) -> usize {
        self.graph.len()
    }

    pub fn eigenfunction(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub fn field(&self, k: usize) -> Result<VertexField> {
        VertexField::scalar(self.graph.positions(), self.graph.dim(), self.eigenfunction(k).to_vec())
    }
}

/// Eigenpairs `0..=k_max` on explicit uniform samples of a shape of volume
/// `volume`, with graph scale `eps`.
pub fn neumann_eigen_on(
    points: PointCloud,
    volume: f64,
    eps: f64,
    k_max: usize,
    kernel: Kernel,
) -> Result<NeumannEigen> {
    if !(volume > 0.0) {
        return Err(Error::invalid("shape volume must be positive"));
    }
    let n = points.len();
    if k_max + 1 > n {
        return Err(Error::invalid("more eigenpairs requested than vertices"));
    }
    let graph = build_graph(&points, eps, kernel)?;
    if let Some(i) = graph.isolated_vertex() {
        return Err(Error::IsolatedVertex(i));
    }
    let (_, components) = graph.components();
    let spec = smallest_eigenpairs(&graph, k_max + 1)?;
    let scale = libm::sqrt(n as f64 / volume);
    let mu = spec.eigenvalues.iter().map(|l| volume * l).collect();
    let vectors = spec.vectors.iter().map(|v| v * scale).collect();
    Ok(NeumannEigen {
        mu,
        vectors,
        residuals: spec.residuals,
        volume,
        graph,
        samples: points,
        components,
    })
}

/// Samples `n` points of `Ω`, estimates `Vol(Ω)` from `volume_samples`
/// uniform points of `D`, and returns `μ̂_0..=μ̂_{k_max}`. A `None` scale uses
/// [`eps_rule`] with the default constant.
pub fn neumann_eigen(
    ls: &impl LevelSet,
    n: usize,
    eps: Option<f64>,
    k_max: usize,
    seed: u64,
    kernel: Kernel,
    volume_samples: usize,
) -> Result<NeumannEigen> {
    let d = ls.dim();
    let vol = volume(ls, &sample_uniform_domain(derive_seed(seed, 1), volume_samples, d))?.value;
    if vol <= 0.0 {
        return Err(Error::ShapeVanished {
            acceptance: 0.0,
            trials: volume_samples,
        });
    }
    let points = sample_uniform_shape(ls, derive_seed(seed, 2), n)?;
    let eps = eps.unwrap_or_else(|| eps_rule(n, d, vol, default_eps_constant(d)));
    neumann_eigen_on(points, vol, eps, k_max, kernel)
}
