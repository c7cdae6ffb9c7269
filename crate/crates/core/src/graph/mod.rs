//! Random geometric graphs and the PDE solves built on them.
//!
//! For `n` samples with density `ρ` on a domain, the weights
//! `W_ij = 2/(n σ_η ε^{d+2}) η(|x_i - x_j|/ε)` make `L = D - W` approximate
//! `-ρ Δ` with natural (Neumann) boundary behavior.

mod dirichlet;
mod eigen;
mod field;
mod neumann;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sampling::PointCloud;
use crate::spatial::KdTree;

pub use dirichlet::{
    conjugate_gradient, dirichlet_solve, dirichlet_solve_on, inverse_sampling_volume, CgReport, DirichletProblem,
    DirichletSolution,
};
pub use eigen::{
    smallest_eigenpairs, smallest_eigenpairs_with, symmetric_eigen, tridiagonal_eigen, SpectralResult,
    DENSE_LIMIT,
};
pub use field::{graph_gradient, VertexField};
pub use neumann::{neumann_eigen, neumann_eigen_on, NeumannEigen};

/// Radial profile `η` of the edge weights, supported on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Kernel {
    /// `η = 𝟙_{[0,1)}`.
    #[default]
    Indicator,
    /// `η(t) = exp(-4t²)` truncated at `t = 1`.
    Gaussian,
}

impl Kernel {
    pub fn eval(self, t: f64) -> f64 {
        if !(t < 1.0) {
            return 0.0;
        }
        match self {
            Kernel::Indicator => 1.0,
            Kernel::Gaussian => libm::exp(-4.0 * t * t),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Kernel::Indicator => "indicator",
            Kernel::Gaussian => "gaussian",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "indicator" => Some(Kernel::Indicator),
            "gaussian" => Some(Kernel::Gaussian),
            _ => None,
        }
    }

    /// `σ_η = ∫_{ℝ^d} η(|z|) z_1² dz = (|S^{d-1}|/d) ∫_0^1 η(t) t^{d+1} dt`.
    pub fn sigma(self, dim: usize) -> f64 {
        use core::f64::consts::PI;
        let sphere = match dim {
            1 => 2.0,
            2 => 2.0 * PI,
            3 => 4.0 * PI,
            _ => panic!("unsupported dimension {dim}"),
        };
        let radial = match self {
            Kernel::Indicator => 1.0 / (dim as f64 + 2.0),
            Kernel::Gaussian => simpson(|t| libm::exp(-4.0 * t * t) * powi(t, dim + 1), 0.0, 1.0, 4000),
        };
        sphere / dim as f64 * radial
    }
}

fn powi(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * x)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Graph scale constant `C` in `ε_n = C · Vol^{1/d} · (log n / n)^{1/(d+4)}`.
pub const EPS_CONSTANT_2D: f64 = 0.30;
pub const EPS_CONSTANT_3D: f64 = 0.45;

pub fn default_eps_constant(dim: usize) -> f64 {
    if dim == 3 {
        EPS_CONSTANT_3D
    } else {
        EPS_CONSTANT_2D
    }
}

/// `ε_n = C · Vol^{1/d} · (log n / n)^{1/(d+4)}`. The volume factor keeps the
/// number of neighbors per vertex independent of the shape's size.
pub fn eps_rule(n: usize, dim: usize, volume: f64, c: f64) -> f64 {
    let n = n.max(2) as f64;
    let d = dim as f64;
    c * libm::pow(volume, 1.0 / d) * libm::pow(libm::log(n) / n, 1.0 / (d + 4.0))
}

/// Sparse symmetric weighted graph over a point set (CSR, no diagonal).
#[derive(Clone, Debug)]
pub struct GeometricGraph {
    dim: usize,
    positions: Vec<f64>,
    eps: f64,
    kernel: Kernel,
    sigma: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

/// Builds the weight matrix with a kd-tree radius search.
pub fn build_graph(points: &PointCloud, eps: f64, kernel: Kernel) -> Result<GeometricGraph> {
    build_graph_from_coords(points.coords(), points.dim(), eps, kernel)
}

pub fn build_graph_from_coords(coords: &[f64], dim: usize, eps: f64, kernel: Kernel) -> Result<GeometricGraph> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("graph scale ε must be positive"));
    }
    let n = coords.len() / dim;
    if n < 2 {
        return Err(Error::invalid("a graph needs at least two vertices"));
    }
    let sigma = kernel.sigma(dim);
    let scale = 2.0 / (n as f64 * sigma * libm::pow(eps, dim as f64 + 2.0));
    let tree = KdTree::new(coords, dim);
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    let mut degree = Vec::with_capacity(n);
    let mut found = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let xi = &coords[i * dim..(i + 1) * dim];
        found.clear();
        tree.within_radius(xi, eps, &mut found);
        found.sort_unstable();
        let mut deg = 0.0;
        for &j in &found {
            if j == i {
                continue;
            }
            let r = libm::sqrt(crate::spatial::dist2(xi, &coords[j * dim..(j + 1) * dim]));
            let w = scale * kernel.eval(r / eps);
            if w > 0.0 {
                cols.push(j);
                weights.push(w);
                deg += w;
            }
        }
        degree.push(deg);
        row_ptr.push(cols.len());
    }
    Ok(GeometricGraph {
        dim,
        positions: coords.to_vec(),
        eps,
        kernel,
        sigma,
        row_ptr,
        cols,
        weights,
        degree,
    })
}

impl GeometricGraph {
    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Number of stored off-diagonal entries (each edge counted twice).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Column indices and weights of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.weights[a..b])
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (c, w) = self.row(i);
        match c.binary_search(&j) {
            Ok(k) => w[k],
            Err(_) => 0.0,
        }
    }

    /// `y = L x` with `L = D - W`.
    pub fn apply_laplacian(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            let (c, w) = self.row(i);
            let mut s = self.degree[i] * x[i];
            for (j, wij) in c.iter().zip(w) {
                s -= wij * x[*j];
            }
            y[i] = s;
        }
    }

    /// Row-major dense `L` (tests and small graphs only).
    pub fn dense_laplacian(&self) -> Vec<f64> {
        let n = self.len();
        let mut l = alloc::vec![0.0; n * n];
        for i in 0..n {
            l[i * n + i] = self.degree[i];
            let (c, w) = self.row(i);
            for (j, wij) in c.iter().zip(w) {
                l[i * n + j] -= wij;
            }
        }
        l
    }

    /// Index of the first vertex with zero degree, if any.
    pub fn isolated_vertex(&self) -> Option<usize> {
        self.degree.iter().position(|&d| d <= 0.0)
    }

    /// Connected-component label per vertex and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut label = alloc::vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(i) = stack.pop() {
                for &j in self.row(i).0 {
                    if label[j] == usize::MAX {
                        label[j] = count;
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// `(i, j, W_ij)` for every stored entry, row by row.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |i| {
            let (c, w) = self.row(i);
            c.iter().zip(w).map(move |(j, wij)| (i, *j, *wij))
        })
    }
}

#[cfg(test)]
mod tests;
