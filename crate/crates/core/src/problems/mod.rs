//! The three shape optimization problems. Each evaluation returns the
//! objective and its Hadamard density `f` (`J'(Ω)[V] = ∫_{∂Ω} f V·n`) at
//! boundary samples and at the PDE vertices.

mod eigen;
mod poisson;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{default_eps_constant, eps_rule, Kernel, VertexField};
use crate::levelset::LevelSet;
use crate::rng::derive_seed;
use crate::sampling::{sample_uniform_band, sample_uniform_domain, sample_uniform_shape, PointCloud};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// Maximize `Vol(Ω)^{2/d} μ_k(Ω)`.
    NeumannMax,
    /// Minimize `∫_Ω u` with `-Δu = f_src`, `u = 0` on `∂Ω`.
    PoissonDirichlet,
    /// Minimize `Per(Ω)^{2/(d-1)} μ_k(Ω)` over convex shapes.
    ConvexNeumannMin,
}

impl ProblemKind {
    pub fn tag(self) -> &'static str {
        match self {
            ProblemKind::NeumannMax => "neumann_max",
            ProblemKind::PoissonDirichlet => "poisson_dirichlet",
            ProblemKind::ConvexNeumannMin => "convex_neumann_min",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "neumann_max" => Some(ProblemKind::NeumannMax),
            "poisson_dirichlet" => Some(ProblemKind::PoissonDirichlet),
            "convex_neumann_min" => Some(ProblemKind::ConvexNeumannMin),
            _ => None,
        }
    }

    /// `+1` for maximization (velocity `V = f n`), `-1` for minimization.
    pub fn velocity_sign(self) -> f64 {
        match self {
            ProblemKind::NeumannMax => 1.0,
            _ => -1.0,
        }
    }

    /// `true` when a larger objective is better.
    pub fn maximize(self) -> bool {
        self == ProblemKind::NeumannMax
    }
}

/// Source term of the Poisson problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    Constant(f64),
    /// `offset + amplitude · exp(-|x - center|² / (2 width²))`.
    Gaussian {
        center: [f64; 3],
        width: f64,
        amplitude: f64,
        offset: f64,
    },
}

impl Source {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Source::Constant(c) => c,
            Source::Gaussian {
                center,
                width,
                amplitude,
                offset,
            } => {
                let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
                offset + amplitude * libm::exp(-r2 / (2.0 * width * width))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Eigenvalue index (ignored by the Poisson problem).
    pub k: usize,
    /// Soft-min temperature; `None` means `5/μ̂_k`.
    pub beta: Option<f64>,
    /// Relative width of the eigenvalue cluster.
    pub delta_cluster: f64,
    /// Graph scale, also the Dirichlet band width; `None` uses [`eps_rule`].
    pub eps: Option<f64>,
    /// Constant of [`eps_rule`]; `None` uses the calibrated default.
    pub eps_constant: Option<f64>,
    /// PDE sample size.
    pub n: usize,
    pub source: Source,
    /// Eigenpairs computed beyond index `k` to detect clusters.
    pub k_buffer: usize,
    pub kernel: Kernel,
    /// Uniform samples of `D` for volume and perimeter estimates.
    pub volume_samples: usize,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, k: usize) -> Self {
        Self {
            kind,
            k,
            beta: None,
            delta_cluster: 0.02,
            eps: None,
            eps_constant: None,
            n: 4000,
            source: Source::Constant(1.0),
            k_buffer: 4,
            kernel: Kernel::Indicator,
            volume_samples: 20_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ProblemKind::NeumannMax if self.k < 1 => return Err(Error::invalid("k ≥ 1 required")),
            ProblemKind::ConvexNeumannMin if self.k < 2 => return Err(Error::invalid("k ≥ 2 required")),
            _ => {}
        }
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return Err(Error::invalid("β > 0 required"));
            }
        }
        if let Some(e) = self.eps {
            if !(e > 0.0) {
                return Err(Error::invalid("ε > 0 required"));
            }
        }
        if !(self.delta_cluster >= 0.0) {
            return Err(Error::invalid("cluster threshold must be ≥ 0"));
        }
        if self.n < 16 || self.volume_samples == 0 {
            return Err(Error::invalid("sample sizes too small"));
        }
        Ok(())
    }

    pub fn eps_constant_for(&self, dim: usize) -> f64 {
        self.eps_constant.unwrap_or_else(|| default_eps_constant(dim))
    }
}

/// Boltzmann-weighted average `Σ μ_i e^{-βμ_i} / Σ e^{-βμ_i}`.
pub fn soft_min(values: &[f64], beta: f64) -> f64 {
    let w = boltzmann_weights(values, beta);
    values.iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Normalized weights `e^{-βμ_i} / Σ_j e^{-βμ_j}`, computed after
/// subtracting the minimum exponent.
pub fn boltzmann_weights(values: &[f64], beta: f64) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = values.iter().map(|v| libm::exp(-beta * (v - lo))).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// `∂ soft_min / ∂μ_i = w_i (1 - β (μ_i - S))` at fixed `β`. The weights sum
/// to one.
pub fn soft_min_gradient(values: &[f64], beta: f64) -> Vec<f64> {
    let w = boltzmann_weights(values, beta);
    let s: f64 = values.iter().zip(&w).map(|(v, w)| v * w).sum();
    values.iter().zip(&w).map(|(v, w)| w * (1.0 - beta * (v - s))).collect()
}

/// Number of eigenvalues `μ_k, μ_{k+1}, …` within relative distance `delta`
/// of `μ_k`. Fails when the cluster reaches the end of `spectrum`.
pub fn cluster_size(spectrum: &[f64], k: usize, delta: f64) -> Result<usize> {
    let last = spectrum.len().saturating_sub(1);
    if k > last {
        return Err(Error::IncreaseK { computed: spectrum.len() });
    }
    let limit = spectrum[k].max(0.0) * (1.0 + delta);
    let mut m = 1;
    while k + m <= last && spectrum[k + m] <= limit {
        m += 1;
    }
    if k + m > last {
        return Err(Error::IncreaseK { computed: spectrum.len() });
    }
    Ok(m)
}

/// `f = geo_coeff · geometric + eig_coeff · eigen` for the eigenvalue
/// problems, kept apart for consistency checks.
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySplit {
    pub geo_coeff: f64,
    pub eig_coeff: f64,
    /// `1` (volume) or `κ` (perimeter) at each boundary point.
    pub geometric: Vec<f64>,
    /// `Σ_i a_i (|∇u_i|² - μ_i u_i²)` at each boundary point.
    pub eigen: Vec<f64>,
}

/// Objective, Hadamard density and diagnostics of one evaluation.
#[derive(Clone, Debug)]
pub struct ShapeGradient {
    pub kind: ProblemKind,
    pub dim: usize,
    /// Boundary points, row-major.
    pub points: Vec<f64>,
    /// `f` at each boundary point.
    pub f: Vec<f64>,
    pub objective: f64,
    pub volume: f64,
    pub perimeter: Option<f64>,
    /// `μ̂_0..=μ̂_K` (empty for the Poisson problem).
    pub spectrum: Vec<f64>,
    /// `μ̂_k` (soft-min over the cluster) for eigenvalue problems.
    pub mu_k: Option<f64>,
    /// `Per^{2/(d-1)} μ̂_k`: the eigenvalue of the unit-perimeter rescaling.
    pub normalized_eigenvalue: Option<f64>,
    pub cluster_size: usize,
    pub beta: f64,
    pub eps: f64,
    pub n: usize,
    pub components: usize,
    pub split: Option<DensitySplit>,
    /// `f` at the PDE vertices, for the nearest-neighbor velocity extension.
    pub vertex_density: VertexField,
}

impl ShapeGradient {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    /// `f_NN(x)`.
    pub fn density_at(&self, x: &[f64]) -> f64 {
        self.vertex_density.extend_scalar(x)
    }
}

/// Point sets one evaluation runs on. Keeping them explicit lets callers
/// reuse (or transform) the same samples across nearby shapes.
#[derive(Clone, Debug)]
pub struct ProblemSamples {
    /// Uniform samples of a box of measure `domain_measure` (normally `D`).
    pub domain: PointCloud,
    pub domain_measure: f64,
    /// Uniform samples of `Ω` (eigenvalue problems) or of `Ω^ε` with
    /// interior/band roles (Poisson).
    pub pde: PointCloud,
    pub eps: f64,
}

impl ProblemSamples {
    pub fn draw(ls: &impl LevelSet, spec: &ProblemSpec, seed: u64) -> Result<Self> {
        let d = ls.dim();
        let domain = sample_uniform_domain(derive_seed(seed, 1), spec.volume_samples, d);
        let inside = domain.iter().filter(|x| ls.eval(x) < 0.0).count();
        if inside == 0 {
            return Err(Error::ShapeVanished {
                acceptance: 0.0,
                trials: spec.volume_samples,
            });
        }
        let vol = inside as f64 / spec.volume_samples as f64;
        let eps = spec.eps.unwrap_or_else(|| eps_rule(spec.n, d, vol, spec.eps_constant_for(d)));
        let pde = match spec.kind {
            ProblemKind::PoissonDirichlet => sample_uniform_band(ls, eps, derive_seed(seed, 2), spec.n)?,
            _ => sample_uniform_shape(ls, derive_seed(seed, 2), spec.n)?,
        };
        Ok(Self {
            domain,
            domain_measure: 1.0,
            pde,
            eps,
        })
    }

    /// The same samples pushed through `x ↦ c + s (x - c)`.
    pub fn dilated(&self, center: &[f64], factor: f64) -> Self {
        let map = |x: &[f64], y: &mut [f64]| {
            for k in 0..x.len() {
                y[k] = center[k] + factor * (x[k] - center[k]);
            }
        };
        let d = self.domain.dim();
        Self {
            domain: self.domain.map(map),
            domain_measure: self.domain_measure * libm::pow(factor, d as f64),
            pde: self.pde.map(map),
            eps: self.eps * factor,
        }
    }

    /// `Vol({φ < level})` estimated from the domain samples.
    pub fn sublevel_volume(&self, ls: &impl LevelSet, level: f64) -> f64 {
        let inside = self.domain.iter().filter(|x| ls.eval(x) < level).count();
        self.domain_measure * inside as f64 / self.domain.len() as f64
    }
}

/// Objective and Hadamard density on explicit samples; `boundary` holds the
/// boundary points (row-major) at which `f` is reported.
pub fn evaluate_on(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    samples: &ProblemSamples,
    boundary: &[f64],
) -> Result<ShapeGradient> {
    spec.validate()?;
    match spec.kind {
        ProblemKind::NeumannMax | ProblemKind::ConvexNeumannMin => eigen::evaluate(ls, spec, samples, boundary),
        ProblemKind::PoissonDirichlet => poisson::evaluate(ls, spec, samples, boundary),
    }
}

/// Draws fresh samples from `seed` and evaluates.
pub fn evaluate(ls: &impl LevelSet, spec: &ProblemSpec, boundary: &[f64], seed: u64) -> Result<ShapeGradient> {
    spec.validate()?;
    if spec.kind == ProblemKind::ConvexNeumannMin && !ls.is_convex() {
        return Err(Error::NonConvexArchitecture);
    }
    let samples = ProblemSamples::draw(ls, spec, seed)?;
    evaluate_on(ls, spec, &samples, boundary)
}

pub fn neumann_objective_and_gradient(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    boundary: &[f64],
    seed: u64,
) -> Result<ShapeGradient> {
    let spec = ProblemSpec {
        kind: ProblemKind::NeumannMax,
        ..spec.clone()
    };
    evaluate(ls, &spec, boundary, seed)
}

pub fn poisson_objective_and_gradient(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    boundary: &[f64],
    seed: u64,
) -> Result<ShapeGradient> {
    let spec = ProblemSpec {
        kind: ProblemKind::PoissonDirichlet,
        ..spec.clone()
    };
    evaluate(ls, &spec, boundary, seed)
}

/// Fails with [`Error::NonConvexArchitecture`] unless `ls.is_convex()`.
pub fn convex_neumann_objective_and_gradient(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    boundary: &[f64],
    seed: u64,
) -> Result<ShapeGradient> {
    let spec = ProblemSpec {
        kind: ProblemKind::ConvexNeumannMin,
        ..spec.clone()
    };
    evaluate(ls, &spec, boundary, seed)
}

#[cfg(test)]
mod tests;
