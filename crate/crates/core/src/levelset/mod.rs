//! Level-set representation of shapes `Ω = {φ < 0}`.
//!
//! Geometric quantities come from exact derivatives of `φ`:
//! the extended normal `∇φ/|∇φ|`, the mean curvature `div(∇φ/|∇φ|)`, and
//! Monte-Carlo estimates of volume and perimeter (`Per(Ω) = ∫_Ω κ dx` for a
//! signed distance function).

pub mod analytic;
mod network;
mod train;

use crate::error::{Error, Result};
use crate::sampling::PointCloud;

pub use network::{
    Architecture, Layer, LevelSetNetwork, NetworkParams, SIREN_OMEGA_FIRST, SIREN_OMEGA_HIDDEN,
};
pub use train::{fit_signed_distance, fit_to_analytic_sdf, holdout_rmse, FitReport, TrainConfig};

/// Gradients with norm at or below this are treated as degenerate.
pub const G_MIN: f64 = 1e-8;

/// A scalar field on `ℝ^d` whose negative sublevel set is a shape.
///
/// Implementations must be deterministic and safe to share across threads.
pub trait LevelSet {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Writes `∇φ(x)` into `grad[..d]` and returns `φ(x)`.
    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Writes `∇φ(x)` and the row-major `d × d` Hessian; returns `φ(x)`.
    ///
    /// The default uses central differences of [`LevelSet::gradient`]; the
    /// networks override it with exact second derivatives.
    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let d = self.dim();
        let h = 1e-5;
        let mut xp = [0.0; 3];
        let mut gp = [0.0; 3];
        let mut gm = [0.0; 3];
        for l in 0..d {
            xp[..d].copy_from_slice(&x[..d]);
            xp[l] = x[l] + h;
            self.gradient(&xp[..d], &mut gp);
            xp[l] = x[l] - h;
            self.gradient(&xp[..d], &mut gm);
            for k in 0..d {
                hess[k * d + l] = (gp[k] - gm[k]) / (2.0 * h);
            }
        }
        for k in 0..d {
            for l in k + 1..d {
                let s = 0.5 * (hess[k * d + l] + hess[l * d + k]);
                hess[k * d + l] = s;
                hess[l * d + k] = s;
            }
        }
        self.gradient(x, grad)
    }

    /// Whether `φ` is a convex function of `x` by construction.
    fn is_convex(&self) -> bool {
        false
    }
}

impl<T: LevelSet + ?Sized> LevelSet for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).gradient(x, grad)
    }
    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        (**self).hessian(x, grad, hess)
    }
    fn is_convex(&self) -> bool {
        (**self).is_convex()
    }
}

/// `φ_s(x) = s φ(c + (x - c)/s)`: the shape dilated by `s` about `c`, still a
/// signed distance if `φ` is one.
#[derive(Clone, Debug)]
pub struct Dilated<L> {
    pub inner: L,
    center: [f64; 3],
    factor: f64,
}

impl<L: LevelSet> Dilated<L> {
    pub fn new(inner: L, center: &[f64], factor: f64) -> Self {
        assert!(factor > 0.0);
        let mut c = [0.0; 3];
        c[..inner.dim()].copy_from_slice(&center[..inner.dim()]);
        Self {
            inner,
            center: c,
            factor,
        }
    }

    fn pullback(&self, x: &[f64]) -> [f64; 3] {
        let mut y = [0.0; 3];
        for k in 0..self.inner.dim() {
            y[k] = self.center[k] + (x[k] - self.center[k]) / self.factor;
        }
        y
    }
}

impl<L: LevelSet> LevelSet for Dilated<L> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let y = self.pullback(x);
        self.factor * self.inner.eval(&y[..self.dim()])
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let y = self.pullback(x);
        self.factor * self.inner.gradient(&y[..self.dim()], grad)
    }

    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let d = self.dim();
        let y = self.pullback(x);
        let v = self.inner.hessian(&y[..d], grad, hess);
        for h in hess[..d * d].iter_mut() {
            *h /= self.factor;
        }
        self.factor * v
    }

    fn is_convex(&self) -> bool {
        self.inner.is_convex()
    }
}

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// `∇φ(x)` (convenience wrapper returning a fixed-size array; unused
/// trailing entries are zero in 2D).
pub fn spatial_gradient(ls: &impl LevelSet, x: &[f64]) -> [f64; 3] {
    let mut g = [0.0; 3];
    ls.gradient(x, &mut g);
    g
}

/// Unit normal `∇φ/|∇φ|` written to `out[..d]`.
pub fn normal(ls: &impl LevelSet, x: &[f64], out: &mut [f64]) -> Result<()> {
    let d = ls.dim();
    let mut g = [0.0; 3];
    ls.gradient(x, &mut g);
    let n = norm(&g[..d]);
    if n <= G_MIN {
        return Err(Error::DegenerateGradient { norm: n });
    }
    for k in 0..d {
        out[k] = g[k] / n;
    }
    Ok(())
}

/// Mean curvature `div(∇φ/|∇φ|) = tr(H)/|g| - gᵀHg/|g|³`.
pub fn mean_curvature(ls: &impl LevelSet, x: &[f64]) -> Result<f64> {
    let d = ls.dim();
    let mut g = [0.0; 3];
    let mut h = [0.0; 9];
    ls.hessian(x, &mut g, &mut h);
    curvature_from_derivatives(&g[..d], &h[..d * d])
}

pub(crate) fn curvature_from_derivatives(g: &[f64], h: &[f64]) -> Result<f64> {
    let d = g.len();
    let n = norm(g);
    if n <= G_MIN {
        return Err(Error::DegenerateGradient { norm: n });
    }
    let mut trace = 0.0;
    let mut ghg = 0.0;
    for k in 0..d {
        trace += h[k * d + k];
        for l in 0..d {
            ghg += g[k] * h[k * d + l] * g[l];
        }
    }
    Ok(trace / n - ghg / (n * n * n))
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricEstimate {
    pub value: f64,
    pub samples: usize,
    /// Sample standard deviation divided by `√N`.
    pub std_error: f64,
    /// Samples that contributed zero because `|∇φ| ≤ G_MIN`.
    pub skipped: usize,
}

impl GeometricEstimate {
    fn from_sums(sum: f64, sum_sq: f64, samples: usize, skipped: usize) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            samples,
            std_error: libm::sqrt(var / n),
            skipped,
        }
    }

    pub fn skip_fraction(&self) -> f64 {
        self.skipped as f64 / self.samples.max(1) as f64
    }

    /// Set when more than 10% of the samples were skipped.
    pub fn warning(&self) -> bool {
        self.skip_fraction() > 0.1
    }
}

/// `Vol(Ω) ≈ (1/N) Σ 𝟙{φ < 0}(x_i)` over uniform samples of `D = [0,1]^d`.
pub fn volume(ls: &impl LevelSet, samples: &PointCloud) -> Result<GeometricEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let inside = samples.iter().filter(|x| ls.eval(x) < 0.0).count() as f64;
    Ok(GeometricEstimate::from_sums(inside, inside, samples.len(), 0))
}

/// `Per(Ω) ≈ (1/N) Σ 𝟙{φ < 0}(x_i) κ(x_i)` over uniform samples of `D`.
pub fn perimeter(ls: &impl LevelSet, samples: &PointCloud) -> Result<GeometricEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let d = ls.dim();
    let (mut sum, mut sum_sq, mut skipped) = (0.0, 0.0, 0usize);
    let mut g = [0.0; 3];
    let mut h = [0.0; 9];
    for x in samples.iter() {
        if ls.eval(x) >= 0.0 {
            continue;
        }
        ls.hessian(x, &mut g, &mut h);
        match curvature_from_derivatives(&g[..d], &h[..d * d]) {
            Ok(k) => {
                sum += k;
                sum_sq += k * k;
            }
            Err(_) => skipped += 1,
        }
    }
    Ok(GeometricEstimate::from_sums(sum, sum_sq, samples.len(), skipped))
}
