//! Point sets: uniform samples of `D = [0,1]^d`, of a shape, of its
//! ε-dilation, boundary samples, and their advection.

mod riesz;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::levelset::{norm, LevelSet, G_MIN};
use crate::rng;

pub use riesz::{riesz_boundary_sample, riesz_energy, RieszConfig};

/// Label attached to every point of a [`PointCloud`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Inside the shape (`φ < 0`).
    Interior,
    /// In the dilation band `0 ≤ φ < ε`.
    Band,
    /// On the zero level set.
    Boundary,
    /// Uniform sample of the computational box.
    Domain,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::Interior => "interior",
            Role::Band => "band",
            Role::Boundary => "boundary",
            Role::Domain => "domain",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "interior" => Some(Role::Interior),
            "band" => Some(Role::Band),
            "boundary" => Some(Role::Boundary),
            "domain" => Some(Role::Domain),
            _ => None,
        }
    }
}

/// How a cloud was generated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleMeta {
    /// Accepted / proposed for rejection samplers.
    pub acceptance_rate: Option<f64>,
    pub trials: usize,
    /// Optimizer iterations (Riesz sampling).
    pub iterations: usize,
}

/// `n` points in `ℝ^d` stored row-major, with per-point roles.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    roles: Vec<Role>,
    /// Set for points that were clamped back into `D` after advection.
    clamped: Vec<bool>,
    default_role: Role,
    pub seed: u64,
    pub meta: SampleMeta,
}

impl PointCloud {
    pub fn new(dim: usize, role: Role, seed: u64) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            roles: Vec::new(),
            clamped: Vec::new(),
            default_role: role,
            seed,
            meta: SampleMeta::default(),
        }
    }

    /// Cloud from explicit coordinates, all with the same role.
    pub fn from_coords(dim: usize, coords: Vec<f64>, role: Role) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0);
        let n = coords.len() / dim;
        Self {
            dim,
            coords,
            roles: alloc::vec![role; n],
            clamped: alloc::vec![false; n],
            default_role: role,
            seed: 0,
            meta: SampleMeta::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn clamped(&self) -> &[bool] {
        &self.clamped
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn push(&mut self, x: &[f64]) {
        let role = self.default_role;
        self.push_with(x, role, false);
    }

    pub fn push_with(&mut self, x: &[f64], role: Role, clamped: bool) {
        assert_eq!(x.len(), self.dim);
        self.coords.extend_from_slice(x);
        self.roles.push(role);
        self.clamped.push(clamped);
    }

    /// Keeps only points for which `keep(index)` holds.
    pub fn retain_indices(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let d = self.dim;
        let mut w = 0;
        for i in 0..self.len() {
            if keep(i) {
                if w != i {
                    self.coords.copy_within(i * d..(i + 1) * d, w * d);
                    self.roles[w] = self.roles[i];
                    self.clamped[w] = self.clamped[i];
                }
                w += 1;
            }
        }
        self.coords.truncate(w * d);
        self.roles.truncate(w);
        self.clamped.truncate(w);
    }

    /// Applies `f` to every point, keeping roles and flags.
    pub fn map(&self, f: impl Fn(&[f64], &mut [f64])) -> PointCloud {
        let d = self.dim;
        let mut out = self.clone();
        let mut y = [0.0; 3];
        for (i, x) in self.iter().enumerate() {
            f(x, &mut y[..d]);
            out.coords[i * d..(i + 1) * d].copy_from_slice(&y[..d]);
        }
        out
    }

    /// Coordinates of the points with the given role.
    pub fn coords_with_role(&self, role: Role) -> Vec<f64> {
        let mut out = Vec::new();
        for (x, r) in self.iter().zip(&self.roles) {
            if *r == role {
                out.extend_from_slice(x);
            }
        }
        out
    }
}

/// `n` i.i.d. uniform points of `[0,1]^d`.
pub fn sample_uniform_domain(seed: u64, n: usize, dim: usize) -> PointCloud {
    let mut r = rng::seeded(seed);
    let mut cloud = PointCloud::new(dim, Role::Domain, seed);
    cloud.coords.reserve(n * dim);
    let mut x = [0.0; 3];
    for _ in 0..n {
        for xk in x[..dim].iter_mut() {
            *xk = rng::uniform(&mut r, 0.0, 1.0);
        }
        cloud.push(&x[..dim]);
    }
    cloud.meta.trials = n;
    cloud
}

/// Acceptance rates below this over [`MIN_TRIALS`] proposals mean the shape
/// has vanished.
pub const MIN_ACCEPTANCE: f64 = 1e-3;
pub const MIN_TRIALS: usize = 10_000;

fn rejection_sample(
    ls: &impl LevelSet,
    seed: u64,
    n: usize,
    threshold: f64,
    role_of: impl Fn(f64) -> Role,
) -> Result<PointCloud> {
    let d = ls.dim();
    let mut r = rng::seeded(seed);
    let mut cloud = PointCloud::new(d, Role::Interior, seed);
    cloud.coords.reserve(n * d);
    let mut x = [0.0; 3];
    let mut trials = 0usize;
    while cloud.len() < n {
        trials += 1;
        for xk in x[..d].iter_mut() {
            *xk = rng::uniform(&mut r, 0.0, 1.0);
        }
        let v = ls.eval(&x[..d]);
        if v < threshold {
            cloud.push_with(&x[..d], role_of(v), false);
        }
        if trials >= MIN_TRIALS && (cloud.len() as f64) < MIN_ACCEPTANCE * trials as f64 {
            return Err(Error::ShapeVanished {
                acceptance: cloud.len() as f64 / trials as f64,
                trials,
            });
        }
    }
    cloud.meta.trials = trials;
    cloud.meta.acceptance_rate = Some(n as f64 / trials as f64);
    Ok(cloud)
}

/// `n` uniform points of `Ω = {φ < 0}` by rejection from `D`.
pub fn sample_uniform_shape(ls: &impl LevelSet, seed: u64, n: usize) -> Result<PointCloud> {
    rejection_sample(ls, seed, n, 0.0, |_| Role::Interior)
}

/// `n` uniform points of the dilation `{φ < ε}`, labeled [`Role::Interior`]
/// when `φ < 0` and [`Role::Band`] otherwise.
pub fn sample_uniform_band(ls: &impl LevelSet, eps: f64, seed: u64, n: usize) -> Result<PointCloud> {
    if !(eps > 0.0) {
        return Err(Error::invalid("band width must be positive"));
    }
    rejection_sample(ls, seed, n, eps, |v| if v < 0.0 { Role::Interior } else { Role::Band })
}

pub const PROJECTION_MAX_STEPS: usize = 50;

/// Newton projection onto `{φ = 0}`: `y ← y - φ(y) ∇φ(y)/|∇φ(y)|²`, with the
/// step halved while it does not reduce `|φ|`.
pub fn project_to_boundary(ls: &impl LevelSet, x: &[f64], tol: f64) -> Result<[f64; 3]> {
    let d = ls.dim();
    let mut y = [0.0; 3];
    y[..d].copy_from_slice(&x[..d]);
    let mut g = [0.0; 3];
    let mut v = ls.gradient(&y[..d], &mut g);
    for _ in 0..PROJECTION_MAX_STEPS {
        if !v.is_finite() {
            break;
        }
        if libm::fabs(v) < tol {
            return Ok(y);
        }
        let gn = norm(&g[..d]);
        if gn <= G_MIN {
            return Err(Error::DegenerateGradient { norm: gn });
        }
        let scale = v / (gn * gn);
        let mut t = 1.0;
        let mut trial = [0.0; 3];
        let mut accepted = false;
        for _ in 0..20 {
            for k in 0..d {
                trial[k] = y[k] - t * scale * g[k];
            }
            let tv = ls.eval(&trial[..d]);
            if libm::fabs(tv) < libm::fabs(v) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        y = trial;
        v = ls.gradient(&y[..d], &mut g);
    }
    if libm::fabs(v) < tol {
        return Ok(y);
    }
    Err(Error::ProjectionFailed {
        steps: PROJECTION_MAX_STEPS,
        residual: libm::fabs(v),
    })
}

/// Explicit Euler step `x + τ V(x)`. Points leaving `D` are clamped onto
/// `∂D` and flagged.
pub fn advect(points: &PointCloud, velocity: impl Fn(&[f64], &mut [f64]), tau: f64) -> PointCloud {
    let d = points.dim();
    let mut out = PointCloud::new(d, points.default_role, points.seed);
    out.meta = points.meta.clone();
    out.coords.reserve(points.coords.len());
    let mut v = [0.0; 3];
    let mut y = [0.0; 3];
    for (i, x) in points.iter().enumerate() {
        velocity(x, &mut v[..d]);
        let mut clamped = points.clamped[i];
        for k in 0..d {
            let t = x[k] + tau * v[k];
            y[k] = t.clamp(0.0, 1.0);
            if y[k] != t {
                clamped = true;
            }
        }
        out.push_with(&y[..d], points.roles[i], clamped);
    }
    out
}
