//! `min ∫_Ω u` with `-Δu = f_src` in `Ω`, `u = 0` on `∂Ω`. The adjoint solves
//! `Δp = 1` and the Hadamard density is `f = -(∂_n u)(∂_n p)`.

use alloc::vec::Vec;

use super::{ProblemSamples, ProblemSpec, ShapeGradient};
use crate::error::{Error, Result};
use crate::graph::{graph_gradient, DirichletProblem, VertexField};
use crate::levelset::{normal, LevelSet};

/// Minimum depth `-φ/ε` of the vertices used for normal derivatives.
pub const FIT_DEPTH: f64 = 0.5;
/// Fit radius in units of `ε`.
pub const FIT_RADIUS: f64 = 3.0;

pub(super) fn evaluate(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    samples: &ProblemSamples,
    boundary: &[f64],
) -> Result<ShapeGradient> {
    let d = ls.dim();
    let eps = samples.eps;
    let vol = samples.sublevel_volume(ls, 0.0);
    let band_vol = samples.sublevel_volume(ls, eps);
    if vol <= 0.0 || band_vol <= 0.0 {
        return Err(Error::ShapeVanished {
            acceptance: 0.0,
            trials: samples.domain.len(),
        });
    }
    let problem = DirichletProblem::new(&samples.pde, eps, spec.kernel, band_vol)?;
    if problem.interior_count() == 0 {
        return Err(Error::ShapeVanished {
            acceptance: 0.0,
            trials: samples.pde.len(),
        });
    }
    let source = spec.source;
    let (u, _) = problem.solve(|x| source.eval(x))?;
    let (p, _) = problem.solve(|_| -1.0)?;

    let graph = &problem.graph;
    let u_field = VertexField::scalar(graph.positions(), d, u.clone())?;
    let mut sum = 0.0;
    for x in samples.domain.iter() {
        if ls.eval(x) < 0.0 {
            sum += u_field.extend_scalar(x);
        }
    }
    let objective = samples.domain_measure * sum / samples.domain.len() as f64;

    // Normal derivatives come from quadratic fits over vertices at depth at
    // least FIT_DEPTH·ε, extrapolated to the evaluation point. The graph
    // solution is distorted within about ε of the band.
    let mut fit_pos = Vec::new();
    let mut fit_vals = Vec::new();
    for i in 0..graph.len() {
        let x = graph.position(i);
        if ls.eval(x) <= -FIT_DEPTH * eps {
            fit_pos.extend_from_slice(x);
            fit_vals.extend_from_slice(&[u[i], p[i]]);
        }
    }
    let fit = if fit_pos.is_empty() {
        None
    } else {
        Some(VertexField::new(&fit_pos, d, fit_vals, 2)?)
    };
    let gu = graph_gradient(graph, &u)?;
    let gp = graph_gradient(graph, &p)?;
    let mut found = Vec::new();
    let mut density = |x: &[f64]| -> f64 {
        let mut nrm = [0.0; 3];
        if normal(ls, x, &mut nrm).is_err() {
            return 0.0;
        }
        let mut g = [0.0; 6];
        let fitted = fit
            .as_ref()
            .is_some_and(|fit| fit.fit_gradient(x, FIT_RADIUS * eps, &mut found, &mut g[..2 * d]));
        if !fitted {
            let j = u_field.nearest_vertex(x);
            g[..d].copy_from_slice(&gu[j * d..(j + 1) * d]);
            g[d..2 * d].copy_from_slice(&gp[j * d..(j + 1) * d]);
        }
        -dot(&g[..d], &nrm[..d]) * dot(&g[d..2 * d], &nrm[..d])
    };

    let mut pos = Vec::new();
    let mut vertex_f = Vec::new();
    for i in 0..graph.len() {
        if problem.inside[i] {
            let x = graph.position(i);
            pos.extend_from_slice(x);
            vertex_f.push(density(x));
        }
    }
    let f: Vec<f64> = boundary.chunks_exact(d).map(&mut density).collect();
    let vertex_density = VertexField::scalar(&pos, d, vertex_f)?;

    Ok(ShapeGradient {
        kind: spec.kind,
        dim: d,
        points: boundary.to_vec(),
        f,
        objective,
        volume: vol,
        perimeter: None,
        spectrum: Vec::new(),
        mu_k: None,
        normalized_eigenvalue: None,
        cluster_size: 0,
        beta: 0.0,
        eps,
        n: graph.len(),
        components: graph.components().1,
        split: None,
        vertex_density,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
