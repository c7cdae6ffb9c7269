//! Neumann eigenvalue objectives: `Vol^{2/d} μ_k` (maximized) and
//! `Per^{2/(d-1)} μ_k` over convex shapes (minimized).

use alloc::vec;
use alloc::vec::Vec;

use super::{cluster_size, soft_min, soft_min_gradient, DensitySplit, ProblemKind, ProblemSamples, ProblemSpec, ShapeGradient};
use crate::error::{Error, Result};
use crate::graph::{graph_gradient, neumann_eigen_on, VertexField};
use crate::levelset::{mean_curvature, perimeter, LevelSet};

pub(super) fn evaluate(
    ls: &impl LevelSet,
    spec: &ProblemSpec,
    samples: &ProblemSamples,
    boundary: &[f64],
) -> Result<ShapeGradient> {
    let convex = spec.kind == ProblemKind::ConvexNeumannMin;
    if convex && !ls.is_convex() {
        return Err(Error::NonConvexArchitecture);
    }
    let d = ls.dim();
    let df = d as f64;
    let vol = samples.sublevel_volume(ls, 0.0);
    if vol <= 0.0 {
        return Err(Error::ShapeVanished {
            acceptance: 0.0,
            trials: samples.domain.len(),
        });
    }
    let per = if convex {
        Some(samples.domain_measure * perimeter(ls, &samples.domain)?.value)
    } else {
        None
    };

    let k = spec.k;
    let k_max = k + spec.k_buffer;
    let ne = neumann_eigen_on(samples.pde.clone(), vol, samples.eps, k_max, spec.kernel)?;
    let mu = &ne.mu;
    let mu_k = mu[k];
    let beta = spec.beta.unwrap_or(if mu_k > 0.0 { 5.0 / mu_k } else { 0.0 });
    let m = cluster_size(mu, k, spec.delta_cluster)?;
    let cluster = &mu[k..k + m];
    let s = soft_min(cluster, beta);
    let a = soft_min_gradient(cluster, beta);

    // per-vertex Σ a_i (|∇u_i|² - μ_i u_i²)
    let n = ne.n();
    let mut eigen_density = vec![0.0; n];
    for (c, &ai) in a.iter().enumerate() {
        let idx = k + c;
        let u = ne.eigenfunction(idx);
        let g = graph_gradient(&ne.graph, u)?;
        for j in 0..n {
            let g2: f64 = g[j * d..(j + 1) * d].iter().map(|v| v * v).sum();
            eigen_density[j] += ai * (g2 - mu[idx] * u[j] * u[j]);
        }
    }
    let geometric: Vec<f64> = if convex {
        (0..n)
            .map(|j| mean_curvature(ls, ne.graph.position(j)).unwrap_or(0.0))
            .collect()
    } else {
        vec![1.0; n]
    };

    let (objective, geo_coeff, eig_coeff, normalized) = match per {
        Some(p) => {
            let e = 2.0 / (df - 1.0);
            let pe = libm::pow(p, e);
            (pe * s, e * libm::pow(p, (3.0 - df) / (df - 1.0)) * s, pe, Some(pe * mu_k))
        }
        None => {
            let ve = libm::pow(vol, 2.0 / df);
            (ve * s, 2.0 / df * libm::pow(vol, (2.0 - df) / df) * s, ve, None)
        }
    };
    let vertex_f: Vec<f64> = (0..n)
        .map(|j| geo_coeff * geometric[j] + eig_coeff * eigen_density[j])
        .collect();
    let vertex_density = VertexField::scalar(ne.graph.positions(), d, vertex_f)?;

    let nb = boundary.len() / d;
    let mut f = Vec::with_capacity(nb);
    let mut geo_b = Vec::with_capacity(nb);
    let mut eig_b = Vec::with_capacity(nb);
    for y in boundary.chunks_exact(d) {
        let j = vertex_density.nearest_vertex(y);
        f.push(vertex_density.value(j)[0]);
        geo_b.push(geometric[j]);
        eig_b.push(eigen_density[j]);
    }

    Ok(ShapeGradient {
        kind: spec.kind,
        dim: d,
        points: boundary.to_vec(),
        f,
        objective,
        volume: vol,
        perimeter: per,
        spectrum: mu.clone(),
        mu_k: Some(s),
        normalized_eigenvalue: normalized,
        cluster_size: m,
        beta,
        eps: samples.eps,
        n,
        components: ne.components,
        split: Some(DensitySplit {
            geo_coeff,
            eig_coeff,
            geometric: geo_b,
            eigen: eig_b,
        }),
        vertex_density,
    })
}
