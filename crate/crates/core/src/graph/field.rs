use alloc::vec;
use alloc::vec::Vec;

use super::GeometricGraph;
use crate::error::{Error, Result};
use crate::spatial::KdTree;

/// Values attached to vertices (`width` numbers per vertex) with a
/// nearest-neighbor extension to all of `ℝ^d`.
#[derive(Clone, Debug)]
pub struct VertexField {
    width: usize,
    values: Vec<f64>,
    tree: KdTree,
}

impl VertexField {
    /// `positions` is row-major with `dim` coordinates per vertex.
    pub fn new(positions: &[f64], dim: usize, values: Vec<f64>, width: usize) -> Result<Self> {
        let n = positions.len() / dim;
        if width == 0 || values.len() != n * width {
            return Err(Error::invalid("one value block per vertex expected"));
        }
        if n == 0 {
            return Err(Error::EmptySamples);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("vertex field values must be finite"));
        }
        Ok(Self {
            width,
            values,
            tree: KdTree::new(positions, dim),
        })
    }

    pub fn scalar(positions: &[f64], dim: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(positions, dim, values, 1)
    }

    /// The vertices with `keep[i]` set, and their values.
    pub fn restrict(&self, keep: &[bool]) -> Result<Self> {
        let d = self.tree.dim();
        let mut pos = Vec::new();
        let mut vals = Vec::new();
        for i in 0..self.len() {
            if keep[i] {
                pos.extend_from_slice(self.tree.point(i));
                vals.extend_from_slice(self.value(i));
            }
        }
        Self::new(&pos, d, vals, self.width)
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn position(&self, i: usize) -> &[f64] {
        self.tree.point(i)
    }

    /// Index of the vertex nearest to `x` (lowest index on ties).
    pub fn nearest_vertex(&self, x: &[f64]) -> usize {
        self.tree.nearest(x).map(|(i, _)| i).unwrap_or(0)
    }

    /// Value block of the nearest vertex.
    pub fn nearest_neighbor_extend(&self, x: &[f64]) -> &[f64] {
        self.value(self.nearest_vertex(x))
    }

    /// First component of the nearest vertex's value.
    pub fn extend_scalar(&self, x: &[f64]) -> f64 {
        self.nearest_neighbor_extend(x)[0]
    }

    /// Gradient at `y` of a least-squares quadratic fit to each value
    /// component over the vertices within `radius` of `y`. Writes `width × d`
    /// numbers to `out`; returns `false` when there are fewer than twice as
    /// many vertices as quadratic coefficients or the fit is singular.
    ///
    /// `y` need not be surrounded by vertices, so this also extrapolates a
    /// smooth field to the edge of its sample region.
    pub fn fit_gradient(&self, y: &[f64], radius: f64, found: &mut Vec<usize>, out: &mut [f64]) -> bool {
        let d = self.dim();
        let w = self.width;
        let m = 1 + d + d * (d + 1) / 2;
        found.clear();
        self.tree.within_radius(y, radius, found);
        if found.len() < 2 * m {
            return false;
        }
        found.sort_unstable();
        let mut ata = [0.0; 100];
        let mut atb = vec![0.0; m * w];
        let mut row = [0.0; 10];
        for &j in found.iter() {
            let x = self.tree.point(j);
            let mut z = [0.0; 3];
            for k in 0..d {
                z[k] = (x[k] - y[k]) / radius;
            }
            row[0] = 1.0;
            row[1..=d].copy_from_slice(&z[..d]);
            let mut c = d + 1;
            for k in 0..d {
                for l in k..d {
                    row[c] = z[k] * z[l];
                    c += 1;
                }
            }
            let v = self.value(j);
            for p in 0..m {
                for q in 0..m {
                    ata[p * m + q] += row[p] * row[q];
                }
                for c in 0..w {
                    atb[p * w + c] += row[p] * v[c];
                }
            }
        }
        if !solve_dense(&mut ata[..m * m], &mut atb, m, w) {
            return false;
        }
        for c in 0..w {
            for k in 0..d {
                out[c * d + k] = atb[(1 + k) * w + c] / radius;
            }
        }
        true
    }
}

/// `∇u(x_i) ≈ (d/D_ii) Σ_j W_ij (u_j - u_i)(x_j - x_i)/|x_j - x_i|²`, as a
/// row-major `n × d` array.
pub fn graph_gradient(graph: &GeometricGraph, u: &[f64]) -> Result<Vec<f64>> {
    let n = graph.len();
    let d = graph.dim();
    if u.len() != n {
        return Err(Error::invalid("one value per vertex expected"));
    }
    if let Some(i) = graph.isolated_vertex() {
        return Err(Error::IsolatedVertex(i));
    }
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        let xi = graph.position(i);
        let (cols, ws) = graph.row(i);
        let g = &mut out[i * d..(i + 1) * d];
        for (&j, &w) in cols.iter().zip(ws) {
            let du = u[j] - u[i];
            if du == 0.0 {
                continue;
            }
            let xj = graph.position(j);
            let r2 = crate::spatial::dist2(xi, xj);
            let c = w * du / r2;
            for k in 0..d {
                g[k] += c * (xj[k] - xi[k]);
            }
        }
        let s = d as f64 / graph.degree()[i];
        g.iter_mut().for_each(|v| *v *= s);
    }
    Ok(out)
}

/// Solves `a x = b` in place for `nrhs` right-hand sides (`b` is `m × nrhs`,
/// row-major) by Gaussian elimination with partial pivoting. Returns `false`
/// for a numerically singular `a`.
pub(crate) fn solve_dense(a: &mut [f64], b: &mut [f64], m: usize, nrhs: usize) -> bool {
    let scale = (0..m).map(|k| libm::fabs(a[k * m + k])).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return false;
    }
    for col in 0..m {
        let p = (col..m)
            .max_by(|&x, &y| libm::fabs(a[x * m + col]).total_cmp(&libm::fabs(a[y * m + col])))
            .unwrap_or(col);
        if libm::fabs(a[p * m + col]) <= 1e-12 * scale {
            return false;
        }
        if p != col {
            for c in 0..m {
                a.swap(p * m + c, col * m + c);
            }
            for c in 0..nrhs {
                b.swap(p * nrhs + c, col * nrhs + c);
            }
        }
        for r in col + 1..m {
            let f = a[r * m + col] / a[col * m + col];
            if f == 0.0 {
                continue;
            }
            for c in col..m {
                a[r * m + c] -= f * a[col * m + c];
            }
            for c in 0..nrhs {
                b[r * nrhs + c] -= f * b[col * nrhs + c];
            }
        }
    }
    for r in (0..m).rev() {
        for c in 0..nrhs {
            let mut s = b[r * nrhs + c];
            for k in r + 1..m {
                s -= a[r * m + k] * b[k * nrhs + c];
            }
            b[r * nrhs + c] = s / a[r * m + r];
        }
    }
    true
}
