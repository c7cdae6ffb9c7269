//! Symmetric eigensolvers: Householder tridiagonalization + implicit QL for
//! dense matrices, and Lanczos with full reorthogonalization and locking for
//! the smallest eigenpairs of a graph Laplacian.

use alloc::vec;
use alloc::vec::Vec;

use super::GeometricGraph;
use crate::error::{Error, Result};
use crate::rng;

/// Graphs up to this size use the dense solver.
pub const DENSE_LIMIT: usize = 600;

const QL_MAX_SWEEPS: usize = 60;

/// Ascending eigenpairs with unit eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// Eigenvector `k` occupies `vectors[k*n..(k+1)*n]`.
    pub vectors: Vec<f64>,
    /// `‖L v_k - λ_k v_k‖`.
    pub residuals: Vec<f64>,
    pub n: usize,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

/// Implicit QL on the symmetric tridiagonal matrix with diagonal `d` and
/// sub-diagonal `e[1..]` (`e[0]` ignored). Applies the rotations to the
/// `rows × m` row-major matrix `z`. On return `d` holds eigenvalues
/// (unsorted).
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], rows: usize) -> Result<()> {
    let m = d.len();
    if m == 0 {
        return Ok(());
    }
    for i in 1..m {
        e[i - 1] = e[i];
    }
    e[m - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..m {
        tst1 = tst1.max(libm::fabs(d[l]) + libm::fabs(e[l]));
        let mut mm = l;
        while mm < m {
            if libm::fabs(e[mm]) <= eps * tst1 {
                break;
            }
            mm += 1;
        }
        if mm == m {
            mm = m - 1;
        }
        if mm > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::EigenNoConvergence {
                        requested: m,
                        converged: l,
                        residual: libm::fabs(e[l]),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(m).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[mm];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..mm).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..rows {
                        let row = &mut z[k * m..(k + 1) * m];
                        let hz = row[i + 1];
                        row[i + 1] = s * row[i] + c * hz;
                        row[i] = c * row[i] - s * hz;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if libm::fabs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Householder reduction of the row-major symmetric `v` (overwritten by the
/// accumulated transform) to tridiagonal form `(d, e)`.
fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += libm::fabs(*dk);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in j + 1..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    if n > 0 {
        v[(n - 1) * n + n - 1] = 1.0;
    }
    e[0] = 0.0;
}

/// Sorts eigenvalues ascending; `z` is `n × m` row-major with eigenvectors in
/// columns. Returns the eigenvectors transposed (vector `k` contiguous).
fn sort_and_transpose(d: &[f64], z: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = d.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let vals = order.iter().map(|&k| d[k]).collect();
    let mut vecs = vec![0.0; m * n];
    for (slot, &k) in order.iter().enumerate() {
        for r in 0..n {
            vecs[slot * n + r] = z[r * m + k];
        }
    }
    (vals, vecs)
}

/// All eigenpairs of the row-major symmetric `n × n` matrix `a`, ascending.
/// Eigenvector `k` is `vectors[k*n..(k+1)*n]`.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, n, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut v, n)?;
    Ok(sort_and_transpose(&d, &v, n))
}

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i+1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    for i in 1..m {
        e[i] = off[i - 1];
    }
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, m)?;
    Ok(sort_and_transpose(&d, &z, m))
}

/// Eigenvalues of the tridiagonal matrix and the last component of each
/// (unit) eigenvector, sorted ascending.
fn tridiagonal_values_last_row(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    for i in 1..m {
        e[i] = off[i - 1];
    }
    let mut z = vec![0.0; m];
    z[m - 1] = 1.0;
    tql2(&mut d, &mut e, &mut z, 1)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    Ok((order.iter().map(|&k| d[k]).collect(), order.iter().map(|&k| z[k]).collect()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            s[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut t = (s[0] + s[1]) + (s[2] + s[3]);
    for i in 4 * chunks..a.len() {
        t += a[i] * b[i];
    }
    t
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let nv = libm::sqrt(dot(v, v));
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }
    nv
}

/// Two passes of classical Gram-Schmidt of `w` against each vector in `basis`.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Makes the entry of largest magnitude positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if libm::fabs(v[i]) > libm::fabs(v[best]) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

struct LanczosRun {
    pairs: Vec<(f64, Vec<f64>)>,
    converged: bool,
    worst_residual: f64,
}

/// One Lanczos run in the orthogonal complement of `locked`. Returns the
/// smallest `want` Ritz pairs and whether they met the tolerance.
fn lanczos_run(
    apply: &impl Fn(&[f64], &mut [f64]),
    n: usize,
    locked: &[Vec<f64>],
    want: usize,
    max_steps: usize,
    tol: f64,
    seed: u64,
) -> Result<LanczosRun> {
    let mut r = rng::seeded(seed);
    let mut q0: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
    orthogonalize(&mut q0, locked);
    if normalize(&mut q0) == 0.0 {
        return Ok(LanczosRun {
            pairs: Vec::new(),
            converged: true,
            worst_residual: 0.0,
        });
    }
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut next_check = want.max(8);
    let scale_floor = 1e-300;

    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        alpha.push(a);
        let b = libm::sqrt(dot(&w, &w));
        let m = alpha.len();
        let anorm = alpha
            .iter()
            .zip(beta.iter().chain(core::iter::once(&0.0)))
            .fold(0.0f64, |acc, (x, y)| acc.max(libm::fabs(*x) + libm::fabs(*y)));
        let breakdown = b <= 1e-12 * anorm.max(scale_floor) || m >= n - locked.len();
        let at_limit = m >= max_steps;
        if breakdown || at_limit || m >= next_check {
            let (vals, last) = tridiagonal_values_last_row(&alpha, &beta)?;
            let k = want.min(m);
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for i in 0..k {
                let res = if breakdown { 0.0 } else { libm::fabs(b * last[i]) };
                worst = worst.max(res / libm::fabs(vals[i]).max(1.0));
                if res > tol * libm::fabs(vals[i]).max(1.0) {
                    ok = false;
                }
            }
            if ok || breakdown || at_limit {
                let (vals, s) = tridiagonal_eigen(&alpha, &beta)?;
                let mut pairs = Vec::with_capacity(k);
                for i in 0..k {
                    let mut y = vec![0.0; n];
                    for (l, q) in basis.iter().enumerate() {
                        axpy(s[i * m + l], q, &mut y);
                    }
                    normalize(&mut y);
                    pairs.push((vals[i], y));
                }
                return Ok(LanczosRun {
                    pairs,
                    converged: ok || breakdown,
                    worst_residual: worst,
                });
            }
            next_check = m + (m / 8).max(5);
        }
        beta.push(b);
        let mut q = core::mem::replace(&mut w, vec![0.0; n]);
        q.iter_mut().for_each(|x| *x /= b);
        basis.push(q);
    }
}

/// The `count` algebraically smallest eigenpairs of the symmetric operator
/// `apply` on `ℝ^n`.
///
/// Lanczos runs are repeated in the complement of the already converged
/// vectors until a run finds nothing below the current `count`-th value, which
/// also recovers multiple eigenvalues. A final Rayleigh-Ritz step on the
/// locked vectors and explicit residual checks certify the result.
pub fn smallest_eigenpairs_with(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    count: usize,
    seed: u64,
) -> Result<SpectralResult> {
    if count == 0 || count > n {
        return Err(Error::invalid("eigenpair count must be in 1..=n"));
    }
    let tol = 1e-9;
    let max_steps = n.min(1500);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut locked_vals: Vec<f64> = Vec::new();
    let max_runs = 2 * count + 6;
    for run in 0..max_runs {
        let want = if locked.len() >= count { 1 } else { count - locked.len() };
        let res = lanczos_run(&apply, n, &locked, want, max_steps, tol, rng::derive_seed(seed, run as u64))?;
        if !res.converged {
            return Err(Error::EigenNoConvergence {
                requested: count,
                converged: locked.len(),
                residual: res.worst_residual,
            });
        }
        if res.pairs.is_empty() {
            break;
        }
        let mut sorted = locked_vals.clone();
        sorted.sort_by(f64::total_cmp);
        let improved = sorted.len() < count || {
            let threshold = sorted[count - 1];
            res.pairs[0].0 < threshold - 1e-10 * threshold.abs().max(1.0)
        };
        for (v, y) in res.pairs {
            locked_vals.push(v);
            locked.push(y);
        }
        if !improved && locked.len() >= count {
            break;
        }
        if locked.len() >= n {
            break;
        }
    }
    rayleigh_ritz(&apply, n, &locked, count)
}

fn rayleigh_ritz(
    apply: &impl Fn(&[f64], &mut [f64]),
    n: usize,
    basis: &[Vec<f64>],
    count: usize,
) -> Result<SpectralResult> {
    let p = basis.len();
    if p < count {
        return Err(Error::EigenNoConvergence {
            requested: count,
            converged: p,
            residual: f64::INFINITY,
        });
    }
    let mut av = Vec::with_capacity(p);
    for q in basis {
        let mut y = vec![0.0; n];
        apply(q, &mut y);
        av.push(y);
    }
    let mut h = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            let v = 0.5 * (dot(&basis[i], &av[j]) + dot(&basis[j], &av[i]));
            h[i * p + j] = v;
            h[j * p + i] = v;
        }
    }
    let (vals, s) = symmetric_eigen(&h, p)?;
    let mut vectors = vec![0.0; count * n];
    let mut residuals = Vec::with_capacity(count);
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let mut v = vec![0.0; n];
        let mut lv = vec![0.0; n];
        for l in 0..p {
            axpy(s[k * p + l], &basis[l], &mut v);
            axpy(s[k * p + l], &av[l], &mut lv);
        }
        let nv = normalize(&mut v);
        lv.iter_mut().for_each(|x| *x /= nv);
        fix_sign(&mut v);
        let mut lvv = vec![0.0; n];
        apply(&v, &mut lvv);
        axpy(-vals[k], &v, &mut lvv);
        let res = libm::sqrt(dot(&lvv, &lvv));
        worst = worst.max(res / libm::fabs(vals[k]).max(1.0));
        residuals.push(res);
        vectors[k * n..(k + 1) * n].copy_from_slice(&v);
    }
    if worst > 1e-6 {
        return Err(Error::EigenNoConvergence {
            requested: count,
            converged: residuals.iter().zip(&vals).filter(|(r, v)| **r <= 1e-6 * v.abs().max(1.0)).count(),
            residual: worst,
        });
    }
    Ok(SpectralResult {
        eigenvalues: vals[..count].to_vec(),
        vectors,
        residuals,
        n,
    })
}

/// The `count` smallest eigenpairs `λ_0 ≤ λ_1 ≤ …` of `L = D - W`.
///
/// Uses the dense solver up to [`DENSE_LIMIT`] vertices and Lanczos above.
pub fn smallest_eigenpairs(graph: &GeometricGraph, count: usize) -> Result<SpectralResult> {
    let n = graph.len();
    if count == 0 || count > n {
        return Err(Error::invalid("eigenpair count must be in 1..=n"));
    }
    if n <= DENSE_LIMIT {
        let l = graph.dense_laplacian();
        let (vals, vecs) = symmetric_eigen(&l, n)?;
        let mut vectors = vecs[..count * n].to_vec();
        let mut residuals = Vec::with_capacity(count);
        let mut lv = vec![0.0; n];
        for k in 0..count {
            let v = &mut vectors[k * n..(k + 1) * n];
            fix_sign(v);
            graph.apply_laplacian(v, &mut lv);
            axpy(-vals[k], v, &mut lv);
            residuals.push(libm::sqrt(dot(&lv, &lv)));
        }
        return Ok(SpectralResult {
            eigenvalues: vals[..count].to_vec(),
            vectors,
            residuals,
            n,
        });
    }
    smallest_eigenpairs_with(n, |x, y| graph.apply_laplacian(x, y), count, 0x1a2c_2055)
}
