//! Level-set networks: a sinusoidal MLP and a one-hidden-layer convex network.
//!
//! Input derivatives are propagated in forward mode as "jets": channel 0 is
//! the value, channels `1..=d` the first partials, and the remaining
//! `d(d+1)/2` channels the second partials `∂²/∂x_k∂x_l` with `k ≤ l`.
//! Parameter gradients for fitting use a hand-written reverse pass.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::levelset::LevelSet;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// `sin(ω(W a + b))` hidden layers followed by a linear output layer.
    Siren,
    /// `W₂ softplus(W₁ x + b₁) + b₂` with `W₂ = raw²` elementwise, hence convex in `x`.
    Convex,
}

impl Architecture {
    pub fn tag(self) -> &'static str {
        match self {
            Architecture::Siren => "siren",
            Architecture::Convex => "convex",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "siren" => Some(Architecture::Siren),
            "convex" => Some(Architecture::Convex),
            _ => None,
        }
    }
}

/// One affine layer, `rows × cols` weights in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    /// Frequency scale applied to the pre-activation (SIREN hidden layers);
    /// `1.0` elsewhere.
    pub omega: f64,
}

impl Layer {
    pub fn zeros(rows: usize, cols: usize, omega: f64) -> Self {
        Self {
            rows,
            cols,
            weights: vec![0.0; rows * cols],
            bias: vec![0.0; rows],
            omega,
        }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }
}

/// Raw trainable parameters. For the convex architecture the output layer
/// stores `raw` with effective weights `raw²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

impl NetworkParams {
    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::zeros(l.rows, l.cols, l.omega))
                .collect(),
        }
    }

    /// Flattens weights then bias, layer by layer.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_from_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.len());
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&flat[at..at + nw]);
            at += nw;
            let nb = l.bias.len();
            l.bias.copy_from_slice(&flat[at..at + nb]);
            at += nb;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.omega.is_finite()
                && l.weights.iter().all(|w| w.is_finite())
                && l.bias.iter().all(|b| b.is_finite())
        })
    }
}

/// A network `φ_θ : ℝ^d → ℝ` whose negative sublevel set is the shape.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetNetwork {
    arch: Architecture,
    dim: usize,
    params: NetworkParams,
}

/// Defaults for the sinusoidal network.
pub const SIREN_OMEGA_FIRST: f64 = 30.0;
pub const SIREN_OMEGA_HIDDEN: f64 = 30.0;

impl LevelSetNetwork {
    /// Sinusoidal network with the given hidden widths, initialized with
    /// the usual SIREN scheme: first layer `U(-1/fan_in, 1/fan_in)`, later
    /// layers `U(-√(6/fan_in)/ω, √(6/fan_in)/ω)`.
    pub fn siren(dim: usize, hidden: &[usize], omega_first: f64, omega_hidden: f64, seed: u64) -> Self {
        assert!((2..=3).contains(&dim), "dimension must be 2 or 3");
        assert!(!hidden.is_empty());
        let mut r = rng::seeded(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut fan_in = dim;
        for (li, &width) in hidden.iter().enumerate() {
            let omega = if li == 0 { omega_first } else { omega_hidden };
            let bound = if li == 0 {
                1.0 / fan_in as f64
            } else {
                libm::sqrt(6.0 / fan_in as f64) / omega
            };
            let mut layer = Layer::zeros(width, fan_in, omega);
            for w in &mut layer.weights {
                *w = rng::uniform(&mut r, -bound, bound);
            }
            let bb = 1.0 / libm::sqrt(fan_in as f64);
            for b in &mut layer.bias {
                *b = rng::uniform(&mut r, -bb, bb);
            }
            layers.push(layer);
            fan_in = width;
        }
        let bound = libm::sqrt(6.0 / fan_in as f64) / omega_hidden;
        let mut out = Layer::zeros(1, fan_in, 1.0);
        for w in &mut out.weights {
            *w = rng::uniform(&mut r, -bound, bound);
        }
        layers.push(out);
        Self {
            arch: Architecture::Siren,
            dim,
            params: NetworkParams { layers },
        }
    }

    /// The default sinusoidal network: two hidden layers of 80 neurons.
    pub fn siren_default(dim: usize, seed: u64) -> Self {
        Self::siren(dim, &[80, 80], SIREN_OMEGA_FIRST, SIREN_OMEGA_HIDDEN, seed)
    }

    /// Convex network of the given width, initialized close to the signed
    /// distance of a ball of radius `radius` about `center`: hidden units
    /// are ridge functions along random directions with sharpness `sharpness`.
    pub fn convex(dim: usize, width: usize, center: &[f64], radius: f64, sharpness: f64, seed: u64) -> Self {
        assert!((2..=3).contains(&dim), "dimension must be 2 or 3");
        assert!(width > 0);
        let mut r = rng::seeded(seed);
        let mut first = Layer::zeros(width, dim, 1.0);
        for i in 0..width {
            let mut u = [0.0; 3];
            if dim == 2 {
                let t = 2.0 * core::f64::consts::PI * (i as f64 + rng::uniform(&mut r, 0.0, 1.0)) / width as f64;
                u[0] = libm::cos(t);
                u[1] = libm::sin(t);
            } else {
                // uniform direction on the sphere
                let z = rng::uniform(&mut r, -1.0, 1.0);
                let t = rng::uniform(&mut r, 0.0, 2.0 * core::f64::consts::PI);
                let s = libm::sqrt(1.0 - z * z);
                u = [s * libm::cos(t), s * libm::sin(t), z];
            }
            let mut dot = 0.0;
            for k in 0..dim {
                first.weights[i * dim + k] = sharpness * u[k];
                dot += u[k] * center[k];
            }
            first.bias[i] = -sharpness * dot;
        }
        // mean of max(u·h, 0) over unit directions is |h|/π (2D), |h|/4 (3D)
        let mean_ridge = if dim == 2 { 1.0 / core::f64::consts::PI } else { 0.25 };
        let w = 1.0 / (width as f64 * sharpness * mean_ridge);
        let mut out = Layer::zeros(1, width, 1.0);
        for raw in &mut out.weights {
            *raw = libm::sqrt(w);
        }
        out.bias[0] = -radius;
        Self {
            arch: Architecture::Convex,
            dim,
            params: NetworkParams {
                layers: vec![first, out],
            },
        }
    }

    /// Assembles a network from explicit parameters, checking shapes and
    /// finiteness.
    pub fn from_parts(arch: Architecture, dim: usize, params: NetworkParams) -> Result<Self> {
        let net = Self { arch, dim, params };
        net.check()?;
        Ok(net)
    }

    /// Verifies that parameter shapes chain from `d` to 1 and every entry is
    /// finite.
    pub fn check(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::CorruptNetwork(format!("input dimension {}", self.dim)));
        }
        let layers = &self.params.layers;
        if layers.len() < 2 {
            return Err(Error::CorruptNetwork("fewer than two layers".into()));
        }
        if self.arch == Architecture::Convex && layers.len() != 2 {
            return Err(Error::CorruptNetwork("convex network must have exactly two layers".into()));
        }
        let mut fan_in = self.dim;
        for (i, l) in layers.iter().enumerate() {
            if l.cols != fan_in || l.weights.len() != l.rows * l.cols || l.bias.len() != l.rows || l.rows == 0 {
                return Err(Error::CorruptNetwork(format!("layer {i} shape mismatch")));
            }
            fan_in = l.rows;
        }
        if fan_in != 1 {
            return Err(Error::CorruptNetwork("output dimension is not 1".into()));
        }
        if !self.params.all_finite() {
            return Err(Error::CorruptNetwork("non-finite parameters".into()));
        }
        Ok(())
    }

    pub fn architecture(&self) -> Architecture {
        self.arch
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut NetworkParams {
        &mut self.params
    }

    /// Effective (non-negative) output weights of a convex network.
    pub fn convex_output_weights(&self) -> Option<Vec<f64>> {
        (self.arch == Architecture::Convex)
            .then(|| self.params.layers[1].weights.iter().map(|r| r * r).collect())
    }

    /// `eval` that reports a non-finite output as a corrupt network.
    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::CorruptNetwork("non-finite output".into()))
        }
    }

    /// Multiplies the network output by `factor > 0`.
    pub fn scale_output(&mut self, factor: f64) {
        assert!(factor > 0.0);
        let last = self.params.layers.last_mut().unwrap();
        match self.arch {
            Architecture::Siren => last.weights.iter_mut().for_each(|w| *w *= factor),
            Architecture::Convex => {
                let s = libm::sqrt(factor);
                last.weights.iter_mut().for_each(|w| *w *= s)
            }
        }
        last.bias.iter_mut().for_each(|b| *b *= factor);
    }

    /// Network of the dilated shape `c + factor (Ω - c)`, with the output
    /// rescaled so that a signed distance stays a signed distance:
    /// `φ'(x) = factor · φ(c + (x - c)/factor)`.
    pub fn dilated(&self, center: &[f64], factor: f64) -> Self {
        assert!(factor > 0.0);
        let mut out = self.clone();
        let first = &mut out.params.layers[0];
        let shrink = 1.0 - 1.0 / factor;
        for i in 0..first.rows {
            let mut shift = 0.0;
            for k in 0..first.cols {
                shift += first.weights[i * first.cols + k] * center[k];
                first.weights[i * first.cols + k] /= factor;
            }
            first.bias[i] += shift * shrink;
        }
        out.scale_output(factor);
        out
    }

    fn channels(&self, order: usize) -> usize {
        let d = self.dim;
        match order {
            0 => 1,
            1 => 1 + d,
            _ => 1 + d + d * (d + 1) / 2,
        }
    }

    /// Forward jet of the given order; returns `channels` output values.
    fn jet(&self, x: &[f64], order: usize, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        match self.arch {
            Architecture::Siren => self.siren_jet(x, order, out),
            Architecture::Convex => self.convex_jet(x, order, out),
        }
    }

    fn siren_jet(&self, x: &[f64], order: usize, out: &mut [f64]) {
        let d = self.dim;
        let nc = self.channels(order);
        let layers = &self.params.layers;
        let nl = layers.len();
        let pairs = second_pairs(d);

        // first hidden layer acts on the input jet: a = x, ∂a/∂x_k = e_k, ∂²a = 0
        let l0 = &layers[0];
        let mut width = l0.rows;
        let mut act = vec![0.0; nc * width];
        for i in 0..width {
            let row = l0.row(i);
            let mut z = l0.bias[i];
            for k in 0..d {
                z += row[k] * x[k];
            }
            let z = l0.omega * z;
            let (s, c) = sincos(z);
            act[i] = s;
            if order >= 1 {
                for k in 0..d {
                    act[(1 + k) * width + i] = c * l0.omega * row[k];
                }
            }
            if order >= 2 {
                for (p, &(k, l)) in pairs.iter().enumerate() {
                    act[(1 + d + p) * width + i] = -s * l0.omega * row[k] * l0.omega * row[l];
                }
            }
        }

        let mut z = Vec::new();
        for l in &layers[1..nl - 1] {
            z.clear();
            z.resize(nc * l.rows, 0.0);
            for ch in 0..nc {
                let a = &act[ch * width..(ch + 1) * width];
                for i in 0..l.rows {
                    let mut acc = if ch == 0 { l.bias[i] } else { 0.0 };
                    acc += dot(l.row(i), a);
                    z[ch * l.rows + i] = l.omega * acc;
                }
            }
            let rows = l.rows;
            let mut next = vec![0.0; nc * rows];
            for i in 0..rows {
                let (s, c) = sincos(z[i]);
                next[i] = s;
                if order >= 1 {
                    for k in 0..d {
                        next[(1 + k) * rows + i] = c * z[(1 + k) * rows + i];
                    }
                }
                if order >= 2 {
                    for (p, &(k, m)) in pairs.iter().enumerate() {
                        let zk = z[(1 + k) * rows + i];
                        let zm = z[(1 + m) * rows + i];
                        next[(1 + d + p) * rows + i] = -s * zk * zm + c * z[(1 + d + p) * rows + i];
                    }
                }
            }
            act = next;
            width = rows;
        }

        let lo = &layers[nl - 1];
        for ch in 0..nc {
            let a = &act[ch * width..(ch + 1) * width];
            out[ch] = dot(lo.row(0), a) + if ch == 0 { lo.bias[0] } else { 0.0 };
        }
    }

    fn convex_jet(&self, x: &[f64], order: usize, out: &mut [f64]) {
        let d = self.dim;
        let nc = self.channels(order);
        let l1 = &self.params.layers[0];
        let l2 = &self.params.layers[1];
        let pairs = second_pairs(d);
        out[..nc].iter_mut().for_each(|o| *o = 0.0);
        out[0] = l2.bias[0];
        for i in 0..l1.rows {
            let row = l1.row(i);
            let mut z = l1.bias[i];
            for k in 0..d {
                z += row[k] * x[k];
            }
            let w = l2.weights[i] * l2.weights[i];
            out[0] += w * softplus(z);
            if order >= 1 {
                let s = sigmoid(z);
                for k in 0..d {
                    out[1 + k] += w * s * row[k];
                }
                if order >= 2 {
                    let s2 = s * (1.0 - s);
                    for (p, &(k, l)) in pairs.iter().enumerate() {
                        out[1 + d + p] += w * s2 * row[k] * row[l];
                    }
                }
            }
        }
    }

    /// Loss `Σ_p w_p (φ(x_p) - t_p)²` and its gradient with respect to the
    /// raw parameters (accumulated into `grad`, which is zeroed first).
    pub fn weighted_sq_loss_grad(
        &self,
        points: &[f64],
        targets: &[f64],
        weights: &[f64],
        grad: &mut NetworkParams,
    ) -> f64 {
        for l in &mut grad.layers {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
            l.bias.iter_mut().for_each(|b| *b = 0.0);
        }
        match self.arch {
            Architecture::Siren => self.siren_backprop(points, targets, weights, grad),
            Architecture::Convex => self.convex_backprop(points, targets, weights, grad),
        }
    }

    /// Weighted squared loss only.
    pub fn weighted_sq_loss(&self, points: &[f64], targets: &[f64], weights: &[f64]) -> f64 {
        points
            .chunks(self.dim)
            .zip(targets)
            .zip(weights)
            .map(|((x, t), w)| {
                let r = self.eval(x) - t;
                w * r * r
            })
            .sum()
    }

    fn siren_backprop(&self, points: &[f64], targets: &[f64], weights: &[f64], grad: &mut NetworkParams) -> f64 {
        let layers = &self.params.layers;
        let nl = layers.len();
        let d = self.dim;
        let widest = layers.iter().map(|l| l.rows.max(l.cols)).max().unwrap_or(1);
        // feature-major blocks: acts[l][i * B + b] is unit i of point b
        let mut acts: Vec<Vec<f64>> = (0..nl).map(|_| vec![0.0; widest * BATCH]).collect();
        let mut coss: Vec<Vec<f64>> = (0..nl - 1).map(|_| vec![0.0; widest * BATCH]).collect();
        let mut delta = vec![0.0; widest * BATCH];
        let mut delta_prev = vec![0.0; widest * BATCH];
        let mut g = [0.0; BATCH];
        let mut loss = 0.0;
        let n = targets.len();
        let mut start = 0;
        while start < n {
            let nb = BATCH.min(n - start);
            for b in 0..nb {
                for k in 0..d {
                    acts[0][k * nb + b] = points[(start + b) * d + k];
                }
            }
            for li in 0..nl - 1 {
                let l = &layers[li];
                let (head, tail) = acts.split_at_mut(li + 1);
                let z = &mut tail[0][..l.rows * nb];
                gemm(l.rows, l.cols, nb, &l.weights, (l.cols, 1), &head[li][..l.cols * nb], (nb, 1), z, 0.0);
                let c = &mut coss[li][..l.rows * nb];
                for i in 0..l.rows {
                    for b in 0..nb {
                        let (sn, cs) = sincos(l.omega * (z[i * nb + b] + l.bias[i]));
                        z[i * nb + b] = sn;
                        c[i * nb + b] = cs;
                    }
                }
            }
            let lo = &layers[nl - 1];
            let last = &acts[nl - 1][..lo.cols * nb];
            let mut phi = [0.0; BATCH];
            gemm(1, lo.cols, nb, &lo.weights, (lo.cols, 1), last, (nb, 1), &mut phi[..nb], 0.0);
            for b in 0..nb {
                let r = phi[b] + lo.bias[0] - targets[start + b];
                let wp = weights[start + b];
                loss += wp * r * r;
                g[b] = 2.0 * wp * r;
            }
            {
                let gl = &mut grad.layers[nl - 1];
                for b in 0..nb {
                    gl.bias[0] += g[b];
                }
                gemm(1, nb, lo.cols, &g[..nb], (nb, 1), last, (1, nb), &mut gl.weights, 1.0);
            }
            for i in 0..lo.cols {
                for b in 0..nb {
                    delta[i * nb + b] = lo.weights[i] * g[b];
                }
            }
            for li in (0..nl - 1).rev() {
                let l = &layers[li];
                let dl = &mut delta[..l.rows * nb];
                // δz = ω · δa ⊙ cos z
                for (dv, cv) in dl.iter_mut().zip(&coss[li][..l.rows * nb]) {
                    *dv *= l.omega * cv;
                }
                let gl = &mut grad.layers[li];
                for i in 0..l.rows {
                    gl.bias[i] += dl[i * nb..(i + 1) * nb].iter().sum::<f64>();
                }
                let a = &acts[li][..l.cols * nb];
                gemm(l.rows, nb, l.cols, dl, (nb, 1), a, (1, nb), &mut gl.weights, 1.0);
                if li > 0 {
                    gemm(l.cols, l.rows, nb, &l.weights, (1, l.cols), dl, (nb, 1), &mut delta_prev[..l.cols * nb], 0.0);
                    core::mem::swap(&mut delta, &mut delta_prev);
                }
            }
            start += nb;
        }
        loss
    }

    fn convex_backprop(&self, points: &[f64], targets: &[f64], weights: &[f64], grad: &mut NetworkParams) -> f64 {
        let l1 = &self.params.layers[0];
        let l2 = &self.params.layers[1];
        let n = l1.rows;
        let mut z = vec![0.0; n];
        let mut loss = 0.0;
        for ((x, &t), &wp) in points.chunks(self.dim).zip(targets).zip(weights) {
            let mut phi = l2.bias[0];
            for i in 0..n {
                z[i] = dot(l1.row(i), x) + l1.bias[i];
                phi += l2.weights[i] * l2.weights[i] * softplus(z[i]);
            }
            let r = phi - t;
            loss += wp * r * r;
            let g = 2.0 * wp * r;
            if g == 0.0 {
                continue;
            }
            let (g1, g2) = grad.layers.split_at_mut(1);
            let g1 = &mut g1[0];
            let g2 = &mut g2[0];
            g2.bias[0] += g;
            for i in 0..n {
                let raw = l2.weights[i];
                g2.weights[i] += g * 2.0 * raw * softplus(z[i]);
                let dz = g * raw * raw * sigmoid(z[i]);
                g1.bias[i] += dz;
                axpy(dz, x, &mut g1.weights[i * self.dim..(i + 1) * self.dim]);
            }
        }
        loss
    }
}

impl LevelSet for LevelSetNetwork {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut out = [0.0; 1];
        self.jet(x, 0, &mut out);
        out[0]
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mut out = [0.0; 4];
        self.jet(x, 1, &mut out);
        grad[..self.dim].copy_from_slice(&out[1..=self.dim]);
        out[0]
    }

    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let d = self.dim;
        let mut out = [0.0; 10];
        self.jet(x, 2, &mut out);
        grad[..d].copy_from_slice(&out[1..=d]);
        for (p, &(k, l)) in second_pairs(d).iter().enumerate() {
            hess[k * d + l] = out[1 + d + p];
            hess[l * d + k] = out[1 + d + p];
        }
        out[0]
    }

    fn is_convex(&self) -> bool {
        self.arch == Architecture::Convex
    }
}

fn second_pairs(d: usize) -> &'static [(usize, usize)] {
    const P2: [(usize, usize); 3] = [(0, 0), (0, 1), (1, 1)];
    const P3: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    if d == 2 {
        &P2
    } else {
        &P3
    }
}

#[inline]
fn sincos(z: f64) -> (f64, f64) {
    libm::sincos(z)
}

/// Points processed together in the batched backward pass.
const BATCH: usize = 64;

/// `C ← A B + β C` for row-major `C` (`m × n`); `A` is `m × k` and `B` is
/// `k × n` with the given (row, column) strides.
#[allow(clippy::too_many_arguments)]
fn gemm(m: usize, k: usize, n: usize, a: &[f64], sa: (usize, usize), b: &[f64], sb: (usize, usize), c: &mut [f64], beta: f64) {
    assert!(c.len() >= m * n);
    assert!(m == 0 || k == 0 || a.len() > (m - 1) * sa.0 + (k - 1) * sa.1);
    assert!(k == 0 || n == 0 || b.len() > (k - 1) * sb.0 + (n - 1) * sb.1);
    // SAFETY: the asserted extents keep every strided access in bounds.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            sa.0 as isize,
            sa.1 as isize,
            b.as_ptr(),
            sb.0 as isize,
            sb.1 as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorizes; summation order is fixed
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + libm::log1p(libm::exp(-t))
    } else {
        libm::log1p(libm::exp(t))
    }
}

#[inline]
pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}
