//! Static kd-tree over a flat, row-major coordinate array.
//!
//! Used for nearest-vertex extension of graph fields, proxy distance queries
//! and neighbor search during graph construction.

use alloc::vec::Vec;

const LEAF: usize = 8;

#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    /// Point indices arranged as an implicit balanced tree: the node covering
    /// `[lo, hi)` stores its splitting point at `(lo + hi) / 2`.
    order: Vec<usize>,
}

impl KdTree {
    /// Builds a tree over `coords.len() / dim` points.
    pub fn new(coords: &[f64], dim: usize) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0);
        let n = coords.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        build(coords, dim, &mut order, 0);
        Self {
            dim,
            coords: coords.to_vec(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Nearest point to `q` as `(index, squared distance)`. Ties go to the
    /// lowest index. Returns `None` on an empty tree.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.order.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(q, 0, self.order.len(), 0, &mut best);
        Some(best)
    }

    fn nearest_in(&self, q: &[f64], lo: usize, hi: usize, depth: usize, best: &mut (usize, f64)) {
        if hi - lo <= LEAF {
            for &i in &self.order[lo..hi] {
                let d2 = dist2(self.point(i), q);
                if d2 < best.1 || (d2 == best.1 && i < best.0) {
                    *best = (i, d2);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = depth % self.dim;
        let p = self.order[mid];
        let d2 = dist2(self.point(p), q);
        if d2 < best.1 || (d2 == best.1 && p < best.0) {
            *best = (p, d2);
        }
        let diff = q[axis] - self.coords[p * self.dim + axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_in(q, near.0, near.1, depth + 1, best);
        if diff * diff <= best.1 {
            self.nearest_in(q, far.0, far.1, depth + 1, best);
        }
    }

    /// Appends to `out` every index whose point lies strictly within
    /// distance `radius` of `q`. Output order is unspecified.
    pub fn within_radius(&self, q: &[f64], radius: f64, out: &mut Vec<usize>) {
        if !self.order.is_empty() {
            self.radius_in(q, radius * radius, radius, 0, self.order.len(), 0, out);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn radius_in(
        &self,
        q: &[f64],
        r2: f64,
        r: f64,
        lo: usize,
        hi: usize,
        depth: usize,
        out: &mut Vec<usize>,
    ) {
        if hi - lo <= LEAF {
            for &i in &self.order[lo..hi] {
                if dist2(self.point(i), q) < r2 {
                    out.push(i);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = depth % self.dim;
        let p = self.order[mid];
        if dist2(self.point(p), q) < r2 {
            out.push(p);
        }
        let diff = q[axis] - self.coords[p * self.dim + axis];
        if diff < r {
            self.radius_in(q, r2, r, lo, mid, depth + 1, out);
        }
        if diff > -r {
            self.radius_in(q, r2, r, mid + 1, hi, depth + 1, out);
        }
    }
}

fn build(coords: &[f64], dim: usize, order: &mut [usize], depth: usize) {
    if order.len() <= LEAF {
        return;
    }
    let axis = depth % dim;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        coords[a * dim + axis]
            .total_cmp(&coords[b * dim + axis])
            .then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build(coords, dim, left, depth + 1);
    build(coords, dim, &mut right[1..], depth + 1);
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_coords(n: usize, dim: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::seeded(seed);
        (0..n * dim).map(|_| rng::uniform(&mut r, 0.0, 1.0)).collect()
    }

    #[test]
    fn nearest_matches_brute_force() {
        for dim in [2, 3] {
            let coords = random_coords(500, dim, 11);
            let tree = KdTree::new(&coords, dim);
            let queries = random_coords(200, dim, 12);
            for q in queries.chunks(dim) {
                let (i, d2) = tree.nearest(q).unwrap();
                let (bi, bd2) = (0..500)
                    .map(|j| (j, dist2(&coords[j * dim..(j + 1) * dim], q)))
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .unwrap();
                assert_eq!(i, bi);
                assert_eq!(d2, bd2);
            }
        }
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let coords = [1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0];
        let tree = KdTree::new(&coords, 2);
        assert_eq!(tree.nearest(&[0.0, 0.0]).unwrap().0, 0);
        let mut many = Vec::new();
        for _ in 0..40 {
            many.extend_from_slice(&[0.25, 0.25]);
        }
        let tree = KdTree::new(&many, 2);
        assert_eq!(tree.nearest(&[0.3, 0.3]).unwrap().0, 0);
    }

    #[test]
    fn radius_matches_brute_force() {
        let coords = random_coords(800, 2, 5);
        let tree = KdTree::new(&coords, 2);
        let mut out = Vec::new();
        for q in random_coords(50, 2, 6).chunks(2) {
            out.clear();
            tree.within_radius(q, 0.1, &mut out);
            out.sort_unstable();
            let brute: Vec<usize> = (0..800)
                .filter(|&j| dist2(&coords[j * 2..j * 2 + 2], q) < 0.01)
                .collect();
            assert_eq!(out, brute);
        }
    }
}
