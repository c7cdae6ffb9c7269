//! Closed-form signed distance functions used as initial shapes and oracles.

use alloc::vec::Vec;

use super::LevelSet;

/// Disk (2D) or ball (3D).
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: &[f64], radius: f64) -> Self {
        Self {
            center: center.to_vec(),
            radius,
        }
    }
}

impl LevelSet for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        dist_to(x, &self.center) - self.radius
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.dim();
        let rho = dist_to(x, &self.center);
        for k in 0..d {
            grad[k] = if rho > 0.0 { (x[k] - self.center[k]) / rho } else { 0.0 };
        }
        rho - self.radius
    }

    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let d = self.dim();
        let v = self.gradient(x, grad);
        let rho = dist_to(x, &self.center);
        for k in 0..d {
            for l in 0..d {
                let id = if k == l { 1.0 } else { 0.0 };
                hess[k * d + l] = if rho > 0.0 { (id - grad[k] * grad[l]) / rho } else { 0.0 };
            }
        }
        v
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// Annulus (2D) or spherical shell (3D): `r_inner < |x - c| < r_outer`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub center: Vec<f64>,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Shell {
    pub fn new(center: &[f64], r_inner: f64, r_outer: f64) -> Self {
        assert!(0.0 < r_inner && r_inner < r_outer);
        Self {
            center: center.to_vec(),
            r_inner,
            r_outer,
        }
    }
}

impl LevelSet for Shell {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let rho = dist_to(x, &self.center);
        (rho - self.r_outer).max(self.r_inner - rho)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.dim();
        let rho = dist_to(x, &self.center);
        let outer = rho - self.r_outer >= self.r_inner - rho;
        let s = if outer { 1.0 } else { -1.0 };
        for k in 0..d {
            grad[k] = if rho > 0.0 { s * (x[k] - self.center[k]) / rho } else { 0.0 };
        }
        self.eval(x)
    }
}

/// Axis-aligned box with half-extents `half`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxShape {
    pub center: Vec<f64>,
    pub half: Vec<f64>,
}

impl BoxShape {
    pub fn new(center: &[f64], half: &[f64]) -> Self {
        assert_eq!(center.len(), half.len());
        Self {
            center: center.to_vec(),
            half: half.to_vec(),
        }
    }
}

impl LevelSet for BoxShape {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut outside = 0.0;
        let mut inside = f64::NEG_INFINITY;
        for k in 0..d {
            let q = libm::fabs(x[k] - self.center[k]) - self.half[k];
            outside += q.max(0.0) * q.max(0.0);
            inside = inside.max(q);
        }
        libm::sqrt(outside) + inside.min(0.0)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.dim();
        let mut q = [0.0; 3];
        let mut outside = 0.0;
        for k in 0..d {
            q[k] = libm::fabs(x[k] - self.center[k]) - self.half[k];
            outside += q[k].max(0.0) * q[k].max(0.0);
        }
        let outside = libm::sqrt(outside);
        for g in grad[..d].iter_mut() {
            *g = 0.0;
        }
        if outside > 0.0 {
            for k in 0..d {
                grad[k] = q[k].max(0.0) / outside * sign(x[k] - self.center[k]);
            }
        } else {
            let mut kmax = 0;
            for k in 1..d {
                if q[k] > q[kmax] {
                    kmax = k;
                }
            }
            grad[kmax] = sign(x[kmax] - self.center[kmax]);
        }
        self.eval(x)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// Axis-aligned ellipse (2D) with semi-axes `a` (x) and `b` (y); exact
/// signed distance via the closest-point equation solved by bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    pub fn new(center: [f64; 2], a: f64, b: f64) -> Self {
        assert!(a > 0.0 && b > 0.0);
        Self { center, a, b }
    }

    /// Closest boundary point to `x`, computed in the first-quadrant frame
    /// with the major axis first and reflected back.
    fn closest(&self, x: &[f64]) -> [f64; 2] {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let swap = self.a < self.b;
        let (e0, e1, y0, y1) = if swap {
            (self.b, self.a, libm::fabs(dy), libm::fabs(dx))
        } else {
            (self.a, self.b, libm::fabs(dx), libm::fabs(dy))
        };
        let (q0, q1) = closest_first_quadrant(e0, e1, y0, y1);
        let (qx, qy) = if swap { (q1, q0) } else { (q0, q1) };
        [
            self.center[0] + qx * sign(dx),
            self.center[1] + qy * sign(dy),
        ]
    }

    fn inside(&self, x: &[f64]) -> bool {
        let u = (x[0] - self.center[0]) / self.a;
        let v = (x[1] - self.center[1]) / self.b;
        u * u + v * v < 1.0
    }
}

impl LevelSet for Ellipse {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let q = self.closest(x);
        let dist = libm::hypot(x[0] - q[0], x[1] - q[1]);
        if self.inside(x) {
            -dist
        } else {
            dist
        }
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        // gradient of a signed distance points from the closest point
        let q = self.closest(x);
        let (dx, dy) = (x[0] - q[0], x[1] - q[1]);
        let dist = libm::hypot(dx, dy);
        let inside = self.inside(x);
        if dist > 1e-12 {
            let s = if inside { -1.0 } else { 1.0 };
            grad[0] = s * dx / dist;
            grad[1] = s * dy / dist;
        } else {
            // on the boundary: outward normal of the implicit quadric
            let nx = (x[0] - self.center[0]) / (self.a * self.a);
            let ny = (x[1] - self.center[1]) / (self.b * self.b);
            let n = libm::hypot(nx, ny);
            grad[0] = nx / n;
            grad[1] = ny / n;
        }
        if inside {
            -dist
        } else {
            dist
        }
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// Union of disjoint shapes: `min` of their signed distances.
#[derive(Clone, Debug)]
pub struct Union<S> {
    pub parts: Vec<S>,
}

impl<S: LevelSet> Union<S> {
    pub fn new(parts: Vec<S>) -> Self {
        assert!(!parts.is_empty());
        Self { parts }
    }

    fn argmin(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut val = f64::INFINITY;
        for (i, p) in self.parts.iter().enumerate() {
            let v = p.eval(x);
            if v < val {
                val = v;
                best = i;
            }
        }
        best
    }
}

impl<S: LevelSet> LevelSet for Union<S> {
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.parts
            .iter()
            .map(|p| p.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.parts[self.argmin(x)].gradient(x, grad)
    }

    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        self.parts[self.argmin(x)].hessian(x, grad, hess)
    }
}

/// Shape given as a level set with an exact signed distance, selectable at
/// runtime (initial shapes in run configurations).
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticShape {
    Ball(Ball),
    Shell(Shell),
    Box(BoxShape),
    Ellipse(Ellipse),
    Balls(Vec<Ball>),
}

impl LevelSet for AnalyticShape {
    fn dim(&self) -> usize {
        match self {
            AnalyticShape::Ball(s) => s.dim(),
            AnalyticShape::Shell(s) => s.dim(),
            AnalyticShape::Box(s) => s.dim(),
            AnalyticShape::Ellipse(s) => s.dim(),
            AnalyticShape::Balls(s) => s[0].dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AnalyticShape::Ball(s) => s.eval(x),
            AnalyticShape::Shell(s) => s.eval(x),
            AnalyticShape::Box(s) => s.eval(x),
            AnalyticShape::Ellipse(s) => s.eval(x),
            AnalyticShape::Balls(s) => s.iter().map(|b| b.eval(x)).fold(f64::INFINITY, f64::min),
        }
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match self {
            AnalyticShape::Ball(s) => s.gradient(x, grad),
            AnalyticShape::Shell(s) => s.gradient(x, grad),
            AnalyticShape::Box(s) => s.gradient(x, grad),
            AnalyticShape::Ellipse(s) => s.gradient(x, grad),
            AnalyticShape::Balls(s) => {
                let i = (0..s.len())
                    .min_by(|&i, &j| s[i].eval(x).total_cmp(&s[j].eval(x)))
                    .unwrap();
                s[i].gradient(x, grad)
            }
        }
    }

    fn hessian(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        match self {
            AnalyticShape::Ball(s) => s.hessian(x, grad, hess),
            AnalyticShape::Balls(s) => {
                let i = (0..s.len())
                    .min_by(|&i, &j| s[i].eval(x).total_cmp(&s[j].eval(x)))
                    .unwrap();
                s[i].hessian(x, grad, hess)
            }
            _ => fd_hessian(self, x, grad, hess),
        }
    }

    fn is_convex(&self) -> bool {
        matches!(
            self,
            AnalyticShape::Ball(_) | AnalyticShape::Box(_) | AnalyticShape::Ellipse(_)
        )
    }
}

fn fd_hessian(ls: &AnalyticShape, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
    struct Fd<'a>(&'a AnalyticShape);
    impl LevelSet for Fd<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn eval(&self, x: &[f64]) -> f64 {
            self.0.eval(x)
        }
        fn gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
            self.0.gradient(x, grad)
        }
    }
    Fd(ls).hessian(x, grad, hess)
}

/// Closest point on the ellipse `(u/e0)² + (v/e1)² = 1`, `e0 ≥ e1`, to the
/// point `(y0, y1)` with non-negative coordinates.
fn closest_first_quadrant(e0: f64, e1: f64, y0: f64, y1: f64) -> (f64, f64) {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g == 0.0 {
                return (y0, y1);
            }
            let r0 = (e0 / e1) * (e0 / e1);
            let n0 = r0 * z0;
            // root of F(s) = (n0/(s + r0))² + (z1/(s + 1))² - 1, decreasing on (-1, ∞)
            let mut s0 = z1 - 1.0;
            let mut s1 = if g < 0.0 { 0.0 } else { libm::hypot(n0, z1) - 1.0 };
            let mut s = 0.0;
            for _ in 0..2000 {
                s = 0.5 * (s0 + s1);
                if s == s0 || s == s1 {
                    break;
                }
                let t0 = n0 / (s + r0);
                let t1 = z1 / (s + 1.0);
                let gs = t0 * t0 + t1 * t1 - 1.0;
                if gs > 0.0 {
                    s0 = s;
                } else if gs < 0.0 {
                    s1 = s;
                } else {
                    break;
                }
            }
            (r0 * y0 / (s + r0), y1 / (s + 1.0))
        } else {
            (0.0, e1)
        }
    } else {
        let numer = e0 * y0;
        let denom = e0 * e0 - e1 * e1;
        if numer < denom {
            let t = numer / denom;
            (e0 * t, e1 * libm::sqrt((1.0 - t * t).max(0.0)))
        } else {
            (e0, 0.0)
        }
    }
}

fn dist_to(x: &[f64], c: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..c.len() {
        s += (x[k] - c[k]) * (x[k] - c[k]);
    }
    libm::sqrt(s)
}

#[inline]
fn sign(t: f64) -> f64 {
    if t < 0.0 {
        -1.0
    } else {
        1.0
    }
}
