//! Fast oracle checks that need no configuration (`shapeopt selftest`).

use std::f64::consts::PI;

use shapeopt_core::graph::{dirichlet_solve, neumann_eigen, Kernel};
use shapeopt_core::levelset::analytic::{Ball, Shell};
use shapeopt_core::levelset::{mean_curvature, spatial_gradient, LevelSet};
use shapeopt_core::problems::soft_min;
use shapeopt_core::rng::derive_seed;
use shapeopt_core::sampling::{riesz_boundary_sample, sample_uniform_domain, RieszConfig};
use shapeopt_core::LevelSetNetwork;

use crate::checkpoint::Checkpoint;
use crate::contour::{marching_squares, stats};
use crate::csvio::Grid;
use crate::meta::Stamp;

/// First zero of `J₁'`.
pub const J11P: f64 = 1.841_183_781_340_659;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Largest relative error of the exact gradient and mean curvature against
/// central differences of step `h`.
pub fn derivative_error(ls: &impl LevelSet, points: &[f64], h: f64) -> (f64, f64) {
    let d = ls.dim();
    let (mut eg, mut ek) = (0.0f64, 0.0f64);
    for x in points.chunks(d) {
        let g = spatial_gradient(ls, x);
        let mut fd = [0.0; 3];
        for c in 0..d {
            let (mut p, mut m) = (x.to_vec(), x.to_vec());
            p[c] += h;
            m[c] -= h;
            fd[c] = (ls.eval(&p) - ls.eval(&m)) / (2.0 * h);
        }
        let gn = g[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = (0..d).map(|c| (g[c] - fd[c]).powi(2)).sum::<f64>().sqrt();
        eg = eg.max(diff / gn.max(1e-12));

        let Ok(k) = mean_curvature(ls, x) else { continue };
        // div(∇φ/|∇φ|) with the normal field differenced centrally
        let unit = |y: &[f64]| {
            let g = spatial_gradient(ls, y);
            let n = g[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            g.map(|v| v / n)
        };
        let mut div = 0.0;
        for c in 0..d {
            let (mut p, mut m) = (x.to_vec(), x.to_vec());
            p[c] += h;
            m[c] -= h;
            div += (unit(&p)[c] - unit(&m)[c]) / (2.0 * h);
        }
        ek = ek.max((k - div).abs() / k.abs().max(1.0));
    }
    (eg, ek)
}

pub fn run_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let pts = sample_uniform_domain(derive_seed(7, 1), 20, 2);

    for (name, net) in [
        ("siren derivatives", LevelSetNetwork::siren_default(2, 3)),
        ("convex derivatives", LevelSetNetwork::convex(2, 32, &[0.5, 0.5], 0.3, 40.0, 3)),
    ] {
        let (eg, ek) = derivative_error(&net, pts.coords(), 1e-5);
        out.push(check(name, eg < 1e-4 && ek < 1e-4, format!("gradient {eg:.1e}, curvature {ek:.1e}")));
    }

    let disk = Ball::new(&[0.5, 0.5], 0.3);
    let exact = PI * J11P * J11P;
    let spectrum = neumann_eigen(&disk, 1500, None, 1, 0, Kernel::Indicator, 20_000)
        .map(|ne| ne.volume * ne.mu[1]);
    out.push(match spectrum {
        Ok(v) => check(
            "disk spectrum",
            (v - exact).abs() < 0.2 * exact,
            format!("Vol·μ̂₁ = {v:.3}, exact {exact:.3}, n = 1500"),
        ),
        Err(e) => check("disk spectrum", false, e.to_string()),
    });

    let riesz = riesz_boundary_sample(&disk, 4, 5, &RieszConfig::default()).map(|y| {
        let mut a: Vec<f64> = y.iter().map(|p| (p[1] - 0.5).atan2(p[0] - 0.5)).collect();
        a.sort_by(f64::total_cmp);
        (0..4)
            .map(|i| {
                let gap = if i == 3 { a[0] + 2.0 * PI - a[3] } else { a[i + 1] - a[i] };
                (gap / (PI / 2.0) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    });
    out.push(match riesz {
        Ok(e) => check("riesz equal spacing", e < 0.01, format!("largest gap deviation {e:.1e}")),
        Err(e) => check("riesz equal spacing", false, e.to_string()),
    });

    let zero = dirichlet_solve(&disk, |_| 0.0, 0.05, 500, 1, Kernel::Indicator)
        .map(|s| s.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    out.push(match zero {
        Ok(m) => check("dirichlet zero source", m == 0.0, format!("max |u| = {m:e}")),
        Err(e) => check("dirichlet zero source", false, e.to_string()),
    });

    let net = LevelSetNetwork::siren_default(2, 9);
    let c = Checkpoint::from_network(&net, Stamp::standalone(), None);
    let exact_trip = Checkpoint::from_json(&c.to_json())
        .ok()
        .and_then(|b| b.to_network().ok())
        .is_some_and(|n| {
            n.params().to_flat().iter().zip(net.params().to_flat()).all(|(a, b)| a.to_bits() == b.to_bits())
        });
    out.push(check("checkpoint round trip", exact_trip, "bit-exact".into()));

    let s = stats(&marching_squares(&Grid::evaluate(&disk, 65, None)));
    let per = 2.0 * PI * 0.3;
    out.push(check(
        "circle contour",
        s.loops == 1 && s.open == 0 && (s.length - per).abs() < 0.1 * per,
        format!("{} loop(s), length {:.4} vs {per:.4}", s.loops, s.length),
    ));
    let ring = Shell::new(&[0.5, 0.5], 0.15, 0.35);
    let s = stats(&marching_squares(&Grid::evaluate(&ring, 65, None)));
    out.push(check(
        "annulus contour",
        s.loops == 2 && s.regions == 1,
        format!("{} loops, {} region(s)", s.loops, s.regions),
    ));

    let v = [3.0, 1.0, 2.0];
    let sm = soft_min(&v, 2.0);
    out.push(check("soft-min bounds", (1.0..=2.0).contains(&sm), format!("soft_min = {sm:.4}")));
    out
}
