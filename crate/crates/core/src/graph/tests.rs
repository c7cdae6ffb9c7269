use super::*;
use crate::levelset::analytic::{Ball, BoxShape};
use crate::levelset::analytic::AnalyticShape;
use crate::rng;
use crate::sampling::{sample_uniform_domain, sample_uniform_shape, Role};
use core::f64::consts::PI;
use proptest::prelude::*;

/// Bessel `j'_{11}`, first zero of `J_1'`.
const J11P: f64 = 1.841_183_781_340_659;

fn cloud(coords: &[f64], d: usize) -> PointCloud {
    PointCloud::from_coords(d, coords.to_vec(), Role::Interior)
}

/// `∫_{|z|<1} η(|z|) z_1² dz` on a midpoint grid, independent of the radial
/// closed form used by the library.
fn grid_sigma(kernel: Kernel, d: usize, m: usize) -> f64 {
    let h = 2.0 / m as f64;
    let mut s = 0.0;
    let c = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    if d == 2 {
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (c(i), c(j));
                s += kernel.eval((x * x + y * y).sqrt()) * x * x;
            }
        }
        s * h * h
    } else {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let (x, y, z) = (c(i), c(j), c(k));
                    s += kernel.eval((x * x + y * y + z * z).sqrt()) * x * x;
                }
            }
        }
        s * h * h * h
    }
}

fn dense_apply(l: &[f64], n: usize) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |x, y| {
        for i in 0..n {
            y[i] = (0..n).map(|j| l[i * n + j] * x[j]).sum();
        }
    }
}

fn check_certified(res: &SpectralResult, apply: impl Fn(&[f64], &mut [f64])) {
    let n = res.n;
    let mut lv = vec![0.0; n];
    for a in 0..res.len() {
        let va = res.vector(a);
        for b in 0..res.len() {
            let dot: f64 = va.iter().zip(res.vector(b)).map(|(x, y)| x * y).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((dot - expect).abs() < 1e-8, "⟨v{a}, v{b}⟩ = {dot}");
        }
        apply(va, &mut lv);
        let r: f64 = lv
            .iter()
            .zip(va)
            .map(|(l, v)| (l - res.eigenvalues[a] * v).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(r <= 1e-6 * res.eigenvalues[a].max(1.0), "residual {r} for λ{a}");
    }
    assert!(res.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn two_point_weight_is_four_over_pi() {
    let g = build_graph(&cloud(&[0.0, 0.0, 0.5, 0.0], 2), 1.0, Kernel::Indicator).unwrap();
    let sigma = grid_sigma(Kernel::Indicator, 2, 2000);
    assert!((sigma - PI / 4.0).abs() < 1e-4);
    assert!((g.sigma() - sigma).abs() < 1e-4);
    let w = 2.0 / (2.0 * sigma);
    assert!((g.weight(0, 1) - w).abs() < 2e-4);
    assert!((g.weight(0, 1) - 4.0 / PI).abs() < 1e-12);
    assert_eq!(g.weight(0, 1), g.weight(1, 0));
}

#[test]
fn kernel_normalization_matches_quadrature() {
    assert!((Kernel::Indicator.sigma(3) - 4.0 * PI / 15.0).abs() < 1e-12);
    assert!((Kernel::Indicator.sigma(3) - grid_sigma(Kernel::Indicator, 3, 200)).abs() < 2e-3);
    assert!((Kernel::Gaussian.sigma(2) - grid_sigma(Kernel::Gaussian, 2, 2000)).abs() < 1e-5);
    assert!((Kernel::Gaussian.sigma(3) - grid_sigma(Kernel::Gaussian, 3, 200)).abs() < 1e-3);
}

#[test]
fn graph_structure_invariants() {
    let pts = sample_uniform_domain(3, 800, 2);
    let eps = 0.08;
    for kernel in [Kernel::Indicator, Kernel::Gaussian] {
        let g = build_graph(&pts, eps, kernel).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.weight(i, i), 0.0);
            let (cols, ws) = g.row(i);
            let sum: f64 = ws.iter().sum();
            assert_eq!(sum, g.degree()[i]);
            for (&j, &w) in cols.iter().zip(ws) {
                assert!(w > 0.0);
                assert_eq!(w, g.weight(j, i));
                assert!(crate::spatial::dist2(g.position(i), g.position(j)).sqrt() < eps);
            }
        }
        // brute-force compact support check
        for i in 0..g.len() {
            for j in 0..g.len() {
                if crate::spatial::dist2(g.position(i), g.position(j)).sqrt() >= eps {
                    assert_eq!(g.weight(i, j), 0.0);
                }
            }
        }
        let ones = vec![1.0; g.len()];
        let mut l1 = vec![0.0; g.len()];
        g.apply_laplacian(&ones, &mut l1);
        let scale = g.degree().iter().cloned().fold(0.0, f64::max);
        assert!(l1.iter().all(|v| v.abs() <= 1e-12 * scale));

        let mut r = rng::seeded(5);
        let mut lv = vec![0.0; g.len()];
        for _ in 0..100 {
            let v: Vec<f64> = (0..g.len()).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
            g.apply_laplacian(&v, &mut lv);
            let q: f64 = v.iter().zip(&lv).map(|(a, b)| a * b).sum();
            assert!(q >= -1e-10);
        }
    }
}

#[test]
fn invalid_graph_inputs() {
    let pts = cloud(&[0.1, 0.1, 0.2, 0.2], 2);
    assert!(build_graph(&pts, 0.0, Kernel::Indicator).is_err());
    assert!(build_graph(&cloud(&[0.1, 0.1], 2), 1.0, Kernel::Indicator).is_err());
    let far = build_graph(&cloud(&[0.0, 0.0, 0.9, 0.9], 2), 0.1, Kernel::Indicator).unwrap();
    assert_eq!(far.isolated_vertex(), Some(0));
    assert!(matches!(graph_gradient(&far, &[1.0, 2.0]), Err(crate::Error::IsolatedVertex(0))));
}

#[test]
fn complete_graph_spectrum() {
    let n = 6;
    let coords: Vec<f64> = (0..n).flat_map(|i| [0.5 + 0.01 * i as f64, 0.5]).collect();
    let g = build_graph(&cloud(&coords, 2), 1.0, Kernel::Indicator).unwrap();
    let c = g.weight(0, 1);
    let res = smallest_eigenpairs(&g, n).unwrap();
    assert!(res.eigenvalues[0].abs() < 1e-12 * c);
    for v in &res.eigenvalues[1..] {
        assert!((v - n as f64 * c).abs() < 1e-10 * c, "{v} vs {}", n as f64 * c);
    }
    check_certified(&res, |x, y| g.apply_laplacian(x, y));
}

#[test]
fn path_graph_spectrum() {
    let l = [1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0];
    let (vals, _) = symmetric_eigen(&l, 3).unwrap();
    for (v, e) in vals.iter().zip([0.0, 1.0, 3.0]) {
        assert!((v - e).abs() < 1e-12);
    }
    let (vals, _) = tridiagonal_eigen(&[1.0, 2.0, 1.0], &[-1.0, -1.0]).unwrap();
    let mut vals = vals;
    vals.sort_by(f64::total_cmp);
    for (v, e) in vals.iter().zip([0.0, 1.0, 3.0]) {
        assert!((v - e).abs() < 1e-12);
    }
    let res = smallest_eigenpairs_with(3, dense_apply(&l, 3), 3, 1).unwrap();
    for (v, e) in res.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
        assert!((v - e).abs() < 1e-10);
    }
}

#[test]
fn two_components_have_two_zero_eigenvalues() {
    let mut coords = sample_uniform_domain(7, 150, 2).coords().to_vec();
    for (i, v) in coords.iter_mut().enumerate() {
        // squeeze into two far-apart squares
        *v = if i % 2 == 0 { *v * 0.3 } else { *v * 0.3 + if (i / 2) % 2 == 0 { 0.0 } else { 0.6 } };
    }
    let g = build_graph(&cloud(&coords, 2), 0.12, Kernel::Indicator).unwrap();
    assert_eq!(g.components().1, 2);
    let res = smallest_eigenpairs(&g, 3).unwrap();
    let scale = res.eigenvalues[2];
    assert!(res.eigenvalues[0].abs() < 1e-8 * scale && res.eigenvalues[1].abs() < 1e-8 * scale);
}

#[test]
fn lanczos_matches_dense_oracle() {
    let pts = sample_uniform_domain(11, 500, 2);
    let g = build_graph(&pts, 0.12, Kernel::Indicator).unwrap();
    assert_eq!(g.components().1, 1);
    let l = g.dense_laplacian();
    let (dense, _) = symmetric_eigen(&l, g.len()).unwrap();
    let res = smallest_eigenpairs_with(g.len(), |x, y| g.apply_laplacian(x, y), 8, 3).unwrap();
    let top = res.eigenvalues[7];
    assert!(res.eigenvalues[0].abs() <= 1e-8 * top);
    for k in 0..8 {
        assert!((res.eigenvalues[k] - dense[k]).abs() <= 1e-8 * top, "λ{k}");
    }
    check_certified(&res, |x, y| g.apply_laplacian(x, y));
    let sum: f64 = res.vector(1).iter().sum();
    assert!(sum.abs() / (g.len() as f64).sqrt() < 1e-8);
}

#[test]
fn sparse_path_recovers_multiple_eigenvalues() {
    // a 30×30 grid graph has the double eigenvalue 2 - 2cos(π/30)
    let m = 30;
    let coords: Vec<f64> = (0..m * m)
        .flat_map(|i| [(i / m) as f64 / m as f64, (i % m) as f64 / m as f64])
        .collect();
    let g = build_graph(&cloud(&coords, 2), 1.2 / m as f64, Kernel::Indicator).unwrap();
    let res = smallest_eigenpairs(&g, 4).unwrap();
    let w = g.weight(0, 1);
    let expect = w * (2.0 - 2.0 * (PI / m as f64).cos());
    assert!((res.eigenvalues[1] - expect).abs() < 1e-6 * expect);
    assert!((res.eigenvalues[2] - expect).abs() < 1e-6 * expect);
    check_certified(&res, |x, y| g.apply_laplacian(x, y));
}

#[test]
fn disk_first_eigenvalue_area_normalized() {
    // a unit-area disk does not fit in D; Vol·μ_1 is scale-invariant
    let disk = Ball::new(&[0.5, 0.5], 0.3);
    let exact = PI * J11P * J11P;
    let mut mean = 0.0;
    for seed in 0..3 {
        let ne = neumann_eigen(&disk, 4000, None, 1, seed, Kernel::Indicator, 20_000).unwrap();
        mean += ne.volume * ne.mu[1] / 3.0;
    }
    assert!((mean - exact).abs() / exact < 0.1, "{mean} vs {exact}");
    let ne = neumann_eigen(&disk, 4000, None, 3, 1, Kernel::Indicator, 20_000).unwrap();
    let u = ne.eigenfunction(1);
    let l2: f64 = u.iter().map(|v| v * v).sum::<f64>() * ne.volume / ne.n() as f64;
    assert!((l2 - 1.0).abs() < 1e-10);
}

#[test]
fn disk_eigenvalues_scale_inversely_with_area() {
    let mean_mu1 = |r: f64| -> f64 {
        (0..3)
            .map(|s| {
                let ne = neumann_eigen(&Ball::new(&[0.5, 0.5], r), 2000, None, 2, 20 + s, Kernel::Indicator, 20_000)
                    .unwrap();
                ne.mu[1]
            })
            .sum::<f64>()
            / 3.0
    };
    let (a, b) = (mean_mu1(0.3), mean_mu1(0.24));
    let ratio = b / a;
    let expect = (0.3f64 / 0.24).powi(2);
    assert!((ratio - expect).abs() / expect < 0.1, "{ratio} vs {expect}");
}

#[test]
fn disjoint_disks_merge_spectra() {
    let r = 0.18;
    let pair = AnalyticShape::Balls(vec![Ball::new(&[0.25, 0.5], r), Ball::new(&[0.75, 0.5], r)]);
    let single = Ball::new(&[0.5, 0.5], r);
    let eps = eps_rule(2000, 2, PI * r * r, EPS_CONSTANT_2D);
    let two = neumann_eigen(&pair, 4000, Some(eps), 3, 31, Kernel::Indicator, 20_000).unwrap();
    let one = neumann_eigen(&single, 2000, Some(eps), 2, 32, Kernel::Indicator, 20_000).unwrap();
    assert_eq!(two.components, 2);
    assert!(two.mu[1].abs() < 1e-8 * two.mu[3]);
    let rel = (two.mu[2] - one.mu[1]).abs() / one.mu[1];
    assert!(rel < 0.1, "{} vs {}", two.mu[2], one.mu[1]);
}

#[test]
fn disk_eigenvalue_error_decreases_with_n() {
    let r = 0.3;
    let exact = J11P * J11P / (r * r);
    let disk = Ball::new(&[0.5, 0.5], r);
    let err = |n: usize| -> f64 {
        let mean = (0..3)
            .map(|s| {
                let ne = neumann_eigen(&disk, n, None, 2, 40 + s, Kernel::Indicator, 20_000).unwrap();
                ne.mu[1]
            })
            .sum::<f64>()
            / 3.0;
        (mean - exact).abs() / exact
    };
    let (e1, e2, e4) = (err(1000), err(2000), err(4000));
    // within noise: each doubling may not grow the error by more than 1%
    assert!(e2 <= e1 + 0.01 && e4 <= e2 + 0.01, "{e1} {e2} {e4}");
    assert!(e4 < e1);
}

#[test]
fn gradient_of_constants_and_negation() {
    let pts = sample_uniform_domain(13, 600, 2);
    let g = build_graph(&pts, 0.1, Kernel::Indicator).unwrap();
    let zero = graph_gradient(&g, &vec![3.5; g.len()]).unwrap();
    assert!(zero.iter().all(|v| *v == 0.0));
    let mut r = rng::seeded(14);
    let u: Vec<f64> = (0..g.len()).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    let a = graph_gradient(&g, &u).unwrap();
    let b = graph_gradient(&g, &neg).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
}

#[test]
fn gradient_of_linear_function() {
    let a = [0.7, -1.3];
    let rel = |n: usize| -> f64 {
        let pts = sample_uniform_domain(15, n, 2);
        let eps = eps_rule(n, 2, 1.0, EPS_CONSTANT_2D);
        let g = build_graph(&pts, eps, Kernel::Indicator).unwrap();
        let u: Vec<f64> = pts.iter().map(|x| a[0] * x[0] + a[1] * x[1]).collect();
        let grad = graph_gradient(&g, &u).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let x = g.position(i);
            if x.iter().all(|v| *v > eps && *v < 1.0 - eps) {
                num += (grad[2 * i] - a[0]).powi(2) + (grad[2 * i + 1] - a[1]).powi(2);
                den += a[0] * a[0] + a[1] * a[1];
            }
        }
        (num / den).sqrt()
    };
    let (e4, e16) = (rel(4000), rel(16000));
    assert!(e4 < 0.1, "{e4}");
    assert!(e16 < e4);
}

fn disk_dirichlet(n: usize, seed: u64, rhs: impl Fn(&[f64]) -> f64) -> DirichletSolution {
    let r = 0.3;
    let eps = eps_rule(n, 2, PI * r * r, EPS_CONSTANT_2D);
    dirichlet_solve(&Ball::new(&[0.5, 0.5], r), rhs, eps, n, seed, Kernel::Indicator).unwrap()
}

#[test]
fn dirichlet_zero_source_gives_zero() {
    let sol = disk_dirichlet(1500, 1, |_| 0.0);
    assert!(sol.values.iter().all(|v| *v == 0.0));
}

#[test]
fn dirichlet_rows_and_sign() {
    let sol = disk_dirichlet(3000, 2, |x| if x[0] > 0.5 { 1.0 } else { 0.0 });
    assert!(sol.report.relative_residual < 1e-8);
    for (i, v) in sol.values.iter().enumerate() {
        if sol.problem.inside[i] {
            assert!(*v >= -1e-10);
        } else {
            assert_eq!(*v, 0.0);
        }
    }
    assert!(sol.problem.inside.iter().any(|b| !b));
    let band = sol.samples.roles().iter().filter(|r| **r == Role::Band).count();
    assert_eq!(band, sol.problem.inside.iter().filter(|b| !**b).count());
}

#[test]
fn dirichlet_interior_equations_hold() {
    let sol = disk_dirichlet(2000, 3, |_| 1.0);
    let g = &sol.problem.graph;
    let mut lu = vec![0.0; g.len()];
    g.apply_laplacian(&sol.values, &mut lu);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..g.len() {
        if sol.problem.inside[i] {
            num += (lu[i] - sol.problem.density).powi(2);
            den += sol.problem.density.powi(2);
        }
    }
    assert!((num / den).sqrt() < 1e-7);
}

#[test]
fn dirichlet_center_value_approaches_analytic() {
    let exact = 0.09 / 4.0;
    let center_err = |n: usize| -> f64 {
        let mean = (0..4)
            .map(|s| {
                let sol = disk_dirichlet(n, 50 + s, |_| 1.0);
                sol.field().unwrap().extend_scalar(&[0.5, 0.5])
            })
            .sum::<f64>()
            / 4.0;
        (mean - exact) / exact
    };
    let (e4, e16) = (center_err(4000), center_err(16000));
    assert!(e4 > 0.0 && e4 < 0.25, "{e4}");
    assert!(e16 < e4, "{e16} vs {e4}");
}

#[test]
fn empty_band_is_rejected() {
    let pts = sample_uniform_shape(&Ball::new(&[0.5, 0.5], 0.3), 4, 300).unwrap();
    assert!(DirichletProblem::new(&pts, 0.1, Kernel::Indicator, 0.3).is_err());
}

#[test]
fn conjugate_gradient_solves_spd_system() {
    let a = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
    let x_true = [1.0, -2.0, 0.5];
    let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x_true[j]).sum()).collect();
    let mut x = [0.0; 3];
    let rep = conjugate_gradient(dense_apply(&a, 3), &[4.0, 3.0, 2.0], &b, &mut x, 1e-12, 50).unwrap();
    assert!(rep.relative_residual < 1e-12);
    for k in 0..3 {
        assert!((x[k] - x_true[k]).abs() < 1e-10);
    }
}

#[test]
fn nearest_neighbor_extension() {
    let pos = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    let field = VertexField::scalar(&pos, 2, vec![10.0, 20.0, 30.0]).unwrap();
    assert_eq!(field.extend_scalar(&[1.0, 0.0]), 20.0);
    assert_eq!(field.extend_scalar(&[0.9, 0.2]), 20.0);
    // equidistant from vertices 1 and 2: lowest index wins
    assert_eq!(field.extend_scalar(&[0.6, 0.6]), 20.0);
    assert_eq!(field.extend_scalar(&[0.5, 0.5]), 10.0);
    assert_eq!(field.extend_scalar(&[0.5, 0.0]), 10.0);
    assert!(VertexField::scalar(&pos, 2, vec![1.0, f64::NAN, 2.0]).is_err());
    assert!(VertexField::scalar(&pos, 2, vec![1.0]).is_err());
}

#[test]
fn quadratic_fit_recovers_exact_gradient() {
    let pts = sample_uniform_domain(17, 400, 2);
    let vals: Vec<f64> = pts
        .iter()
        .flat_map(|x| [1.0 + 2.0 * x[0] - x[1] + x[0] * x[1], x[0] * x[0]])
        .collect();
    let field = VertexField::new(pts.coords(), 2, vals, 2).unwrap();
    let y = [0.4, 0.6];
    let mut out = [0.0; 4];
    let mut found = Vec::new();
    assert!(field.fit_gradient(&y, 0.2, &mut found, &mut out));
    let expect = [2.0 + y[1], -1.0 + y[0], 2.0 * y[0], 0.0];
    for k in 0..4 {
        assert!((out[k] - expect[k]).abs() < 1e-9, "{out:?}");
    }
    assert!(!field.fit_gradient(&[5.0, 5.0], 0.2, &mut found, &mut out));
}

#[test]
fn square_has_double_first_eigenvalue() {
    let sq = BoxShape::new(&[0.5, 0.5], &[0.3, 0.3]);
    let ne = neumann_eigen(&sq, 4000, None, 2, 5, Kernel::Indicator, 20_000).unwrap();
    assert_eq!(ne.components, 1);
    // μ_1 = μ_2 = π²/a² for a square of side a
    let exact = PI * PI / 0.36;
    assert!((ne.mu[1] - exact).abs() / exact < 0.15, "{}", ne.mu[1]);
    assert!((ne.mu[2] - exact).abs() / exact < 0.15, "{}", ne.mu[2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nearest_extension_is_piecewise_constant(seed in any::<u64>(), qx in 0.0f64..1.0, qy in 0.0f64..1.0) {
        let pts = sample_uniform_domain(seed, 50, 2);
        let vals: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let field = VertexField::scalar(pts.coords(), 2, vals).unwrap();
        let q = [qx, qy];
        let i = field.nearest_vertex(&q);
        let best = (0..50)
            .map(|j| crate::spatial::dist2(&q, pts.point(j)))
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(crate::spatial::dist2(&q, pts.point(i)), best);
        // moving towards the chosen vertex stays in its cell
        let mid = [(q[0] + pts.point(i)[0]) / 2.0, (q[1] + pts.point(i)[1]) / 2.0];
        prop_assert_eq!(field.extend_scalar(&mid), i as f64);
        prop_assert_eq!(field.extend_scalar(pts.point(i)), i as f64);
    }

    #[test]
    fn random_graphs_are_symmetric(seed in any::<u64>(), eps in 0.05f64..0.4) {
        let pts = sample_uniform_domain(seed, 120, 3);
        let g = build_graph(&pts, eps, Kernel::Gaussian).unwrap();
        for (i, j, w) in g.triplets() {
            prop_assert_eq!(w, g.weight(j, i));
            prop_assert!(i != j);
        }
    }
}
