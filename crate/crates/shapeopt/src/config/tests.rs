use super::*;
use proptest::prelude::*;

const MINIMAL: &str = "problem = \"neumann_max\"\nk = 1\ndim = 2\n";

fn err(src: &str) -> ConfigError {
    parse_config(src).expect_err("config should be rejected")
}

#[test]
fn minimal_config_echoes_every_default() {
    let r = parse_config(MINIMAL).unwrap();
    for key in ["tau", "seed", "k_max", "n", "pde.beta", "pde.eps", "train.steps", "initial_shape", "network", "output.dir"] {
        assert!(r.defaulted.iter().any(|d| d == key), "{key} not echoed");
    }
    assert!(!r.defaulted.iter().any(|d| d == "problem" || d == "k" || d == "dim"));
    assert_eq!(r.run.tau, default_tau(ProblemKind::NeumannMax));
    assert_eq!(r.run.k_max, 150);
    assert!(matches!(r.run.initial_shape, AnalyticShape::Shell(_)));
    let toml = r.to_toml();
    assert!(toml.contains("tau = ") && toml.contains("[pde]") && toml.contains("beta = \"auto\""));
}

#[test]
fn negative_tau_names_the_constraint() {
    let e = err(&format!("{MINIMAL}tau = -0.1\n"));
    assert_eq!(e.key.as_deref(), Some("tau"));
    assert_eq!(e.line, Some(4));
    assert!(e.message.contains("τ > 0"), "{e}");
}

#[test]
fn unknown_key_suggests_the_nearest() {
    let e = err(&format!("{MINIMAL}tua = 0.1\n"));
    assert_eq!(e.key.as_deref(), Some("tua"));
    assert_eq!(e.suggestion.as_deref(), Some("tau"));
    assert_eq!(e.line, Some(4));
    assert!(e.to_string().contains("did you mean `tau`"));

    let e = err(&format!("{MINIMAL}[pde]\nkernal = \"indicator\"\n"));
    assert_eq!(e.suggestion.as_deref(), Some("kernel"));
    assert_eq!(e.line, Some(5));

    let e = err(&format!("{MINIMAL}[initial_shape]\nkind = \"sphere\"\ncenter = [0.5, 0.5]\n"));
    assert!(e.message.starts_with("unknown kind"), "{e}");
}

#[test]
fn wrong_types_name_key_and_line() {
    let e = err("problem = \"neumann_max\"\nk = \"one\"\ndim = 2\n");
    assert_eq!(e.line, Some(2));
    assert_eq!(e.key.as_deref(), Some("k"));
    assert!(e.message.contains("integer"), "{e}");
    let e = err(&format!("{MINIMAL}[pde]\nbeta = \"hot\"\n"));
    assert_eq!(e.line, Some(5));
    assert!(e.message.contains("auto"), "{e}");
}

#[test]
fn missing_and_invalid_required_keys() {
    assert_eq!(err("k = 1\ndim = 2\n").key.as_deref(), Some("problem"));
    assert_eq!(err("problem = \"neumann_max\"\n").key.as_deref(), Some("dim"));
    let e = err("problem = \"maximize\"\ndim = 2\n");
    assert_eq!((e.key.as_deref(), e.line), (Some("problem"), Some(1)));
    assert_eq!(err("problem = \"neumann_max\"\ndim = 4\n").key.as_deref(), Some("dim"));
}

#[test]
fn semantic_validation() {
    let e = err("problem = \"neumann_max\"\ndim = 3\n[initial_shape]\nkind = \"ellipse\"\ncenter = [0.5, 0.5]\na = 0.2\nb = 0.1\n");
    assert_eq!(e.key.as_deref(), Some("initial_shape.kind"));
    let e = err("problem = \"convex_neumann_min\"\nk = 2\ndim = 2\n[network]\nkind = \"siren\"\nhidden = [8]\nomega = 30.0\n");
    assert_eq!(e.key.as_deref(), Some("network"));
    let e = err(&format!("{MINIMAL}[initial_shape]\nkind = \"ball\"\ncenter = [0.5]\nradius = 0.2\n"));
    assert_eq!(e.key.as_deref(), Some("initial_shape.center"));
    let e = err(&format!("{MINIMAL}[output]\ngrid_resolution = 1\n"));
    assert_eq!((e.key.as_deref(), e.line), (Some("output.grid_resolution"), Some(5)));
}

#[test]
fn problem_specific_defaults() {
    let p = parse_config("problem = \"poisson_dirichlet\"\ndim = 2\n").unwrap();
    assert_eq!(p.run.problem.k, 1);
    assert!(matches!(p.run.initial_shape, AnalyticShape::Box(_)));
    let c = parse_config("problem = \"convex_neumann_min\"\ndim = 2\n").unwrap();
    assert_eq!(c.run.problem.k, 2);
    assert!(matches!(c.run.network, NetworkSpec::Convex { .. }));
    assert!(matches!(c.run.initial_shape, AnalyticShape::Ellipse(_)));
    let c3 = parse_config("problem = \"convex_neumann_min\"\ndim = 3\n").unwrap();
    assert!(matches!(c3.run.initial_shape, AnalyticShape::Ball(_)));
}

#[test]
fn explicit_values_reach_the_run_config() {
    let src = format!(
        "{MINIMAL}seed = 9\ntau = 3e-4\nn = 1234\n[pde]\nbeta = 2.5\neps = 0.04\nkernel = \"gaussian\"\n\
         [source]\nkind = \"gaussian\"\ncenter = [0.4, 0.6]\nwidth = 0.1\namplitude = 2.0\n\
         [step_control]\nenabled = false\n[riesz]\ns = 1.5\n"
    );
    let r = parse_config(&src).unwrap();
    assert_eq!(r.run.seed, 9);
    assert_eq!(r.run.tau, 3e-4);
    assert_eq!(r.run.problem.n, 1234);
    assert_eq!(r.run.problem.beta, Some(2.5));
    assert_eq!(r.run.problem.eps, Some(0.04));
    assert_eq!(r.run.problem.kernel, Kernel::Gaussian);
    assert!(!r.run.step_control.enabled);
    assert_eq!(r.run.riesz.s, Some(1.5));
    assert!(matches!(r.run.problem.source, Source::Gaussian { width, .. } if width == 0.1));
    assert!(!r.defaulted.iter().any(|d| d == "seed" || d == "pde.beta"));
}

#[test]
fn resolved_config_round_trips_losslessly() {
    let r = parse_config(MINIMAL).unwrap();
    let again = parse_config(&r.to_toml()).unwrap();
    assert_eq!(again.config, r.config);
    assert_eq!(again.run, r.run);
    assert_eq!(again.hash, r.hash);
    assert!(again.defaulted.is_empty());
}

#[test]
fn hash_ignores_output_settings_only() {
    let a = parse_config(MINIMAL).unwrap();
    let b = parse_config(&format!("{MINIMAL}[output]\ndir = \"elsewhere\"\n")).unwrap();
    let c = parse_config(&format!("{MINIMAL}seed = 1\n")).unwrap();
    assert_eq!(a.hash, b.hash);
    assert_ne!(a.hash, c.hash);
    assert_eq!(a.hash.len(), 64);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            load_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            count += 1;
        }
    }
    assert!(count >= 4);
    // the extension may be omitted
    assert!(load_config(&dir.join("neumann_mu1_2d")).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_print_parse_is_identity(
        seed in 0..i64::MAX as u64,
        tau in 1e-8f64..10.0,
        n in 16usize..100_000,
        k in 1usize..5,
        beta in prop::option::of(0.01f64..100.0),
        r_inner in 0.01f64..0.2,
        width in 0.01f64..0.2,
    ) {
        let beta = beta.map_or("\"auto\"".to_string(), |b| format!("{b:?}"));
        let src = format!(
            "problem = \"neumann_max\"\nk = {k}\ndim = 2\nseed = {seed}\ntau = {tau:?}\nn = {n}\n\
             [pde]\nbeta = {beta}\n[initial_shape]\nkind = \"shell\"\ncenter = [0.5, 0.5]\n\
             r_inner = {r_inner:?}\nr_outer = {:?}\n",
            r_inner + width
        );
        let r = parse_config(&src).unwrap();
        let again = parse_config(&r.to_toml()).unwrap();
        prop_assert_eq!(&again.config, &r.config);
        prop_assert_eq!(again.run.tau.to_bits(), tau.to_bits());
        prop_assert_eq!(again.run.seed, seed);
    }
}
