use super::*;
use proptest::prelude::*;
use shapeopt_core::levelset::analytic::Ball;
use shapeopt_core::LevelSetNetwork;

fn constant_network(c: f64) -> LevelSetNetwork {
    let mut net = LevelSetNetwork::siren_default(2, 0);
    let p = net.params_mut();
    for l in &mut p.layers {
        l.weights.iter_mut().for_each(|w| *w = 0.0);
        l.bias.iter_mut().for_each(|b| *b = 0.0);
    }
    p.layers.last_mut().unwrap().bias[0] = c;
    net
}

fn path() -> PathBuf {
    PathBuf::from("test.csv")
}

#[test]
fn constant_network_grid() {
    let g = Grid::evaluate(&constant_network(0.25), 3, None);
    assert_eq!(g.values, vec![0.25; 9]);
    let text = String::from_utf8(g.to_csv(&Stamp::standalone())).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("R=3") && header.contains("d=2") && header.contains("format_version=1"));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(Grid::parse(&path(), &text).unwrap(), g);
}

#[test]
fn circle_grid_minimum_is_minus_the_radius() {
    let g = Grid::evaluate(&Ball::new(&[0.5, 0.5], 0.3), 65, None);
    let min = g.values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((min + 0.3).abs() < g.spacing(), "{min}");
    assert_eq!(g.at(32, 32), -0.3);
    assert!((g.at(0, 32) - 0.2).abs() < 1e-15);
}

#[test]
fn slices_name_their_level() {
    let g = Grid::evaluate(&Ball::new(&[0.5, 0.5, 0.5], 0.3), 5, Some(0.25));
    assert_eq!((g.dim, g.level), (3, Some(0.25)));
    assert!((g.at(2, 2) + 0.05).abs() < 1e-15);
    let text = String::from_utf8(g.to_csv(&Stamp::standalone())).unwrap();
    assert!(text.lines().next().unwrap().contains("level=0.25"));
    assert_eq!(Grid::parse(&path(), &text).unwrap(), g);
}

fn parse_row(text: &str) -> usize {
    match Grid::parse(&path(), text) {
        Err(CliError::Parse { row, .. }) => row,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_grids_name_the_row() {
    let head = "# shapeopt format_version=1 config_hash=none build=x kind=grid R=2 d=2\n";
    assert_eq!(parse_row(&format!("{head}1,2\n3,oops\n")), 3);
    assert_eq!(parse_row(&format!("{head}1,2\n3\n")), 3);
    assert_eq!(parse_row(&format!("{head}1,2\n3,4\n5,6\n")), 4);
    assert_eq!(parse_row(&format!("{head}1,2\n3,inf\n")), 3);
    assert_eq!(parse_row("1,2\n3,4\n"), 1);
    assert_eq!(parse_row(&format!("{head}1,2\n")), 3);
    let e = Grid::parse(&path(), &format!("{head}1,2\nx,4\n")).unwrap_err();
    assert!(e.to_string().contains("row 3"), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn points_round_trip_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("boundary.csv");
    let mut cloud = PointCloud::new(2, Role::Boundary, 42);
    cloud.push_with(&[0.1, 0.2], Role::Boundary, false);
    cloud.push_with(&[1.0 / 3.0, 0.7], Role::Interior, false);
    cloud.meta.iterations = 17;
    write_points(&p, &cloud, &Stamp::new("abc")).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("# shapeopt format_version=1 config_hash=abc"));
    assert_eq!(text.lines().nth(1), Some("x0,x1,role"));
    let back = read_points(&p).unwrap();
    assert_eq!(back.coords(), cloud.coords());
    assert_eq!(back.roles(), cloud.roles());
    assert_eq!((back.seed, back.meta.iterations), (42, 17));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&p)).unwrap()).unwrap();
    assert_eq!(meta["count"], 2);
    assert_eq!(meta["config_hash"], "abc");
}

#[test]
fn malformed_points_name_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "# shapeopt format_version=1\nx0,x1,role\n0.1,0.2,boundary\n0.3,0.4,nowhere\n").unwrap();
    assert!(matches!(read_points(&p), Err(CliError::Parse { row: 4, .. })));
    std::fs::write(&p, "x,y\n").unwrap();
    assert!(matches!(read_points(&p), Err(CliError::Parse { row: 1, .. })));
}

#[test]
fn gradient_csv_layout() {
    use shapeopt_core::problems::{evaluate, ProblemKind, ProblemSpec};
    let disk = Ball::new(&[0.5, 0.5], 0.3);
    let mut spec = ProblemSpec::new(ProblemKind::PoissonDirichlet, 1);
    spec.n = 600;
    let y = [0.8, 0.5, 0.5, 0.8];
    let g = evaluate(&disk, &spec, &y, 0).unwrap();
    let text = String::from_utf8(gradient_csv(&g, &Stamp::standalone())).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "x0,x1,f");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("0.8,0.5,"));
    let rec = GradientRecord::new(&g, &Stamp::standalone());
    assert_eq!(rec.problem, "poisson_dirichlet");
    assert_eq!(rec.objective, g.objective);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_text_round_trips_bit_exactly(
        r in 2usize..6,
        values in prop::collection::vec(-1e3f64..1e3, 36),
    ) {
        let g = Grid { resolution: r, dim: 2, level: None, values: values[..r * r].to_vec() };
        let text = String::from_utf8(g.to_csv(&Stamp::standalone())).unwrap();
        let back = Grid::parse(&path(), &text).unwrap();
        prop_assert!(back.values.iter().zip(&g.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
