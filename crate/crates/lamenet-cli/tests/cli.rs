use std::f64::consts::PI;
use std::fs;
use std::process::Command;

use lamenet_cli::*;

fn config(kind: CommandKind, pairs: &[(&str, &str)]) -> RunConfig {
    let mut c = RunConfig::new(kind);
    c.apply(pairs.iter().copied()).unwrap();
    c
}

fn elliptic(x1: f64, x2: f64) -> [f64; 2] {
    [x1.cosh() * x2.cos(), x1.sinh() * x2.sin()]
}

#[test]
fn csv_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.csv");
    let c = config(CommandKind::Csurface, &[("eps", "pi/20"), ("csv", path.to_str().unwrap())]);
    let out = run(&c).unwrap();
    let back = read_csv(fs::File::open(&path).unwrap()).unwrap();
    let table = out.table.unwrap();
    assert_eq!(back.xi.len(), 49);
    for (a, b) in table.x.iter().flatten().zip(back.x.iter().flatten()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    for (a, b) in table.xi.iter().flatten().zip(back.xi.iter().flatten()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    let header = fs::read_to_string(&path).unwrap();
    assert!(header.starts_with("xi1,xi2,x1,x2\n"));
}

#[test]
fn rows_are_lexicographic_and_close_to_the_oracle() {
    let c = config(CommandKind::Csurface, &[("eps", "pi/20")]);
    let table = run(&c).unwrap().table.unwrap();
    for w in table.xi.windows(2) {
        assert!(w[0] < w[1], "{:?} then {:?}", w[0], w[1]);
    }
    for (xi, x) in table.xi.iter().zip(&table.x) {
        let f = elliptic(xi[0], xi[1]);
        let d = (x[0] - f[0]).hypot(x[1] - f[1]);
        assert!(d < 0.2, "{xi:?}: {d}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let json = dir.path().join("a.json");
    let c = config(
        CommandKind::Orthosys,
        &[("eps", "0.1"), ("r", "0.3"), ("csv", csv.to_str().unwrap()), ("json", json.to_str().unwrap())],
    );
    run(&c).unwrap();
    let (c1, j1) = (fs::read(&csv).unwrap(), fs::read(&json).unwrap());
    run(&c).unwrap();
    assert_eq!(c1, fs::read(&csv).unwrap());
    assert_eq!(j1, fs::read(&json).unwrap());
}

#[test]
fn json_mirrors_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = (dir.path().join("r.csv"), dir.path().join("r.json"));
    let c = config(
        CommandKind::Ribaucour,
        &[("eps", "pi/20"), ("csv", csv.to_str().unwrap()), ("json", json.to_str().unwrap())],
    );
    run(&c).unwrap();
    let table = read_csv(fs::File::open(&csv).unwrap()).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["xi1", "xi2", "x1", "x2"]));
    assert_eq!(doc["eps"].as_f64().unwrap(), PI / 20.0);
    assert_eq!(doc["config"]["command"], "ribaucour");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), table.x.len());
    for (row, (xi, x)) in rows.iter().zip(table.xi.iter().zip(&table.x)) {
        let vals: Vec<f64> = row.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
        let want: Vec<f64> = xi.iter().chain(x).copied().collect();
        assert_eq!(vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), want.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
    // the transformation direction carries the layer index
    assert!(table.xi.iter().all(|xi| xi[1] == 0.0 || xi[1] == 1.0));
}

#[test]
fn flat_cell_has_the_square_circumcircle() {
    let eps = 0.2;
    let c = config(CommandKind::Csurface, &[("oracle", "flat"), ("eps", "0.2"), ("r", "0.2")]);
    let dir = tempfile::tempdir().unwrap();
    let mut c = c;
    c.svg = Some(dir.path().join("flat.svg"));
    let out = run(&c).unwrap();
    assert_eq!(out.circles.len(), 1);
    let rec = &out.circles[0];
    assert_eq!(rec.cell, [0, 0]);
    assert!((rec.center[0] - eps / 2.0).abs() < 1e-15 && (rec.center[1] - eps / 2.0).abs() < 1e-15);
    assert!((rec.radius - eps / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn elliptic_svg_has_one_circle_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.svg");
    let c = config(CommandKind::Csurface, &[("eps", "pi/20"), ("r", "1.2"), ("svg", path.to_str().unwrap())]);
    let out = run(&c).unwrap();
    let svg = fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<circle ").count(), 49);
    assert_eq!(out.circles.len(), 49);
    assert!(svg.contains(&format!("stroke-width=\"{}\"", PI / 20.0 / 10.0)));
    let table = out.table.unwrap();
    // every vertex of the cell lies on its circle
    for rec in &out.circles {
        let [k, l] = rec.cell;
        for (a, b) in [(k, l), (k + 1, l), (k + 1, l + 1), (k, l + 1)] {
            let x = &table.x[a * 8 + b];
            let d = (x[0] - rec.center[0]).hypot(x[1] - rec.center[1]);
            assert!((d - rec.radius).abs() <= 1e-8 * rec.radius);
        }
    }
}

#[test]
fn svg_in_three_dimensions_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(CommandKind::Orthosys, &[("eps", "0.1"), ("r", "0.2")]);
    c.svg = Some(dir.path().join("x.svg"));
    let e = run(&c).unwrap_err();
    assert!(matches!(e, CliError::NonPlanarExport { n: 3 }), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn config_errors() {
    let mut c = RunConfig::new(CommandKind::Csurface);
    for (k, v) in [("eps", "pi/"), ("eps", "-0.1"), ("r", "abc"), ("stagger", "maybe"), ("colour", "red"), ("kind", "torus")] {
        let e = c.set(k, v).unwrap_err();
        assert!(matches!(e, CliError::Config(_)), "{k}={v}");
        assert_eq!(e.exit_code(), 2);
    }
    let cases: Vec<(CommandKind, Vec<(&str, &str)>)> = vec![
        (CommandKind::Csurface, vec![]),
        (CommandKind::Csurface, vec![("eps", "0.1"), ("oracle", "torus")]),
        (CommandKind::Csurface, vec![("eps", "0.1"), ("n", "3")]),
        (CommandKind::Csurface, vec![("eps", "0.1"), ("m", "3")]),
        (CommandKind::Csurface, vec![("eps", "2"), ("r", "1")]),
        (CommandKind::Csurface, vec![("eps", "0.1"), ("offset", "0,0")]),
        (CommandKind::Orthosys, vec![("eps", "0.1"), ("oracle", "elliptic")]),
        (CommandKind::Sweep, vec![]),
        (CommandKind::Sweep, vec![("eps_list", "pi/20,pi/10,pi/40")]),
        (CommandKind::Sweep, vec![("eps_list", "pi/10,pi/20"), ("csv", "x.csv")]),
        (CommandKind::Ribaucour, vec![("eps", "0.1"), ("m_tail", "2")]),
        (CommandKind::Ribaucour, vec![("eps", "0.1"), ("shift", "0.1")]),
        (CommandKind::Conjugate, vec![("eps", "0.1"), ("svg", "x.svg")]),
    ];
    for (kind, pairs) in cases {
        let e = run(&config(kind, &pairs)).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{kind:?} {pairs:?}: {e}");
    }
}

#[test]
fn solver_failures_exit_with_one() {
    // a circle of radius 0.1 cannot be read off at ε = 0.5
    let c = config(CommandKind::Sweep, &[("oracle", "circle:0.1"), ("kind", "curve"), ("eps_list", "0.5,0.25,0.125"), ("r", "1")]);
    let e = run(&c).unwrap_err();
    match &e {
        CliError::Solver { eps: Some(eps), .. } => assert!([0.5, 0.25, 0.125].contains(eps)),
        other => panic!("{other}"),
    }
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn config_file_and_env_layering() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    fs::write(&file, "# elliptic figure\noracle = elliptic\neps = \"pi/20\"\nr = 0.5\ncircle_tol = 1e-7\n").unwrap();
    let cli = <Cli as clap::Parser>::try_parse_from(["lamenet", "--config", file.to_str().unwrap(), "csurface", "--r", "0.8"]).unwrap();
    let env = [("LAME_CIRCLE_TOL".to_string(), "1e-6".to_string())];
    let c = cli.into_config(env).unwrap();
    assert_eq!(c.eps, Some(PI / 20.0));
    assert_eq!(c.r, 0.8);
    assert_eq!(c.tolerances.circle, 1e-6);

    fs::write(&file, "eps 0.1\n").unwrap();
    let cli = <Cli as clap::Parser>::try_parse_from(["lamenet", "csurface", "--config", file.to_str().unwrap()]).unwrap();
    assert!(matches!(cli.into_config(Vec::new()), Err(CliError::Config(_))));
}

#[test]
fn sweep_report_has_a_slope() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let c = config(
        CommandKind::Sweep,
        &[("eps_list", "pi/10,pi/20,pi/40,pi/80"), ("report", path.to_str().unwrap())],
    );
    run(&c).unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    let slope = doc["slope"].as_f64().unwrap();
    assert!((0.8..=1.2).contains(&slope), "{slope}");
    assert_eq!(doc["report"]["levels"].as_array().unwrap().len(), 4);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_lamenet");
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("e.svg");
    let ok = Command::new(bin).args(["csurface", "--oracle", "elliptic", "--eps", "pi/20", "--svg"]).arg(&svg).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(svg.exists());
    let bad = Command::new(bin).args(["csurface", "--eps", "pi/zero"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("eps"));
    let solver = Command::new(bin)
        .args(["sweep", "--oracle", "circle:0.1", "--kind", "curve", "--eps-list", "0.5,0.25,0.125", "--r", "1"])
        .output()
        .unwrap();
    assert_eq!(solver.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&solver.stderr).contains("ε = "));
    let usage = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
