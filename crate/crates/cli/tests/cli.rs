use std::path::Path;
use std::process::{Command, Output};

use approxsub::setfn::{GramianModel, Modular, Table, TabularFunction};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxsub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn sweep_rows_follow_the_grid_and_respect_the_guarantee() {
    let o = run(&[
        "sweep-beta",
        "--n",
        "5",
        "--N",
        "10",
        "--k",
        "3",
        "--seed",
        "7",
        "--beta-grid",
        "0.2:50:9,log",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 9);
    let (b, ratio, bound) = (
        col(&h, "beta"),
        col(&h, "greedy_ratio"),
        col(&h, "bound_delta"),
    );
    let betas: Vec<f64> = rows.iter().map(|r| r[b].parse().unwrap()).collect();
    assert!(betas.windows(2).all(|w| w[0] < w[1]));
    for r in &rows {
        let (x, y): (f64, f64) = (r[ratio].parse().unwrap(), r[bound].parse().unwrap());
        assert!(x + 1e-9 >= y, "greedy/OPT {x} below bound {y}");
    }
}

#[test]
fn sweep_is_reproducible() {
    let args = [
        "sweep-beta",
        "--n",
        "4",
        "--N",
        "8",
        "--k",
        "2",
        "--beta-grid",
        "0.5:5:4",
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn invalid_config_lists_every_problem() {
    let o = run(&[
        "sweep-beta",
        "--n",
        "0",
        "--k",
        "99",
        "--beta-grid",
        "3:1:4",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("n must be positive"), "{err}");
    assert!(err.contains("exceeds N"), "{err}");
    assert!(err.contains("beta grid"), "{err}");
}

#[test]
fn bad_flag_is_a_validation_error() {
    assert_eq!(run(&["sweep-beta", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        run(&["sweep-beta", "--interp", "sideways"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown suite"));

    for suite in ["lemma1", "prop1-sandwich"] {
        let o = run(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stderr(&o));
    }

    let o = run(&["verify", "mutation"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let first = &v[0]["failures"][0]["detail"];
    assert!(first["opt_set"].is_array() && first["bound"].is_number());
}

#[test]
fn malformed_matrix_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "1,2,3\n4,oops,6\n").unwrap();
    let o = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn modular_table_gets_unit_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("modular.csv");
    let m = Modular::new(vec![2.0, 1.0, 0.5, 4.0, 3.0]).unwrap();
    let t = TabularFunction::new(5, Table::tabulate(&m).unwrap().values().to_vec()).unwrap();
    std::fs::write(&p, t.to_csv_string()).unwrap();
    let o = run(&["analyze", p.to_str().unwrap(), "--tabular", "--k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["closeness"]["gamma_f"]["value"], 1.0);
    for b in v["bounds"].as_array().unwrap() {
        assert!((b["limit"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{b}");
    }
}

fn write_model(dir: &Path, seed: u64) -> String {
    let m = GramianModel::gaussian(5, 10, 1.0, seed, true).unwrap();
    let p = dir.join("x.csv");
    std::fs::write(&p, m.to_csv_string()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_agrees_with_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), 5);
    let o = run(&[
        "sweep-beta",
        "--n",
        "5",
        "--N",
        "10",
        "--k",
        "3",
        "--seed",
        "5",
        "--beta-grid",
        "2:2:1",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sweep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &sweep["rows"][0];

    let o = run(&[
        "analyze",
        &path,
        "--beta",
        "2",
        "--k",
        "3",
        "--surrogate",
        "log-det",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let an: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = &an["surrogates"][0];
    assert_eq!(s["bounds"]["delta_l"], row["delta_l"]);
    assert_eq!(s["bounds"]["delta_u"], row["delta_u"]);
    assert_eq!(s["total_curvature"], row["alpha_delta"]);
    assert_eq!(an["closeness"]["gamma_f"]["value"], row["gamma_f"]);
    let delta = an["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["kind"] == "delta-approximation")
        .unwrap();
    assert_eq!(delta["finite"], row["bound_delta"]);
    assert!(s["sandwich"]["holds"].as_bool().unwrap());
}

#[test]
fn sensor_select_writes_every_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sensor.json");
    let o = run(&[
        "sensor-select",
        "--n",
        "4",
        "--N",
        "9",
        "--k",
        "3",
        "--trials",
        "100",
        "--random-sets",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let budgets = v["budgets"].as_array().unwrap();
    assert_eq!(budgets.len(), 3);
    for (i, b) in budgets.iter().enumerate() {
        assert_eq!(b["k"], i + 1);
        assert_eq!(b["greedy_set"].as_array().unwrap().len(), i + 1);
    }
}

#[test]
fn sensor_select_min_eig_csv() {
    let o = run(&[
        "sensor-select",
        "--n",
        "3",
        "--N",
        "6",
        "--k",
        "4",
        "--trials",
        "50",
        "--random-sets",
        "10",
        "--objective",
        "min-eig",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(h[0], "k");
    assert_eq!(rows.len(), 4);
}
