use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qstirling"))
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> PathBuf {
    repo().join("configs").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn engine_text() -> String {
    std::fs::read_to_string(config("engine_fermionic_x10.toml")).unwrap()
}

fn fridge_text() -> String {
    std::fs::read_to_string(config("fridge_quantum.toml")).unwrap()
}

/// Header and single data row of a one-record CSV, as (name, value) pairs.
fn csv_record(text: &str) -> Vec<(String, String)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from);
    let row = lines.next().unwrap().split(',').map(String::from);
    assert!(lines.next().is_none());
    header.zip(row).collect()
}

fn field(record: &[(String, String)], name: &str) -> f64 {
    record.iter().find(|(k, _)| k == name).unwrap().1.parse().unwrap()
}

#[test]
fn engine_csv_has_fourteen_named_columns() {
    let o = run(&["engine", "--config", config("engine_quantum.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rec = csv_record(&stdout(&o));
    let names: Vec<&str> = rec.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(
        names,
        ["status", "regime", "Q_h", "Q_c", "W_tot", "delta_Q", "eta", "P", "sigma", "tau", "t1", "t2", "t3", "t4"]
    );
    assert_eq!(rec[0].1, "ok");
}

#[test]
fn ordering_violation_exits_two_and_names_relation() {
    let dir = tempfile::tempdir().unwrap();
    let text = engine_text().replace("beta_h = 10.0", "beta_h = 20.0");
    let p = write_config(&dir, "bad.toml", &text);
    let o = run(&["engine", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beta_h < beta1"), "{}", stderr(&o));

    let text = fridge_text().replace("alpha_h = 1.4", "alpha_h = 0.9");
    let p = write_config(&dir, "bad_fridge.toml", &text);
    let o = run(&["fridge", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beta1p < beta_h"), "{}", stderr(&o));
}

#[test]
fn out_of_range_q_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, text) in [("engine", engine_text()), ("fridge", fridge_text())] {
        let p = write_config(&dir, "q.toml", &text.replace("q = -0.05", "q = 0.5"));
        let o = run(&[cmd, "--config", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains("bath.q"), "{}", stderr(&o));
    }
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(&dir, "typo.toml", &engine_text().replace("gamma2 = 0.6", "gamma2 = 0.6\ngama1 = 2"));
    let o = run(&["engine", "--config", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("regenerator.gama1"));

    let o = run(&["engine", "--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["engine"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["fridge", "--config", config("engine_quantum.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["engine", "--threads", "0", "--config", config("engine_quantum.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn quadrature_budget_exhaustion_exits_three_naming_stroke() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{}\n[numerics]\nrel_tol = 1e-15\nabs_tol = 1e-300\nmax_subdivisions = 1\n", engine_text());
    let p = write_config(&dir, "tight.toml", &text);
    let o = run(&["engine", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("stroke A->B"), "{}", stderr(&o));
}

#[test]
fn fridge_csv_columns() {
    let o = run(&["fridge", "--format", "csv", "--config", config("fridge_quantum.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rec = csv_record(&stdout(&o));
    assert!(["epsilon", "P", "R", "tau"].iter().all(|c| rec.iter().any(|(k, _)| k == c)));
}

#[test]
fn outputs_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg, gold) in [
        ("engine", "engine_quantum.toml", "engine_quantum.csv"),
        ("fridge", "fridge_quantum.toml", "fridge_quantum.json"),
        ("power-sweep", "power_sweep.toml", "power_sweep.csv"),
    ] {
        let out = dir.path().join(gold);
        let o = run(&[cmd, "--config", config(cfg).to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(golden(gold)).unwrap(), "{gold}");
    }
    assert_eq!(
        std::fs::read(dir.path().join("power_sweep.summary.json")).unwrap(),
        std::fs::read(golden("power_sweep.summary.json")).unwrap()
    );
}

#[test]
fn csv_round_trips_to_json_values() {
    let cfg = config("engine_fermionic_x10.toml");
    let csv = csv_record(&stdout(&run(&["engine", "--config", cfg.to_str().unwrap()])));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["engine", "--format", "json", "--config", cfg.to_str().unwrap()])))
            .unwrap();
    let report = &json["report"];
    let pairs = [
        ("Q_h", &report["ledger"]["q_h"]),
        ("Q_c", &report["ledger"]["q_c"]),
        ("W_tot", &report["ledger"]["work"]),
        ("eta", &report["efficiency"]),
        ("P", &report["power"]),
        ("sigma", &report["entropy_rate"]),
        ("tau", &report["timing"]["tau"]),
        ("t2", &report["timing"]["t2"]["duration"]),
    ];
    for (name, value) in pairs {
        assert_eq!(field(&csv, name).to_bits(), value.as_f64().unwrap().to_bits(), "{name}");
    }
}

#[test]
fn particle_count_scales_extensive_quantities_only() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, text) in
        [("engine", engine_text()), ("fridge", fridge_text().replace("format = \"json\"", "format = \"csv\""))]
    {
        let single = write_config(&dir, "one.toml", &text);
        let with_output = if text.contains("[output]") {
            text.replace("[output]", "[output]\nparticle_count = 2")
        } else {
            format!("{text}\n[output]\nparticle_count = 2\n")
        };
        let double = write_config(&dir, "two.toml", &with_output);
        let a = csv_record(&stdout(&run(&[cmd, "--config", single.to_str().unwrap()])));
        let b = csv_record(&stdout(&run(&[cmd, "--config", double.to_str().unwrap()])));
        for (k, v) in &a {
            let (x, y): (f64, f64) = match (v.parse(), field_str(&b, k).parse()) {
                (Ok(x), Ok(y)) => (x, y),
                _ => continue,
            };
            match k.as_str() {
                "Q_h" | "Q_c" | "W_tot" | "delta_Q" | "P" | "R" | "sigma" => assert_eq!(y, 2.0 * x, "{cmd} {k}"),
                _ => assert_eq!(y, x, "{cmd} {k}"),
            }
        }
    }
}

fn field_str<'a>(record: &'a [(String, String)], name: &str) -> &'a str {
    &record.iter().find(|(k, _)| k == name).unwrap().1
}

#[test]
fn regime_map_examples() {
    let ln2 = std::f64::consts::LN_2;
    let x_on = format!("{}", 2.0 * ln2);
    let o =
        run(&["regime-map", "--q-min", "-0.9", "--q-max", "-0.5", "--x-min", &x_on, "--x-max", "10", "--grid", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let find = |q: f64, x: f64| {
        rows.iter().find(|r| r[0].parse::<f64>().unwrap() == q && r[1].parse::<f64>().unwrap() == x).unwrap().clone()
    };
    let on = find(-0.5, 2.0 * ln2);
    assert!((on[2].parse::<f64>().unwrap() - 1.0).abs() <= 1e-12);
    assert_eq!(on[3], "on");
    let below = find(-0.9, 10.0);
    let expected = 2.0 * (-9.0f64).exp();
    assert!((below[2].parse::<f64>().unwrap() - expected).abs() <= 1e-12 * expected);
    assert_eq!(below[3], "below");
}

#[test]
fn regime_map_rejects_bad_ranges() {
    for args in [
        ["--q-min", "-1.5", "--grid", "3"],
        ["--q-min", "0.1", "--grid", "3"],
        ["--x-min", "0", "--grid", "3"],
        ["--grid", "1", "--x-min", "1"],
    ] {
        let o = run(&[&["regime-map"][..], &args[..]].concat());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn power_sweep_single_point_and_descending_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("power_sweep.toml");
    let out = dir.path().join("one.csv");
    let o = run(&["power-sweep", "--config", cfg.to_str().unwrap(), "--x-grid", "3.0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rec = csv_record(&std::fs::read_to_string(&out).unwrap());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("one.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["x_star"].as_f64().unwrap(), 3.0);
    assert_eq!(summary["eta_star"].as_f64().unwrap(), field(&rec, "eta"));
    assert_eq!(summary["p_star_max"].as_f64().unwrap(), field(&rec, "P_star"));

    let o = run(&["power-sweep", "--config", cfg.to_str().unwrap(), "--x-grid", "3,2,1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["power-sweep", "--config", config("fridge_quantum.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_passes_on_shipped_configs() {
    for name in ["engine_quantum.toml", "engine_fermionic_x10.toml", "engine_classical.toml", "fridge_quantum.toml"] {
        let o = run(&["validate", "--format", "csv", "--config", config(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(stderr(&o).contains("0 failed"));
    }
}

#[test]
fn validate_reports_equivalence_at_x20() {
    let o = run(&["validate", "--format", "csv", "--config", config("engine_quantum.toml").to_str().unwrap()]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let eq: Vec<_> = rows.iter().filter(|r| r[0].starts_with("equivalence_")).collect();
    assert_eq!(eq.len(), 7);
    for r in eq {
        assert!(r[2].parse::<f64>().unwrap() <= 4.1e-9, "{r:?}");
    }
}

#[test]
fn validate_broken_ordering_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, "bad.toml", &engine_text().replace("beta2 = 33.333333333333336", "beta2 = 12.0"));
    let o = run(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("beta1 < beta2"));
}
