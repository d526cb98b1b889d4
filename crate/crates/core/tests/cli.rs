use bell_mdl::report::Table;
use std::path::Path;
use std::process::{Command, Output};

fn bell_mdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bell-mdl"))
        .args(args)
        .env_remove("BELL_MDL_CONFIG")
        .output()
        .expect("spawn bell-mdl")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (header, rows) = Table::read_csv_records(csv).unwrap();
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn invalid_inputs_exit_with_domain_code() {
    for args in [
        &["coeffs", "--phi", "0"][..],
        &["coeffs", "--phi", "3.5"],
        &["coeffs", "--phi", "1", "--gamma", "-0.6"],
        &["correlate", "--method", "mc", "--n", "10"],
        &["correlate", "--method", "simpson"],
        &["--format", "xml", "gamma0-analytic"],
    ] {
        let out = bell_mdl(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn domain_message_names_the_interval() {
    let out = bell_mdl(&["coeffs", "--phi", "0"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi must be in (0, pi)"));
}

#[test]
fn coeffs_at_right_angle_are_equal() {
    let text = stdout(&bell_mdl(&["coeffs", "--phi", "1.5707963267948966"]));
    let (c1, c2) = (column(&text, "c1")[0], column(&text, "c2")[0]);
    assert!((c1 - c2).abs() < 1e-12);
    assert!((c1 - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn figure1_writes_full_grid_and_charts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bell_mdl(&["figure1", "--out", dir.path().to_str().unwrap()]);
    stdout(&out);
    let csv = std::fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    assert_eq!(column(&csv, "c1").len(), 9 * 179);
    for chart in ["figure1_c1.svg", "figure1_c2.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(chart)).unwrap();
        assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 9, "{chart}");
    }
}

#[test]
fn json_output_is_an_array_of_rows() {
    let text = stdout(&bell_mdl(&["--format", "json", "chsh"]));
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let v = r["chsh"].as_f64().unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-7);
    }
    assert!(rows[0]["gamma"].is_null());
}

#[test]
fn json_figure1_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    stdout(&bell_mdl(&["--format", "json", "figure1", "--gammas", "0", "--phi-steps", "4", "--out", d]));
    let text = std::fs::read_to_string(dir.path().join("figure1.json")).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn config_file_and_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# small grid\ngammas = -0.1, 0.1\nphi_steps = 6\nformat = csv\n");
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();

    stdout(&bell_mdl(&["--config", &cfg, "figure1", "--out", o]));
    let from_flag = std::fs::read(out_dir.join("figure1.csv")).unwrap();
    assert_eq!(column(std::str::from_utf8(&from_flag).unwrap(), "phi").len(), 2 * 5);

    std::fs::remove_dir_all(&out_dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bell-mdl"))
        .args(["figure1", "--out", o])
        .env("BELL_MDL_CONFIG", &cfg)
        .output()
        .unwrap();
    stdout(&out);
    assert_eq!(std::fs::read(out_dir.join("figure1.csv")).unwrap(), from_flag);

    // flags beat the file
    stdout(&bell_mdl(&["--config", &cfg, "figure1", "--phi-steps", "3", "--out", o]));
    let csv = std::fs::read_to_string(out_dir.join("figure1.csv")).unwrap();
    assert_eq!(column(&csv, "phi").len(), 2 * 2);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nonsense = 1\n");
    let out = bell_mdl(&["--config", &cfg, "gamma0-analytic"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = bell_mdl(&["--config", "/nonexistent/bell.cfg", "gamma0-analytic"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn monte_carlo_is_seeded() {
    let args = ["correlate", "--phi", "2.0", "--gamma", "-0.2", "--method", "mc", "--n", "5000", "--seed", "3"];
    let a = stdout(&bell_mdl(&args));
    assert_eq!(a, stdout(&bell_mdl(&args)));
    let mean = column(&a, "e")[0];
    let se = column(&a, "std_err")[0];
    assert!((mean + 2f64.cos()).abs() < 5.0 * se);
}

#[test]
fn bell_reports_violation() {
    let text = stdout(&bell_mdl(&["bell", "--gamma", "0.2"]));
    assert_eq!(text.matches("VIOLATED").count(), 2, "{text}");
}

#[test]
fn dmax_scan_writes_figure2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let text = stdout(&bell_mdl(&["dmax", "--scan", "-0.1:0.1:0.1", "--grid-n", "32", "--out", d]));
    let dmax = column(&text, "d_max");
    assert_eq!(dmax.len(), 3);
    assert!(dmax[1] < dmax[0] && dmax[1] < dmax[2]);
    assert!((dmax[1] - 0.276_433_705_733).abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("figure2.csv")).unwrap();
    assert_eq!(csv, text);
    assert!(dir.path().join("figure2.svg").exists());
}

#[test]
fn gamma0_analytic_rows() {
    let text = stdout(&bell_mdl(&["gamma0-analytic"]));
    assert!(text.contains("phi_star,"));
    assert!(text.contains("d_max,2.76433705"));
}

#[test]
fn csv_round_trips_through_reader() {
    let text = stdout(&bell_mdl(&["distance", "--phi-a", "0.7", "--phi-b", "2.2", "--gamma", "0.3"]));
    let d = column(&text, "d")[0];
    let lib = bell_mdl::distance::distance_d(
        bell_mdl::distance::DistancePair::new(0.7, 2.2).unwrap(),
        bell_mdl::model::GammaParam::new(0.3).unwrap(),
        &Default::default(),
    )
    .unwrap();
    assert_eq!(d.to_bits(), lib.to_bits());
}
