use std::process::{Command, Output};

use serde_json::Value;

fn pendular(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pendular"))
        .args(args)
        .env_remove("PENDULAR_PRESETS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV document, comments dropped.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn stark_map_default_run() {
    let text = stdout(&pendular(&["stark-map"]));
    assert!(!text.contains('\r'));
    let (h, rows) = csv_rows(&text);
    assert_eq!(h, ["x", "m", "label", "energy", "delta_e"]);
    assert!(rows.iter().any(|r| r[..4] == ["0", "0", "0", "0"]));
    let de = column(&h, "delta_e");
    let max = rows.iter().map(|r| r[de].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!((max - 3.7).abs() < 0.1, "{max}");
    let last: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert_eq!(last, 12.0);
}

#[test]
fn zero_step_is_a_usage_error() {
    let o = pendular(&["stark-map", "--x-step", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pendular(&["moments", "--x-grid", "0:1:0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pendular(&["moments", "--x-grid", "3,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn couplings_at_critical_field() {
    let (h, rows) = csv_rows(&stdout(&pendular(&["couplings", "--x", "6.1", "--alpha", "0"])));
    let r: f64 = rows[0][column(&h, "jz_over_j")].parse().unwrap();
    assert!((r + 1.0).abs() <= 0.05, "{r}");
    let jx: f64 = rows[0][column(&h, "jx")].parse().unwrap();
    let jy: f64 = rows[0][column(&h, "jy")].parse().unwrap();
    assert!((jx - jy).abs() < 1e-11);
}

#[test]
fn magic_angle_in_degrees() {
    let (h, rows) = csv_rows(&stdout(&pendular(&["couplings", "--x", "3", "--alpha", "54.735610317245346"])));
    let jz: f64 = rows[0][column(&h, "jz")].parse().unwrap();
    assert!(jz.abs() < 1e-12);
}

#[test]
fn convert_sro_anchor() {
    let text = stdout(&pendular(&["--molecule", "SrO", "convert", "--epsilon", "13.5"]));
    assert!(text.contains("# units:"));
    let (h, rows) = csv_rows(&text);
    let x: f64 = rows[0][column(&h, "x")].parse().unwrap();
    assert!((x / 6.1 - 1.0).abs() <= 0.02, "{x}");
}

#[test]
fn unknown_molecule_is_a_usage_error() {
    let o = pendular(&["convert", "--molecule", "Unobtainium", "--epsilon", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SrO"));
}

#[test]
fn convert_inverts() {
    let text = stdout(&pendular(&["convert", "--molecule", "KRb", "--x", "2", "--omega", "1e-5"]));
    let (h, rows) = csv_rows(&text);
    let eps: f64 = rows[0][column(&h, "epsilon_kv_cm")].parse().unwrap();
    let r: f64 = rows[0][column(&h, "r_nm")].parse().unwrap();
    let back = csv_rows(&stdout(&pendular(&[
        "convert",
        "--molecule",
        "KRb",
        "--epsilon",
        &eps.to_string(),
        "--r",
        &r.to_string(),
    ])));
    let x: f64 = back.1[0][column(&back.0, "x")].parse().unwrap();
    let w: f64 = back.1[0][column(&back.0, "omega_over_b")].parse().unwrap();
    assert!((x - 2.0).abs() < 1e-9 && (w / 1e-5 - 1.0).abs() < 1e-9);
}

#[test]
fn phase_diagram_weak_coupling_is_ferromagnetic() {
    let (h, rows) = csv_rows(&stdout(&pendular(&["phase-diagram", "--workers", "2"])));
    assert_eq!(h, ["x", "omega_over_b", "jz_over_j", "gamma_over_j", "phase"]);
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|r| r[4] == "ferromagnetic"));
    let g = column(&h, "gamma_over_j");
    assert!(rows.iter().all(|r| r[g].parse::<f64>().unwrap() > 1e4));
    // x-major order, ascending Ω within each x
    for pair in rows.windows(2) {
        let (x0, x1): (f64, f64) = (pair[0][0].parse().unwrap(), pair[1][0].parse().unwrap());
        let (w0, w1): (f64, f64) = (pair[0][1].parse().unwrap(), pair[1][1].parse().unwrap());
        assert!(x1 > x0 || (x1 == x0 && w1 > w0));
    }
}

#[test]
fn phase_diagram_json_metadata() {
    let text = stdout(&pendular(&[
        "phase-diagram",
        "--x-grid",
        "2,8",
        "--omega-grid",
        "1e-5",
        "--n",
        "6",
        "--boundary",
        "periodic",
        "--format",
        "json",
    ]));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["parameters"]["n"], 6);
    assert_eq!(v["parameters"]["boundary"], "periodic");
    assert_eq!(v["parameters"]["thresholds"]["ferro_threshold"], 0.99);
    assert!(v["code_version"].is_string());
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn chain_ed_with_explicit_constants() {
    let (h, rows) = csv_rows(&stdout(&pendular(&["chain-ed", "--n", "8", "--constants", "1,-2,0"])));
    assert_eq!(rows[0][column(&h, "magnetization_per_site")], "1");
    assert_eq!(rows[0][column(&h, "phase")], "ferromagnetic");
    let (h, rows) = csv_rows(&stdout(&pendular(&["chain-ed", "--n", "10", "--x", "6", "--omega", "1e-4"])));
    let overlap: f64 = rows[0][column(&h, "ground_overlap_polarized")].parse().unwrap();
    assert!(overlap >= 0.999);
    let o = pendular(&["chain-ed", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pendular(&["chain-ed", "--n", "40", "--constants", "1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_summary() {
    let text = stdout(&pendular(&["fit", "--quantity", "gap", "--format", "json"]));
    let v: Value = serde_json::from_str(&text).unwrap();
    let gap = &v["summary"]["gap"];
    assert!(gap["r_squared"].as_f64().unwrap() >= 0.9999);
    assert!(gap["max_dev_published"].as_f64().unwrap() <= 0.05);
    assert_eq!(v["columns"][3], "published");
}

#[test]
fn output_is_deterministic_and_checksummed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("moments.csv");
    let out_s = out.to_str().unwrap();
    let first = stdout(&pendular(&["moments", "--x-grid", "0:3:0.5"]));
    let second = stdout(&pendular(&["moments", "--x-grid", "0:3:0.5", "--workers", "1"]));
    assert_eq!(first, second);
    stdout(&pendular(&["moments", "--x-grid", "0:3:0.5", "--out", out_s]));
    let data = std::fs::read(&out).unwrap();
    assert_eq!(data, first.as_bytes());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("moments.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "moments");
    assert_eq!(manifest["outputs"][0]["bytes"], data.len());
    let sha = manifest["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    assert!(manifest["timestamp"].is_string());
    // same data, same checksum
    let out2 = dir.path().join("again.csv");
    stdout(&pendular(&["moments", "--x-grid", "0:3:0.5", "--out", out2.to_str().unwrap()]));
    let m2: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("again.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m2["outputs"][0]["sha256"], sha);
}

#[test]
fn preset_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("presets.toml");
    std::fs::write(&path, "[[molecule]]\nname = \"Toy\"\nmu_debye = 1.0\nb_cm1 = 1.0\n").unwrap();
    let o =
        Command::new(env!("CARGO_BIN_EXE_pendular")).args(["presets"]).env("PENDULAR_PRESETS", &path).output().unwrap();
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "Toy");

    std::fs::write(&path, "[[molecule]]\nname = \"Toy\"\nmu_debye = -1.0\nb_cm1 = 1.0\n").unwrap();
    let o = pendular(&["presets", "--presets", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("record 1"));
}

#[test]
fn builtin_presets_listed_alphabetically() {
    let (_, rows) = csv_rows(&stdout(&pendular(&["presets"])));
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"SrO"));
}

#[test]
fn contour_and_coefficients() {
    let (h, rows) = csv_rows(&stdout(&pendular(&["contour", "--x-grid", "0,6", "--alpha-grid", "0:90:45"])));
    assert_eq!(rows.len(), 6);
    assert_eq!(h[1], "alpha_deg");
    assert_eq!(rows[5][1], "90");
    let (_, rows) = csv_rows(&stdout(&pendular(&["coefficients", "--state", "up", "--x-max", "0", "--j-report", "2"])));
    // field-free |↑⟩ is Y_1^0
    let c: Vec<f64> = rows.iter().map(|r| r[3].parse::<f64>().unwrap().abs()).collect();
    assert_eq!(c, vec![0.0, 1.0, 0.0]);
}
