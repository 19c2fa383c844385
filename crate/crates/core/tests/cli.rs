use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn conelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conelab"))
        .args(args)
        .output()
        .unwrap()
}

const DENSITY: &str = r#"{
    "schema_version": 1,
    "id": "profile",
    "measure": {"kind": "lebesgue", "n": 2, "k": 2},
    "points": {"sample": {"count": 3, "depth": 20}},
    "operation": {"density": {"alpha": 0.5, "m": 1, "r0": 0.25, "levels": 2}}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn density_run_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "profile.json", DENSITY);
    let out = dir.path().join("out");
    let o = conelab(&[
        "density",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let mut rdr = csv::Reader::from_path(out.join("profile.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3 * 2);
    for r in &rows {
        let (lo, hi): (f64, f64) = (r[6].parse().unwrap(), r[7].parse().unwrap());
        assert!(lo <= hi);
        assert_eq!(&r[5], "worst_cone_ratio");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("profile.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["seed"], 7);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "profile.json", DENSITY);
    let one = conelab(&["density", "--config", &cfg, "--threads", "1"]);
    let four = conelab(&["density", "--config", &cfg, "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn bad_alpha_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", &DENSITY.replace("0.5", "1.5"));
    let o = conelab(&["density", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("operation.density.alpha"));
}

#[test]
fn operation_must_match_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "profile.json", DENSITY);
    assert_eq!(conelab(&["hom", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(conelab(&["measure"]).status.code(), Some(2));
}

#[test]
fn constants_report_echoes_true_checks() {
    let o = conelab(&[
        "constants",
        "-n",
        "2",
        "-m",
        "1",
        "-s",
        "1.5",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["details"]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c[1] == true));
    assert_eq!(v["details"]["q"], 3);
}

#[test]
fn constants_without_q_in_higher_codimension_is_rejected() {
    let o = conelab(&[
        "constants",
        "-n",
        "3",
        "-m",
        "1",
        "-s",
        "1.5",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_example_hits_the_guard() {
    assert_eq!(
        conelab(&["verify-example", "binomial", "--depth", "60"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn rotating_example_passes() {
    let o = conelab(&["verify-example", "2"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
