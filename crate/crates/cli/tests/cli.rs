use std::path::Path;
use std::process::{Command, Output};

fn homog(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homog"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shear_passes_assumption_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(dir.path(), &["check-assumptions"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("out/check_assumptions.json"));
    assert_eq!(report["passes_A2"], true);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn zero_field_effective_value_is_norm() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(
        dir.path(),
        &[
            "effective",
            "--set",
            "field.kind=zero",
            "--set",
            "grid.resolution=32",
            "--set",
            "effective.p=1,0",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("out/effective.json"));
    let limit = report["results"][0]["limit"].as_f64().unwrap();
    assert!((limit - 1.0).abs() <= 0.01, "{limit}");
}

#[test]
fn strict_invariant_sets_on_sink_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(
        dir.path(),
        &["invariant-sets", "--strict", "--set", "field.kind=sink"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("out/invariant_sets.json"));
    assert_eq!(report["proper_invariant_found"], true);
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(dir.path(), &["sigma", "--set", "grid.colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_config_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "grid.resolution = 16\nnot a pair\n").unwrap();
    let out = homog(dir.path(), &["sigma", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn strict_assumption_failure_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(
        dir.path(),
        &["check-assumptions", "--strict", "--set", "field.kind=sink"],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn negative_cycle_in_distance_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = homog(
        dir.path(),
        &[
            "distance",
            "--set",
            "grid.resolution=16",
            "--set",
            "metric.tilt=2,0",
            "--set",
            "metric.level=0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn manifest_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sigma", "--set", "sigma.samples=20", "--set", "seed=11", "-o", "a"];
    assert_eq!(homog(dir.path(), &args).status.code(), Some(0));
    let out = homog(dir.path(), &["sigma", "--config", "a/manifest.txt", "-o", "b"]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["sigma.csv", "manifest.txt"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        if f == "manifest.txt" {
            let strip = |s: &[u8]| {
                String::from_utf8_lossy(s)
                    .lines()
                    .filter(|l| !l.starts_with("output.directory"))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            assert_eq!(strip(&a), strip(&b));
        } else {
            assert_eq!(a, b, "{f}");
        }
    }
}
