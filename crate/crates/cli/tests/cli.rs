use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn uea_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uea-lab"))
        .args(args)
        .current_dir(root())
        .env("UEA_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn example_all_passes() {
    let out = uea_lab(&["all", "--manifest", "corpus/example_z3.uea", "--cutoff", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("cokernel Z/3"));
    assert!(text.ends_with("status PASS\n"));
}

#[test]
fn abelian_fhul_passes() {
    let out = uea_lab(&["check-fhul", "--family", "abelian", "--family-degrees", "2,3", "--prime", "3", "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let out = uea_lab(&["check-fhul", "--manifest", "corpus/abelian_2_3.uea", "--cutoff", "8"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_2() {
    for args in [
        &["homology", "--manifest", "corpus/invalid/truncated.uea"][..],
        &["homology", "--manifest", "corpus/invalid/bad_degree.uea"],
        &["homology", "--manifest", "corpus/missing.uea"],
        &["gamma-check", "--manifest", "corpus/example_z3.uea", "--degrees", "5..2"],
        &["uea", "--family", "no_such_family"],
    ] {
        let out = uea_lab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
    let out = uea_lab(&["homology", "--manifest", "corpus/invalid/truncated.uea"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("4:"));
}

#[test]
fn failing_check_exits_1() {
    let out = uea_lab(&["validate", "--manifest", "corpus/invalid/bad_degree.uea", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "FAIL");
    assert_eq!(report["checks"][0]["payload"]["violations"][0]["axiom"], "bracket degree");
}

#[test]
fn reports_are_deterministic() {
    let args = ["all", "--manifest", "corpus/example_z3.uea", "--format", "json", "--cutoff", "8"];
    let a = uea_lab(&args);
    let b = uea_lab(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_uea-lab"))
        .args(args)
        .current_dir(root())
        .env("UEA_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
    let seeded = ["bockstein", "--family", "random_nilpotent", "--seed", "7", "--prime", "5", "--format", "json"];
    assert_eq!(uea_lab(&seeded).stdout, uea_lab(&seeded).stdout);
}

#[test]
fn json_matches_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schema/run-report.schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for args in [
        &["all", "--manifest", "corpus/example_z3.uea", "--format", "json", "--cutoff", "8"][..],
        &["validate", "--manifest", "corpus/invalid/bad_degree.uea", "--format", "json"],
        &["gamma-check", "--manifest", "corpus/torsion_p5.uea", "--format", "json", "--degrees", "0..6", "--timings"],
        &["check-embed", "--family", "bott_samelson_shadow", "--prime", "5", "--cutoff", "8", "--format", "json"],
    ] {
        let out = uea_lab(args);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let broken = serde_json::json!({ "tool": "uea-lab", "status": "MAYBE" });
    assert!(!validator.is_valid(&broken));
}

#[test]
fn emitted_manifest_round_trips() {
    let out = uea_lab(&["validate", "--family", "example_z3", "--emit-manifest", "--cutoff", "10"]);
    let text = stdout(&out);
    let path = std::env::temp_dir().join(format!("uea-lab-emit-{}.uea", std::process::id()));
    std::fs::write(&path, &text).unwrap();
    let out = uea_lab(&["check-embed", "--manifest", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("cokernel Z/3"));
}
