use std::path::Path;
use std::process::{Command, Output};

use driftgate::gbdt::BoostParams;
use driftgate::harness::{GridConfig, HoldoutRange};
use driftgate::dataset::MonthStamp;

fn driftgate(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftgate"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = driftgate(args, dir);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn generate(dir: &Path) {
    ok(
        &[
            "generate", "--kind", "covariate", "--magnitude", "1", "--n-train", "1200", "--n-test", "300",
            "--months", "6", "--out-train", "train.csv", "--out-test", "test.csv",
        ],
        dir,
    );
    let params = BoostParams {
        early_stopping_rounds: 10,
        ..BoostParams::default().with_rounds(30)
    };
    std::fs::write(dir.join("params.json"), serde_json::to_string(&params).unwrap()).unwrap();
}

#[test]
fn end_to_end_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d);
    assert!(d.join("train.schema.json").exists());

    let adv = ok(
        &["adversarial", "--train", "train.csv", "--test", "test.csv", "--params", "params.json", "--out", "adv.json"],
        d,
    );
    assert!(adv.contains("adv_auc"), "{adv}");

    ok(
        &[
            "plan", "--strategy", "augmented", "--train", "train.csv", "--report", "adv.json", "--keep-fraction",
            "0.5", "--out", "plan.json",
        ],
        d,
    );
    let plan: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["folds"].as_array().unwrap().len(), 5);

    ok(
        &["run", "--plan", "plan.json", "--train", "train.csv", "--test", "test.csv", "--params", "params.json", "--out", "outcome.json"],
        d,
    );
    let outcome: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("outcome.json")).unwrap()).unwrap();
    let auc = outcome["test_auc"].as_f64().unwrap();
    assert!((0.5..=1.0).contains(&auc));

    let first = MonthStamp::new(2018, 1).unwrap();
    let config = GridConfig {
        set1_starts: vec![first, first.succ()],
        set2_ranges: vec![HoldoutRange { range_start: first, valid_starts: vec![MonthStamp::new(2018, 5).unwrap()] }],
        set4_keep: vec![1.0, 0.5],
        set5_keep: vec![0.5],
        ..GridConfig::for_months(first, 6)
    };
    std::fs::write(d.join("grid.json"), serde_json::to_string(&config).unwrap()).unwrap();
    ok(
        &["grid", "--train", "train.csv", "--test", "test.csv", "--config", "grid.json", "--params", "params.json", "--out", "out"],
        d,
    );
    let csv = std::fs::read_to_string(d.join("out").join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7);
    assert!(d.join("out").join("summary.json").exists());
}

#[test]
fn json_datasets_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &["generate", "--n-train", "300", "--n-test", "100", "--months", "3", "--out-train", "a.json", "--out-test", "b.json"],
        d,
    );
    ok(&["plan", "--strategy", "chrono-cv", "--train", "a.json", "--start", "2018-02", "--out", "p.json"], d);
}

#[test]
fn contract_and_schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d);

    // weighted plans need an adversarial report
    let out = driftgate(&["plan", "--strategy", "weighted", "--train", "train.csv", "--out", "p.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    std::fs::write(d.join("bad.csv"), "x0,y\n1.0,1\nabc,0\n").unwrap();
    std::fs::write(
        d.join("bad.schema.json"),
        r#"{"columns":[{"name":"x0","kind":"numeric"}],"label_column":"y"}"#,
    )
    .unwrap();
    let out = driftgate(&["ingest", "--csv", "bad.csv", "--schema", "bad.schema.json", "--out", "o.json"], d);
    assert_eq!(out.status.code(), Some(2));

    let out = driftgate(&["generate", "--kind", "sideways", "--out-train", "a.csv", "--out-test", "b.csv"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftgate(
        &["adversarial", "--train", "nope.csv", "--test", "nope2.csv", "--out", "a.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
