use std::path::Path;
use std::process::{Command, Output};

use mofqnlp_core::dataset::MofDataset;
use mofqnlp_core::Checkpoint;

fn run(args: &[&str], dir: &Path, env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mofqnlp"));
    cmd.args(args).current_dir(dir).env_remove("MOFQNLP_SEED");
    if let Some(s) = env_seed {
        cmd.env("MOFQNLP_SEED", s);
    }
    cmd.output().unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = run(args, dir, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dataset_gen_writes_150_records_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["dataset", "gen", "--seed", "42", "--out", "mofs.json"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("mofs.json")).unwrap();
    assert_eq!(MofDataset::from_json(&text).unwrap().mofs.len(), 150);
    let meta = json(&dir.path().join("mofs.meta.json"));
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["threshold"], 0.85);
}

#[test]
fn dataset_stats_reports_boundaries_and_significance() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["dataset", "stats", "--property", "h2", "--out", "stats.json"], dir.path());
    let s = json(&dir.path().join("stats.json"));
    assert_eq!(s["quaternary_boundaries"].as_array().unwrap().len(), 3);
    assert_eq!(s["class_sizes"]["11"], 38);
    assert_eq!(s["ucic"], 150);
    assert_eq!(s["absolute_boundary"], 9.8);
    assert_eq!(s["significance"]["edges"].as_array().unwrap().len(), 15);
}

#[test]
fn compare_prints_four_model_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["dataset", "gen", "--out", "mofs.json"], dir.path());
    let stdout = ok(
        &["compare", "--dataset", "mofs.json", "--property", "pv", "--task", "binary", "--epochs", "3", "--out-dir", "cmp"],
        dir.path(),
    );
    for label in ["BoW", "DisCoCat", "Sequence", "Stair"] {
        assert!(stdout.contains(label), "{stdout}");
    }
    let table = std::fs::read_to_string(dir.path().join("cmp/compare.csv")).unwrap();
    let models: Vec<&str> = table.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(models, ["BoW", "DisCoCat", "Sequence", "Stair"]);
    assert!(dir.path().join("cmp/metrics_stair.csv").exists());
}

#[test]
fn train_writes_checkpoint_metrics_and_shots() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["train", "--task", "multiclass", "--epochs", "2", "--out-dir", "t"], dir.path());
    let ckpt = Checkpoint::from_json(&std::fs::read_to_string(dir.path().join("t/checkpoint.json")).unwrap()).unwrap();
    assert_eq!(ckpt.label_width, 2);
    let metrics = std::fs::read_to_string(dir.path().join("t/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    assert_eq!(json(&dir.path().join("t/meta.json"))["shots"], 8192);

    ok(&["train", "--epochs", "2", "--out-dir", "b"], dir.path());
    assert_eq!(json(&dir.path().join("b/meta.json"))["shots"], 2048);
}

#[test]
fn a_sweep_writes_one_metrics_file_per_value() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["train", "--epochs", "3", "--A-sweep", "0.1,0.01,0.001", "--out-dir", "s"], dir.path());
    for a in ["0.1", "0.01", "0.001"] {
        assert!(dir.path().join(format!("s/metrics_A{a}.csv")).exists());
    }
    let chosen = json(&dir.path().join("s/summary.json"))["A"].as_f64().unwrap();
    assert!([0.1, 0.01, 0.001].contains(&chosen));
}

#[test]
fn generate_reports_trials_per_class() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["generate", "--target", "high", "--property", "h2", "--trials", "100", "--epochs", "10", "--out-dir", "g"],
        dir.path(),
    );
    let r = json(&dir.path().join("g/report.json"));
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["class"], "11");
    assert_eq!(rows[0]["trials"], 100);
    let csv = std::fs::read_to_string(dir.path().join("g/report.csv")).unwrap();
    assert!(csv.starts_with("class,correct,incorrect,timeout,accuracy,avg_guesses\n11,"));
}

#[test]
fn saved_ensemble_is_reused_by_generate() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["ensemble-train", "--property", "h2", "--epochs", "5", "--out-dir", "e"], dir.path());
    let summary = json(&dir.path().join("e/summary.json"));
    assert_eq!(summary.as_object().unwrap().len(), 4);
    ok(
        &["generate", "--property", "h2", "--ensemble", "e/ensemble.json", "--trials", "5", "--out-dir", "g"],
        dir.path(),
    );
    assert!(!dir.path().join("g/ensemble.json").exists());
    let out = run(
        &["generate", "--property", "pv", "--ensemble", "e/ensemble.json", "--trials", "5", "--out-dir", "x"],
        dir.path(),
        None,
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("trained for"));
}

#[test]
fn config_file_and_env_seed_layering() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"A": 0.01, "trials": 3}"#).unwrap();
    ok(
        &["generate", "--oracle", "--config", "cfg.json", "--A", "0.1", "--out-dir", "g"],
        dir.path(),
    );
    let meta = json(&dir.path().join("g/meta.json"));
    assert_eq!(meta["config"]["A"], 0.1);
    assert_eq!(meta["config"]["trials"], 3);
    assert_eq!(meta["seed"], 0);

    let out = run(&["dataset", "gen", "--out", "m.json"], dir.path(), Some("31"));
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("m.meta.json"))["seed"], 31);
    let out = run(&["dataset", "gen", "--seed", "2", "--out", "n.json"], dir.path(), Some("31"));
    assert!(out.status.success());
    assert_eq!(json(&dir.path().join("n.meta.json"))["seed"], 2);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["generate", "--oracle", "--threshold", "1.5", "--out-dir", "g"],
        &["train", "--dataset", "missing.json", "--out-dir", "t"],
        &["frobnicate"],
        &["dataset", "gen", "--out", "d.json", "--max-iter", "0"],
    ];
    for args in cases {
        let out = run(args, dir.path(), None);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty(), "{args:?} gave no message");
    }
    std::fs::write(dir.path().join("bad.json"), r#"{"shots": 2048, "colour": 1}"#).unwrap();
    let out = run(&["dataset", "gen", "--config", "bad.json", "--out", "d.json"], dir.path(), None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    let out = run(&["train", "--out-dir", "t"], dir.path(), Some("not-a-number"));
    assert!(!out.status.success());
}
