use std::path::Path;
use std::process::{Command, Output};

fn revdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revdet")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = revdet(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_detect_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let det = dir.path().join("det");
    ok(&["simulate", "--lambda", "8", "--periods", "2", "--seed", "3", "--out", s(&corpus)]);
    let truth = corpus.join("ground_truth.csv");
    assert!(truth.exists() && corpus.join("simulation.json").exists());

    ok(&["--pseudo-embeddings", "16,1", "detect", "--corpus", s(&corpus), "--measure", "vsm", "--out", s(&det)]);
    let pairs = std::fs::read_to_string(det.join("pairs.csv")).unwrap();
    assert!(pairs.starts_with("original_id,revision_id,score,measure\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(det.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["measure"], "vsm");
    assert!(det.join("histogram.csv").exists());

    let scores: serde_json::Value =
        serde_json::from_str(&ok(&["eval", "--predicted", s(&det.join("pairs.csv")), "--truth", s(&truth)])).unwrap();
    for key in ["precision", "recall", "f1", "tp", "fp", "fn"] {
        assert!(scores[key].is_number(), "{key}");
    }
}

#[test]
fn fixed_tau_skips_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let det = dir.path().join("det");
    ok(&["simulate", "--lambda", "4", "--periods", "1", "--seed", "1", "--out", s(&corpus)]);
    ok(&[
        "--pseudo-embeddings",
        "8,2",
        "--workers",
        "2",
        "detect",
        "--corpus",
        s(&corpus),
        "--tau",
        "-1",
        "--out",
        s(&det),
    ]);
    assert_eq!(std::fs::read_to_string(det.join("pairs.csv")).unwrap(), "original_id,revision_id,score,measure\n");
    assert!(!det.join("histogram.csv").exists());
}

#[test]
fn calibrate_prints_tau() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let cal = dir.path().join("cal");
    ok(&["simulate", "--lambda", "6", "--periods", "1", "--seed", "2", "--out", s(&corpus)]);
    let out =
        ok(&["--pseudo-embeddings", "8,1", "calibrate", "--corpus", s(&corpus), "--measure", "vsm", "--out", s(&cal)]);
    let tau: f64 = out.trim().parse().unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cal.join("calibration.json")).unwrap()).unwrap();
    assert_eq!(json["tau"].as_f64().unwrap(), tau);
    let hist = std::fs::read_to_string(cal.join("histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_left,bin_right,count,smoothed_count\n"));
    assert_eq!(hist.lines().count(), 101);
}

#[test]
fn dist_between_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("a.md");
    std::fs::write(&doc, "# notes\n\nthe mill stood by the river\n\nthe wheel turned all year\n").unwrap();
    let other = dir.path().join("b.md");
    std::fs::write(&other, "# notes\n\nthe mill burned down\n").unwrap();
    let d = |measure: &str, b: &Path| -> f64 {
        ok(&["--pseudo-embeddings", "8,1", "dist", "--doc-a", s(&doc), "--doc-b", s(b), "--measure", measure])
            .trim()
            .parse()
            .unwrap()
    };
    assert_eq!(d("wdtw", &doc), 0.0);
    assert_eq!(d("wted", &doc), 0.0);
    assert_eq!(d("vsm", &doc), 1.0);
    assert!(d("wdtw", &other) > 0.0);
}

#[test]
fn bench_writes_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["simulate", "--lambda", "5", "--periods", "2", "--seed", "4", "--out", s(&corpus)]);
    let csv = ok(&[
        "--pseudo-embeddings",
        "8,1",
        "bench",
        "--corpus",
        s(&corpus),
        "--truth",
        s(&corpus.join("ground_truth.csv")),
        "--measures",
        "vsm,wdtw",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("measure,precision,recall,f1"));
    assert!(lines[1].starts_with("vsm,") && lines[2].starts_with("wdtw,"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["simulate", "--lambda", "3", "--periods", "1", "--out", s(&corpus)]);
    let out = revdet(&["detect", "--corpus", s(&corpus), "--out", s(&dir.path().join("x"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pseudo-embeddings"));
    assert!(!revdet(&["--pseudo-embeddings", "0,1", "detect", "--corpus", s(&corpus), "--out", "x"]).status.success());
    assert!(!revdet(&["simulate", "--lambda", "-1", "--out", s(&corpus)]).status.success());
    assert!(!revdet(&["eval", "--predicted", "missing.csv", "--truth", "missing.csv"]).status.success());
}
