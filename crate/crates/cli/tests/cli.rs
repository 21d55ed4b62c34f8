use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weqlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weqlab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).expect("report written")).expect("valid JSON")
}

#[test]
fn group_info_prints_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["group", "info", "--d", "2", "--n", "3"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["2", "3", "24"]), "{stdout}");
    let doc = read_json(&dir.path().join("group-info.json"));
    assert_eq!(doc["result"]["order"], 24);
    assert_eq!(doc["config"]["command"], "group info");
    assert_eq!(doc["version"], weqlab_core::VERSION);
}

#[test]
fn reversed_divisibility_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["mixing", "--n", "9", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not divide"));
    assert!(!dir.path().join("mixing.json").exists());

    let out = weqlab(dir.path(), &["steplab", "search", "--n", "9", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn other_preconditions_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["steplab", "claim3", "--primes", "3", "--step-N", "0"][..],
        &["steplab", "report", "--primes", "3", "--epsilon", "0"],
        &["steplab", "report", "--primes", "3", "--epsilon", "-1/2"],
        &["expansion"],
        &["wstat", "--action", "nonsense"],
        &["wstat", "--action", "swap", "--symbols", "q"],
        &["expansion", "--moduli", "3", "--gens", "2,0;0,1"],
        &["group", "info", "--n", "3", "--bogus"],
    ] {
        let out = weqlab(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = weqlab(
            dir.path(),
            &["--threads", threads, "mixing", "--n", "5", "--m", "5", "--trials", "40", "--seed", "7", "--out", name],
        );
        assert!(out.status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("1", "a.json");
    assert_eq!(a, run("1", "b.json"));
    assert_eq!(a, run("3", "c.json"));

    let search = |name: &str| {
        let args = ["steplab", "search", "--n", "3", "--step-N", "2", "--restarts", "2", "--moves", "2000", "--seed", "7"];
        let out = weqlab(dir.path(), &[&args[..], &["--out", name]].concat());
        assert!(out.status.success());
        std::fs::read(dir.path().join(name)).unwrap()
    };
    assert_eq!(search("s1.json"), search("s2.json"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), r#"{"n": 5, "trials": 10, "seed": 3}"#).unwrap();
    let out = weqlab(dir.path(), &["mixing", "--config", "run.json", "--trials", "20", "--out", "m.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("m.json"));
    assert_eq!(doc["config"]["n"], 5);
    assert_eq!(doc["config"]["trials"], 20);
    assert_eq!(doc["config"]["seed"], 3);
    assert_eq!(doc["result"]["mixing"]["trials"], 20);

    std::fs::write(dir.path().join("bad.json"), r#"{"n": 5, "colour": "red"}"#).unwrap();
    let out = weqlab(dir.path(), &["mixing", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_writes_flagged_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["wstat", "--action", "a5", "--k", "2", "--exhaustive", "--sample-size", "8", "--out", "w.json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = read_json(&dir.path().join("w.json"));
    assert_eq!(doc["status"], "partial");
    assert_eq!(doc["result"]["sample"]["exhaustive"], false);
    assert!(!doc["notes"].as_array().unwrap().is_empty());
}

#[test]
fn exhaustive_wset_of_small_action() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["wstat", "--action", "cycle4", "--k", "2", "--exhaustive", "--format", "both", "--out", "w.json"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("w.json"));
    assert_eq!(doc["status"], "complete");
    assert_eq!(doc["result"]["sample"]["exhaustive"], true);
    assert_eq!(doc["result"]["sample"]["partitions_examined"], 16);
    let csv = std::fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert!(csv.starts_with("vector,symbol,i,j,num,den\n"));
}

#[test]
fn expansion_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["expansion", "--dims", "2", "--moduli", "2,3", "--gens", "sanov", "--out", "report.json", "--csv", "r.csv"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("report.json"));
    let reports = doc["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["n"], 2);
    assert_eq!(reports[0]["order"], 6);
    assert_eq!(reports[0]["generates"], false);
    assert_eq!(reports[0]["cheeger"]["num"], "0");
    assert_eq!(reports[1]["generates"], true);
    assert_eq!(reports[1]["cheeger"]["kind"], "exact");
    assert_eq!(reports[1]["cheeger"]["num"], "1");
    assert_eq!(reports[1]["cheeger"]["den"], "2");
    assert!(reports[1]["lambda2"].is_f64());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn report_with_failing_prime_keeps_other_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["steplab", "report", "--primes", "2,3", "--step-N", "1", "--out", "d.json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = read_json(&dir.path().join("d.json"));
    assert_eq!(doc["status"], "partial");
    assert_eq!(doc["result"]["rows"][0]["p"], 3);
    assert_eq!(doc["result"]["rows"][0]["best_step_dist"]["num"], "1");
    assert_eq!(doc["result"]["rows"][0]["best_step_dist"]["den"], "2");
    assert_eq!(doc["result"]["failures"][0]["p"], 2);
}

#[test]
fn net_index_of_swap_square() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["wstat", "--action", "swap", "--product", "swap", "--epsilon", "1/4", "--out", "n.json"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("n.json"));
    assert_eq!(doc["result"]["net"]["n"], 2);
    assert_eq!(doc["result"]["net"]["certified"], true);
    assert_eq!(doc["config"]["epsilon"]["num"], "1");
    assert_eq!(doc["config"]["epsilon"]["den"], "4");
}

#[test]
fn claim3_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let out = weqlab(dir.path(), &["steplab", "claim3", "--primes", "3,1013", "--step-N", "1", "--format", "csv", "--out", "c.json"]);
    assert!(out.status.success());
    let doc = read_json(&dir.path().join("c.json"));
    assert_eq!(doc["result"][0]["status"], "vacuous");
    assert_eq!(doc["result"][1]["status"], "active");
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.contains("1013,1,0.161089155105,active"));
}
