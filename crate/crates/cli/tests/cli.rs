use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fuzzysum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzysum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn run_in(dir: &Path, args: &[&str]) -> (Output, Value, String) {
    let out_dir = dir.to_str().unwrap();
    let mut full = vec!["run", "--out-dir", out_dir];
    full.extend_from_slice(args);
    let out = fuzzysum(&full);
    assert!(out.status.success(), "stderr: {}", text(&out.stderr));
    let json = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let csv = std::fs::read_to_string(dir.join("traces.csv")).unwrap();
    (out, serde_json::from_str(&json).unwrap(), csv)
}

fn membership<'a>(report: &'a Value, theta: f64, mode: &str) -> &'a str {
    let c = report["classifications"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["theta"].as_f64() == Some(theta))
        .unwrap();
    c["membership"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["mode"] == mode)
        .unwrap()["membership"]
        .as_str()
        .unwrap()
}

fn verdicts(report: &Value, theta: f64) -> Vec<&Value> {
    report["classifications"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["theta"].as_f64() == Some(theta))
        .flat_map(|c| c["verdicts"].as_array().unwrap())
        .map(|v| &v["verdict"])
        .collect()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let out = fuzzysum(&[]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("Usage") || text(&out.stdout).contains("Usage"));
}

#[test]
fn alternating_family_is_ordinary_but_not_absolute_summable() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report, _) = run_in(
        dir.path(),
        &[
            "--family",
            "ex4.1",
            "--scheme",
            "classical",
            "--weights",
            "const:1",
            "--theta",
            "1",
            "--modes",
            "ord,abs",
            "--horizon",
            "4096",
        ],
    );
    assert_eq!(membership(&report, 1.0, "ord"), "member");
    assert_eq!(membership(&report, 1.0, "abs"), "not_member");
    for c in report["classifications"][0]["verdicts"].as_array().unwrap() {
        let v = &c["verdict"];
        match c["mode"].as_str().unwrap() {
            "ord" => assert_eq!(v["value"].as_f64(), Some(0.0)),
            _ => assert_eq!(v["value"].as_f64(), Some(1.0)),
        }
    }
    assert!(text(&out.stdout).contains("θ=1 ord: member"));
}

#[test]
fn square_indicator_splits_at_theta_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let (_, report, _) = run_in(
        dir.path(),
        &[
            "--family",
            "ex3.1:M=1",
            "--scheme",
            "classical",
            "--weights",
            "const:1",
            "--theta",
            "0.25,0.75",
            "--modes",
            "abs",
        ],
    );
    assert_eq!(report["horizon"], 1u64 << 20);
    for v in verdicts(&report, 0.75) {
        assert_eq!(v["kind"], "converges");
        assert!(v["value"].as_f64().unwrap() <= 0.05);
    }
    for v in verdicts(&report, 0.25) {
        assert_eq!(v["kind"], "diverges");
    }
    assert_eq!(membership(&report, 0.75, "abs"), "member");
    assert_eq!(membership(&report, 0.25, "abs"), "not_member");
}

#[test]
fn csv_rows_are_sorted_and_match_the_json_traces() {
    let dir = tempfile::tempdir().unwrap();
    let (_, report, csv) = run_in(
        dir.path(),
        &[
            "--family",
            "ex3.2",
            "--scheme",
            "pow:2",
            "--weights",
            "recip5",
            "--theta",
            "1,0.5",
            "--horizon",
            "256",
            "--grid",
            "1,2,3",
        ],
    );
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["x", "mode", "theta", "n", "value"]
    );
    let rows: Vec<(f64, String, f64, u64, f64)> =
        reader.deserialize().map(|r| r.unwrap()).collect();
    let expected: usize = report["classifications"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["traces"].as_array().unwrap())
        .map(|t| t["points"].as_array().unwrap().len())
        .sum();
    assert_eq!(rows.len(), expected);
    assert_eq!(rows.len(), 3 * 3 * 2 * 9);
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let key = |r: &(f64, String, f64, u64, f64)| (r.0, r.1.clone(), r.2, r.3);
        assert!(
            key(a).partial_cmp(&key(b)) == Some(std::cmp::Ordering::Less),
            "{a:?} !< {b:?}"
        );
    }
}

#[test]
fn json_report_has_the_documented_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (_, report, csv) = run_in(
        dir.path(),
        &[
            "--family",
            "recip",
            "--theta",
            "1",
            "--modes",
            "ord,tauberian",
            "--horizon",
            "1024",
        ],
    );
    for key in [
        "family",
        "scheme",
        "weights",
        "eps",
        "grid",
        "horizon",
        "classifications",
        "tauberian",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let c = &report["classifications"][0];
    for key in [
        "family", "scheme", "weights", "theta", "eps", "grid", "verdicts", "traces",
    ] {
        assert!(c.get(key).is_some(), "missing classification.{key}");
    }
    let t = &report["tauberian"];
    for key in ["slowly_decreasing", "condition2", "summable"] {
        assert!(
            t["hypotheses"].get(key).is_some(),
            "missing hypotheses.{key}"
        );
    }
    assert!(t["conclusion"]["traces"].as_array().is_some());
    assert_eq!(t["hypotheses"]["slowly_decreasing_pass"], true);
    assert_eq!(t["conclusion"]["converges"], true);
    assert!(csv.lines().any(|l| l.contains(",tauberian,,")));
}

#[test]
fn runs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--family",
        "ex3.3",
        "--scheme",
        "pow:2",
        "--weights",
        "harmonicplus",
        "--theta",
        "0.2,1",
        "--horizon",
        "512",
    ];
    run_in(a.path(), &args);
    run_in(b.path(), &args);
    for f in ["report.json", "traces.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn explicit_output_paths_override_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let (json, csv) = (dir.path().join("a/r.json"), dir.path().join("b/t.csv"));
    let out = fuzzysum(&[
        "run",
        "--family",
        "ex4.1",
        "--horizon",
        "64",
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--out-dir",
        dir.path().join("unused").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(json.exists() && csv.exists());
    assert!(!dir.path().join("unused/report.json").exists());
}

#[test]
fn bad_specs_name_the_offending_token() {
    let out = fuzzysum(&["run", "--family", "ex4.1", "--scheme", "pow:x"]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains("`x`") || text(&out.stderr).contains("pow:x"),
        "{}",
        text(&out.stderr)
    );

    let out = fuzzysum(&["run", "--family", "ex9.9"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("ex9.9"));

    let out = fuzzysum(&["run", "--family", "ex4.1", "--weights", "harmonic"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("harmonic"));

    let out = fuzzysum(&["run", "--family", "ex4.1", "--modes", "sp,median"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("median"));
}

#[test]
fn invalid_parameters_are_rejected() {
    for args in [
        &["run", "--family", "ex4.1", "--horizon", "32"][..],
        &["run", "--family", "ex4.1", "--theta", "1.5"],
        &["run", "--family", "ex4.1", "--theta", "0"],
        &["run", "--family", "ex4.1", "--grid", "1,2"],
        &["reproduce", "--only", "ex5.5"],
        &["reproduce", "--horizon", "16"],
    ] {
        let out = fuzzysum(args);
        assert!(!out.status.success(), "{args:?} succeeded");
    }
}

#[test]
fn io_failures_report_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("report.json");
    let out = fuzzysum(&[
        "run",
        "--family",
        "ex4.1",
        "--horizon",
        "64",
        "--json",
        target.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains(blocker.to_str().unwrap()),
        "{}",
        text(&out.stderr)
    );

    let missing = dir.path().join("missing.tsv");
    let spec = format!("file:{}", missing.display());
    let out = fuzzysum(&["run", "--family", &spec, "--horizon", "64"]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains(missing.to_str().unwrap()),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn custom_table_family_runs() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("family.txt");
    std::fs::write(&table, "1 2.0 0.5\n2 1.0 0.25\n3 0.0 0.0\n").unwrap();
    let spec = format!("file:{}", table.display());
    let (_, report, _) = run_in(
        dir.path(),
        &["--family", &spec, "--modes", "abs,ord", "--horizon", "4096"],
    );
    assert_eq!(membership(&report, 1.0, "abs"), "member");
    assert_eq!(membership(&report, 1.0, "ord"), "member");
}

#[test]
fn reproduce_single_example() {
    let out = fuzzysum(&["reproduce", "--only", "ex3.2"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let rows: Vec<&str> = stdout
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(" agree") || l.contains("WARN") || l.contains("FAIL"))
        .collect();
    assert!(
        !rows.is_empty() && rows.iter().all(|l| l.starts_with("ex3.2 ")),
        "{stdout}"
    );
    assert!(stdout.contains("1/1 agreements"), "{stdout}");
}

#[test]
fn reproduce_at_a_tiny_horizon_warns_instead_of_failing() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("table.json");
    let out = fuzzysum(&[
        "reproduce",
        "--horizon",
        "64",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stdout));
    assert!(text(&out.stdout).contains("WARN inconclusive"));
    assert!(text(&out.stderr).contains("warning"));
    let table: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let statuses: Vec<&str> = table["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["status"].as_str().unwrap())
        .collect();
    assert_eq!(statuses.len(), 5);
    assert!(statuses.contains(&"inconclusive"));
    assert!(!statuses.contains(&"disagree"));
}

#[test]
fn reproduce_full_run_agrees_on_all_examples() {
    let out = fuzzysum(&["reproduce"]);
    let stdout = text(&out.stdout);
    println!("{stdout}");
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("5/5 agreements"), "{stdout}");
}
