use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn gslond(args: &[&str], dir: &Path, stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gslond"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn boundaries_prints_toy_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = gslond(&["boundaries", "--target", "2"], dir.path(), None);
    assert!(out.status.success());
    let s = text(&out.stdout);
    for value in ["0.010335", "0.008933", "0.000710", "0.016429", "0.031006", "0.048246", "0.027942", "0.045858"] {
        assert!(s.contains(value), "missing {value} in\n{s}");
    }
    assert_eq!(s.lines().filter(|l| l.starts_with("reject final")).count(), 3);
}

#[test]
fn single_hypothesis_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = gslond(&["boundaries", "-k", "1", "--spending", "po", "--levels-only"], dir.path(), None);
    assert!(out.status.success());
    let s = text(&out.stdout);
    let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#') && !l.starts_with('H')).collect();
    assert_eq!(rows.len(), 1, "{s}");
    assert!(rows[0].contains("0.050000"));
}

#[test]
fn betas_bounded_and_equal() {
    let dir = tempfile::tempdir().unwrap();
    let out = gslond(&["betas", "--beta-mode", "equal", "--n-bound", "10", "--count", "10"], dir.path(), None);
    assert!(out.status.success());
    let s = text(&out.stdout);
    assert!(s.lines().skip(1).all(|l| l.split(',').nth(1) == Some("0.00250000")));
    assert!(s.lines().last().unwrap().ends_with(",0.02500000"));

    let out = gslond(&["betas", "--beta-mode", "bounded", "--n-bound", "5", "--count", "6"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
    let out = gslond(&["betas", "--beta-mode", "bounded", "--count", "3"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
}

const SESSION: &str = "\
# two hypotheses
REGISTER 0.0125
REGISTER 0.0125
INTERIM 1 0.0001 10
INTERIM 2 0.3 20
FINAL 2 0.01 30
";

#[test]
fn decide_streams_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["decide", "--alpha", "0.025", "--beta-mode", "equal", "--n-bound", "2", "--out", "log.txt"];
    let first = gslond(&args, dir.path(), Some(SESSION));
    assert!(first.status.success(), "{}", text(&first.stderr));
    let lines: Vec<String> = text(&first.stdout).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[2].ends_with("RejectedInterim"), "{lines:?}");
    assert!(lines[4].starts_with("2 final"));

    let replay = gslond(
        &["decide", "--alpha", "0.025", "--beta-mode", "equal", "--n-bound", "2", "--input", "log.txt"],
        dir.path(),
        None,
    );
    assert!(replay.status.success());
    assert_eq!(replay.stdout, first.stdout);
}

#[test]
fn decide_reports_protocol_errors_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = gslond(&["decide"], dir.path(), Some("REGISTER 0.001\nFINAL 1 0.2 5\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("line 2"), "{}", text(&out.stderr));

    let out = gslond(&["decide"], dir.path(), Some("REGISTER 0.001\nINTERIM one 0.2 5\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("line 2"));
}

#[test]
fn simulate_rejects_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "[scenario]\nreplications = 0\n").unwrap();
    let out = gslond(&["simulate", "--config", "bad.conf", "--out", "x.csv"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("replications"));
    assert!(!dir.path().join("x.csv").exists());

    let out = gslond(&["simulate", "--config", "missing.conf"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("small.conf"),
        "replications = 50\nseed = 5\n[scenario]\nname = t\nprocedure = LOND, gsLOND\npi0 = 0, 1\n",
    )
    .unwrap();
    let out = gslond(&["simulate", "--config", "small.conf", "--out", "r.csv", "--jobs", "2"], dir.path(), None);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(text(&out.stderr).lines().filter(|l| l.starts_with('[')).count(), 4);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("scenario_id,procedure,spending,control_mode,order,pi0,delta,K,N,power,power_se,fdr,fdr_se,saved_pct,saved_pct_se,mean_rejected_alternatives,replications"));
    assert!(lines[1].starts_with("t-0001,LOND,OBF,CC,random,0,"));
    let manifest = std::fs::read_to_string(dir.path().join("r.csv.manifest")).unwrap();
    assert!(manifest.contains("config = small.conf"));
    assert_eq!(manifest.lines().filter(|l| l.starts_with("scenario = ")).count(), 4);

    // A changed config no longer matches its manifest.
    std::fs::write(dir.path().join("small.conf"), "replications = 51\n").unwrap();
    let out = gslond(&["simulate", "--manifest", "r.csv.manifest"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn show_config_lists_and_expands() {
    let dir = tempfile::tempdir().unwrap();
    let out = gslond(&["show-config"], dir.path(), None);
    let s = text(&out.stdout);
    for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "beta-modes"] {
        assert!(s.lines().any(|l| l == name));
    }
    let out = gslond(&["show-config", "fig5", "--expand"], dir.path(), None);
    assert!(out.status.success());
    assert_eq!(text(&out.stdout).lines().filter(|l| l.starts_with("# fig5-")).count(), 36);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gslond(&["betas", "--beta-mode", "sideways"], dir.path(), None).status.code(), Some(2));
    assert_eq!(gslond(&["simulate"], dir.path(), None).status.code(), Some(2));
    assert_eq!(gslond(&["boundaries", "--order", "1I,1X"], dir.path(), None).status.code(), Some(2));
}
