use std::path::PathBuf;
use std::process::{Command, Output};

use momentcert::report::AnalysisReport;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_model(dir: &tempfile::TempDir, name: &str, src: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, src).unwrap();
    p
}

#[test]
fn validate_accepts_every_shipped_model() {
    for name in [
        "example1.net",
        "example2.net",
        "example3.net",
        "example4.net",
        "example5.net",
        "conversion.net",
        "dimerization.net",
    ] {
        let out = run(&["validate", model(name).to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("all proper"));
    }
}

#[test]
fn improper_model_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_model(
        &dir,
        "bad.net",
        "species S1\nreaction leak: S1 -> . @ poly \"1\"\ninit 0\n",
    );
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("IMPROPER"));
    assert_eq!(code(&run(&["analyze", p.to_str().unwrap()])), 1);
}

#[test]
fn parse_error_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_model(&dir, "bad.net", "species A\nreaction r: A -> B @ mass_action 1\n");
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_init_exits_3() {
    let m = model("example2.net");
    let out = run(&["simulate", m.to_str().unwrap(), "--t-end", "1", "--seed", "1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&run(&["access", m.to_str().unwrap()])), 3);
    // analysis without an initial state only skips T3
    let out = run(&["analyze", m.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("T3: SKIPPED"));
}

#[test]
fn bad_arguments_exit_4() {
    let m = model("example4.net");
    let m = m.to_str().unwrap();
    for args in [
        vec!["analyze", m, "--init", "1,2,3"],
        vec!["analyze", m, "--init", "a,b"],
        vec!["simulate", m, "--t-end", "-1"],
        vec!["simulate", m, "--t-end", "1", "--n-traj", "1"],
        vec!["simulate", m, "--t-end", "1", "--orders", "0"],
        vec!["analyze", "/nonexistent/model.net"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 4, "{args:?}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn analyze_writes_matching_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = run(&[
        "analyze",
        model("example5.net").to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = AnalysisReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.theorem3.status, "CERTIFIED");
    assert_eq!(report.to_text(), stdout(&out));
}

#[test]
fn simulate_is_reproducible_and_records_the_seed() {
    let m = model("dimerization.net");
    let args = [
        "simulate",
        m.to_str().unwrap(),
        "--t-end",
        "1",
        "--grid",
        "4",
        "--n-traj",
        "200",
        "--seed",
        "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,r,mean,stderr,n_effective,censored_frac");
    assert_eq!(lines.count(), 8);

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let table = dir.path().join("m.csv");
    let out = run(&[
        "simulate",
        m.to_str().unwrap(),
        "--t-end",
        "1",
        "--grid",
        "4",
        "--n-traj",
        "200",
        "--json",
        json.to_str().unwrap(),
        "--csv",
        table.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = AnalysisReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let seed = report.master_seed.expect("generated seed is recorded");
    assert_eq!(report.simulation.as_ref().unwrap().master_seed, seed);
    let again = run(&[&args[..8], &["--seed", &seed.to_string()]].concat());
    assert_eq!(stdout(&again), std::fs::read_to_string(&table).unwrap());
}

#[test]
fn access_labels_complete_and_sample() {
    let out = run(&[
        "access",
        model("conversion.net").to_str().unwrap(),
        "--init",
        "2,0",
        "--witness",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("COMPLETE: 3 states"));
    let out = run(&[
        "access",
        model("example2.net").to_str().unwrap(),
        "--init",
        "10,10",
        "--max-states",
        "100",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("SAMPLE: 100 states"));
}
