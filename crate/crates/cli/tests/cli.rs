use std::path::Path;
use std::process::{Command, Output};

use lwmy_cli::Suite;

fn lwmy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwmy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lists_all_thirteen_suites() {
    let o = lwmy(&["--list-suites"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for s in Suite::ALL {
        assert!(text.contains(s.name()), "{}", s.name());
    }
    assert_eq!(Suite::ALL.len(), 13);
}

#[test]
fn sample_gamma_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = lwmy(&[
        "sample",
        "gamma(1,1)",
        "--n",
        "10",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# spec=gamma(1,1)"));
    assert!(lines[1].starts_with("# seed=4"));
    let values: Vec<f64> = lines.iter().filter_map(|l| l.parse().ok()).collect();
    assert_eq!(values.len(), 10);
    assert!(values.iter().all(|&v| v > 0.0));
}

#[test]
fn sample_reports_acceptance_rate() {
    let o = lwmy(&["sample", "kummer2(2,1,1)", "--n", "100000"]);
    assert!(o.status.success());
    let err = stderr(&o);
    let rate: f64 = err.split("acceptance_rate=").nth(1).unwrap().trim().parse().unwrap();
    assert!(rate > 0.0 && rate <= 1.0);
}

#[test]
fn sample_uniform_mean() {
    let o = lwmy(&["sample", "beta(1,1)", "--n", "100000", "--seed", "9"]);
    let values: Vec<f64> = stdout(&o).lines().filter_map(|l| l.parse().ok()).collect();
    assert_eq!(values.len(), 100_000);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    assert!((mean - 0.5).abs() < 4.0 / (12.0f64 * 1e5).sqrt());
}

#[test]
fn bad_spec_is_reported() {
    let o = lwmy(&["sample", "gamma(-1,1)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["--suite", "matsumoto-yor", "--set", "lambda=1"],
        vec!["--suite", "no-such-suite"],
        vec!["--suite", "matsumoto-yor", "--n", "10"],
        vec!["--n", "10000"],
    ] {
        let o = lwmy(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains("config error"));
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        "# kummer sum\nsuite = kummer-convolution\nn = 10000\nreplicates = 3\nc = 5\n",
    )
    .unwrap();
    let o = lwmy(&[
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "c=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out);
    assert_eq!(r["parameters"]["c"], "1");
    assert_eq!(r["parameters"]["n"], "10000");
    assert_eq!(r["seeds"].as_array().unwrap().len(), 3);
    assert_eq!(r["setup"]["target"], "kummer2(3,-1,1)");
    assert_eq!(r["pass"], true);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = lwmy(&[
            "--suite",
            "matsumoto-yor",
            "--n",
            "10000",
            "--set",
            "replicates=4",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.code().is_some());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json", "1"), run("b.json", "3"));
}

#[test]
fn classify_reports_branch() {
    let o = lwmy(&["--suite", "series-classify", "--set", "coefficients=-1,-1,0,0"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["reports"][0]["inputs"]["branch"], "LinearQuadratic");
    assert!(stderr(&o).contains("LinearQuadratic"));
}

#[test]
fn failing_suite_exits_nonzero() {
    let o = lwmy(&["--suite", "series-classify", "--set", "coefficients=0,-1,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], false);

    let o = lwmy(&["--suite", "cns-residual", "--set", "tolerance=1e-300"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_status_tracks_pass_flag() {
    for suite in [
        "cns-residual",
        "delay-residual",
        "comb20-consistency",
        "h-ode",
        "series-classify",
    ] {
        let o = lwmy(&["--suite", suite]);
        let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(o.status.success(), r["pass"] == true, "{suite}");
        assert_eq!(r["pass"], true, "{suite}");
    }
}
