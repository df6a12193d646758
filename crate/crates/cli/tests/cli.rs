use std::path::Path;
use std::process::{Command, Output};

use qwalk_cli::config::Format;
use qwalk_cli::error::CliError;
use qwalk_cli::report::{parse, Payload};
use qwalk_core::WalkError;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().expect("binary runs")
}

fn qwalk_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).env(key, value).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DISPERSION: &[&str] = &["dispersion", "--kind", "u1", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--num-k", "512"];
const SMALL_ENSEMBLE: &[&str] = &[
    "ensemble", "--case", "d", "--mean-theta1", "1/4", "--mean-theta2", "1/20", "--egamma", "1.1", "--n", "8", "--r", "4",
    "--seed", "7", "--check-eigenvectors",
];

#[test]
fn dispersion_csv_has_real_band_below_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("band.csv");
    let o = qwalk(&[DISPERSION, &["--out", path_str(&out)]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let im = header.iter().position(|h| *h == "im_eps_plus").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 512);
    for r in rows {
        let v: f64 = r.split(',').nth(im).unwrap().parse().unwrap();
        assert!(v.abs() <= 1e-12);
    }
}

#[test]
fn every_payload_round_trips_through_json() {
    let runs: [&[&str]; 6] = [
        DISPERSION,
        &["spectrum", "--case", "a", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--n", "6"],
        SMALL_ENSEMBLE,
        &["phase-map", "--case", "c", "--steps1", "2", "--steps2", "2", "--n", "4", "--r", "2"],
        &["check-symmetry", "--kind", "u2", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--n", "6", "--disorder", "random"],
        &["verify", "--bloch"],
    ];
    let mut kinds = Vec::new();
    for args in runs {
        let o = qwalk(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let text = String::from_utf8(o.stdout).unwrap();
        let env = parse(&text, Format::Json).unwrap();
        let again = qwalk_cli::report::serialize(&env, Format::Json);
        assert_eq!(again, text, "{args:?}");
        kinds.push(std::mem::discriminant(&env.payload));
    }
    kinds.dedup();
    assert_eq!(kinds.len(), 6);
}

#[test]
fn tabular_payloads_round_trip_through_csv() {
    let runs: [&[&str]; 4] = [
        DISPERSION,
        &["spectrum", "--kind", "u2", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--n", "5"],
        &["phase-map", "--case", "d", "--steps1", "3", "--steps2", "2", "--n", "4", "--r", "2"],
        &["check-symmetry", "--kind", "u1", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--n", "5"],
    ];
    for args in runs {
        let csv = qwalk(&[args, &["--format", "csv"]].concat());
        let json = qwalk(args);
        let from_csv = parse(std::str::from_utf8(&csv.stdout).unwrap(), Format::Csv).unwrap();
        let from_json = parse(std::str::from_utf8(&json.stdout).unwrap(), Format::Json).unwrap();
        // Only the recorded output format differs between the two runs.
        assert_eq!(from_csv.payload, from_json.payload, "{args:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let a = qwalk(SMALL_ENSEMBLE);
    let b = qwalk(SMALL_ENSEMBLE);
    let c = qwalk_env(SMALL_ENSEMBLE, "QWALK_THREADS", "3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn embedded_config_replays_the_run() {
    let first = qwalk(SMALL_ENSEMBLE);
    let env = parse(std::str::from_utf8(&first.stdout).unwrap(), Format::Json).unwrap();
    let replay: Vec<&str> = env.config.replay.split(' ').skip(1).collect();
    let second = qwalk(&replay);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn timestamp_is_opt_in() {
    let plain = parse(std::str::from_utf8(&qwalk(&["verify", "--bloch"]).stdout).unwrap(), Format::Json).unwrap();
    assert_eq!(plain.timestamp, None);
    let stamped = qwalk(&["verify", "--bloch", "--timestamp"]);
    let stamped = parse(std::str::from_utf8(&stamped.stdout).unwrap(), Format::Json).unwrap();
    assert!(stamped.timestamp.unwrap().starts_with("unix:"));
}

#[test]
fn spectrum_plot_draws_dashed_unit_circle() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("spec.svg");
    let o = qwalk(&[
        "spectrum", "--case", "b", "--theta1", "1/3", "--theta2", "-1/12", "--egamma", "1.1", "--n", "10", "--plot",
        path_str(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.lines().any(|l| l.contains("unit-circle") && l.contains("stroke-dasharray")));
    assert_eq!(text.matches("r=\"2\"").count(), 20);
}

#[test]
fn usage_errors_exit_one() {
    let bad: [&[&str]; 6] = [
        &["dispersion", "--kind", "u1", "--theta1", "1/3", "--theta2", "0", "--egamma", "1.1", "--bogus"],
        &["dispersion", "--kind", "u3", "--theta1", "1/3", "--theta2", "0", "--egamma", "1.1"],
        &["dispersion", "--kind", "u1", "--theta1", "one", "--theta2", "0", "--egamma", "1.1"],
        &["ensemble", "--case", "a", "--mean-theta1", "0", "--mean-theta2", "0", "--egamma", "0.5"],
        &["phase-map", "--case", "b", "--n", "4", "--r", "1"],
        &["frobnicate"],
    ];
    for args in bad {
        let o = qwalk(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&o).trim().is_empty());
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn unwritable_output_is_reported_before_running() {
    let o = qwalk(&[DISPERSION, &["--out", "/nonexistent/dir/band.csv"]].concat());
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("cannot write /nonexistent/dir/band.csv"), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("error")).count(), 1);
}

#[test]
fn bad_thread_override_is_a_usage_error() {
    let o = qwalk_env(&["verify", "--bloch"], "QWALK_THREADS", "zero");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("QWALK_THREADS"));
}

#[test]
fn verify_passes_on_this_build_and_fails_impossible_gates() {
    let o = qwalk(&["verify", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env = parse(std::str::from_utf8(&o.stdout).unwrap(), Format::Json).unwrap();
    let Payload::Verify(v) = env.payload else { panic!("wrong payload") };
    assert!(v.passed);

    let o = qwalk(&["verify", "--relations", "--relation-tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    let env = parse(std::str::from_utf8(&o.stdout).unwrap(), Format::Json).unwrap();
    let Payload::Verify(v) = env.payload else { panic!("wrong payload") };
    assert!(!v.passed);
}

#[test]
fn numerical_failures_exit_two_and_echo_the_seed() {
    let source = Box::new(WalkError::NonConvergence { iterations: 10, converged: 1, dim: 4, partial: vec![] });
    let e = CliError::from_walk(WalkError::Realization { index: 3, seed: 0xdead_beef, source }, None);
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains(&0xdead_beef_u64.to_string()));
    assert_eq!(CliError::from_walk(WalkError::Singular, Some(5)).exit_code(), 2);
    assert_eq!(CliError::from_walk(WalkError::UnsupportedCase('B'), None).exit_code(), 1);
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let o = qwalk(&[flag]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
}
