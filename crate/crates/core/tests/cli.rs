use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use singular_rd::radial::io::read_snapshots;
use singular_rd::verify::report::SUMMARY_HEADER;

const BIN: &str = env!("CARGO_BIN_EXE_singular-rd");

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.toml");
    fs::write(&path, config).unwrap();
    Command::new(BIN)
        .arg("--config")
        .arg(&path)
        .arg("--output")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("SINGULAR_RD_OUTPUT")
        .output()
        .unwrap()
}

/// The single run directory under `out`.
fn run_dir(dir: &Path, command: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir.join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with(&format!("{command}-")))
        .collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.pop().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn default_suite_passes_with_one_row_per_check() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "command = \"suite\"\n", &["--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let dir = run_dir(tmp.path(), "suite");
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], SUMMARY_HEADER);
    assert_eq!(lines.len(), 1 + 16);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("pass")));
    assert!(dir.join("report.txt").exists());
}

#[test]
fn simulate_with_zero_end_time_writes_single_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "command = \"simulate\"\n[simulate]\nt_end = 0.0\ncells = 16\n", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = run_dir(tmp.path(), "simulate");
    let csv = fs::read_to_string(dir.join("snapshots.csv")).unwrap();
    let fields = read_snapshots(csv.as_bytes(), 3).unwrap();
    assert_eq!(fields.len(), 1);
    assert_eq!(fields[0].values, vec![1.0; 17]);
    assert!(dir.join("report.txt").exists() && dir.join("summary.csv").exists());
}

#[test]
fn simulate_snapshots_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "command = \"simulate\"\n[simulate]\nt_end = 0.2\ncells = 20\ninitial = \"lorentzian\"\nboundary = \"dirichlet\"\n";
    let out = run(tmp.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(run_dir(tmp.path(), "simulate").join("snapshots.csv")).unwrap();
    let fields = read_snapshots(csv.as_bytes(), 3).unwrap();
    assert_eq!(fields.len(), 11);
    let mut again = Vec::new();
    singular_rd::radial::io::write_snapshots(&mut again, &fields).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), csv);
}

#[test]
fn envelope_with_zero_tolerance_is_a_verification_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "command = \"envelope\"\n[envelope]\ntolerance = 0.0\n[envelope.resolution]\ncells = 100\nt_end = 0.2\n";
    let out = run(tmp.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(4), "{}", stdout(&out));
    let report = fs::read_to_string(run_dir(tmp.path(), "envelope").join("report.txt")).unwrap();
    assert!(report.contains("verdict = fail"));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), "", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let out = run(tmp.path(), "command = \"cone\"\n[cone]\namp = 1.0\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("((1+nu)/(2n))^(1/(1+nu))"));

    let out = run(tmp.path(), "command = \"envelope\"\n", &["--tolerance-scale", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn decay_window_past_horizon_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "command = \"decay\"\n[decay.resolution]\ncells = 50\nt_end = 2.0\n";
    assert_eq!(run(tmp.path(), cfg, &[]).status.code(), Some(2));
}

#[test]
fn envelope_output_echoes_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "command = \"envelope\"\n[envelope]\nnu = 1.0\nn = 3\nalpha1 = 0.5\neps = 0.5\n[envelope.resolution]\ncells = 100\nt_end = 0.2\n";
    let out = run(tmp.path(), cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("A1 = 1, A2 = 1, b1 = 2, b2 = 6"));
    let report = fs::read_to_string(run_dir(tmp.path(), "envelope").join("report.txt")).unwrap();
    assert!(report.contains("b2 = 6.0000000000000000e0"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = "command = \"suite\"\n[suite]\nchecks = [\"compare\", \"fd-check\", \"envelope\"]\n[compare]\npairs = 3\n[compare.resolution]\ncells = 60\nradius = 5.0\nt_end = 0.2\n[envelope.resolution]\ncells = 60\nradius = 5.0\nt_end = 0.2\n[fd-check]\nsamples = 100\n";
    let read_all = |seed: &str, jobs: &str, extra: &[&str]| {
        let tmp = tempfile::tempdir().unwrap();
        let mut args = vec!["--no-timing", "--seed", seed, "--jobs", jobs];
        args.extend_from_slice(extra);
        let out = run(tmp.path(), cfg, &args);
        assert_eq!(out.status.code(), Some(0));
        let dir = run_dir(tmp.path(), "suite");
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        let mut stack = vec![dir.clone()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    let rel = p.strip_prefix(tmp.path()).unwrap().to_string_lossy().into_owned();
                    files.push((rel, fs::read(&p).unwrap()));
                }
            }
        }
        files.sort();
        files
    };
    let a = read_all("7", "1", &[]);
    let b = read_all("7", "4", &[]);
    let c = read_all("7", "2", &["--sequential"]);
    assert!(a.len() >= 3 + 7);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = read_all("8", "2", &[]);
    assert_ne!(a.iter().map(|f| &f.0).collect::<Vec<_>>(), d.iter().map(|f| &f.0).collect::<Vec<_>>());
}

#[test]
fn output_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.toml");
    fs::write(&path, "command = \"fd-check\"\n[fd-check]\nsamples = 20\nfamilies = [\"cone\"]\n").unwrap();
    let target = tmp.path().join("env-out");
    let out = Command::new(BIN)
        .arg("--config")
        .arg(&path)
        .env("SINGULAR_RD_OUTPUT", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let entries: Vec<_> = fs::read_dir(&target).unwrap().collect();
    assert_eq!(entries.len(), 1);
}
