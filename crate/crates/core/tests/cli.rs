use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonic-lift"))
        .args(args)
        .env_remove("HARMONIC_LIFT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn help_exits_zero_everywhere() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    for cmd in ["synth", "scores", "complete", "tune", "phase", "noise-sweep", "validate-basis"] {
        let out = run(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        assert!(stdout(&out).contains("Usage"));
    }
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["complete", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["complete", "--set", "no_such_key=3"]).status.code(), Some(1));
    assert_eq!(run(&["complete", "--config", "/nonexistent.toml"]).status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mix = dir.path().join("zero.mix");
    fs::write(&mix, "N 15\n0 0 1 0\n").unwrap();
    let out = run(&["scores", "--mixture", mix.to_str().unwrap(), "--n", "15", "--d", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_basis_prints_pass_lines() {
    let out = run(&["validate-basis", "--structure", "double-hankel", "--n", "59", "--d", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 4);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn complete_reports_error_and_success() {
    let out = run(&["complete", "--structure", "hankel", "--n", "59", "--d", "30", "--k", "2", "--m", "40", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let field = |name: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(name).map(|v| v.trim().to_string()))
            .unwrap()
    };
    assert!(field("rel_error").parse::<f64>().unwrap() <= 1e-3);
    assert_eq!(field("success"), "true");
}

#[test]
fn synth_prints_fixed_precision_samples() {
    let out = run(&["synth", "--n", "9", "--k", "2", "--seed", "3"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    for (i, l) in lines.iter().enumerate() {
        let f: Vec<&str> = l.split_whitespace().collect();
        assert_eq!(f[0], (i + 1).to_string());
        assert!(f[1..].iter().all(|v| v.split('.').nth(1).unwrap().len() == 6));
    }
    assert_eq!(stdout(&run(&["synth", "--n", "9", "--k", "2", "--seed", "3"])), text);
}

#[test]
fn flags_override_config_and_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 21\nk = 1\nseed = 4\n").unwrap();
    let out = run(&["synth", "--config", cfg.to_str().unwrap(), "--set", "n=13", "--n", "11"]);
    assert_eq!(stdout(&out).lines().count(), 11);
    let out = run(&["synth", "--config", cfg.to_str().unwrap(), "--set", "n=13"]);
    assert_eq!(stdout(&out).lines().count(), 13);
}

fn phase_to(dir: &Path, name: &str, extra: &[&str]) -> String {
    let dat = dir.join(name);
    let mut args = vec!["phase", "--out", dat.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(&dat).unwrap()
}

#[test]
fn phase_writes_mesh_sidecars_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let first = phase_to(
        dir.path(),
        "grid.dat",
        &["--set", "sample_counts=[50, 59]", "--set", "sparsity_levels=[1, 3]", "--trials", "2", "--seed", "9"],
    );
    assert_eq!(first.lines().next(), Some("M K C"));
    assert_eq!(first.lines().count(), 5);
    assert!(dir.path().join("grid.dat.meta.toml").exists());
    let echoed = dir.path().join("grid.dat.config.toml");
    assert!(echoed.exists());

    let second = phase_to(dir.path(), "again.dat", &["--config", echoed.to_str().unwrap()]);
    assert_eq!(first, second);
    assert_eq!(fs::read_to_string(dir.path().join("again.dat.config.toml")).unwrap(), fs::read_to_string(&echoed).unwrap());
}

#[test]
fn tune_and_noise_sweep_run() {
    let out = run(&["tune", "--n", "29", "--d", "15", "--k", "2", "--m", "14", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let table: toml::Table = toml::from_str(&stdout(&out)).unwrap();
    let base = table["baseline"].as_float().unwrap();
    let obj = table["objective"].as_float().unwrap();
    assert!(obj <= base + 1e-9);
    assert_eq!(table["left"].as_array().unwrap().len(), 15);

    let out = run(&["noise-sweep", "--n", "29", "--d", "15", "--k", "1", "--m", "20", "--trials", "2", "--set", "etas=[0.001, 0.01]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("eta error\n"));
    assert!(text.contains("# slope"));
}
