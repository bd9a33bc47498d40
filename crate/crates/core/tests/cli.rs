use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stable-area"));
    c.env_remove("STABLE_AREA_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn eval_airy_at_zero() {
    let o = run(&["eval", "--fn", "phi", "--alpha", "2", "--x", "0", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = row[1].parse().unwrap();
    assert!((v - 0.355_028_053_887_817_2).abs() < 1e-15, "{out}");
    assert_eq!(row[3], "series");
}

#[test]
fn coeffs_exact_brownian_c1() {
    let o = run(&["coeffs", "--family", "c", "--alpha", "2", "--n", "1", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("1,") && last.ends_with(",5/48"), "{out}");
}

#[test]
fn timestamp_header_is_optional() {
    let with = stdout(&run(&["coeffs", "--family", "d", "--alpha", "1.5", "--n", "2"]));
    let without = stdout(&run(&["coeffs", "--family", "d", "--alpha", "1.5", "--n", "2", "--no-timestamp"]));
    assert!(with.starts_with("# generated"));
    assert_eq!(with.split_once('\n').unwrap().1, without);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["simulate", "--target", "meander", "--alpha", "1.5", "--n", "500", "--steps", "100", "--no-timestamp"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 501);
    let single = bin().args(args).env("STABLE_AREA_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, single.stdout);
    let other = run(&["simulate", "--target", "meander", "--alpha", "1.5", "--n", "500", "--steps", "100", "--no-timestamp", "--seed", "3"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    fs::write(&cfg, format!("# sample run\nalpha = 1.5\nn = 300\nsteps = 100\nseed = 11\ntimestamp = false\noutput = {}\n", out.display())).unwrap();
    let o = run(&["simulate", "--target", "excursion", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let from_file = fs::read_to_string(&out).unwrap();
    assert_eq!(from_file.lines().count(), 301);
    let direct = run(&["simulate", "--target", "excursion", "--alpha", "1.5", "--n", "300", "--steps", "100", "--seed", "11", "--no-timestamp"]);
    assert_eq!(stdout(&direct), from_file);
    let o = run(&["simulate", "--target", "excursion", "--config", cfg.to_str().unwrap(), "--n", "10", "--output", "-"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "alpha = 1.5\ncolour = blue\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "--fn", "phi", "--x", "1"],
        vec!["eval", "--fn", "phi", "--alpha", "2.5", "--x", "1"],
        vec!["invert", "--law", "ex", "--alpha", "1.5", "--s-grid", "1:0.5:3"],
        vec!["invert", "--law", "xx", "--alpha", "1.5", "--s-grid", "1"],
        vec!["invert", "--law", "ex", "--alpha", "1.5", "--s-grid", "1", "--nodes", "4"],
        vec!["coeffs", "--family", "c", "--alpha", "1.5"],
        vec!["transform", "--alpha", "1.5", "--lambda", "1"],
        vec!["eval", "--fn", "phi", "--config", cfg.to_str().unwrap(), "--x", "1"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = bin()
        .args(["eval", "--fn", "phi", "--alpha", "2", "--x", "0"])
        .env("STABLE_AREA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn numerical_failure_exits_3_with_origin() {
    let o = run(&["simulate", "--target", "conditioned", "--alpha", "1.5", "--n", "2000", "--steps", "100", "--x0", "1e-4"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[simulate]"));
}

#[test]
fn failed_validation_exits_1() {
    // 100 steps leave a grid bias far above the standard error of 10^5 samples
    let o = run(&["transform", "--law", "me", "--alpha", "2", "--lambda", "1", "--validate", "--n", "100000", "--steps", "100", "--no-timestamp"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    let o = run(&["transform", "--alpha", "1.5", "--z", "1", "--lambda", "0.5", "--mu", "1", "--validate", "--n", "4000", "--dt", "0.01", "--no-timestamp"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("z,lambda,mu,value,mc_mean,mc_stderr,z_score"));
}

#[test]
fn invert_emits_curve() {
    let o = run(&["invert", "--law", "up", "--alpha", "2", "--s-grid", "1:1:1", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.247_054).abs() < 1e-6, "{out}");
    assert!(row[2] < 1e-6);
}

#[test]
fn validate_quick_passes() {
    let o = run(&["validate", "--alpha", "1.5", "--quick", "--no-timestamp"]);
    let out = stdout(&o);
    assert_eq!(code(&o), 0, "{out}");
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(rows.len() >= 15);
    assert!(rows.iter().all(|r| r.ends_with(",pass")), "{out}");
}
