// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::{Command, Output};

fn tickbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tickbench"))
        .args(args)
        .env_remove("TICKBENCH_THREADS")
        .output()
        .expect("run tickbench")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ladder_check_passes_and_perturbation_fails() {
    let ok = tickbench(&["ladder", "--d", "1..6", "--check"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let out = stdout(&ok);
    assert!(out.starts_with("d,R1,R2_over_2,R3_over_3\n"));
    assert_eq!(out.lines().count(), 7);

    let bad = tickbench(&["ladder", "--d", "1..6", "--check", "--perturb", "0.01"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(tickbench(&["ladder", "--d", "5..2"]).status.code(), Some(2));
    assert_eq!(tickbench(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(tickbench(&["ladder", "--d", "x"]).status.code(), Some(2));
    assert_eq!(tickbench(&["quantum-r", "--d", "4", "--sigma0", "-1"]).status.code(), Some(2));
}

#[test]
fn zero_samples_gives_header_only() {
    let o = tickbench(&["classical-sweep", "--d", "3", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sample,seed,R1,R1_canonical\n");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        let o = tickbench(&["classical-sweep", "--d", "4", "--samples", "200", "--seed", "5", "--threads", threads]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    assert_eq!(run("1"), run("3"));

    let dir1 = tempfile::tempdir().unwrap();
    let dir3 = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&dir1, "1"), (&dir3, "3")] {
        let o = tickbench(&[
            "mc-check",
            "--d",
            "3",
            "--trials",
            "3000",
            "--threads",
            threads,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read(dir1.path().join("mc.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(dir3.path().join("mc.csv")).unwrap());
}

#[test]
fn out_directory_receives_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = tickbench(&[
        "fig2a",
        "--d",
        "7",
        "--points",
        "21",
        "--check",
        "--svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("fig2a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    assert!(fs::read_to_string(dir.path().join("fig2a.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"d": [2, 3]}"#).unwrap();
    let o = tickbench(&["ladder", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);

    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(tickbench(&["ladder", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn optimize_emits_a_loadable_spec() {
    let dir = tempfile::tempdir().unwrap();
    let o = tickbench(&[
        "optimize",
        "--d",
        "2",
        "--family",
        "diag",
        "--state",
        "swp",
        "--budget",
        "400",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(matches!(o.status.code(), Some(0)), "{}", String::from_utf8_lossy(&o.stderr));
    let spec = dir.path().join("clock.json");
    assert!(dir.path().join("optimum.json").exists());
    let mc = tickbench(&[
        "mc-check",
        "--clock",
        "quantum",
        "--spec",
        spec.to_str().unwrap(),
        "--trials",
        "2000",
        "--check",
    ]);
    assert_eq!(mc.status.code(), Some(0), "{}", String::from_utf8_lossy(&mc.stderr));
}
