//! End-to-end tests of the `psewer` binary: exit codes, file emission and
//! byte determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_psewer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_scenario(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        "label = \"small\"\nseed = 3\n\
         [sim]\nn_units = 4\nhorizon_days = 1\ndt_s = 30\n",
    )
    .unwrap();
    path
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let o = run(&[
            "simulate",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read_dir_sorted(&out_a);
    let b = read_dir_sorted(&out_b);
    assert_eq!(
        a.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        vec![
            "aggregate.csv",
            "events.csv",
            "learning.csv",
            "learning.svg",
            "moving_sums.svg",
            "summary.csv"
        ]
    );
    for ((name_a, bytes_a), (_, bytes_b)) in a.iter().zip(&b) {
        assert_eq!(bytes_a, bytes_b, "{name_a} differs between invocations");
    }
}

#[test]
fn experiment_is_byte_deterministic_and_compare_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let o = run(&[
            "experiment",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let bytes_a = std::fs::read(out_a.join("comparison.csv")).unwrap();
    let bytes_b = std::fs::read(out_b.join("comparison.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);

    // compare: a directory against an equal one exits 0...
    let o = run(&["compare", out_a.to_str().unwrap(), out_b.to_str().unwrap()]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("equal within 1e-9"), "got: {stdout}");

    // ...a different seed exits 3 with per-row deltas...
    let out_c = dir.path().join("c");
    let o = run(&[
        "experiment",
        scenario.to_str().unwrap(),
        "--out",
        out_c.to_str().unwrap(),
        "--seed",
        "99",
        "--quiet",
    ]);
    assert!(o.status.success());
    let o = run(&["compare", out_a.to_str().unwrap(), out_c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("std differs"));

    // ...and a tampered file is a parse error naming the line.
    let tampered = std::fs::read_to_string(out_b.join("comparison.csv"))
        .unwrap()
        .replacen("AB,", "AB,not-a-number-", 1);
    std::fs::write(out_b.join("comparison.csv"), tampered).unwrap();
    let o = run(&["compare", out_a.to_str().unwrap(), out_b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3"));
}

#[test]
fn validation_errors_exit_1_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "seed = 1\n[control]\nslot_len_s = 7000\n").unwrap();
    let o = run(&["simulate", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("slot_len"));
}

#[test]
fn missing_scenario_exits_2() {
    let o = run(&["simulate", "/nonexistent/scenario.toml", "--quiet"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_comparison_dir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "compare",
        dir.path().to_str().unwrap(),
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn module_override_drops_emergent_events() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = dir.path().join("abd");
    let o = run(&[
        "simulate",
        scenario.to_str().unwrap(),
        "--override",
        "control.enabled=ABD",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let events = std::fs::read_to_string(out.join("events.csv")).unwrap();
    assert!(!events.contains("EmergentSlot"));
    // Learning is active: the baseline offsets are recorded.
    let learning = std::fs::read_to_string(out.join("learning.csv")).unwrap();
    assert!(learning.lines().count() > 4);
}

#[test]
fn unknown_scenario_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.toml");
    std::fs::write(&path, "seed = 1\n[tank]\ncapacty_m3 = 2.0\n").unwrap();
    let o = run(&["simulate", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacty_m3"));
}
