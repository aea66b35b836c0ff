//! End-to-end tests of the command-line surface: exit codes, output
//! formats, and the CSV schema round-trip into the accounting module.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_revtm"))
}

fn machines() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../machines")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_reports_determinism_and_reversibility() {
    let machine = machines().join("flip.tm");
    let out = run(&["check", machine.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("deterministic: yes"));
}

#[test]
fn check_lists_overlapping_pairs() {
    let machine = machines().join("zero.tm");
    let out = run(&["check", machine.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "deterministic, so exit 0");
    let text = stdout(&out);
    assert!(text.contains("reversible: no"));
    assert!(text.contains("range overlap"));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["check", "no-such-machine.tm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_error_reports_line_number_and_exits_2() {
    let dir = std::env::temp_dir().join("revtm-cli-test-parse");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.tm");
    std::fs::write(&path, "states a\nstart a\nhalt a\nalphabet 0\nblank 0\nspace 2\nrule a 7 -> write 0 a\n").unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 7"));
}

#[test]
fn simulate_b73_prints_the_pair() {
    let machine = machines().join("zero.tm");
    let out = run(&["simulate", machine.to_str().unwrap(), "11", "--engine", "b73"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("pair: <11, 00>"), "{text}");
    assert!(text.contains("erased_bits=0"));
}

#[test]
fn simulate_hybrid_reports_the_bridge_count() {
    let machine = machines().join("zero.tm");
    let out = run(&[
        "simulate",
        machine.to_str().unwrap(),
        "11",
        "--engine",
        "hybrid",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("bridges=9"));
}

#[test]
fn negative_k_is_a_usage_error() {
    let machine = machines().join("zero.tm");
    let out = run(&[
        "simulate",
        machine.to_str().unwrap(),
        "11",
        "--engine",
        "hybrid",
        "--k",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_emits_one_row_per_input_and_k_in_order() {
    let machine = machines().join("zero.tm");
    let out = run(&[
        "sweep",
        machine.to_str().unwrap(),
        "--inputs",
        "11,1111",
        "--k-range",
        "0..2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 3, "header plus 2 inputs x 3 k");
    assert_eq!(lines[0], "engine,k,m,T,S,T_prime,S_prime,bridges,erased_bits");
    // k ascending within each input, inputs lexicographic.
    let ks: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ks, vec!["0", "1", "2", "0", "1", "2"]);
    // Deterministic output: a second run matches byte for byte.
    let again = run(&[
        "sweep",
        machine.to_str().unwrap(),
        "--inputs",
        "11,1111",
        "--k-range",
        "0..2",
    ]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn sweep_rows_feed_the_calibrator() {
    let machine = machines().join("zero.tm");
    let dir = std::env::temp_dir().join("revtm-cli-test-sweep");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("sweep.csv");
    let _ = std::fs::remove_file(&csv);
    let out = run(&[
        "sweep",
        machine.to_str().unwrap(),
        "--inputs",
        "1,11,111,1111",
        "--k-range",
        "1..3",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let points = revtm_core::accounting::TradeoffPoint::from_csv(&text).unwrap();
    assert_eq!(points.len(), 12);
    // The schema parses without transformation; S is constant per machine
    // here, so full calibration legitimately refuses.
    assert!(matches!(
        revtm_core::accounting::calibrate(&points),
        Err(revtm_core::accounting::CalibrationError::Unidentifiable("S"))
    ));
}

#[test]
fn empty_k_range_is_a_usage_error() {
    let machine = machines().join("zero.tm");
    let out = run(&[
        "sweep",
        machine.to_str().unwrap(),
        "--inputs",
        "11",
        "--k-range",
        "3..1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pebble_emit_writes_the_forty_move_strategy() {
    let dir = std::env::temp_dir().join("revtm-cli-test-pebble");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.txt");
    let out = run(&["pebble", "--n", "3", "--emit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let moves = text
        .lines()
        .filter(|l| l.starts_with('P') || l.starts_with('R') || l.starts_with('E'))
        .count();
    assert_eq!(moves, 40);
    assert!(text.starts_with("pebbles 3\nerasures 0\nboard 7\n"));

    // The emitted file replays cleanly.
    let replay = run(&["pebble", "--n", "3", "--replay", path.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert!(stdout(&replay).contains("moves: 40"));
    assert!(stdout(&replay).contains("max node: 7"));
}

#[test]
fn pebble_bfs_reports_the_max_node() {
    let out = run(&["pebble", "--n", "4", "--bfs"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max node 15"));
}

#[test]
fn pebble_bfs_guard_exits_3() {
    let out = run(&["pebble", "--n", "6", "--bfs"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn audit_passes_on_every_engine() {
    let machine = machines().join("zero.tm");
    for engine in ["b73", "lmt", "hybrid", "auto"] {
        let out = run(&[
            "audit",
            machine.to_str().unwrap(),
            "11",
            "--engine",
            engine,
            "--k",
            "1",
        ]);
        assert_eq!(out.status.code(), Some(0), "engine {engine}");
        assert!(stdout(&out).contains("audit ok"), "engine {engine}");
    }
}

#[test]
fn tradeoff_erasure_table_matches_the_formula() {
    let out = run(&["tradeoff", "--erasure-table", "5,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1,4,7,16,28"), "{text}");
    assert!(text.contains("2,3,15,12,60"), "{text}");
}

#[test]
fn simulate_trace_export_has_four_fields_per_line() {
    let machine = machines().join("flip.tm");
    let dir = std::env::temp_dir().join("revtm-cli-test-trace");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.txt");
    let out = run(&[
        "simulate",
        machine.to_str().unwrap(),
        "10",
        "--engine",
        "hybrid",
        "--k",
        "1",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.is_empty());
    assert!(text.lines().all(|l| l.split_whitespace().count() == 4));
}

#[test]
fn traverse_budget_env_var_is_honored() {
    let machine = machines().join("zero.tm");
    let out = bin()
        .args(["simulate", machine.to_str().unwrap(), "1111", "--engine", "lmt"])
        .env("REVSIM_TRAVERSE_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "zero budget trips the guard");
}
