mod common;

use std::process::{Command, Output};

use ihc::frontend::parse_problem;
use ihc::oracle::Counterexample;

fn ihc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihc")).args(args).env_remove("IHC_SOLVER").output().unwrap()
}

fn bench(name: &str) -> String {
    common::bench_path(name).to_string_lossy().into_owned()
}

fn last_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).lines().last().unwrap_or_default().to_string()
}

#[test]
fn solve_reports_sat_and_writes_a_replayable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("p.ihcp");
    let o = ihc(&["solve", &bench("mult_equiv.ihcs"), "--certificate", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(last_line(&o), "result: sat");
    let o = ihc(&["replay", cert.to_str().unwrap(), "--problem", &bench("mult_equiv.ihcs")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("replay: verified"));
    let o = ihc(&["replay", cert.to_str().unwrap(), "--problem", &bench("id02_mult_acc_zero.ihcs")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(last_line(&o), "result: unknown");
}

#[test]
fn solve_reports_unsat_with_a_valid_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let cex = dir.path().join("cex.txt");
    let path = bench("mult_equiv_mutated.ihcs");
    let o = ihc(&["solve", &path, "--cex", cex.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(last_line(&o), "result: unsat");
    let cex = Counterexample::parse(&std::fs::read_to_string(&cex).unwrap()).unwrap();
    let p = parse_problem(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(common::validate(&p, &cex));
}

#[test]
fn unknown_and_rejected_lemma_exit_codes() {
    let o = ihc(&["solve", &bench("mult_equiv.ihcs"), "--max-inductions", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(last_line(&o), "result: unknown");
    let o = ihc(&["solve", &bench("id07_mult_dist_right.ihcs")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(last_line(&o), "result: unknown");
}

#[test]
fn error_exit_codes() {
    assert_eq!(ihc(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(ihc(&["solve"]).status.code(), Some(4));
    let o = ihc(&["solve", "/nonexistent/problem.ihcs"]);
    assert_eq!(o.status.code(), Some(5));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ihcs");
    std::fs::write(&bad, "(clause (=> (P x) false))").unwrap();
    assert_eq!(ihc(&["solve", bad.to_str().unwrap()]).status.code(), Some(5));
    let o = ihc(&["--solver", "/nonexistent/z3", "solve", &bench("mult_equiv.ihcs")]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn oracle_and_lemma_commands() {
    let o = ihc(&["oracle", &bench("mult_equiv.ihcs"), "--bound", "1", "--iterations", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("P(1,1,1)"));
    assert!(out.contains("0 goal violation(s)"));
    let o = ihc(&["check-lemmas", &bench("id05_mult_comm.ihcs")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("lemma 0: proved"));
}
