//! Runs every reference criterion and prints one PASS/FAIL line each.

use sggraph::validation::{run_criterion, CheckResult, CRITERIA, DEFAULT_SEED};

fn report(id: u32) -> Vec<CheckResult> {
    let results = run_criterion(id, DEFAULT_SEED);
    for r in &results {
        println!("{}", r.line());
    }
    results
}

fn assert_primary(id: u32) {
    let results = report(id);
    let primary = &results[0];
    assert!(primary.passed, "{}", primary.line());
}

#[test]
fn criterion_01_independent_oracle() {
    assert_primary(1);
}

#[test]
fn criterion_02_dependent_oracle() {
    assert_primary(2);
}

#[test]
fn criterion_03_forward_vs_exact() {
    assert_primary(3);
}

#[test]
fn criterion_04_detailed_balance() {
    assert_primary(4);
}

#[test]
fn criterion_05_dominance() {
    assert_primary(5);
}

#[test]
fn criterion_06_free_process_law() {
    assert_primary(6);
}

#[test]
fn criterion_07_constants() {
    assert_primary(7);
}

#[test]
fn criterion_08_clan_tails() {
    assert_primary(8);
}

#[test]
fn criterion_09_marginal_bounds() {
    assert_primary(9);
}

#[test]
fn criterion_10_clt() {
    assert_primary(10);
}

#[test]
fn criterion_11_determinism() {
    assert_primary(11);
}

#[test]
fn every_criterion_has_a_test() {
    assert_eq!(CRITERIA.len(), 11);
    for (i, (id, _)) in CRITERIA.iter().enumerate() {
        assert_eq!(*id as usize, i + 1);
    }
}
