//! Acceptance suite: one test per verification criterion. Each test prints a
//! PASS/FAIL line with the measured values (visible with --nocapture; the
//! harness itself reports per-test status either way). The same checks back
//! the `swe-dgsem verify` subcommand.

use swe_dgsem::verify::{run_criterion, CriterionReport};

fn check(id: usize) {
    let CriterionReport {
        name,
        passed,
        detail,
        ..
    } = run_criterion(id).expect("criterion id in range");
    println!(
        "criterion {id:2} {name}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_sbp_identity_and_quadrature() {
    check(1);
}

#[test]
fn criterion_02_metric_identities() {
    check(2);
}

#[test]
fn criterion_03_free_stream_preservation() {
    check(3);
}

#[test]
fn criterion_04_well_balancedness() {
    check(4);
}

#[test]
fn criterion_05_conservation_flat_bottom() {
    check(5);
}

#[test]
fn criterion_06_conservation_discontinuous_bump() {
    check(6);
}

#[test]
fn criterion_07_spectral_convergence() {
    check(7);
}

#[test]
fn criterion_08_entropy_condition_suite() {
    check(8);
}

#[test]
fn criterion_09_telescoping_and_split_form() {
    check(9);
}

#[test]
fn criterion_10_semidiscrete_entropy_balance() {
    check(10);
}

#[test]
fn criterion_11_robustness_contrast() {
    check(11);
}
