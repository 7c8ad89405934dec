//! Acceptance suite: one PASS/FAIL line per criterion.

use concircular::selftest::{run_criterion, CriterionReport};

fn check(id: u8) -> CriterionReport {
    let report = run_criterion(id, 0);
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
    report
}

#[test]
fn criterion_1_charpoly_formulas() {
    check(1);
}

#[test]
fn criterion_2_e2_coordinate_table() {
    check(2);
}

#[test]
fn criterion_3_closed_form_metrics() {
    check(3);
}

#[test]
fn criterion_4_canonicalization_roundtrip() {
    check(4);
}

#[test]
fn criterion_5_warped_products() {
    check(5);
}

#[test]
fn criterion_6_calogero_moser() {
    check(6);
}

#[test]
fn criterion_7_enumeration_counts() {
    check(7);
}

#[test]
fn criterion_8_certificates() {
    check(8);
}

#[test]
fn criterion_9_jordan_limit() {
    check(9);
}
