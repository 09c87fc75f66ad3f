//! One test per acceptance criterion; each prints a single PASS/FAIL line
//! followed by its individual checks.

use qoct::selftest;

fn run(id: u8) {
    let o = selftest::by_id(id).unwrap();
    println!("{o}");
    assert!(o.passed(), "{}", o.line());
}

#[test]
fn criterion_1_oracle_vs_closed_forms() {
    run(1);
}

#[test]
fn criterion_2_kernel_identity() {
    run(2);
}

#[test]
fn criterion_3_resolution_factor_two() {
    run(3);
}

#[test]
fn criterion_4_dispersion_cancellation() {
    run(4);
}

#[test]
fn criterion_5_reference_numbers() {
    run(5);
}

#[test]
fn criterion_6_pipeline_round_trip() {
    run(6);
}

#[test]
fn criterion_7_nondegenerate_layout() {
    run(7);
}

#[test]
fn criterion_8_normalization_and_limits() {
    run(8);
}
