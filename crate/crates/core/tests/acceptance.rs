//! End-to-end acceptance suite: one test per criterion, each printing its
//! pass/fail line. Run with `cargo test --release --test acceptance --
//! --nocapture` to see every line; the `all-acceptance` CLI subcommand
//! prints the same table.

use gausslab::acceptance::*;

const SEED: u64 = 20240817;

fn report(outcome: gausslab::Result<CriterionOutcome>) {
    let outcome = outcome.expect("criterion crashed");
    println!("{}", outcome.summary_line());
    assert!(
        outcome.passed,
        "criterion {} failed: {}",
        outcome.id,
        outcome.details.join("; ")
    );
}

#[test]
fn criterion_01() {
    report(criterion_01_strong_duality());
}

#[test]
fn criterion_02() {
    report(criterion_02_sign_degree_scaling());
}

#[test]
fn criterion_03() {
    report(criterion_03_relu_degrees());
}

#[test]
fn criterion_04() {
    report(criterion_04_sigmoid());
}

#[test]
fn criterion_05() {
    report(criterion_05_moment_matching(SEED));
}

#[test]
fn criterion_06() {
    report(criterion_06_ptf_separation(SEED));
}

#[test]
fn criterion_07() {
    report(criterion_07_frames(SEED));
}

#[test]
fn criterion_08() {
    report(criterion_08_correlation_lemma(SEED));
}

#[test]
fn criterion_09() {
    report(criterion_09_distinguisher(SEED));
}

#[test]
fn criterion_10() {
    report(criterion_10_gns(SEED));
}

#[test]
fn criterion_11() {
    report(criterion_11_structural(SEED));
}

#[test]
fn criterion_12() {
    report(criterion_12_circle(SEED));
}

#[test]
fn criterion_13() {
    report(criterion_13_csq(SEED));
}

#[test]
fn criterion_14() {
    report(criterion_14_property_suites(SEED));
}
