//! One test per acceptance criterion. Each prints a PASS/FAIL line per check
//! and fails if any check fails. Tolerances are pinned in `naqc::verify`.
//!
//! Run with `cargo test -p naqc --test acceptance -- --nocapture` to see the
//! report.

use std::sync::OnceLock;

use naqc::verify::{Check, Suite, VerifyOptions};

fn suite(s: Suite) -> &'static [Check] {
    static CACHE: [OnceLock<Vec<Check>>; Suite::ALL.len()] = [const { OnceLock::new() }; Suite::ALL.len()];
    let slot = Suite::ALL.iter().position(|&x| x == s).unwrap();
    CACHE[slot].get_or_init(|| s.run(&VerifyOptions::default()))
}

fn report<'a>(criterion: u8, checks: impl IntoIterator<Item = &'a Check>) {
    let checks: Vec<&Check> = checks.into_iter().filter(|c| c.criterion == criterion).collect();
    assert!(!checks.is_empty(), "criterion {criterion} has no checks");
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    assert!(failed.is_empty(), "criterion {criterion} failed: {failed:?}");
}

#[test]
fn criterion_1_closed_form_agreement() {
    report(1, suite(Suite::ClosedForm));
}

#[test]
fn criterion_2_thresholds() {
    report(2, suite(Suite::Thresholds));
}

#[test]
fn criterion_3_symmetric_family_maxima() {
    report(3, suite(Suite::Maxima));
}

#[test]
fn criterion_4_critical_v0() {
    report(4, suite(Suite::Critical));
}

#[test]
fn criterion_5_surface_transition_and_line_maximum() {
    report(5, suite(Suite::Geometry).iter().filter(|c| c.id != "geometry.fg"));
}

#[test]
fn criterion_5_fg_no_intersection() {
    report(5, suite(Suite::Geometry).iter().filter(|c| c.id == "geometry.fg"));
}

#[test]
fn criterion_6_general_states() {
    report(6, suite(Suite::RotatedStates));
}

#[test]
fn criterion_7_hierarchy_diagonal_t() {
    report(7, suite(Suite::HierarchyDiagonal));
}

#[test]
fn criterion_7_hierarchy_random_states() {
    report(7, suite(Suite::HierarchyRandom));
}

#[test]
fn criterion_8_properties() {
    report(8, suite(Suite::Convexity).iter().chain(suite(Suite::Properties)));
}

#[test]
fn criterion_9_quantifier_curve_and_fidelity() {
    report(9, suite(Suite::BellMixture).iter().chain(suite(Suite::HierarchyDiagonal)).chain(suite(Suite::HierarchyRandom)));
}
