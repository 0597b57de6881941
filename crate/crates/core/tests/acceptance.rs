//! Acceptance gate: runs every certification suite at its pinned
//! parameters and prints one pass/fail line per criterion.
//!
//! The whole run stays well under the ten-minute budget in release mode
//! (`cargo test --release --test acceptance`); the debug profile builds
//! tests with opt-level 2 so the plain `cargo test` stays usable too.

use wittcalc_core::selftest::{run_by_name, SUITE_NAMES};

const SEED: u64 = 0x5eed_2024;

fn run(name: &str) {
    let t = std::time::Instant::now();
    let outcome = run_by_name(name, SEED).unwrap_or_else(|e| {
        println!("criterion {name}: FAIL — suite error: {e}");
        panic!("criterion {name} errored: {e}");
    });
    println!(
        "criterion {}: {} ({:.2?}) — {}",
        outcome.name,
        if outcome.passed { "PASS" } else { "FAIL" },
        t.elapsed(),
        outcome.details
    );
    assert!(
        outcome.passed,
        "criterion {name} failed: {}",
        outcome.details
    );
}

#[test]
fn criterion_01_witt_ring_certification() {
    run("witt-ring");
}

#[test]
fn criterion_02_homogeneous_equation() {
    run("lemma-homogeneous");
}

#[test]
fn criterion_03_inhomogeneous_equation() {
    run("lemma-inhomogeneous");
}

#[test]
fn criterion_04_determinant_functor() {
    run("det-functor");
}

#[test]
fn criterion_05_p_torsionfree() {
    run("p-torsionfree");
}

#[test]
fn criterion_06_divide_and_invert() {
    run("divide-invert");
}

#[test]
fn criterion_07_extend_adjugate() {
    run("extend-adjugate");
}

#[test]
fn criterion_08_deformation_theory() {
    run("deformation");
}

#[test]
fn criterion_09_moduli_counts() {
    run("moduli-counts");
}

#[test]
fn criterion_10_lifting_isomorphism() {
    run("lifting-isomorphism");
}

#[test]
fn suite_names_cover_all_criteria() {
    assert_eq!(SUITE_NAMES.len(), 10);
}
