//! One line per acceptance criterion, written straight to stderr so it
//! shows without `--nocapture`.

use std::io::Write;

use nonstatcov::cli_harness::checks::{run_check, CheckContext};
use nonstatcov::cli_harness::reference_config;

fn check(id: u8) {
    let cfg = reference_config("reference_vma_verify_all").unwrap();
    let ctx = CheckContext {
        reference: cfg.model,
        seed: cfg.seed,
    };
    let o = run_check(id, &ctx).unwrap();
    let mut text = format!("{}\n", o.line());
    for n in &o.notes {
        text += &format!("    note: {n}\n");
    }
    text += &format!("    runtime {:.2} s\n", o.runtime_s);
    std::io::stderr().lock().write_all(text.as_bytes()).unwrap();
    assert!(o.pass(), "{}", o.line());
}

#[test]
fn criterion_01_inverse_decay() {
    check(1);
}

#[test]
fn criterion_02_banded_inverse_soundness() {
    check(2);
}

#[test]
fn criterion_03_neumann_certificate() {
    check(3);
}

#[test]
fn criterion_04_ar1_analytic_oracle() {
    check(4);
}

#[test]
fn criterion_05_baxter_gaps() {
    check(5);
}

#[test]
fn criterion_06_smoothness_transfer() {
    check(6);
}

#[test]
fn criterion_07_partial_covariance_oracle() {
    check(7);
}

#[test]
fn criterion_08_coherence_consistency() {
    check(8);
}

#[test]
fn criterion_09_eigenvalue_sandwich() {
    check(9);
}

#[test]
fn criterion_10_physical_dependence() {
    check(10);
}

#[test]
fn criterion_11_utility_lemmas() {
    check(11);
}

#[test]
fn criterion_12_determinism() {
    check(12);
}
