//! One line per acceptance criterion, at the published tolerances.

use controlled_echo::cli::verify::{run_criterion, VerifyContext};

#[test]
fn acceptance_criteria() {
    let mut ctx = VerifyContext::default();
    let mut failed = Vec::new();
    for id in 1..=10 {
        let outcome = run_criterion(id, &mut ctx).unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
