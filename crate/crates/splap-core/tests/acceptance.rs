//! The acceptance gate as a test target: runs all fourteen criteria at the
//! contractual tolerances and prints one machine-readable line per criterion.
//! Run with `cargo test --test acceptance -- --nocapture` to see every line.

use splap_core::acceptance::{format_line, run_all, DEFAULT_SEED};

#[test]
fn acceptance_suite_passes_at_contract_tolerances() {
    let results = run_all(1.0, DEFAULT_SEED);
    let mut failures = Vec::new();
    for r in &results {
        let line = format_line(r);
        println!("{line}");
        if !r.pass {
            failures.push(line);
        }
    }
    assert_eq!(results.len(), 14);
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
