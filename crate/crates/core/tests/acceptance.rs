use std::io::Write;

use lagspec_core::acceptance::{all_passed, run_all};

#[test]
fn acceptance() {
    let outcomes = run_all(false);
    // Written to the raw handle so the report shows even when output is captured.
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(all_passed(&outcomes), "failed criteria: {failed:?}");
}
