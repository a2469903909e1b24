use std::io::Write;

use qshuffle::battery::{run_criterion, CRITERIA, DEFAULT_SEED};

// Written to the raw stderr handle so the lines survive output capture.
fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance_suite() {
    let pinned: [(u8, f64); 11] = [
        (1, 10.0),
        (2, 5.0),
        (3, 120.0),
        (4, 120.0),
        (5, 120.0),
        (6, 60.0),
        (7, 60.0),
        (8, 300.0),
        (9, 300.0),
        (10, 120.0),
        (11, 60.0),
    ];
    for ((id, limit), (cid, _, climit)) in pinned.iter().zip(CRITERIA) {
        assert_eq!((*id, *limit), (cid, climit), "time limit table drifted");
    }
    let mut failed = Vec::new();
    for (id, limit) in pinned {
        let r = run_criterion(id, DEFAULT_SEED);
        report(&r.line());
        if !r.passed || r.seconds >= limit {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
