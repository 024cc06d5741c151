use std::time::Instant;

use rellich_core::fields::catalog;
use rellich_core::identities::{check_pointwise, POINTWISE_TOLERANCE};
use rellich_core::operators::pointwise::POINTWISE_IDENTITIES;

#[test]
fn catalog_passes_every_pointwise_identity() {
    let start = Instant::now();
    for n in 5..=9 {
        for f in catalog(n).unwrap() {
            let reports = check_pointwise(&f, 1000, 11).unwrap();
            assert_eq!(reports.len(), POINTWISE_IDENTITIES.len());
            for r in reports {
                assert!(
                    r.pass && r.rel_residual <= POINTWISE_TOLERANCE,
                    "{} on {} (n = {n}): {:e}",
                    r.name,
                    f.id(),
                    r.rel_residual
                );
            }
        }
    }
    eprintln!("pointwise sweep: {:?}", start.elapsed());
}

#[test]
fn pointwise_reports_are_seed_deterministic() {
    let f = &catalog(6).unwrap()[5];
    let a = check_pointwise(f, 50, 3).unwrap();
    let b = check_pointwise(f, 50, 3).unwrap();
    assert_eq!(a, b);
}
