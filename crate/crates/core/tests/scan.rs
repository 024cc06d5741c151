use rellich_core::identities::extremiser_scan;
use rellich_core::quadrature::QuadratureSettings;

/// For f = r^{−(n−4)/2} e^{−δ s²}, s = ln r, every norm is a Gaussian
/// moment in s. With K = n(n−4)/4 and the common factor ∫e^{−2δs²}ds
/// removed: ‖f/r²‖² → 1, ‖Af‖² → 1 + ((2K + 4)δ + 3δ²)/K², ‖R₂f‖² → δ.
fn oracle(n: usize, delta: f64) -> (f64, f64) {
    let nf = n as f64;
    let k = nf * (nf - 4.0) / 4.0;
    let rho2 = k * k / (k * k + (2.0 * k + 4.0) * delta + 3.0 * delta * delta);
    (rho2.sqrt(), delta / (k * k))
}

#[test]
fn scan_matches_the_moment_oracle() {
    let deltas = [0.5, 0.25, 0.1, 0.05];
    let table = extremiser_scan(&deltas, 5, &QuadratureSettings::default()).unwrap();
    assert!(table.pass());
    assert!(table.all_below_one && table.rho_increasing && table.share_decreasing);
    for row in &table.rows {
        let (rho, share) = oracle(5, row.delta);
        assert!((row.rho - rho).abs() < 1e-10, "{} vs {rho}", row.rho);
        assert!((row.share - share).abs() < 1e-10, "{} vs {share}", row.share);
        assert!((row.rho_laplacian - row.rho).abs() < 1e-10);
        assert!(row.rho < 1.0);
    }
    for row in &table.rows[2..] {
        assert!(row.rho_error <= 1e-8 && row.share_error <= 1e-8);
    }
    assert!(table.reports().iter().all(|r| r.pass));
}

#[test]
fn scan_in_dimension_seven() {
    let table = extremiser_scan(&[0.3, 0.1], 7, &QuadratureSettings::default()).unwrap();
    for row in &table.rows {
        let (rho, share) = oracle(7, row.delta);
        assert!((row.rho - rho).abs() < 1e-10);
        assert!((row.share - share).abs() < 1e-10);
    }
}

#[test]
fn bad_delta_lists_are_rejected() {
    let s = QuadratureSettings::default();
    assert!(extremiser_scan(&[0.1, 0.2], 5, &s).is_err());
    assert!(extremiser_scan(&[], 5, &s).is_err());
    assert!(extremiser_scan(&[0.5, -0.1], 5, &s).is_err());
    assert!(extremiser_scan(&[0.5], 4, &s).is_err());
}
