//! Named, tolerance-checked reports for the Hardy and Rellich equalities,
//! the Laplacian decomposition, the integration-by-parts chains behind
//! them, the abstract lemma and the near-extremiser scan.
//!
//! Every integral check reads from a [`TermBatch`], so reports computed
//! from one batch share their term values exactly.

mod batch;
mod lemma;
mod report;
mod scan;

pub use batch::{Col, Combo, TermBatch};
pub use lemma::{check_abstract_lemma, lemma_suite, random_triples, HermitianTriple, LEMMA_TOLERANCE};
pub use report::{relative, Fingerprint, IdentityReport, Suite, TermValue};
pub use scan::{extremiser_scan, ScanRow, ScanTable, RESOLVED_ERROR};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, OperatorError};
use crate::fields::{Decay, ScalarField};
use crate::operators::pointwise::{pointwise_identity_suite, sample_points, POINTWISE_IDENTITIES};
use crate::point::Point;
use crate::quadrature::QuadratureSpec;
use report::{fingerprint, Equality};

/// Tolerance on relative pointwise residuals.
pub const POINTWISE_TOLERANCE: f64 = 1e-9;

/// Margin by which ρ² must stay below one.
pub const STRICTNESS_MARGIN: f64 = 2e-10;

fn require(b: &TermBatch, min: usize) -> Result<(), Error> {
    if b.dim() < min {
        return Err(OperatorError::Dimension { n: b.dim(), min }.into());
    }
    Ok(())
}

fn k_of(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 4.0) / 4.0
}

/// Both Hardy equalities: the conjugated remainder, then the expanded one.
pub fn check_hardy(b: &TermBatch) -> Result<Vec<IdentityReport>, Error> {
    require(b, 3)?;
    let nf = b.dim() as f64;
    let c = ((nf - 2.0) / 2.0).powi(2);
    let lhs = ("weighted_f_over_r", vec![(Col::FOverR, c)]);
    let d1 = ("radial_d1", vec![(Col::RadialD1, 1.0)]);
    let forms = [
        ("hardy-equality-conjugated", Col::HardyConjugated),
        ("hardy-equality-expanded", Col::HardyExpanded),
    ];
    Ok(forms
        .into_iter()
        .map(|(name, col)| {
            Equality {
                suite: Suite::Hardy,
                name,
                terms: vec![lhs.clone(), d1.clone(), ("remainder", vec![(col, 1.0)])],
                lhs: vec![(0, 1.0)],
                rhs: vec![(1, 1.0), (2, -1.0)],
            }
            .evaluate(b)
        })
        .collect())
}

/// The three spellings of the Rellich equality.
pub fn check_rellich_equalities(b: &TermBatch) -> Result<Vec<IdentityReport>, Error> {
    require(b, 5)?;
    let k = k_of(b.dim());
    let forms = [
        ("rellich-equality-expanded", Col::Bessel, Col::R1Expanded, Col::R2Expanded),
        ("rellich-equality-conjugated", Col::BesselDivergence, Col::R1Conjugated, Col::R2Conjugated),
        ("rellich-equality-cubic", Col::BesselDivergence, Col::R1Cubic, Col::R2Conjugated),
    ];
    Ok(forms
        .into_iter()
        .map(|(name, a, r1, r2)| {
            Equality {
                suite: Suite::Rellich,
                name,
                terms: vec![
                    ("weighted_f_over_r2", vec![(Col::FOverR2, k * k)]),
                    ("bessel", vec![(a, 1.0)]),
                    ("r1", vec![(r1, 1.0)]),
                    ("weighted_r2", vec![(r2, 2.0 * k)]),
                ],
                lhs: vec![(0, 1.0)],
                rhs: vec![(1, 1.0), (2, -1.0), (3, -1.0)],
            }
            .evaluate(b)
        })
        .collect())
}

/// The Laplacian decomposition with the expanded and the conjugated
/// angular remainder.
pub fn check_theorem2(b: &TermBatch) -> Result<Vec<IdentityReport>, Error> {
    require(b, 5)?;
    let k = k_of(b.dim());
    let forms = [
        ("laplacian-decomposition-expanded", Col::Bessel, Col::AngularHardyExpanded),
        ("laplacian-decomposition-conjugated", Col::BesselDivergence, Col::AngularHardyConjugated),
    ];
    Ok(forms
        .into_iter()
        .map(|(name, a, t)| {
            Equality {
                suite: Suite::Theorem2,
                name,
                terms: vec![
                    ("laplacian", vec![(Col::Laplacian, 1.0)]),
                    ("bessel", vec![(a, 1.0)]),
                    ("sum_l2", vec![(Col::SumL2, 1.0)]),
                    ("weighted_angular_over_r", vec![(Col::AngularOverR, 2.0 * k)]),
                    ("angular_remainder", vec![(t, 2.0)]),
                ],
                lhs: vec![(0, 1.0)],
                rhs: vec![(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)],
            }
            .evaluate(b)
        })
        .collect())
}

/// ‖Δf‖² − ‖Af‖² against the angular sum, with the sign of the gap checked.
pub fn check_corollary(b: &TermBatch) -> Result<IdentityReport, Error> {
    require(b, 5)?;
    let k = k_of(b.dim());
    let mut r = Equality {
        suite: Suite::Corollary,
        name: "bessel-gap",
        terms: vec![
            ("laplacian", vec![(Col::Laplacian, 1.0)]),
            ("bessel", vec![(Col::Bessel, 1.0)]),
            ("gap", vec![(Col::Laplacian, 1.0), (Col::Bessel, -1.0)]),
            (
                "angular_sum",
                vec![
                    (Col::SumL2, 1.0),
                    (Col::AngularOverR, 2.0 * k),
                    (Col::AngularHardyExpanded, 2.0),
                ],
            ),
        ],
        lhs: vec![(2, 1.0)],
        rhs: vec![(3, 1.0)],
    }
    .evaluate(b);
    let gap = r.lhs;
    let scale = r.terms[0].value.abs().max(r.terms[1].value.abs());
    if gap < -r.tolerance * scale {
        r.pass = false;
    }
    r.note = Some(if b.is_radial() {
        "radial field: equality case".into()
    } else {
        "gap equals the angular sum".into()
    });
    Ok(r)
}

/// Strict Rellich inequality with ρ = (n(n−4)/4)‖f/r²‖/‖Δf‖.
pub fn check_rellich_inequality(b: &TermBatch) -> Result<IdentityReport, Error> {
    require(b, 5)?;
    let k = k_of(b.dim());
    let lhs_c = [(Col::FOverR2, k * k)];
    let lhs = b.combination(&lhs_c);
    let rhs = b.get(Col::Laplacian);
    let bessel = b.get(Col::Bessel);
    let tv = |label: &str, e: crate::quadrature::Estimate| TermValue {
        label: label.into(),
        value: e.value,
        error: e.error,
    };
    let mut report = IdentityReport {
        suite: Suite::Inequality,
        name: "rellich-inequality".into(),
        terms: vec![
            tv("weighted_f_over_r2", lhs),
            tv("laplacian", rhs),
            tv("bessel", bessel),
        ],
        lhs: lhs.value,
        rhs: rhs.value,
        abs_residual: 0.0,
        rel_residual: 0.0,
        tolerance: 0.0,
        pass: true,
        error_estimate: 0.0,
        fingerprint: fingerprint(b),
        ratio: None,
        note: None,
    };
    if b.is_zero() {
        report.note = Some("vacuous: f = 0".into());
        return Ok(report);
    }
    if rhs.value <= 0.0 {
        return Err(Error::Inconsistent(format!(
            "‖Δf‖² = {} for a nonzero field {}",
            rhs.value,
            b.field_id()
        )));
    }
    let diff = b.combination(&[(Col::FOverR2, k * k), (Col::Laplacian, -1.0)]);
    let kerr = if b.is_monte_carlo() { 4.0 } else { 10.0 };
    let scale = lhs.value.abs().max(rhs.value);
    let margin = diff.value + kerr * diff.error + STRICTNESS_MARGIN * scale;
    report.abs_residual = margin.max(0.0);
    report.rel_residual = relative(report.abs_residual, scale);
    report.error_estimate = diff.error;
    report.ratio = Some((lhs.value / rhs.value).sqrt());
    report.note = Some("strictness shown on this field only; not a proof for all of H²".into());
    Ok(report.finish())
}

/// The integration-by-parts steps behind both theorems, one report each.
pub fn check_proof_chain(b: &TermBatch) -> Result<Vec<IdentityReport>, Error> {
    require(b, 5)?;
    let n = b.dim();
    let nf = n as f64;
    let k = k_of(n);
    let c = 1.0 / k;
    let eq = |name, terms, lhs, rhs| Equality {
        suite: Suite::ProofChain,
        name,
        terms,
        lhs,
        rhs,
    };
    let one = |col| vec![(col, 1.0)];
    let chain = vec![
        eq(
            "radial-integration-by-parts",
            vec![
                ("f_over_r2", one(Col::FOverR2)),
                ("weighted_f_d1_over_r3", vec![(Col::FD1OverR3, -2.0 / (nf - 4.0))]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ),
        eq(
            "second-integration-by-parts",
            vec![
                ("f_over_r2", one(Col::FOverR2)),
                ("weighted_d1_over_r", vec![(Col::D1OverR, 2.0 / ((nf - 3.0) * (nf - 4.0)))]),
                ("weighted_f_d2_over_r2", vec![(Col::FD2OverR2, 2.0 / ((nf - 3.0) * (nf - 4.0)))]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0)],
        ),
        eq(
            "quotient-expansion",
            vec![
                ("d1_over_r", one(Col::D1OverR)),
                ("quotient_d1", one(Col::QuotientD1)),
                ("two_quotient_cross", vec![(Col::QuotientCross, 2.0)]),
                ("f_over_r2", one(Col::FOverR2)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0), (3, 1.0)],
        ),
        eq(
            "hardy-for-quotient",
            vec![
                ("quotient_d1", one(Col::QuotientD1)),
                ("weighted_f_over_r2", vec![(Col::FOverR2, ((nf - 2.0) / 2.0).powi(2))]),
                ("r2", one(Col::R2Conjugated)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0)],
        ),
        eq(
            "quotient-cross-term",
            vec![
                ("two_quotient_cross", vec![(Col::QuotientCross, 2.0)]),
                ("weighted_f_over_r2", vec![(Col::FOverR2, -(nf - 2.0))]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ),
        eq(
            "first-order-remainder",
            vec![
                ("d1_over_r", one(Col::D1OverR)),
                ("weighted_f_over_r2", vec![(Col::FOverR2, ((nf - 4.0) / 2.0).powi(2))]),
                ("r2", one(Col::R2Conjugated)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0)],
        ),
        eq(
            "bessel-split",
            vec![
                ("f_d2_over_r2", one(Col::FD2OverR2)),
                ("f_bessel_over_r2", one(Col::FBesselOverR2)),
                ("weighted_f_d1_over_r3", vec![(Col::FD1OverR3, -(nf - 1.0))]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0)],
        ),
        eq(
            "weighted-radial-derivative",
            vec![
                ("f_d1_over_r3", one(Col::FD1OverR3)),
                ("weighted_f_over_r2", vec![(Col::FOverR2, -(nf - 4.0) / 2.0)]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ),
        eq(
            "rellich-core-identity",
            vec![
                ("weighted_f_over_r2", vec![(Col::FOverR2, k)]),
                ("neg_f_bessel_over_r2", vec![(Col::FBesselOverR2, -1.0)]),
                ("r2", one(Col::R2Conjugated)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, -1.0)],
        ),
        // u = f/r², v = A_div f, c = 1/K, a = −c‖R2‖², fourth statement.
        eq(
            "lemma-reconstruction",
            vec![
                ("u_over_c_norm2", vec![(Col::FOverR2, 1.0 / (c * c))]),
                ("v_norm2", one(Col::BesselDivergence)),
                ("v_plus_u_over_c_norm2", one(Col::LemmaSum)),
                ("two_a_over_c2", vec![(Col::R2Conjugated, -2.0 / c)]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, -1.0), (3, 1.0)],
        ),
        eq(
            "laplacian-expansion",
            vec![
                ("laplacian", one(Col::Laplacian)),
                ("bessel", one(Col::Bessel)),
                ("sum_l2", one(Col::SumL2)),
                ("two_bessel_sum_l2", vec![(Col::BesselSumL2, 2.0)]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0), (3, 1.0)],
        ),
        eq(
            "angular-exchange",
            vec![
                ("bessel_sum_l2", one(Col::BesselSumL2)),
                ("neg_angular_exchange", vec![(Col::AngularExchange, -1.0)]),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ),
        eq(
            "angular-radial-step",
            vec![
                ("neg_angular_exchange", vec![(Col::AngularExchange, -1.0)]),
                ("angular_radial_d1", one(Col::AngularRadialD1)),
                ("angular_over_r", one(Col::AngularOverR)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, -1.0)],
        ),
        eq(
            "angular-remainder",
            vec![
                ("neg_angular_exchange", vec![(Col::AngularExchange, -1.0)]),
                ("weighted_angular_over_r", vec![(Col::AngularOverR, k)]),
                ("angular_remainder", one(Col::AngularHardyConjugated)),
            ],
            vec![(0, 1.0)],
            vec![(1, 1.0), (2, 1.0)],
        ),
    ];
    Ok(chain.iter().map(|e| e.evaluate(b)).collect())
}

/// Every integral suite in `suites` on one batch, in [`Suite`] order.
pub fn batch_reports(b: &TermBatch, suites: &[Suite]) -> Result<Vec<IdentityReport>, Error> {
    let mut out = Vec::new();
    for s in Suite::ALL {
        if !suites.contains(&s) {
            continue;
        }
        match s {
            Suite::Hardy => out.extend(check_hardy(b)?),
            Suite::Rellich => out.extend(check_rellich_equalities(b)?),
            Suite::Theorem2 => out.extend(check_theorem2(b)?),
            Suite::Corollary => out.push(check_corollary(b)?),
            Suite::Inequality => out.push(check_rellich_inequality(b)?),
            Suite::ProofChain => out.extend(check_proof_chain(b)?),
            Suite::Lemma | Suite::Pointwise | Suite::Scan => {}
        }
    }
    Ok(out)
}

/// Convenience wrapper: one batch, then the requested suites.
pub fn check_field(f: &ScalarField, spec: &QuadratureSpec, suites: &[Suite]) -> Result<Vec<IdentityReport>, Error> {
    batch_reports(&TermBatch::compute(f, spec)?, suites)
}

/// Seeded sample points where `f` is not identically zero.
pub fn field_points(f: &ScalarField, count: usize, seed: u64) -> Result<Vec<Point>, Error> {
    let n = f.dim();
    if let Some((center, radius)) = f.support_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = sample_points(n, count, rng.random(), 1e-3 * radius, 0.95 * radius);
        return offsets
            .iter()
            .map(|o| {
                let x: Vec<f64> = o.coords().iter().zip(center).map(|(a, c)| a + c).collect();
                Point::new(&x).map_err(Error::from)
            })
            .collect();
    }
    let (lo, hi) = match f.decay() {
        Decay::Gaussian { sigma } => (0.05 * sigma, 5.0 * sigma),
        Decay::Compact { inner, outer } => (inner, outer),
        Decay::LogGaussian { delta } => {
            let s = 2.0 / delta.sqrt();
            ((-s).exp(), s.exp())
        }
        Decay::None => (0.1, 2.0),
    };
    Ok(sample_points(n, count, seed, lo, hi))
}

/// Pointwise identities at `count` seeded points; one report per identity
/// carrying the worst relative residual.
pub fn check_pointwise(f: &ScalarField, count: usize, seed: u64) -> Result<Vec<IdentityReport>, Error> {
    let points = field_points(f, count, seed)?;
    let mut worst = [(0.0f64, 0.0f64, 0.0f64); POINTWISE_IDENTITIES.len()];
    for p in &points {
        for (w, res) in worst.iter_mut().zip(pointwise_identity_suite(f, p)?) {
            let rel = res.relative();
            if rel > w.2 || (w.1 == 0.0 && res.scale > 0.0) {
                *w = (res.abs, res.scale, rel);
            }
        }
    }
    Ok(POINTWISE_IDENTITIES
        .iter()
        .zip(worst)
        .map(|(name, (abs, scale, rel))| {
            IdentityReport {
                suite: Suite::Pointwise,
                name: (*name).into(),
                terms: vec![
                    TermValue {
                        label: "max_abs_residual".into(),
                        value: abs,
                        error: 0.0,
                    },
                    TermValue {
                        label: "scale".into(),
                        value: scale,
                        error: 0.0,
                    },
                ],
                lhs: abs,
                rhs: 0.0,
                abs_residual: abs,
                rel_residual: rel,
                tolerance: POINTWISE_TOLERANCE,
                pass: true,
                error_estimate: 0.0,
                fingerprint: Fingerprint {
                    field: f.id(),
                    n: f.dim(),
                    quadrature: format!("points:{count}"),
                    seed: Some(seed),
                },
                ratio: None,
                note: None,
            }
            .finish()
        })
        .collect())
}
