//! Operators checked against central differences of the field values.

use proptest::prelude::*;
use rellich_core::fields::{catalog, ScalarField};
use rellich_core::operators::{Operator, OperatorExpr};
use rellich_core::point::Point;

const H: f64 = 5e-4;

/// Fourth-order first and second derivatives of t ↦ g(t) at 0.
fn d12(g: impl Fn(f64) -> f64) -> (f64, f64) {
    let (m2, m1, z, p1, p2) = (g(-2.0 * H), g(-H), g(0.0), g(H), g(2.0 * H));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * H);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * H * H);
    (d1, d2)
}

fn value(f: &ScalarField, x: &[f64]) -> f64 {
    f.value(&Point::new(x).unwrap()).unwrap()
}

fn along(f: &ScalarField, x: &[f64], v: &[f64], t: f64) -> f64 {
    let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
    value(f, &y)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The operator applied by differences only.
fn fd(expr: &OperatorExpr, f: &ScalarField, x: &[f64]) -> f64 {
    let n = x.len();
    let r = norm(x);
    let xhat: Vec<f64> = x.iter().map(|v| v / r).collect();
    let radial = |w: f64| d12(|t| (r + t).powf(w) * along(f, x, &xhat, t));
    match expr {
        OperatorExpr::RadialD1 => radial(0.0).0,
        OperatorExpr::RadialD2 => radial(0.0).1,
        OperatorExpr::BesselA => {
            let (d1, d2) = radial(0.0);
            d2 + (n as f64 - 1.0) / r * d1
        }
        OperatorExpr::Laplacian => (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                d12(|t| along(f, x, &e, t)).1
            })
            .sum(),
        OperatorExpr::SphericalL(j) => {
            let mut e = vec![0.0; n];
            e[*j] = 1.0;
            d12(|t| along(f, x, &e, t)).0 - xhat[*j] * radial(0.0).0
        }
        OperatorExpr::WeightedChain { alpha, beta } => r.powf(*alpha) * radial(*beta).0,
        OperatorExpr::WeightedChain2 { alpha, beta, gamma } => {
            let (d1, d2) = radial(*gamma);
            r.powf(*alpha) * (beta * r.powf(beta - 1.0) * d1 + r.powf(*beta) * d2)
        }
        other => panic!("no difference formula for {other:?}"),
    }
}

fn operators(n: usize) -> Vec<OperatorExpr> {
    let [_, r1b, r1c] = OperatorExpr::rellich_r1_forms(n);
    let [_, r2b] = OperatorExpr::rellich_r2_forms(n);
    vec![
        OperatorExpr::RadialD1,
        OperatorExpr::RadialD2,
        OperatorExpr::BesselA,
        OperatorExpr::Laplacian,
        OperatorExpr::SphericalL(0),
        OperatorExpr::SphericalL(n - 1),
        OperatorExpr::hardy_weighted(n),
        OperatorExpr::bessel_divergence(n),
        r1b,
        r1c,
        r2b,
    ]
}

fn point(f: &ScalarField, radius: f64, dir: &[f64]) -> Vec<f64> {
    let u: Vec<f64> = dir.iter().map(|v| v / norm(dir)).collect();
    match f.support_ball() {
        Some((c, rho)) => c.iter().zip(&u).map(|(c, u)| c + 0.6 * rho * u).collect(),
        None => u.iter().map(|v| radius * v).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_agree_with_differences(
        n in 5usize..=7,
        which in 1usize..8,
        radius in 0.4f64..2.0,
        dir in proptest::collection::vec(-1.0f64..1.0, 7),
    ) {
        let dir = &dir[..n];
        prop_assume!(norm(dir) > 0.1);
        let f = &catalog(n).unwrap()[which];
        let x = point(f, radius, dir);
        let p = Point::new(&x).unwrap();
        for expr in operators(n) {
            let op = Operator::new(n, expr.clone()).unwrap();
            let exact = op.apply(f, &p).unwrap().re;
            let approx = fd(&expr, f, &x);
            prop_assert!(
                (exact - approx).abs() <= 1e-6 * (1.0 + exact.abs()),
                "{expr:?} on {} at {x:?}: jet {exact}, differences {approx}",
                f.id()
            );
        }
    }
}
