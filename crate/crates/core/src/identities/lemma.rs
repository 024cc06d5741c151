//! Four equivalent statements about a pair of vectors in a Hermitian space.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::report::{relative, Fingerprint, IdentityReport, Suite, TermValue};
use crate::error::Error;

/// Tolerance on each of the four statements.
pub const LEMMA_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTriple {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub c: f64,
}

impl HermitianTriple {
    pub fn new(u: Vec<Complex64>, v: Vec<Complex64>, c: f64) -> Result<Self, Error> {
        if u.is_empty() || u.len() != v.len() {
            return Err(Error::Invalid(format!(
                "u and v need a common positive length, got {} and {}",
                u.len(),
                v.len()
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Invalid(format!("c must be positive, got {c}")));
        }
        Ok(Self { u, v, c })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// (a|b) = Σ a_i conj(b_i)
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

fn axpy(a: &[Complex64], k: f64, b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

/// Takes a = ‖u‖² + c·Re(u|v) from the first statement and checks the
/// other three, plus the expansion of ‖cv‖² they all rest on.
pub fn check_abstract_lemma(t: &HermitianTriple) -> IdentityReport {
    let c = t.c;
    let uu = norm2(&t.u);
    let uv = inner(&t.u, &t.v).re;
    let a = uu + c * uv;

    let u_cv = axpy(&t.u, c, &t.v);
    let v_uc = axpy(&t.v, 1.0 / c, &t.u);
    let cv2 = c * c * norm2(&t.v);
    let u_cv2 = norm2(&u_cv);
    let v_uc2 = norm2(&v_uc);
    let vv = norm2(&t.v);
    let re_u_ucv = inner(&t.u, &u_cv).re;

    // (lhs, rhs, magnitudes entering the statement)
    let statements = [
        (re_u_ucv, a, vec![uu, c * uv, a]),
        (cv2, u_cv2 + uu - 2.0 * a, vec![cv2, u_cv2, uu, 2.0 * a]),
        (
            uu / (c * c),
            vv - v_uc2 + 2.0 * a / (c * c),
            vec![uu / (c * c), vv, v_uc2, 2.0 * a / (c * c)],
        ),
        (cv2, u_cv2 + uu - 2.0 * re_u_ucv, vec![cv2, u_cv2, uu, 2.0 * re_u_ucv]),
    ];
    let mut worst = (0.0, 0.0, 0.0);
    for (lhs, rhs, mags) in &statements {
        let scale = mags.iter().fold(lhs.abs().max(rhs.abs()), |m, x| m.max(x.abs()));
        let abs = (lhs - rhs).abs();
        let rel = relative(abs, scale);
        if rel >= worst.2 {
            worst = (abs, scale, rel);
        }
    }
    let term = |label: &str, value: f64| TermValue {
        label: label.to_string(),
        value,
        error: 0.0,
    };
    IdentityReport {
        suite: Suite::Lemma,
        name: "hermitian-lemma".into(),
        terms: vec![
            term("u_norm2", uu),
            term("re_uv", uv),
            term("a", a),
            term("cv_norm2", cv2),
            term("u_plus_cv_norm2", u_cv2),
            term("v_norm2", vv),
            term("v_plus_u_over_c_norm2", v_uc2),
        ],
        lhs: cv2,
        rhs: u_cv2 + uu - 2.0 * a,
        abs_residual: worst.0,
        rel_residual: worst.2,
        tolerance: LEMMA_TOLERANCE,
        pass: true,
        error_estimate: 0.0,
        fingerprint: Fingerprint {
            field: format!("hermitian:m={},c={}", t.dim(), c),
            n: t.dim(),
            quadrature: "algebra".into(),
            seed: None,
        },
        ratio: None,
        note: None,
    }
    .finish()
}

/// Seeded triples with m ∈ 1..=8, c ∈ (0, 10] and Gaussian entries.
pub fn random_triples(count: usize, seed: u64) -> Vec<HermitianTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, m: usize| -> Vec<Complex64> {
        (0..m)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect()
    };
    (0..count)
        .map(|_| {
            let m = rng.random_range(1..=8);
            let u = draw(&mut rng, m);
            let v = draw(&mut rng, m);
            let c = 10.0 * (1.0 - rng.random::<f64>());
            HermitianTriple { u, v, c }
        })
        .collect()
}

/// Lemma reports over `count` random triples, each tagged with the seed.
pub fn lemma_suite(count: usize, seed: u64) -> Vec<IdentityReport> {
    random_triples(count, seed)
        .iter()
        .map(|t| {
            let mut r = check_abstract_lemma(t);
            r.fingerprint.seed = Some(seed);
            r
        })
        .collect()
}
