//! Pointwise identities between radial and spherical derivatives.
//!
//! Each identity is evaluated by two routes that share no algebra: the
//! contraction atoms of [`Local`] on one side, and direct automatic
//! differentiation of weighted products (or a third-order pass with
//! `Jet2<Jet1<f64>>`) on the other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::local::Local;
use super::{Operator, OperatorExpr};
use crate::error::{Error, EvalError};
use crate::fields::{Family, ScalarField};
use crate::jet::{self, Jet1, Jet2, Scalar, MAX_DIM};
use crate::point::Point;

/// Names of the identities in [`pointwise_identity_suite`], in output order.
pub const POINTWISE_IDENTITIES: [&str; 10] = [
    "laplacian-decomposition",
    "spherical-orthogonality",
    "radial-commutation",
    "weight-commutation",
    "angular-momentum",
    "bessel-divergence",
    "rellich-r1-forms",
    "rellich-r2-forms",
    "hardy-remainder-forms",
    "bessel-tangential-exchange",
];

/// Exponents used for the weight-commutation check.
pub const COMMUTATION_WEIGHTS: [f64; 2] = [-3.7, 1.5];

/// |lhs − rhs| of one identity at one point, with the magnitude it is
/// measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointwiseResidual {
    pub identity: &'static str,
    pub abs: f64,
    pub scale: f64,
}

impl PointwiseResidual {
    pub fn relative(&self) -> f64 {
        if self.abs == 0.0 {
            0.0
        } else {
            self.abs / self.scale
        }
    }
}

/// Residual bookkeeping for one identity: the largest gap among several
/// spellings, scaled by the largest term that entered.
struct Tally {
    abs: f64,
    scale: f64,
}

impl Tally {
    fn new(reference: f64) -> Self {
        Self {
            abs: 0.0,
            scale: reference,
        }
    }

    fn terms(&mut self, terms: &[f64]) {
        for t in terms {
            self.scale = self.scale.max(t.abs());
        }
    }

    fn agree(&mut self, values: &[f64]) {
        self.terms(values);
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                self.abs = self.abs.max((a - b).abs());
            }
        }
    }
}

/// r^α ∂_r(r^β u) from a first-order jet of u.
pub(crate) fn chain1(coords: &[Jet1<f64>], u: Jet1<f64>, alpha: f64, beta: f64) -> Result<f64, EvalError> {
    let r = jet::norm(coords)?;
    let w = u * r.powf(beta)?;
    let mut d = 0.0;
    for (i, c) in coords.iter().enumerate() {
        d += c.value / r.value * w.partial(i);
    }
    Ok(r.value.powf(alpha) * d)
}

/// r^α ∂_r(r^β ∂_r(r^γ u)) from a second-order jet of u.
pub(crate) fn chain2(x: &[f64], u: Jet2<f64>, alpha: f64, beta: f64, gamma: f64) -> Result<f64, EvalError> {
    let c2 = jet::jet2_coordinates(x);
    let w = u * jet::norm(&c2)?.powf(gamma)?;
    let c1 = jet::jet1_coordinates(x);
    let r1 = jet::norm(&c1)?;
    let inv = r1.recip()?;
    let mut dw = Jet1::constant_jet(0.0);
    for (k, c) in c1.iter().enumerate() {
        dw = dw + *c * inv * w.partial_jet(k);
    }
    chain1(&c1, dw, alpha, beta)
}

/// All entries of the derivative tensors up to order three at one point,
/// for a scale reference.
fn magnitude(r: f64, j3: &Jet2<Jet1<f64>>) -> f64 {
    let mut m = j3.value.value.abs();
    let n = j3.value.dim();
    for i in 0..n {
        m = m.max(r * j3.partial(i).value.abs());
        for k in 0..n {
            let h = j3.hessian(i, k);
            m = m.max(r * r * h.value.abs());
            for l in 0..n {
                m = m.max(r * r * r * h.partial(l).abs());
            }
        }
    }
    m
}

fn part_suite(family: &Family, x: &Point) -> Result<[(f64, f64); 10], Error> {
    let n = x.dim();
    let nf = n as f64;
    let xs = x.coords();
    let r = x.r();
    let xhat = x.direction();

    let j2 = jet::ensure_finite(family.eval(&jet::jet2_coordinates(xs))?)?;
    let local = Local::new(xs, j2)?;
    let at = local.atoms(true)?;

    // Third-order pass: every Local quantity carries its own gradient.
    let c3: Vec<Jet1<f64>> = jet::jet1_coordinates(xs);
    let j3 = jet::ensure_finite(family.eval(&jet::jet2_coordinates(&c3))?)?;
    let local3 = Local::new(&c3, j3)?;
    let at3 = local3.atoms(true)?;

    let m = magnitude(r, &j3);
    let reference = |k: i32| m / r.powi(k);
    let mut out = [(0.0, 0.0); 10];

    // Δf = ∂_r²f + (n−1)/r ∂_rf + Σ L_j²f
    {
        let mut t = Tally::new(reference(2));
        let radial = (nf - 1.0) / r * at.d1;
        t.terms(&[at.lap, at.d2, radial, at.sum_l2]);
        t.abs = (at.lap - (at.d2 + radial + at.sum_l2)).abs();
        out[0] = (t.abs, t.scale);
    }

    // Σ x_j L_jf = 0
    {
        let mut t = Tally::new(reference(0));
        let mut s = 0.0;
        for j in 0..n {
            let v = xs[j] * at.l[j];
            t.terms(&[v]);
            s += v;
        }
        t.abs = s.abs();
        out[1] = (t.abs, t.scale);
    }

    // L_j ∂_r f = (∂_r + 1/r) L_j f
    {
        let mut t = Tally::new(reference(2));
        let d1 = at3.d1;
        let radial_of_d1: f64 = (0..n).map(|i| xhat[i] * d1.partial(i)).sum();
        for j in 0..n {
            let lhs = d1.partial(j) - xhat[j] * radial_of_d1;
            t.agree(&[lhs, at.drl[j] + at.l[j] / r]);
            t.terms(&[at.drl[j], at.l[j] / r]);
        }
        out[2] = (t.abs, t.scale);
    }

    // L_j(r^λ u) = r^λ L_j u
    {
        let mut t = Tally::new(reference(1));
        let c2 = jet::jet2_coordinates(xs);
        let rj = jet::norm(&c2)?;
        for lambda in COMMUTATION_WEIGHTS {
            let weighted = Local::new(xs, j2 * rj.powf(lambda)?)?;
            let w = r.powf(lambda);
            for j in 0..n {
                t.agree(&[weighted.spherical(j) / w, at.l[j]]);
            }
        }
        out[3] = (t.abs, t.scale);
    }

    // r⁻² Σ_{j<k} (x_j∂_k − x_k∂_j)² f = Σ L_j² f
    {
        let mut t = Tally::new(reference(2));
        let mut s = 0.0;
        for j in 0..n {
            for k in j + 1..n {
                let (a, b) = (xs[j], xs[k]);
                let term = a * a * j2.hessian(k, k) + b * b * j2.hessian(j, j)
                    - 2.0 * a * b * j2.hessian(j, k)
                    - a * j2.partial(j)
                    - b * j2.partial(k);
                t.terms(&[term / (r * r)]);
                s += term;
            }
        }
        t.agree(&[s / (r * r), at.sum_l2]);
        out[4] = (t.abs, t.scale);
    }

    let h = nf / 2.0;
    // A f = r^{−n+1}∂_r(r^{n−1}∂_r f)
    let bessel = at.bessel()?;
    {
        let mut t = Tally::new(reference(2));
        let div = chain2(xs, j2, 1.0 - nf, nf - 1.0, 0.0)?;
        t.terms(&[at.d2, (nf - 1.0) / r * at.d1]);
        t.agree(&[bessel, div]);
        out[5] = (t.abs, t.scale);
    }

    // Second-order remainder, three spellings plus the compiled operator.
    {
        let mut t = Tally::new(reference(2));
        let k = nf * (nf - 4.0) / 4.0;
        let expanded = bessel + k / (r * r) * at.value;
        let b = chain2(xs, j2, 1.0 - h, -1.0, h)?;
        let c = chain2(xs, j2, -h - 1.0, 3.0, h - 2.0)?;
        let [_, spelled, _] = OperatorExpr::rellich_r1_forms(n);
        let compiled = Operator::new(n, spelled)
            .ok()
            .map(|op| op.eval_atoms(&at))
            .transpose()?;
        t.terms(&[at.d2, (nf - 1.0) / r * at.d1, k / (r * r) * at.value]);
        match compiled {
            Some(v) => t.agree(&[expanded, b, c, v]),
            None => t.agree(&[expanded, b, c]),
        }
        out[6] = (t.abs, t.scale);
    }

    // First-order remainders.
    {
        let mut t = Tally::new(reference(2));
        let expanded = at.d1 / r + (nf - 4.0) / (2.0 * r * r) * at.value;
        let c1 = jet::jet1_coordinates(xs);
        let w = chain1(&c1, j2.to_jet1(), 1.0 - h, h - 2.0)?;
        t.terms(&[at.d1 / r, (nf - 4.0) / (2.0 * r * r) * at.value]);
        t.agree(&[expanded, w]);
        out[7] = (t.abs, t.scale);

        let mut t = Tally::new(reference(1));
        let expanded = at.d1 + (nf - 2.0) / (2.0 * r) * at.value;
        let w = chain1(&c1, j2.to_jet1(), 1.0 - h, h - 1.0)?;
        t.terms(&[at.d1, (nf - 2.0) / (2.0 * r) * at.value]);
        t.agree(&[expanded, w]);
        out[8] = (t.abs, t.scale);
    }

    // L_j(Af) = ∂_r²h_j + (n+1)/r ∂_rh_j + (n−1)/r² h_j, h_j = L_jf
    {
        let mut t = Tally::new(reference(3));
        let g = at3.bessel()?;
        let radial_of_g: f64 = (0..n).map(|i| xhat[i] * g.partial(i)).sum();
        for j in 0..n {
            let lhs = g.partial(j) - xhat[j] * radial_of_g;
            let drl = at3.drl[j];
            let d2h: f64 = (0..n).map(|i| xhat[i] * drl.partial(i)).sum();
            let terms = [d2h, (nf + 1.0) / r * at.drl[j], (nf - 1.0) / (r * r) * at.l[j]];
            t.terms(&terms);
            t.agree(&[lhs, terms.iter().sum()]);
        }
        out[9] = (t.abs, t.scale);
    }
    Ok(out)
}

/// Evaluates every pointwise identity at `x`. For complex fields the
/// residual of each part is computed separately and the larger is kept.
pub fn pointwise_identity_suite(f: &ScalarField, x: &Point) -> Result<Vec<PointwiseResidual>, Error> {
    if x.dim() != f.dim() {
        return Err(EvalError::DimensionMismatch {
            expected: f.dim(),
            found: x.dim(),
        }
        .into());
    }
    let mut worst = [(0.0f64, 0.0f64); 10];
    for family in f.parts() {
        let part = part_suite(family, x)?;
        for (w, p) in worst.iter_mut().zip(part) {
            let rel_w = if w.0 == 0.0 { 0.0 } else { w.0 / w.1 };
            let rel_p = if p.0 == 0.0 { 0.0 } else { p.0 / p.1 };
            if rel_p > rel_w || w.1 == 0.0 {
                *w = p;
            }
        }
    }
    Ok(POINTWISE_IDENTITIES
        .iter()
        .zip(worst)
        .map(|(name, (abs, scale))| PointwiseResidual {
            identity: name,
            abs,
            scale,
        })
        .collect())
}

/// Seeded points with uniform direction and `r_min ≤ |x| ≤ r_max`.
pub fn sample_points(n: usize, count: usize, seed: u64, r_min: f64, r_max: f64) -> Vec<Point> {
    assert!((1..=MAX_DIM).contains(&n) && 0.0 < r_min && r_min <= r_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut w = [0.0; MAX_DIM];
        for wi in w.iter_mut().take(n) {
            *wi = rng.sample(StandardNormal);
        }
        let len = w[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let r = rng.random_range(r_min..=r_max);
        for wi in w.iter_mut().take(n) {
            *wi /= len;
        }
        if let Ok(p) = Point::polar(r, &w[..n]) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_field, FamilyParams};

    #[test]
    fn radial_gaussian_has_negligible_residuals() {
        let f = make_field(&FamilyParams::new(Family::GaussianRadial { sigma: 1.0 }, 5)).unwrap();
        for p in sample_points(5, 50, 3, 0.1, 5.0) {
            for res in pointwise_identity_suite(&f, &p).unwrap() {
                assert!(res.relative() < 1e-12, "{res:?}");
            }
        }
    }

    #[test]
    fn solid_gaussian_identities_hold() {
        let f = make_field(&FamilyParams::new(
            Family::SolidGaussian {
                axis: 0,
                sigma: 1.0,
            },
            5,
        ))
        .unwrap();
        for p in sample_points(5, 100, 11, 0.1, 5.0) {
            for res in pointwise_identity_suite(&f, &p).unwrap() {
                assert!(res.relative() < 1e-10, "{res:?} at {:?}", p.coords());
            }
        }
    }

    #[test]
    fn sampler_is_reproducible_and_in_range() {
        let a = sample_points(7, 20, 42, 0.1, 5.0);
        let b = sample_points(7, 20, 42, 0.1, 5.0);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (0.1..=5.0).contains(&p.r())));
    }
}
