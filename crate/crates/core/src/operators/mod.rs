//! Differential operators built from radial derivatives, spherical
//! derivatives and radial weights.
//!
//! An [`OperatorExpr`] is compiled once into a [`NormalForm`]: a sum of
//! `c · r^p · atom` where each atom is a radial/spherical contraction of the
//! field's second-order jet. Weighted conjugations such as
//! `r^α ∂_r(r^β ·)` therefore reduce to coefficient arithmetic, and
//! different spellings of the same operator compile to the same normal form.

mod local;
pub mod pointwise;

use std::fmt;

use num_complex::Complex64;

pub use local::{Atom, Atoms, Local};

use crate::error::{Error, EvalError, OperatorError};
use crate::fields::ScalarField;
use crate::jet::{self, Scalar, MAX_DIM};
use crate::point::Point;

/// Ambient dimension of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

impl Dimension {
    /// Smallest dimension for first-order Hardy expressions.
    pub const HARDY_MIN: usize = 3;
    /// Smallest dimension for everything else.
    pub const RELLICH_MIN: usize = 5;

    pub fn new(n: usize) -> Result<Self, OperatorError> {
        if !(Self::HARDY_MIN..=MAX_DIM).contains(&n) {
            return Err(OperatorError::Dimension {
                n,
                min: Self::HARDY_MIN,
            });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn is_rellich(self) -> bool {
        self.0 >= Self::RELLICH_MIN
    }
}

/// Operator expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpr {
    Identity,
    /// ∂_r = x̂·∇
    RadialD1,
    /// ∂_r²
    RadialD2,
    Laplacian,
    /// A = ∂_r² + (n−1)/r ∂_r
    BesselA,
    /// L_j = ∂_j − x̂_j ∂_r (0-based j)
    SphericalL(usize),
    /// L_j L_j
    SphericalL2(usize),
    /// Σ_j L_j²
    SumSphericalL2,
    /// multiplication by r^λ
    MultiplyWeight(f64),
    /// ∂_r + (n−2)/(2r)
    HardyRemainder,
    /// A + n(n−4)/(4r²)
    RellichRemainderR1,
    /// r⁻¹∂_r + (n−4)/(2r²)
    RellichRemainderR2,
    /// r^α ∂_r(r^β ·)
    WeightedChain { alpha: f64, beta: f64 },
    /// r^α ∂_r(r^β ∂_r(r^γ ·))
    WeightedChain2 { alpha: f64, beta: f64, gamma: f64 },
    LinearCombination(Vec<(f64, OperatorExpr)>),
    /// outer ∘ inner
    Compose(Box<OperatorExpr>, Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn compose(outer: OperatorExpr, inner: OperatorExpr) -> Self {
        OperatorExpr::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn weight(lambda: f64) -> Self {
        OperatorExpr::MultiplyWeight(lambda)
    }

    fn hardy_only(&self) -> bool {
        match self {
            OperatorExpr::Identity
            | OperatorExpr::RadialD1
            | OperatorExpr::MultiplyWeight(_)
            | OperatorExpr::HardyRemainder
            | OperatorExpr::WeightedChain { .. } => true,
            OperatorExpr::LinearCombination(items) => items.iter().all(|(_, e)| e.hardy_only()),
            OperatorExpr::Compose(a, b) => a.hardy_only() && b.hardy_only(),
            _ => false,
        }
    }

    /// |x|^{−n+1}∂_r(|x|^{n−1}∂_r ·)
    pub fn bessel_divergence(n: usize) -> Self {
        let n = n as f64;
        OperatorExpr::WeightedChain2 {
            alpha: 1.0 - n,
            beta: n - 1.0,
            gamma: 0.0,
        }
    }

    /// |x|^{−n/2+1}∂_r(|x|^{n/2−1} ·)
    pub fn hardy_weighted(n: usize) -> Self {
        let h = n as f64 / 2.0;
        OperatorExpr::WeightedChain {
            alpha: 1.0 - h,
            beta: h - 1.0,
        }
    }

    /// The three spellings of the second-order Rellich remainder:
    /// expanded, |x|^{−n/2+1}∂_r(|x|⁻¹∂_r(|x|^{n/2}·)) and
    /// |x|^{−n/2−1}∂_r(|x|³∂_r(|x|^{(n−4)/2}·)).
    pub fn rellich_r1_forms(n: usize) -> [Self; 3] {
        let h = n as f64 / 2.0;
        [
            OperatorExpr::RellichRemainderR1,
            OperatorExpr::WeightedChain2 {
                alpha: 1.0 - h,
                beta: -1.0,
                gamma: h,
            },
            OperatorExpr::WeightedChain2 {
                alpha: -h - 1.0,
                beta: 3.0,
                gamma: h - 2.0,
            },
        ]
    }

    /// The two spellings of the first-order Rellich remainder: expanded and
    /// |x|^{−n/2+1}∂_r(|x|^{n/2−2}·).
    pub fn rellich_r2_forms(n: usize) -> [Self; 2] {
        let h = n as f64 / 2.0;
        [
            OperatorExpr::RellichRemainderR2,
            OperatorExpr::WeightedChain {
                alpha: 1.0 - h,
                beta: h - 2.0,
            },
        ]
    }

    fn compile(&self, n: usize, inner: &NormalForm) -> Result<NormalForm, OperatorError> {
        let nf = n as f64;
        let out = match self {
            OperatorExpr::Identity => inner.clone(),
            OperatorExpr::RadialD1 => inner.radial_d()?,
            OperatorExpr::RadialD2 => inner.radial_d()?.radial_d()?,
            OperatorExpr::Laplacian => inner.laplacian(n)?,
            OperatorExpr::BesselA => inner
                .radial_d()?
                .radial_d()?
                .add(&inner.radial_d()?.weight(-1.0).scale(nf - 1.0)),
            OperatorExpr::SphericalL(j) => inner.spherical(check_axis(*j, n)?)?,
            OperatorExpr::SphericalL2(j) => {
                let j = check_axis(*j, n)?;
                inner.spherical(j)?.spherical(j)?
            }
            OperatorExpr::SumSphericalL2 => inner.sum_spherical_l2()?,
            OperatorExpr::MultiplyWeight(l) => inner.weight(*l),
            OperatorExpr::HardyRemainder => inner
                .radial_d()?
                .add(&inner.weight(-1.0).scale((nf - 2.0) / 2.0)),
            OperatorExpr::RellichRemainderR1 => OperatorExpr::BesselA
                .compile(n, inner)?
                .add(&inner.weight(-2.0).scale(nf * (nf - 4.0) / 4.0)),
            OperatorExpr::RellichRemainderR2 => inner
                .radial_d()?
                .weight(-1.0)
                .add(&inner.weight(-2.0).scale((nf - 4.0) / 2.0)),
            OperatorExpr::WeightedChain { alpha, beta } => {
                inner.weight(*beta).radial_d()?.weight(*alpha)
            }
            OperatorExpr::WeightedChain2 { alpha, beta, gamma } => inner
                .weight(*gamma)
                .radial_d()?
                .weight(*beta)
                .radial_d()?
                .weight(*alpha),
            OperatorExpr::LinearCombination(items) => {
                let mut acc = NormalForm::default();
                for (c, e) in items {
                    acc = acc.add(&e.compile(n, inner)?.scale(*c));
                }
                acc
            }
            OperatorExpr::Compose(outer, inner_expr) => {
                outer.compile(n, &inner_expr.compile(n, inner)?)?
            }
        };
        Ok(out)
    }
}

fn check_axis(j: usize, n: usize) -> Result<usize, OperatorError> {
    if j < n {
        Ok(j)
    } else {
        Err(OperatorError::Unsupported(format!(
            "spherical derivative index {j} out of range for n = {n}"
        )))
    }
}

/// One term `coef · r^power · atom`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub power: f64,
    pub atom: Atom,
}

/// Canonical sum of terms: sorted by (atom, power), merged, zero-free.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalForm {
    terms: Vec<Term>,
}

impl NormalForm {
    pub fn identity() -> Self {
        Self::from_terms(vec![Term {
            coef: 1.0,
            power: 0.0,
            atom: Atom::Value,
        }])
    }

    fn from_terms(mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| {
            a.atom
                .cmp(&b.atom)
                .then(a.power.total_cmp(&b.power))
        });
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.atom == t.atom && last.power == t.power => last.coef += t.coef,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn order(&self) -> usize {
        self.terms.iter().map(|t| t.atom.order()).max().unwrap_or(0)
    }

    pub fn needs_angular(&self) -> bool {
        self.terms.iter().any(|t| t.atom.is_angular())
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Self {
        Self::from_terms(self.terms.iter().map(f).collect())
    }

    fn scale(&self, c: f64) -> Self {
        self.map_terms(|t| Term {
            coef: t.coef * c,
            ..*t
        })
    }

    fn weight(&self, lambda: f64) -> Self {
        self.map_terms(|t| Term {
            power: t.power + lambda,
            ..*t
        })
    }

    fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).copied().collect())
    }

    fn radial_d(&self) -> Result<Self, OperatorError> {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power != 0.0 {
                out.push(Term {
                    coef: t.coef * t.power,
                    power: t.power - 1.0,
                    atom: t.atom,
                });
            }
            let atom = match t.atom {
                Atom::Value => Atom::RadialD1,
                Atom::RadialD1 => Atom::RadialD2,
                Atom::SphericalL(j) => Atom::RadialDSphericalL(j),
                _ => return Err(OperatorError::OrderOverflow { order: 3 }),
            };
            out.push(Term { atom, ..*t });
        }
        Ok(Self::from_terms(out))
    }

    fn spherical(&self, j: usize) -> Result<Self, OperatorError> {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        // L_j commutes with radial weights.
        for t in &self.terms {
            match t.atom {
                Atom::Value => out.push(Term {
                    atom: Atom::SphericalL(j),
                    ..*t
                }),
                // L_j ∂_r = (∂_r + 1/r) L_j
                Atom::RadialD1 => {
                    out.push(Term {
                        atom: Atom::RadialDSphericalL(j),
                        ..*t
                    });
                    out.push(Term {
                        atom: Atom::SphericalL(j),
                        power: t.power - 1.0,
                        ..*t
                    });
                }
                Atom::SphericalL(k) if k == j => out.push(Term {
                    atom: Atom::SphericalL2(j),
                    ..*t
                }),
                Atom::SphericalL(k) => {
                    return Err(OperatorError::Unsupported(format!(
                        "mixed spherical derivatives L_{} L_{}",
                        j + 1,
                        k + 1
                    )))
                }
                _ => return Err(OperatorError::OrderOverflow { order: 3 }),
            }
        }
        Ok(Self::from_terms(out))
    }

    fn laplacian(&self, n: usize) -> Result<Self, OperatorError> {
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            if t.atom != Atom::Value {
                return Err(OperatorError::OrderOverflow {
                    order: t.atom.order() + 2,
                });
            }
            // Δ(r^p f) = r^p Δf + 2p r^{p−1} ∂_r f + p(p+n−2) r^{p−2} f
            let p = t.power;
            out.push(Term {
                atom: Atom::Laplacian,
                ..*t
            });
            out.push(Term {
                coef: 2.0 * p * t.coef,
                power: p - 1.0,
                atom: Atom::RadialD1,
            });
            out.push(Term {
                coef: p * (p + n as f64 - 2.0) * t.coef,
                power: p - 2.0,
                atom: Atom::Value,
            });
        }
        Ok(Self::from_terms(out))
    }

    fn sum_spherical_l2(&self) -> Result<Self, OperatorError> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.atom != Atom::Value {
                return Err(OperatorError::OrderOverflow {
                    order: t.atom.order() + 2,
                });
            }
            out.push(Term {
                atom: Atom::SumSphericalL2,
                ..*t
            });
        }
        Ok(Self::from_terms(out))
    }

    /// Σ c r^p atom at one point.
    pub fn eval<T: Scalar>(&self, atoms: &Atoms<T>) -> Result<T, EvalError> {
        let mut acc = T::constant(0.0);
        for t in &self.terms {
            let a = atoms.get(t.atom);
            let w = if t.power == 0.0 {
                a
            } else {
                a * atoms.r.powf(t.power)?
            };
            acc = acc + w * t.coef;
        }
        Ok(acc)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·r^{}·{:?}", t.coef, t.power, t.atom)?;
        }
        Ok(())
    }
}

/// A compiled operator for a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n: Dimension,
    expr: OperatorExpr,
    normal: NormalForm,
}

impl Operator {
    pub fn new(n: usize, expr: OperatorExpr) -> Result<Self, OperatorError> {
        let dim = Dimension::new(n)?;
        if !expr.hardy_only() && !dim.is_rellich() {
            return Err(OperatorError::Dimension {
                n,
                min: Dimension::RELLICH_MIN,
            });
        }
        let normal = expr.compile(n, &NormalForm::identity())?;
        Ok(Self {
            n: dim,
            expr,
            normal,
        })
    }

    pub fn dim(&self) -> usize {
        self.n.get()
    }

    pub fn expr(&self) -> &OperatorExpr {
        &self.expr
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal
    }

    pub fn order(&self) -> usize {
        self.normal.order()
    }

    pub fn needs_angular(&self) -> bool {
        self.normal.needs_angular()
    }

    pub fn eval_atoms<T: Scalar>(&self, atoms: &Atoms<T>) -> Result<T, EvalError> {
        self.normal.eval(atoms)
    }

    /// (expr f)(x); the imaginary part is zero for real fields.
    pub fn apply(&self, f: &ScalarField, x: &Point) -> Result<Complex64, Error> {
        if f.dim() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            }
            .into());
        }
        let jets = f.evaluate_parts(x)?;
        let mut parts = [0.0; 2];
        for (slot, j) in parts.iter_mut().zip(jets) {
            let local = Local::new(x.coords(), j)?;
            let atoms = local.atoms(self.needs_angular())?;
            *slot = jet::ensure_finite(self.eval_atoms(&atoms)?)?;
        }
        Ok(Complex64::new(parts[0], parts[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_field, Family, FamilyParams};
    use approx::assert_relative_eq;

    fn gaussian(n: usize) -> ScalarField {
        make_field(&FamilyParams::new(Family::GaussianRadial { sigma: 1.0 }, n)).unwrap()
    }

    fn e(n: usize, axis: usize, r: f64) -> Point {
        let mut x = vec![0.0; n];
        x[axis] = r;
        Point::new(&x).unwrap()
    }

    #[test]
    fn radial_derivative_of_gaussian() {
        let op = Operator::new(5, OperatorExpr::RadialD1).unwrap();
        let v = op.apply(&gaussian(5), &e(5, 0, 1.0)).unwrap();
        assert_relative_eq!(v.re, -(-0.5f64).exp(), max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn spherical_derivative_examples() {
        let g = gaussian(5);
        let x = Point::new(&[0.3, -1.1, 0.7, 0.2, 0.9]).unwrap();
        for j in 0..5 {
            let op = Operator::new(5, OperatorExpr::SphericalL(j)).unwrap();
            assert!(op.apply(&g, &x).unwrap().re.abs() < 1e-15);
        }
        let solid = make_field(&FamilyParams::new(
            Family::SolidGaussian {
                axis: 0,
                sigma: 1.0,
            },
            5,
        ))
        .unwrap();
        let op = Operator::new(5, OperatorExpr::SphericalL(0)).unwrap();
        let v = op.apply(&solid, &e(5, 1, 1.0)).unwrap();
        assert_relative_eq!(v.re, (-0.5f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn hardy_remainder_of_gaussian() {
        let op = Operator::new(5, OperatorExpr::HardyRemainder).unwrap();
        let v = op.apply(&gaussian(5), &e(5, 0, 1.0)).unwrap();
        assert_relative_eq!(v.re, 0.5 * (-0.5f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn remainder_spellings_share_a_normal_form() {
        for n in 5..=9 {
            let [a, b, c] = OperatorExpr::rellich_r1_forms(n).map(|e| Operator::new(n, e).unwrap());
            assert_eq!(a.normal_form(), b.normal_form(), "n={n}");
            assert_eq!(a.normal_form(), c.normal_form(), "n={n}");
            let [p, q] = OperatorExpr::rellich_r2_forms(n).map(|e| Operator::new(n, e).unwrap());
            assert_eq!(p.normal_form(), q.normal_form());
            let bessel = Operator::new(n, OperatorExpr::BesselA).unwrap();
            let div = Operator::new(n, OperatorExpr::bessel_divergence(n)).unwrap();
            assert_eq!(bessel.normal_form(), div.normal_form());
        }
        for n in 3..=9 {
            let a = Operator::new(n, OperatorExpr::HardyRemainder).unwrap();
            let b = Operator::new(n, OperatorExpr::hardy_weighted(n)).unwrap();
            assert_eq!(a.normal_form(), b.normal_form());
        }
    }

    #[test]
    fn construction_rejects_third_order_and_small_dimensions() {
        let third = OperatorExpr::compose(OperatorExpr::RadialD1, OperatorExpr::BesselA);
        assert_eq!(
            Operator::new(5, third).unwrap_err(),
            OperatorError::OrderOverflow { order: 3 }
        );
        let lap_of_dr = OperatorExpr::compose(OperatorExpr::Laplacian, OperatorExpr::RadialD1);
        assert!(matches!(
            Operator::new(5, lap_of_dr),
            Err(OperatorError::OrderOverflow { order: 3 })
        ));
        assert_eq!(
            Operator::new(4, OperatorExpr::RellichRemainderR2).unwrap_err(),
            OperatorError::Dimension { n: 4, min: 5 }
        );
        assert!(Operator::new(3, OperatorExpr::HardyRemainder).is_ok());
        assert!(Operator::new(2, OperatorExpr::HardyRemainder).is_err());
        assert!(Operator::new(5, OperatorExpr::SphericalL(5)).is_err());
    }

    #[test]
    fn commutation_is_built_into_composition() {
        // L_j ∂_r = (∂_r + 1/r) L_j
        let n = 6;
        let lhs = Operator::new(
            n,
            OperatorExpr::compose(OperatorExpr::SphericalL(2), OperatorExpr::RadialD1),
        )
        .unwrap();
        let rhs = Operator::new(
            n,
            OperatorExpr::compose(
                OperatorExpr::LinearCombination(vec![
                    (1.0, OperatorExpr::RadialD1),
                    (1.0, OperatorExpr::weight(-1.0)),
                ]),
                OperatorExpr::SphericalL(2),
            ),
        )
        .unwrap();
        assert_eq!(lhs.normal_form(), rhs.normal_form());
    }

    #[test]
    fn laplacian_of_weighted_field() {
        // Δ(r² f) through the normal form against a jet of r² f itself.
        let n = 5;
        let op = Operator::new(
            n,
            OperatorExpr::compose(OperatorExpr::Laplacian, OperatorExpr::weight(2.0)),
        )
        .unwrap();
        let x = Point::new(&[0.4, 0.2, -0.3, 0.5, 0.1]).unwrap();
        let c = jet::jet2_coordinates(x.coords());
        let r2 = jet::sum_of_squares(&c);
        let direct = (r2 * (r2 * -0.5).exp()).trace();
        let v = op.apply(&gaussian(n), &x).unwrap().re;
        assert_relative_eq!(v, direct, max_relative = 1e-13);
    }
}
