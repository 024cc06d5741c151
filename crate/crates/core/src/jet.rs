//! Forward-mode jets for exact first and second derivatives of closed-form
//! fields on ℝⁿ.
//!
//! Every jet type implements [`Scalar`], so field evaluators are written once
//! and run on plain `f64` (finite-difference oracles), on [`Jet1`], on
//! [`Jet2`], and on jets whose components are [`Dual`] numbers. The last case
//! gives exact directional derivatives of any second-order quantity, which is
//! how tangential derivatives of the Bessel operator are formed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::EvalError;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 9;

/// Length of the packed upper triangle for [`MAX_DIM`].
pub const HESS_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Index of entry `(i, j)` in the packed upper triangle (column-major, `i ≤ j`).
///
/// The packing does not depend on the dimension, so a jet over `n` variables
/// uses exactly the first `n(n+1)/2` slots.
#[inline]
pub fn tri_index(i: usize, j: usize) -> usize {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

#[inline]
fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Scalar arithmetic shared by `f64`, [`Dual`], [`Jet1`] and [`Jet2`].
pub trait Scalar:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn constant(c: f64) -> Self;

    /// The primal value.
    fn value(&self) -> f64;

    fn is_finite(&self) -> bool;

    fn exp(self) -> Self;

    fn recip_unchecked(self) -> Self;

    fn ln_unchecked(self) -> Self;

    fn sqrt_unchecked(self) -> Self;

    fn ln(self) -> Result<Self, EvalError> {
        let v = self.value();
        if v > 0.0 {
            Ok(self.ln_unchecked())
        } else {
            Err(EvalError::Domain { op: "ln", value: v })
        }
    }

    fn sqrt(self) -> Result<Self, EvalError> {
        let v = self.value();
        if v > 0.0 {
            Ok(self.sqrt_unchecked())
        } else {
            Err(EvalError::Domain { op: "sqrt", value: v })
        }
    }

    fn recip(self) -> Result<Self, EvalError> {
        let v = self.value();
        if v != 0.0 {
            Ok(self.recip_unchecked())
        } else {
            Err(EvalError::Domain { op: "div", value: v })
        }
    }

    fn try_div(self, rhs: Self) -> Result<Self, EvalError> {
        Ok(self * rhs.recip()?)
    }

    /// `self^λ` as `exp(λ ln self)`; requires a positive base.
    fn powf(self, exponent: f64) -> Result<Self, EvalError> {
        let v = self.value();
        if v <= 0.0 {
            return Err(EvalError::Domain { op: "pow", value: v });
        }
        Ok((self.ln_unchecked() * exponent).exp())
    }

    fn powi(self, k: u32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn recip_unchecked(self) -> Self {
        1.0 / self
    }
    fn ln_unchecked(self) -> Self {
        f64::ln(self)
    }
    fn sqrt_unchecked(self) -> Self {
        f64::sqrt(self)
    }
}

/// First-order dual number carrying one directional tangent.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Self { re, eps }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}
impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}
impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}
impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, c: f64) -> Dual {
        Dual::new(self.re + c, self.eps)
    }
}
impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, c: f64) -> Dual {
        Dual::new(self.re - c, self.eps)
    }
}
impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, c: f64) -> Dual {
        Dual::new(self.re * c, self.eps * c)
    }
}

impl Scalar for Dual {
    fn constant(c: f64) -> Self {
        Dual::new(c, 0.0)
    }
    fn value(&self) -> f64 {
        self.re
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, e * self.eps)
    }
    fn recip_unchecked(self) -> Self {
        let r = 1.0 / self.re;
        Dual::new(r, -r * r * self.eps)
    }
    fn ln_unchecked(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }
    fn sqrt_unchecked(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, 0.5 * self.eps / s)
    }
}

/// Value and gradient over `n` variables.
///
/// `n == 0` marks a constant, which combines with a jet of any dimension.
#[derive(Clone, Copy)]
pub struct Jet1<T> {
    n: usize,
    pub value: T,
    grad: [T; MAX_DIM],
}

impl<T: Scalar> Jet1<T> {
    pub fn constant_jet(value: T) -> Self {
        Self {
            n: 0,
            value,
            grad: [T::constant(0.0); MAX_DIM],
        }
    }

    /// Coordinate `i` of `n` with the given value.
    pub fn variable(n: usize, i: usize, value: T) -> Self {
        assert!(n <= MAX_DIM && i < n, "variable {i} out of range for n={n}");
        let mut grad = [T::constant(0.0); MAX_DIM];
        grad[i] = T::constant(1.0);
        Self { n, value, grad }
    }

    /// Builds a jet from explicit parts; `grad.len()` sets the dimension.
    pub fn from_parts(value: T, grad: &[T]) -> Self {
        assert!(grad.len() <= MAX_DIM);
        let mut g = [T::constant(0.0); MAX_DIM];
        g[..grad.len()].copy_from_slice(grad);
        Self {
            n: grad.len(),
            value,
            grad: g,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gradient(&self) -> &[T] {
        &self.grad[..self.n]
    }

    pub fn partial(&self, i: usize) -> T {
        self.grad[i]
    }

    #[inline]
    fn chain(self, f0: T, f1: T) -> Self {
        let mut out = Self {
            n: self.n,
            value: f0,
            grad: [T::constant(0.0); MAX_DIM],
        };
        for i in 0..self.n {
            out.grad[i] = f1 * self.grad[i];
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Jet1<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet1")
            .field("value", &self.value)
            .field("gradient", &self.gradient())
            .finish()
    }
}

impl<T: Scalar> Add for Jet1<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut out = Self {
            n,
            value: self.value + o.value,
            grad: self.grad,
        };
        for i in 0..n {
            out.grad[i] = self.grad[i] + o.grad[i];
        }
        out
    }
}

impl<T: Scalar> Sub for Jet1<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut out = Self {
            n,
            value: self.value - o.value,
            grad: self.grad,
        };
        for i in 0..n {
            out.grad[i] = self.grad[i] - o.grad[i];
        }
        out
    }
}

impl<T: Scalar> Mul for Jet1<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut out = Self {
            n,
            value: self.value * o.value,
            grad: self.grad,
        };
        for i in 0..n {
            out.grad[i] = self.value * o.grad[i] + o.value * self.grad[i];
        }
        out
    }
}

impl<T: Scalar> Neg for Jet1<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<T: Scalar> Add<f64> for Jet1<T> {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.value = self.value + c;
        self
    }
}

impl<T: Scalar> Sub<f64> for Jet1<T> {
    type Output = Self;
    fn sub(mut self, c: f64) -> Self {
        self.value = self.value - c;
        self
    }
}

impl<T: Scalar> Mul<f64> for Jet1<T> {
    type Output = Self;
    fn mul(mut self, c: f64) -> Self {
        self.value = self.value * c;
        for i in 0..self.n {
            self.grad[i] = self.grad[i] * c;
        }
        self
    }
}

impl<T: Scalar> Scalar for Jet1<T> {
    fn constant(c: f64) -> Self {
        Self::constant_jet(T::constant(c))
    }
    fn value(&self) -> f64 {
        self.value.value()
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.gradient().iter().all(|g| g.is_finite())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    fn recip_unchecked(self) -> Self {
        let r = self.value.recip_unchecked();
        self.chain(r, -(r * r))
    }
    fn ln_unchecked(self) -> Self {
        let r = self.value.recip_unchecked();
        self.chain(self.value.ln_unchecked(), r)
    }
    fn sqrt_unchecked(self) -> Self {
        let s = self.value.sqrt_unchecked();
        self.chain(s, s.recip_unchecked() * 0.5)
    }
}

/// Value, gradient and packed symmetric Hessian over `n` variables.
#[derive(Clone, Copy)]
pub struct Jet2<T> {
    n: usize,
    pub value: T,
    grad: [T; MAX_DIM],
    hess: [T; HESS_LEN],
}

impl<T: Scalar> Jet2<T> {
    pub fn constant_jet(value: T) -> Self {
        Self {
            n: 0,
            value,
            grad: [T::constant(0.0); MAX_DIM],
            hess: [T::constant(0.0); HESS_LEN],
        }
    }

    /// Coordinate `i` of `n` with the given value.
    pub fn variable(n: usize, i: usize, value: T) -> Self {
        assert!(n <= MAX_DIM && i < n, "variable {i} out of range for n={n}");
        let mut out = Self::constant_jet(value);
        out.n = n;
        out.grad[i] = T::constant(1.0);
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gradient(&self) -> &[T] {
        &self.grad[..self.n]
    }

    pub fn partial(&self, i: usize) -> T {
        self.grad[i]
    }

    /// Hessian entry `∂_i∂_j`.
    pub fn hessian(&self, i: usize, j: usize) -> T {
        self.hess[tri_index(i, j)]
    }

    /// Packed upper triangle, `n(n+1)/2` entries.
    pub fn hessian_packed(&self) -> &[T] {
        &self.hess[..tri_len(self.n)]
    }

    pub fn trace(&self) -> T {
        let mut acc = T::constant(0.0);
        for i in 0..self.n {
            acc = acc + self.hess[tri_index(i, i)];
        }
        acc
    }

    /// Jet of `∂_i f`: value `∂_i f`, gradient the Hessian row `i`.
    pub fn partial_jet(&self, i: usize) -> Jet1<T> {
        let mut grad = [T::constant(0.0); MAX_DIM];
        for (k, g) in grad.iter_mut().enumerate().take(self.n) {
            *g = self.hess[tri_index(i, k)];
        }
        Jet1 {
            n: self.n,
            value: self.grad[i],
            grad,
        }
    }

    /// Drops the Hessian.
    pub fn to_jet1(&self) -> Jet1<T> {
        Jet1 {
            n: self.n,
            value: self.value,
            grad: self.grad,
        }
    }

    #[inline]
    fn chain(self, f0: T, f1: T, f2: T) -> Self {
        let n = self.n;
        let mut out = Self::constant_jet(f0);
        out.n = n;
        for i in 0..n {
            out.grad[i] = f1 * self.grad[i];
        }
        for j in 0..n {
            for i in 0..=j {
                let k = tri_index(i, j);
                out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Jet2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("gradient", &self.gradient())
            .field("hessian", &self.hessian_packed())
            .finish()
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut out = self;
        out.n = n;
        out.value = self.value + o.value;
        for i in 0..n {
            out.grad[i] = self.grad[i] + o.grad[i];
        }
        for k in 0..tri_len(n) {
            out.hess[k] = self.hess[k] + o.hess[k];
        }
        out
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut out = self;
        out.n = n;
        out.value = self.value - o.value;
        for i in 0..n {
            out.grad[i] = self.grad[i] - o.grad[i];
        }
        for k in 0..tri_len(n) {
            out.hess[k] = self.hess[k] - o.hess[k];
        }
        out
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let (a, b) = (self.value, o.value);
        let mut out = Self::constant_jet(a * b);
        out.n = n;
        for i in 0..n {
            out.grad[i] = a * o.grad[i] + b * self.grad[i];
        }
        for j in 0..n {
            for i in 0..=j {
                let k = tri_index(i, j);
                out.hess[k] = a * o.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i];
            }
        }
        out
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<T: Scalar> Add<f64> for Jet2<T> {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.value = self.value + c;
        self
    }
}

impl<T: Scalar> Sub<f64> for Jet2<T> {
    type Output = Self;
    fn sub(mut self, c: f64) -> Self {
        self.value = self.value - c;
        self
    }
}

impl<T: Scalar> Mul<f64> for Jet2<T> {
    type Output = Self;
    fn mul(mut self, c: f64) -> Self {
        self.value = self.value * c;
        for i in 0..self.n {
            self.grad[i] = self.grad[i] * c;
        }
        for k in 0..tri_len(self.n) {
            self.hess[k] = self.hess[k] * c;
        }
        self
    }
}

impl<T: Scalar> Scalar for Jet2<T> {
    fn constant(c: f64) -> Self {
        Self::constant_jet(T::constant(c))
    }
    fn value(&self) -> f64 {
        self.value.value()
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient().iter().all(|g| g.is_finite())
            && self.hessian_packed().iter().all(|h| h.is_finite())
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn recip_unchecked(self) -> Self {
        let r = self.value.recip_unchecked();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
    fn ln_unchecked(self) -> Self {
        let r = self.value.recip_unchecked();
        self.chain(self.value.ln_unchecked(), r, -(r * r))
    }
    fn sqrt_unchecked(self) -> Self {
        let s = self.value.sqrt_unchecked();
        let inv = s.recip_unchecked();
        // d/dv √v = 1/(2√v), d²/dv² √v = −1/(4 v √v)
        self.chain(s, inv * 0.5, inv * inv * inv * -0.25)
    }
}

/// Seeds `Jet2` coordinates at `x`.
pub fn jet2_coordinates<T: Scalar>(x: &[T]) -> Vec<Jet2<T>> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &xi)| Jet2::variable(n, i, xi))
        .collect()
}

/// Seeds `Jet1` coordinates at `x`.
pub fn jet1_coordinates<T: Scalar>(x: &[T]) -> Vec<Jet1<T>> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &xi)| Jet1::variable(n, i, xi))
        .collect()
}

/// Euclidean norm computed inside the jet algebra.
pub fn norm<S: Scalar>(x: &[S]) -> Result<S, EvalError> {
    sum_of_squares(x).sqrt()
}

pub fn sum_of_squares<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::constant(0.0), |acc, &xi| acc + xi * xi)
}

/// Rejects non-finite results.
pub fn ensure_finite<S: Scalar>(s: S) -> Result<S, EvalError> {
    if s.is_finite() {
        Ok(s)
    } else {
        Err(EvalError::NonFinite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_have_no_derivatives() {
        let p = Jet2::<f64>::constant(3.0) * Jet2::constant(4.0);
        assert_eq!(p.value, 12.0);
        assert_eq!(p.dim(), 0);
        assert!(p.gradient().is_empty());
    }

    #[test]
    fn coordinate_is_linear() {
        let x = jet2_coordinates(&[2.0, 0.0, 0.0, 0.0, 0.0]);
        let x1 = x[0];
        assert_eq!(x1.value, 2.0);
        assert_eq!(x1.gradient(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(x1.hessian_packed().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn gaussian_jet_matches_hand_derivatives() {
        let x = jet2_coordinates(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let g = (sum_of_squares(&x) * -0.5).exp();
        let e = (-0.5f64).exp();
        assert_relative_eq!(g.value, e, max_relative = 1e-15);
        assert_relative_eq!(g.partial(0), -e, max_relative = 1e-15);
        // ∂₁² = (x₁² − 1) e^{−r²/2} = 0 at x₁ = 1, ∂ⱼ² = −e for j > 1.
        assert!(g.hessian(0, 0).abs() < 1e-16);
        for j in 1..5 {
            assert_relative_eq!(g.hessian(j, j), -e, max_relative = 1e-15);
            assert_eq!(g.hessian(0, j), 0.0);
        }
        assert_relative_eq!(g.trace(), -4.0 * e, max_relative = 1e-15);
    }

    #[test]
    fn quadratic_has_constant_hessian() {
        let x = jet2_coordinates(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let q = sum_of_squares(&x);
        assert_eq!(q.value, 2.0);
        assert_eq!(q.gradient(), &[2.0, 2.0, 0.0, 0.0, 0.0]);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(q.hessian(i, j), if i == j { 2.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn domain_errors_name_the_operation() {
        let z = Jet2::<f64>::constant(0.0);
        assert!(matches!(z.ln(), Err(EvalError::Domain { op: "ln", .. })));
        assert!(matches!(z.sqrt(), Err(EvalError::Domain { op: "sqrt", .. })));
        assert!(matches!(
            Jet2::<f64>::constant(1.0).try_div(z),
            Err(EvalError::Domain { op: "div", .. })
        ));
        assert!(matches!(
            Jet2::<f64>::constant(-2.0).powf(0.5),
            Err(EvalError::Domain { op: "pow", .. })
        ));
    }

    #[test]
    fn powf_matches_exp_ln_and_integer_powers() {
        let x = jet2_coordinates(&[0.7, -1.3, 0.4]);
        let r = norm(&x).unwrap();
        let a = r.powf(3.0).unwrap();
        let b = r * r * r;
        assert_relative_eq!(a.value, b.value, max_relative = 1e-14);
        for i in 0..3 {
            assert_relative_eq!(a.partial(i), b.partial(i), max_relative = 1e-13);
            for j in 0..3 {
                assert_relative_eq!(a.hessian(i, j), b.hessian(i, j), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn dual_under_jet2_gives_directional_derivative_of_hessian() {
        // f = x₀² x₁: ∂₀∂₀ f = 2 x₁, so its derivative along e₁ is 2.
        let dir = [0.0, 1.0];
        let pts: Vec<Dual> = [0.3, 0.8]
            .iter()
            .zip(dir)
            .map(|(&x, d)| Dual::new(x, d))
            .collect();
        let x = jet2_coordinates(&pts);
        let f = x[0] * x[0] * x[1];
        assert_eq!(f.hessian(0, 0).re, 1.6);
        assert_eq!(f.hessian(0, 0).eps, 2.0);
    }
}
