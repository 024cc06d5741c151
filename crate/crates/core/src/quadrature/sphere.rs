//! Rules on the unit sphere S^{n−1}.

use std::f64::consts::PI;

use super::gauss::{gauss_rule_1d, GaussWeight, Rule1d};
use crate::error::QuadratureError;
use crate::jet::MAX_DIM;
use crate::special::{gamma_half, sphere_area};

/// Smallest and largest dimension with a product rule.
pub const PRODUCT_DIMS: std::ops::RangeInclusive<usize> = 3..=7;
pub const MAX_DEGREE: u32 = 40;

/// ∫_{S^{n−1}} ω^α dσ(ω); trailing exponents may be omitted.
pub fn sphere_monomial_integral(n: usize, alpha: &[u32]) -> f64 {
    assert!(n >= 2 && alpha.len() <= n);
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum();
    let mut num = 2.0;
    for i in 0..n {
        let a = alpha.get(i).copied().unwrap_or(0);
        num *= gamma_half(a + 1);
    }
    num / gamma_half(n as u32 + total)
}

/// How a sphere rule was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereKind {
    /// Tensor-product Gauss rule exact to the given total degree.
    Product { degree: u32 },
    /// One direction carrying the full measure; exact for radial integrands.
    Radial,
    /// Read from a file.
    Imported,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereRule {
    n: usize,
    kind: SphereKind,
    directions: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub(crate) fn from_parts(
        n: usize,
        kind: SphereKind,
        directions: Vec<f64>,
        weights: Vec<f64>,
    ) -> Self {
        assert_eq!(directions.len(), n * weights.len());
        Self {
            n,
            kind,
            directions,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SphereKind {
        self.kind
    }

    pub fn degree(&self) -> Option<u32> {
        match self.kind {
            SphereKind::Product { degree } => Some(degree),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.n..(k + 1) * self.n]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Σ_k v_k ω_k^α
    pub fn monomial(&self, alpha: &[u32]) -> f64 {
        (0..self.len())
            .map(|k| {
                let w = self.direction(k);
                let mut p = self.weights[k];
                for (i, &a) in alpha.iter().enumerate() {
                    p *= w[i].powi(a as i32);
                }
                p
            })
            .sum()
    }
}

/// Single direction e₁ with weight |S^{n−1}|.
pub fn radial_sphere_rule(n: usize) -> SphereRule {
    assert!((1..=MAX_DIM).contains(&n));
    let mut dir = vec![0.0; n];
    dir[0] = 1.0;
    SphereRule::from_parts(n, SphereKind::Radial, dir, vec![sphere_area(n)])
}

/// Product rule exact for all polynomials of total degree ≤ `degree`:
/// Gauss–Gegenbauer rules in t_i = cos θ_i for the (sin θ_i)^{n−1−i}
/// factors of the measure and an equispaced rule in the last angle.
pub fn sphere_product_rule(n: usize, degree: u32) -> Result<SphereRule, QuadratureError> {
    if !PRODUCT_DIMS.contains(&n) {
        return Err(QuadratureError::Unsupported(format!(
            "product sphere rules need {} ≤ n ≤ {}, got n = {n}",
            PRODUCT_DIMS.start(),
            PRODUCT_DIMS.end()
        )));
    }
    if degree % 2 == 1 || degree > MAX_DEGREE {
        return Err(QuadratureError::Unsupported(format!(
            "sphere degree must be even and at most {MAX_DEGREE}, got {degree}"
        )));
    }
    let m = degree as usize / 2 + 1;
    let mut polar: Vec<Rule1d> = Vec::with_capacity(n - 2);
    for i in 1..=n - 2 {
        let a = (n - 2 - i) as f64 / 2.0;
        let weight = if a == 0.0 {
            GaussWeight::Legendre
        } else {
            GaussWeight::Jacobi { a, b: a }
        };
        polar.push(gauss_rule_1d(m, weight)?);
    }
    let big_m = degree as usize + 1;
    let dphi = 2.0 * PI / big_m as f64;

    let total = polar.iter().map(Rule1d::len).product::<usize>() * big_m;
    let mut directions = Vec::with_capacity(total * n);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; n - 2];
    loop {
        let mut omega = [0.0; MAX_DIM];
        let mut sin_acc = 1.0;
        let mut w = dphi;
        for (i, rule) in polar.iter().enumerate() {
            let t = rule.nodes[idx[i]];
            omega[i] = sin_acc * t;
            sin_acc *= (1.0 - t * t).max(0.0).sqrt();
            w *= rule.weights[idx[i]];
        }
        for k in 0..big_m {
            let phi = dphi * k as f64;
            let mut dir = omega;
            dir[n - 2] = sin_acc * phi.cos();
            dir[n - 1] = sin_acc * phi.sin();
            directions.extend_from_slice(&dir[..n]);
            weights.push(w);
        }
        // odometer over the polar indices
        let mut level = n - 2;
        loop {
            if level == 0 {
                return Ok(SphereRule::from_parts(
                    n,
                    SphereKind::Product { degree },
                    directions,
                    weights,
                ));
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < m {
                break;
            }
            idx[level] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn monomial_closed_forms() {
        assert_relative_eq!(
            sphere_monomial_integral(5, &[]),
            8.0 * PI * PI / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            sphere_monomial_integral(5, &[2]),
            8.0 * PI * PI / 15.0,
            max_relative = 1e-15
        );
        assert_eq!(sphere_monomial_integral(6, &[3, 2]), 0.0);
        assert_relative_eq!(sphere_monomial_integral(3, &[]), 4.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn product_rule_basics() {
        let r = sphere_product_rule(5, 10).unwrap();
        assert_relative_eq!(r.total_weight(), 8.0 * PI * PI / 3.0, max_relative = 1e-13);
        for k in 0..r.len() {
            let norm: f64 = r.direction(k).iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        assert!(r.monomial(&[3]).abs() < 1e-13);
        let exact = sphere_monomial_integral(5, &[4, 2]);
        assert_relative_eq!(r.monomial(&[4, 2]), exact, max_relative = 1e-11);
    }

    #[test]
    fn unsupported_requests() {
        assert!(sphere_product_rule(8, 6).is_err());
        assert!(sphere_product_rule(5, 7).is_err());
        assert!(sphere_product_rule(5, 42).is_err());
    }
}
