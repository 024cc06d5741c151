//! Rules for ∫₀^∞ g(r) dr on a mapped Gauss–Legendre grid.

use std::fmt;

use super::gauss::{gauss_rule_1d, GaussWeight};
use crate::error::QuadratureError;

/// Map from the reference interval to (part of) the half-line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialMap {
    /// r ∈ [a, b], affine.
    Legendre { a: f64, b: f64 },
    /// r = c·u/(1 − u), u ∈ (0, 1).
    Rational { scale: f64 },
    /// r = e^s, s ∈ [s_min, s_max].
    Log { s_min: f64, s_max: f64 },
}

impl fmt::Display for RadialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialMap::Legendre { a, b } => write!(f, "legendre[{a},{b}]"),
            RadialMap::Rational { scale } => write!(f, "rational[c={scale}]"),
            RadialMap::Log { s_min, s_max } => write!(f, "log[{s_min},{s_max}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialRule {
    map: RadialMap,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialRule {
    pub fn new(map: RadialMap, n: usize) -> Result<Self, QuadratureError> {
        let bad = |m: String| Err(QuadratureError::Unsupported(m));
        match map {
            RadialMap::Legendre { a, b } if !(0.0 <= a && a < b && b.is_finite()) => {
                return bad(format!("radial interval needs 0 ≤ a < b, got [{a}, {b}]"))
            }
            RadialMap::Rational { scale } if !(scale > 0.0 && scale.is_finite()) => {
                return bad(format!("rational map scale must be positive, got {scale}"))
            }
            RadialMap::Log { s_min, s_max } if !(s_min < s_max && s_min.is_finite() && s_max.is_finite()) => {
                return bad(format!("log map needs s_min < s_max, got [{s_min}, {s_max}]"))
            }
            _ => {}
        }
        let g = gauss_rule_1d(n, GaussWeight::Legendre)?;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (&t, &w) in g.nodes.iter().zip(&g.weights) {
            let (r, jac) = match map {
                RadialMap::Legendre { a, b } => {
                    let h = 0.5 * (b - a);
                    (a + h * (t + 1.0), h)
                }
                RadialMap::Rational { scale } => {
                    let u = 0.5 * (t + 1.0);
                    let v = 1.0 - u;
                    (scale * u / v, 0.5 * scale / (v * v))
                }
                RadialMap::Log { s_min, s_max } => {
                    let h = 0.5 * (s_max - s_min);
                    let r = (s_min + h * (t + 1.0)).exp();
                    (r, h * r)
                }
            };
            nodes.push(r);
            weights.push(w * jac);
        }
        Ok(Self {
            map,
            nodes,
            weights,
        })
    }

    pub(crate) fn from_parts(map: RadialMap, nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), weights.len());
        Self {
            map,
            nodes,
            weights,
        }
    }

    /// Same map at ⌈N/2⌉ nodes.
    pub fn halved(&self) -> Result<Self, QuadratureError> {
        Self::new(self.map, self.len().div_ceil(2))
    }

    pub fn map(&self) -> RadialMap {
        self.map
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * g(r))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bounded_map_weights_sum_to_length() {
        let r = RadialRule::new(RadialMap::Legendre { a: 1.0, b: 3.0 }, 17).unwrap();
        assert_relative_eq!(r.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        let r = RadialRule::new(RadialMap::Log { s_min: -2.0, s_max: 1.0 }, 40).unwrap();
        assert_relative_eq!(
            r.weights().iter().sum::<f64>(),
            1f64.exp() - (-2f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn nodes_are_positive_and_increasing() {
        for map in [
            RadialMap::Legendre { a: 0.0, b: 10.0 },
            RadialMap::Rational { scale: 1.0 },
            RadialMap::Log { s_min: -12.0, s_max: 12.0 },
        ] {
            let r = RadialRule::new(map, 60).unwrap();
            assert!(r.nodes()[0] > 0.0);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn rational_map_integrates_a_decaying_profile() {
        let r = RadialRule::new(RadialMap::Rational { scale: 1.0 }, 200).unwrap();
        let v = r.apply(|x| 1.0 / ((1.0 + x) * (1.0 + x)));
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }
}
