//! Gauss rules on (−1, 1) by Newton iteration on the three-term recurrence.

use crate::error::QuadratureError;

const MAX_ITERATIONS: usize = 100;
const EPS: f64 = 1e-14;

/// Weight function on (−1, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GaussWeight {
    /// w ≡ 1
    Legendre,
    /// w = (1 − x)^a (1 + x)^b, a, b > −1
    Jacobi { a: f64, b: f64 },
}

/// Nodes in increasing order with matching weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i g(x_i)
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// N-point Gauss rule for the given weight; exact for polynomials of degree
/// at most 2N − 1.
pub fn gauss_rule_1d(n: usize, weight: GaussWeight) -> Result<Rule1d, QuadratureError> {
    if n == 0 {
        return Err(QuadratureError::Unsupported(
            "a Gauss rule needs at least one node".into(),
        ));
    }
    let mut rule = match weight {
        GaussWeight::Legendre => legendre(n)?,
        GaussWeight::Jacobi { a, b } => {
            if !(a > -1.0 && b > -1.0) {
                return Err(QuadratureError::Unsupported(format!(
                    "Jacobi exponents must exceed −1, got a = {a}, b = {b}"
                )));
            }
            jacobi(n, a, b)?
        }
    };
    let symmetric = match weight {
        GaussWeight::Legendre => true,
        GaussWeight::Jacobi { a, b } => a == b,
    };
    if symmetric {
        symmetrize(&mut rule);
    }
    Ok(rule)
}

/// Forces exact mirror symmetry x_i = −x_{N−1−i} for even weights.
fn symmetrize(rule: &mut Rule1d) {
    let n = rule.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
}

/// P_N(x) and P_{N−1}(x).
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn legendre(n: usize) -> Result<Rule1d, QuadratureError> {
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let (p, q) = legendre_pair(n, z);
            let dp = nf * (z * p - q) / (z * z - 1.0);
            let step = p / dp;
            z -= step;
            if step.abs() <= EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::NoConvergence {
                order: n,
                iterations: MAX_ITERATIONS,
            });
        }
        let (p, q) = legendre_pair(n, z);
        let dp = nf * (z * p - q) / (z * z - 1.0);
        nodes[n - 1 - i] = z;
        weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    Ok(Rule1d { nodes, weights })
}

/// Jacobi P_N^{(a,b)}(z), P_{N−1}^{(a,b)}(z) and d/dz P_N^{(a,b)}(z).
fn jacobi_eval(n: usize, a: f64, b: f64, z: f64) -> (f64, f64, f64) {
    let ab = a + b;
    let mut p1 = (a - b + (2.0 + ab) * z) / 2.0;
    let mut p2 = 1.0;
    let mut temp = 2.0 + ab;
    if n == 1 {
        let dp = (2.0 + ab) / 2.0;
        return (p1, p2, dp);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        temp = 2.0 * jf + ab;
        let aa = 2.0 * jf * (jf + ab) * (temp - 2.0);
        let bb = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
        let cc = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
        p1 = (bb * p2 - cc * p3) / aa;
    }
    let nf = n as f64;
    let dp = (nf * (a - b - temp * z) * p1 + 2.0 * (nf + a) * (nf + b) * p2) / (temp * (1.0 - z * z));
    (p1, p2, dp)
}

#[allow(clippy::approx_constant)]
fn jacobi(n: usize, a: f64, b: f64) -> Result<Rule1d, QuadratureError> {
    let nf = n as f64;
    let ab = a + b;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    // Largest root first; initial guesses follow the classical asymptotic fits.
    let mut z = 0.0;
    for i in 0..n {
        if i == 0 {
            let an = a / nf;
            let bn = b / nf;
            let r1 = (1.0 + a) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if i == 1 {
            let r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.156 * a));
            let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * a) / nf;
            let r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * a.abs()) / nf;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if i == 2 {
            let r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
            let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
            let r3 = 1.0 + 8.0 * b / ((6.28 + b) * nf * nf);
            z -= (x[0] - z) * r1 * r2 * r3;
        } else if i == n - 2 {
            let r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
            let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * nf * nf));
            z += (z - x[n - 4]) * r1 * r2 * r3;
        } else if i == n - 1 {
            let r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
            let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
            let r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * nf * nf));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
        }
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let (p, _, dp) = jacobi_eval(n, a, b, z);
            let step = p / dp;
            z -= step;
            if step.abs() <= EPS * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::NoConvergence {
                order: n,
                iterations: MAX_ITERATIONS,
            });
        }
        let (_, p2, dp) = jacobi_eval(n, a, b, z);
        x[i] = z;
        let temp = 2.0 * nf + ab;
        let lg = libm::lgamma(a + nf) + libm::lgamma(b + nf)
            - libm::lgamma(nf + 1.0)
            - libm::lgamma(nf + ab + 1.0);
        w[i] = lg.exp() * temp * 2f64.powf(ab) / (dp * p2);
    }
    x.reverse();
    w.reverse();
    Ok(Rule1d {
        nodes: x,
        weights: w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_legendre_rules() {
        let r = gauss_rule_1d(1, GaussWeight::Legendre).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 2.0, max_relative = 1e-15);
        let r = gauss_rule_1d(2, GaussWeight::Legendre).unwrap();
        assert_relative_eq!(r.nodes[1], 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(r.nodes[0], -1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn jacobi_one_point() {
        let r = gauss_rule_1d(1, GaussWeight::Jacobi { a: 1.0, b: 1.0 }).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 4.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_nodes_is_rejected() {
        assert!(gauss_rule_1d(0, GaussWeight::Legendre).is_err());
    }
}
