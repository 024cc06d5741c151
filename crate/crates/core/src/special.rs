//! Gamma values at half-integers and sphere measures.

use std::f64::consts::PI;

/// Γ(k/2) for a positive integer `k`, by the recurrence Γ(s+1) = sΓ(s)
/// from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    let (mut acc, mut s) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while s < target {
        acc *= s;
        s += 1.0;
    }
    acc
}

/// Surface measure |S^{n−1}| = 2π^{n/2}/Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n as u32)
}

/// ∫₀^∞ r^k e^{−r²/σ²} dr = σ^{k+1} Γ((k+1)/2) / 2, for k > −1.
pub fn gaussian_moment(k: i32, sigma: f64) -> f64 {
    assert!(k > -1, "moment r^{k} is not integrable at the origin");
    sigma.powi(k + 1) * gamma_half((k + 1) as u32) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_values() {
        assert_relative_eq!(gamma_half(1), PI.sqrt(), max_relative = 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(8), 6.0);
        assert_relative_eq!(gamma_half(5), 0.75 * PI.sqrt(), max_relative = 1e-15);
        for k in 1..40u32 {
            let lg = libm::lgamma(k as f64 / 2.0).exp();
            assert_relative_eq!(gamma_half(k), lg, max_relative = 1e-12);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(5), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
    }
}
