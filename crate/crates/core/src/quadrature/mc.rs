//! Importance-sampled Monte-Carlo estimates of ∫_{ℝⁿ} g dx.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::QuadratureError;
use crate::jet::MAX_DIM;
use crate::point::Point;
use crate::special::{gamma_half, sphere_area};

/// Samples per independently seeded stream.
pub const CHUNK: usize = 4096;

/// Radial (or ball) proposal density.
#[derive(Clone, Debug, PartialEq)]
pub enum Proposal {
    /// ρ = s·χ_k, uniform direction.
    Chi { dof: usize, scale: f64 },
    /// ρ uniform on [inner, outer], uniform direction.
    UniformShell { inner: f64, outer: f64 },
    /// ln ρ ~ N(0, σ²), uniform direction.
    LogNormal { sigma: f64 },
    /// x uniform in the ball |x − c| < radius.
    Ball { center: Vec<f64>, radius: f64 },
}

impl fmt::Display for Proposal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proposal::Chi { dof, scale } => write!(f, "chi[k={dof},s={scale}]"),
            Proposal::UniformShell { inner, outer } => write!(f, "shell[{inner},{outer}]"),
            Proposal::LogNormal { sigma } => write!(f, "lognormal[{sigma}]"),
            Proposal::Ball { center, radius } => write!(f, "ball[c={center:?},rho={radius}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSpec {
    pub n: usize,
    pub proposal: Proposal,
    pub samples: usize,
    pub seed: u64,
}

impl McSpec {
    pub fn new(n: usize, proposal: Proposal, samples: usize, seed: u64) -> Result<Self, QuadratureError> {
        let bad = |m: String| Err(QuadratureError::Unsupported(m));
        if !(1..=MAX_DIM).contains(&n) {
            return bad(format!("dimension {n} outside 1..={MAX_DIM}"));
        }
        if samples < 2 {
            return bad("Monte-Carlo needs at least two samples".into());
        }
        match &proposal {
            Proposal::Chi { dof, scale } if *dof == 0 || !(*scale > 0.0) => {
                return bad(format!("chi proposal needs k ≥ 1 and s > 0, got k = {dof}, s = {scale}"))
            }
            Proposal::UniformShell { inner, outer } if !(0.0 <= *inner && inner < outer) => {
                return bad(format!("shell proposal needs 0 ≤ inner < outer, got [{inner}, {outer}]"))
            }
            Proposal::LogNormal { sigma } if !(*sigma > 0.0) => {
                return bad(format!("log-normal proposal needs σ > 0, got {sigma}"))
            }
            Proposal::Ball { center, radius } if center.len() != n || !(*radius > 0.0) => {
                return bad("ball proposal needs a center in ℝⁿ and a positive radius".into())
            }
            _ => {}
        }
        Ok(Self {
            n,
            proposal,
            samples,
            seed,
        })
    }

    pub fn chunks(&self) -> usize {
        self.samples.div_ceil(CHUNK)
    }

    /// Generator for chunk `c`: the user seed with stream number `c`.
    pub(crate) fn rng(&self, chunk: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk as u64);
        rng
    }

    pub(crate) fn chunk_len(&self, chunk: usize) -> usize {
        (self.samples - chunk * CHUNK).min(CHUNK)
    }

    /// One sample and its importance weight 1/p(x).
    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> Result<(Point, f64), QuadratureError> {
        let n = self.n;
        let area = sphere_area(n);
        loop {
            let mut omega = [0.0; MAX_DIM];
            let mut len2 = 0.0f64;
            for w in omega.iter_mut().take(n) {
                *w = rng.sample(StandardNormal);
                len2 += *w * *w;
            }
            if len2 == 0.0 {
                continue;
            }
            let len = len2.sqrt();
            for w in omega.iter_mut().take(n) {
                *w /= len;
            }
            let (x, weight) = match &self.proposal {
                Proposal::Chi { dof, scale } => {
                    let mut q = 0.0;
                    for _ in 0..*dof {
                        let z: f64 = rng.sample(StandardNormal);
                        q += z * z;
                    }
                    let rho = scale * q.sqrt();
                    let k = *dof as f64;
                    // ln p(ρ) = (k−1)ln ρ − ρ²/(2s²) − (k/2−1)ln 2 − k ln s − ln Γ(k/2)
                    let ln_p = (k - 1.0) * rho.ln() - rho * rho / (2.0 * scale * scale)
                        - (k / 2.0 - 1.0) * std::f64::consts::LN_2
                        - k * scale.ln()
                        - gamma_half(*dof as u32).ln();
                    let w = area * ((n as f64 - 1.0) * rho.ln() - ln_p).exp();
                    (scaled(&omega[..n], rho), w)
                }
                Proposal::UniformShell { inner, outer } => {
                    let rho = rng.random_range(*inner..*outer);
                    let w = area * rho.powi(n as i32 - 1) * (outer - inner);
                    (scaled(&omega[..n], rho), w)
                }
                Proposal::LogNormal { sigma } => {
                    let z: f64 = rng.sample(StandardNormal);
                    let s = sigma * z;
                    // p(ρ) = φ_σ(s)/ρ
                    let ln_phi = -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
                    let w = area * (n as f64 * s - ln_phi).exp();
                    (scaled(&omega[..n], s.exp()), w)
                }
                Proposal::Ball { center, radius } => {
                    let u: f64 = rng.random();
                    let rho = radius * u.powf(1.0 / n as f64);
                    let mut x = [0.0; MAX_DIM];
                    for i in 0..n {
                        x[i] = center[i] + rho * omega[i];
                    }
                    let vol = area * radius.powi(n as i32) / n as f64;
                    (x, vol)
                }
            };
            if let Ok(p) = Point::new(&x[..n]) {
                return Ok((p, weight));
            }
        }
    }
}

fn scaled(omega: &[f64], rho: f64) -> [f64; MAX_DIM] {
    let mut x = [0.0; MAX_DIM];
    for (xi, w) in x.iter_mut().zip(omega) {
        *xi = rho * w;
    }
    x
}

/// Count, mean vector and centered co-moment matrix (row-major `T × T`).
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    pub comoment: Vec<f64>,
}

impl Moments {
    /// From a row-major block of `rows × cols` sample values.
    pub(crate) fn from_block(block: &[f64], cols: usize, sum: super::Summation) -> Self {
        let rows = block.len() / cols;
        let mean: Vec<f64> = sum
            .columns(block, cols)
            .into_iter()
            .map(|s| s / rows as f64)
            .collect();
        let mut comoment = vec![0.0; cols * cols];
        let mut centered = vec![0.0; cols];
        for row in block.chunks_exact(cols) {
            for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(&mean)) {
                *c = v - m;
            }
            for a in 0..cols {
                let ca = centered[a];
                for b in a..cols {
                    comoment[a * cols + b] += ca * centered[b];
                }
            }
        }
        for a in 0..cols {
            for b in 0..a {
                comoment[a * cols + b] = comoment[b * cols + a];
            }
        }
        Self {
            count: rows,
            mean,
            comoment,
        }
    }

    /// Chan et al. merge of two disjoint sample sets.
    pub(crate) fn merge(self, other: Self) -> Self {
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let cols = self.mean.len();
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        let mean = self
            .mean
            .iter()
            .zip(&delta)
            .map(|(a, d)| a + d * nb / n)
            .collect();
        let f = na * nb / n;
        let mut comoment = self.comoment;
        for a in 0..cols {
            for b in 0..cols {
                comoment[a * cols + b] += other.comoment[a * cols + b] + delta[a] * delta[b] * f;
            }
        }
        Self {
            count: self.count + other.count,
            mean,
            comoment,
        }
    }

    /// Standard error of Σ c_t · mean_t.
    pub fn standard_error(&self, coefs: &[(usize, f64)]) -> f64 {
        let cols = self.mean.len();
        let mut var = 0.0;
        for &(a, ca) in coefs {
            for &(b, cb) in coefs {
                var += ca * cb * self.comoment[a * cols + b];
            }
        }
        let n = self.count as f64;
        (var.max(0.0) / (n * (n - 1.0))).sqrt()
    }
}
