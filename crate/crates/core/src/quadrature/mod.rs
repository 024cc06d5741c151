//! L²(ℝⁿ) integrals in polar form: a radial rule times a sphere rule, or a
//! seeded Monte-Carlo sampler.
//!
//! Integrands are vector-valued so one pass over the nodes yields every
//! term an identity needs. Node contributions are reduced chunk by chunk
//! in a fixed tree order, so results do not depend on the thread count.

pub mod gauss;
pub mod io;
pub mod mc;
pub mod radial;
pub mod sphere;
pub mod sum;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use gauss::{gauss_rule_1d, GaussWeight, Rule1d};
pub use mc::{McSpec, Moments, Proposal};
pub use radial::{RadialMap, RadialRule};
pub use sphere::{radial_sphere_rule, sphere_monomial_integral, sphere_product_rule, SphereKind, SphereRule};
pub use sum::Summation;

use crate::error::{Error, EvalError, QuadratureError};
use crate::fields::{Decay, ScalarField};
use crate::jet::MAX_DIM;
use crate::operators::Operator;
use crate::point::Point;

/// Nodes per work item of a deterministic pass.
const NODE_CHUNK: usize = 512;

/// Default radial node counts by decay class.
pub const DEFAULT_RADIAL_N: usize = 120;
pub const DEFAULT_COMPACT_N: usize = 800;

/// Requested radial map family; `Auto` picks one from the field's decay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadialMapKind {
    #[default]
    Auto,
    Legendre,
    Rational,
    Log,
}

/// User-facing knobs from which [`QuadratureSpec::auto`] builds a spec.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSettings {
    pub radial_map: RadialMapKind,
    pub radial_n: Option<usize>,
    pub sphere_degree: Option<u32>,
    pub mc_samples: usize,
    /// Dimensions from here on use Monte-Carlo.
    pub mc_from_dim: usize,
    pub seed: Option<u64>,
    pub summation: Summation,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            radial_map: RadialMapKind::Auto,
            radial_n: None,
            sphere_degree: None,
            mc_samples: 1_000_000,
            mc_from_dim: 8,
            seed: None,
            summation: Summation::Pairwise,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    /// Radial rule × sphere rule; `half` is the radial rule at half
    /// resolution used for the error estimate.
    Product {
        radial: RadialRule,
        half: RadialRule,
        sphere: SphereRule,
    },
    MonteCarlo(McSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    n: usize,
    method: Method,
    summation: Summation,
}

impl QuadratureSpec {
    pub fn product(radial: RadialRule, sphere: SphereRule, summation: Summation) -> Result<Self, QuadratureError> {
        let half = radial.halved()?;
        Ok(Self {
            n: sphere.dim(),
            method: Method::Product {
                radial,
                half,
                sphere,
            },
            summation,
        })
    }

    pub fn monte_carlo(mc: McSpec, summation: Summation) -> Self {
        Self {
            n: mc.n,
            method: Method::MonteCarlo(mc),
            summation,
        }
    }

    /// Chooses rules for `field` from its decay class and angular structure.
    pub fn auto(field: &ScalarField, s: &QuadratureSettings) -> Result<Self, QuadratureError> {
        let n = field.dim();
        let angular = field.angular_degree();
        let use_mc = n >= s.mc_from_dim || angular.is_none();
        if use_mc {
            let seed = s.seed.ok_or_else(|| {
                QuadratureError::Unsupported("a seed is required for Monte-Carlo quadrature".into())
            })?;
            let proposal = match (field.decay(), field.support_ball()) {
                (_, Some((c, rho))) => Proposal::Ball {
                    center: c.to_vec(),
                    radius: rho,
                },
                (Decay::Gaussian { sigma }, _) => Proposal::Chi {
                    dof: n.saturating_sub(4).max(1),
                    scale: sigma,
                },
                (Decay::Compact { inner, outer }, _) => Proposal::UniformShell { inner, outer },
                (Decay::LogGaussian { delta }, _) => Proposal::LogNormal {
                    sigma: (0.5 / delta).sqrt(),
                },
                (Decay::None, _) => Proposal::UniformShell {
                    inner: 1.0,
                    outer: 2.0,
                },
            };
            return Ok(Self::monte_carlo(
                McSpec::new(n, proposal, s.mc_samples, seed)?,
                s.summation,
            ));
        }
        let sphere = match (s.sphere_degree, angular) {
            (Some(d), _) => sphere_product_rule(n, d)?,
            (None, Some(0)) if field.is_radial() => radial_sphere_rule(n),
            (None, Some(k)) => sphere_product_rule(n, 2 * k + 2)?,
            (None, None) => unreachable!("non-polynomial angular fields use Monte-Carlo"),
        };
        let map = default_map(field.decay(), s.radial_map);
        let count = s.radial_n.unwrap_or(match field.decay() {
            Decay::Compact { .. } => DEFAULT_COMPACT_N,
            _ => DEFAULT_RADIAL_N,
        });
        Self::product(RadialRule::new(map, count)?, sphere, s.summation)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> &Method {
        &self.method
    }

    pub fn summation(&self) -> Summation {
        self.summation
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self.method, Method::MonteCarlo(_))
    }

    pub fn seed(&self) -> Option<u64> {
        match &self.method {
            Method::MonteCarlo(mc) => Some(mc.seed),
            Method::Product { .. } => None,
        }
    }

    /// Number of integrand evaluations per pass.
    pub fn node_count(&self) -> usize {
        match &self.method {
            Method::Product {
                radial,
                half,
                sphere,
            } => (radial.len() + half.len()) * sphere.len(),
            Method::MonteCarlo(mc) => mc.samples,
        }
    }

    /// One-line human description.
    pub fn describe(&self) -> String {
        match &self.method {
            Method::Product { radial, sphere, .. } => {
                let s = match sphere.kind() {
                    SphereKind::Product { degree } => format!("sphere d={degree} ({} dirs)", sphere.len()),
                    SphereKind::Radial => "radial sphere".into(),
                    SphereKind::Imported => format!("imported sphere ({} dirs)", sphere.len()),
                };
                format!("{} N={} × {s}", radial.map(), radial.len())
            }
            Method::MonteCarlo(mc) => format!("mc {} M={} seed={}", mc.proposal, mc.samples, mc.seed),
        }
    }

    /// Short fingerprint of every node, weight and sampler parameter.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update([self.summation as u8]);
        match &self.method {
            Method::Product {
                radial,
                half,
                sphere,
            } => {
                h.update(b"product");
                for r in [radial, half] {
                    io::hash_floats(&mut h, r.nodes());
                    io::hash_floats(&mut h, r.weights());
                }
                h.update(io::sphere_rule_hash(sphere).as_bytes());
            }
            Method::MonteCarlo(mc) => {
                h.update(b"mc");
                h.update(mc.proposal.to_string().as_bytes());
                h.update((mc.samples as u64).to_le_bytes());
                h.update(mc.seed.to_le_bytes());
            }
        }
        io::hex(&h.finalize()[..8])
    }
}

fn default_map(decay: Decay, kind: RadialMapKind) -> RadialMap {
    match (decay, kind) {
        (Decay::Gaussian { sigma }, RadialMapKind::Auto | RadialMapKind::Legendre) => {
            RadialMap::Legendre { a: 0.0, b: 10.0 * sigma }
        }
        (Decay::Gaussian { sigma }, RadialMapKind::Log) => RadialMap::Log {
            s_min: sigma.ln() - 36.0,
            s_max: (10.0 * sigma).ln(),
        },
        (Decay::Gaussian { sigma }, RadialMapKind::Rational) => RadialMap::Rational { scale: sigma },
        (Decay::Compact { inner, outer }, RadialMapKind::Auto | RadialMapKind::Legendre) => {
            RadialMap::Legendre { a: inner, b: outer }
        }
        (Decay::Compact { inner, outer }, RadialMapKind::Log) => RadialMap::Log {
            s_min: inner.ln(),
            s_max: outer.ln(),
        },
        (Decay::Compact { inner, outer }, RadialMapKind::Rational) => RadialMap::Rational {
            scale: 0.5 * (inner + outer),
        },
        (Decay::LogGaussian { delta }, RadialMapKind::Auto | RadialMapKind::Log) => {
            let s = log_extent(delta);
            RadialMap::Log { s_min: -s, s_max: s }
        }
        (Decay::LogGaussian { delta }, RadialMapKind::Legendre) => {
            let s = log_extent(delta);
            RadialMap::Legendre { a: 0.0, b: s.exp() }
        }
        (Decay::LogGaussian { .. }, RadialMapKind::Rational) => RadialMap::Rational { scale: 1.0 },
        (Decay::None, _) => RadialMap::Legendre { a: 0.0, b: 1.0 },
    }
}

/// Half-width S in s = ln r beyond which e^{−2δs²} < e^{−50}.
pub fn log_extent(delta: f64) -> f64 {
    (25.0 / delta).sqrt()
}

/// A value with its estimated quadrature error (half-resolution difference
/// or Monte-Carlo standard error).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Integrals of every component of a vector integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct Integral {
    values: Vec<f64>,
    half: Option<Vec<f64>>,
    moments: Option<Moments>,
}

impl Integral {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.moments.is_some()
    }

    pub fn term(&self, t: usize) -> Estimate {
        self.combination(&[(t, 1.0)])
    }

    /// Σ c_t I_t with the error of the combination itself, so correlated
    /// errors cancel where they should.
    pub fn combination(&self, coefs: &[(usize, f64)]) -> Estimate {
        let value: f64 = coefs.iter().map(|&(t, c)| c * self.values[t]).sum();
        let error = match (&self.half, &self.moments) {
            (Some(h), _) => {
                let coarse: f64 = coefs.iter().map(|&(t, c)| c * h[t]).sum();
                (value - coarse).abs()
            }
            (None, Some(m)) => m.standard_error(coefs),
            (None, None) => 0.0,
        };
        Estimate { value, error }
    }
}

fn eval_error(p: &Point, source: EvalError) -> QuadratureError {
    QuadratureError::Eval {
        location: p.coords().to_vec(),
        source,
    }
}

fn product_pass<F>(
    n: usize,
    radial: &RadialRule,
    sphere: &SphereRule,
    terms: usize,
    summation: Summation,
    g: &F,
) -> Result<Vec<f64>, QuadratureError>
where
    F: Fn(&Point, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    let ns = sphere.len();
    let total = radial.len() * ns;
    let chunks = total.div_ceil(NODE_CHUNK);
    let partials: Vec<Result<Vec<f64>, QuadratureError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * NODE_CHUNK;
            let end = (start + NODE_CHUNK).min(total);
            let mut block = vec![0.0; (end - start) * terms];
            for (row, idx) in block.chunks_exact_mut(terms).zip(start..end) {
                let (i, k) = (idx / ns, idx % ns);
                let r = radial.nodes()[i];
                let p = Point::polar(r, sphere.direction(k)).map_err(|e| {
                    QuadratureError::Eval {
                        location: sphere.direction(k).iter().map(|w| r * w).collect(),
                        source: e,
                    }
                })?;
                g(&p, row).map_err(|e| eval_error(&p, e))?;
                let w = radial.weights()[i] * r.powi(n as i32 - 1) * sphere.weight(k);
                for v in row.iter_mut() {
                    *v *= w;
                }
            }
            Ok(summation.columns(&block, terms))
        })
        .collect();
    let partials = partials.into_iter().collect::<Result<Vec<_>, _>>()?;
    let flat: Vec<f64> = partials.concat();
    let sums = summation.columns(&flat, terms);
    check_finite(&sums)?;
    Ok(sums)
}

fn check_finite(v: &[f64]) -> Result<(), QuadratureError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(term) => Err(QuadratureError::NonFinite { term }),
        None => Ok(()),
    }
}

fn mc_pass<F>(mc: &McSpec, terms: usize, summation: Summation, g: &F) -> Result<Moments, QuadratureError>
where
    F: Fn(&Point, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    let partials: Vec<Result<Moments, QuadratureError>> = (0..mc.chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = mc.rng(c);
            let len = mc.chunk_len(c);
            let mut block = vec![0.0; len * terms];
            for row in block.chunks_exact_mut(terms) {
                let (p, w) = mc.draw(&mut rng)?;
                g(&p, row).map_err(|e| eval_error(&p, e))?;
                for v in row.iter_mut() {
                    *v *= w;
                }
            }
            Ok(Moments::from_block(&block, terms, summation))
        })
        .collect();
    let partials = partials.into_iter().collect::<Result<Vec<_>, _>>()?;
    let m = sum::tree_reduce(partials, &Moments::merge)
        .ok_or_else(|| QuadratureError::Unsupported("no samples".into()))?;
    check_finite(&m.mean)?;
    Ok(m)
}

/// ∫_{ℝⁿ} g(x) dx for a vector integrand with `terms` components. `g`
/// writes its components into the provided slice.
pub fn integrate<F>(spec: &QuadratureSpec, terms: usize, g: F) -> Result<Integral, QuadratureError>
where
    F: Fn(&Point, &mut [f64]) -> Result<(), EvalError> + Sync,
{
    match &spec.method {
        Method::Product {
            radial,
            half,
            sphere,
        } => {
            let values = product_pass(spec.n, radial, sphere, terms, spec.summation, &g)?;
            let coarse = product_pass(spec.n, half, sphere, terms, spec.summation, &g)?;
            Ok(Integral {
                values,
                half: Some(coarse),
                moments: None,
            })
        }
        Method::MonteCarlo(mc) => {
            let m = mc_pass(mc, terms, spec.summation, &g)?;
            Ok(Integral {
                values: m.mean.clone(),
                half: None,
                moments: Some(m),
            })
        }
    }
}

/// Re(Pu | Qv) in L²(ℝⁿ); for complex fields the real and imaginary parts
/// both contribute.
pub fn l2_inner(
    u: (&Operator, &ScalarField),
    v: (&Operator, &ScalarField),
    spec: &QuadratureSpec,
) -> Result<Estimate, Error> {
    let n = spec.dim();
    for d in [u.0.dim(), u.1.dim(), v.0.dim(), v.1.dim()] {
        if d != n {
            return Err(EvalError::DimensionMismatch {
                expected: n,
                found: d,
            }
            .into());
        }
    }
    let integral = integrate(spec, 1, |p, out| {
        let a = u.0.apply(u.1, p).map_err(to_eval)?;
        let b = v.0.apply(v.1, p).map_err(to_eval)?;
        out[0] = (a * b.conj()).re;
        Ok(())
    })?;
    Ok(integral.term(0))
}

fn to_eval(e: Error) -> EvalError {
    match e {
        Error::Eval(e) => e,
        _ => EvalError::NonFinite,
    }
}

/// Every direction of a rule, flattened; used by tests and diagnostics.
pub fn directions(rule: &SphereRule) -> Vec<[f64; MAX_DIM]> {
    (0..rule.len())
        .map(|k| {
            let mut w = [0.0; MAX_DIM];
            w[..rule.dim()].copy_from_slice(rule.direction(k));
            w
        })
        .collect()
}
