//! One quadrature pass that integrates every quantity the identity checks
//! draw on. Reports built from the same batch share their term values
//! bit for bit.

use crate::error::{Error, EvalError};
use crate::fields::{Family, ScalarField};
use crate::jet::{self, Dual, MAX_DIM};
use crate::operators::pointwise::{chain1, chain2};
use crate::operators::Local;
use crate::point::Point;
use crate::quadrature::{integrate, Estimate, Integral, QuadratureSpec};

/// Integrated quantities. Every entry is summed over the real and
/// imaginary parts of the field, so squares are |·|² and products are
/// real parts of inner products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Col {
    /// |f|²
    L2,
    /// |f/r|²
    FOverR,
    /// |f/r²|²
    FOverR2,
    /// |∂_r f|²
    RadialD1,
    /// |∂_r f + (n−2)/(2r) f|²
    HardyExpanded,
    /// |r^{1−n/2}∂_r(r^{n/2−1} f)|²
    HardyConjugated,
    /// |Δf|²
    Laplacian,
    /// |∂_r²f + (n−1)/r ∂_rf|²
    Bessel,
    /// |r^{1−n}∂_r(r^{n−1}∂_r f)|²
    BesselDivergence,
    /// |Af + n(n−4)/(4r²) f|²
    R1Expanded,
    /// |r^{1−n/2}∂_r(r^{−1}∂_r(r^{n/2} f))|²
    R1Conjugated,
    /// |r^{−1−n/2}∂_r(r³∂_r(r^{n/2−2} f))|²
    R1Cubic,
    /// |r⁻¹∂_r f + (n−4)/(2r²) f|²
    R2Expanded,
    /// |r^{1−n/2}∂_r(r^{n/2−2} f)|²
    R2Conjugated,
    /// |r⁻¹∂_r f|²
    D1OverR,
    /// |∂_r(f/r)|²
    QuotientD1,
    /// |Σ L_j² f|²
    SumL2,
    /// f ∂_r f / r³
    FD1OverR3,
    /// f ∂_r²f / r²
    FD2OverR2,
    /// f (Af) / r²
    FBesselOverR2,
    /// ∂_r(f/r) · f/r²
    QuotientCross,
    /// Af · Σ L_j² f
    BesselSumL2,
    /// Σ_j L_j(Af) · L_j f
    AngularExchange,
    /// Σ_j |L_j f / r|²
    AngularOverR,
    /// Σ_j |∂_r L_j f|²
    AngularRadialD1,
    /// Σ_j |∂_r L_j f + (n−2)/(2r) L_j f|²
    AngularHardyExpanded,
    /// Σ_j |r^{1−n/2}∂_r(r^{n/2−1} L_j f)|²
    AngularHardyConjugated,
    /// |A_div f + n(n−4)/(4r²) f|²
    LemmaSum,
}

impl Col {
    pub const COUNT: usize = Col::LemmaSum as usize + 1;

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A linear combination of columns.
pub type Combo = Vec<(Col, f64)>;

/// Integrated columns for one field on one quadrature spec.
#[derive(Clone, Debug)]
pub struct TermBatch {
    n: usize,
    field_id: String,
    is_zero: bool,
    radial: bool,
    spec_hash: String,
    seed: Option<u64>,
    monte_carlo: bool,
    integral: Integral,
}

impl TermBatch {
    pub fn compute(f: &ScalarField, spec: &QuadratureSpec) -> Result<Self, Error> {
        let n = f.dim();
        if spec.dim() != n {
            return Err(EvalError::DimensionMismatch {
                expected: n,
                found: spec.dim(),
            }
            .into());
        }
        let integral = integrate(spec, Col::COUNT, |p, out| node_values(f, p, out))?;
        Ok(Self {
            n,
            field_id: f.id(),
            is_zero: f.is_zero(),
            radial: f.is_radial(),
            spec_hash: spec.hash(),
            seed: spec.seed(),
            monte_carlo: spec.is_monte_carlo(),
            integral,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field_id(&self) -> &str {
        &self.field_id
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn spec_hash(&self) -> &str {
        &self.spec_hash
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.monte_carlo
    }

    pub fn get(&self, c: Col) -> Estimate {
        self.integral.term(c.index())
    }

    pub fn combination(&self, combo: &[(Col, f64)]) -> Estimate {
        let idx: Vec<(usize, f64)> = combo.iter().map(|&(c, k)| (c.index(), k)).collect();
        self.integral.combination(&idx)
    }

    /// Tolerance for a residual with estimated error `err` measured against
    /// `scale`: ten error estimates for deterministic rules, four standard
    /// errors for Monte-Carlo, never below 1e−10.
    pub fn tolerance(&self, err: f64, scale: f64) -> f64 {
        let k = if self.monte_carlo { 4.0 } else { 10.0 };
        if scale > 0.0 {
            (k * err / scale).max(1e-10)
        } else {
            1e-10
        }
    }
}

/// Integrand values of every column at one node.
fn node_values(f: &ScalarField, p: &Point, out: &mut [f64]) -> Result<(), EvalError> {
    out.fill(0.0);
    let angular = !f.is_radial();
    for family in f.parts() {
        part_values(family, p, angular, out)?;
    }
    Ok(())
}

fn part_values(family: &Family, p: &Point, angular: bool, out: &mut [f64]) -> Result<(), EvalError> {
    let n = p.dim();
    let nf = n as f64;
    let h = nf / 2.0;
    let k = nf * (nf - 4.0) / 4.0;
    let xs = p.coords();
    let r = p.r();

    let j2 = jet::ensure_finite(family.eval(&jet::jet2_coordinates(xs))?)?;
    let local = Local::new(xs, j2)?;
    let at = local.atoms(angular)?;
    let f = at.value;
    let bessel = at.bessel()?;

    let c1 = jet::jet1_coordinates(xs);
    let j1 = j2.to_jet1();
    let a_div = chain2(xs, j2, 1.0 - nf, nf - 1.0, 0.0)?;
    let r1b = chain2(xs, j2, 1.0 - h, -1.0, h)?;
    let r1c = chain2(xs, j2, -h - 1.0, 3.0, h - 2.0)?;
    let r2b = chain1(&c1, j1, 1.0 - h, h - 2.0)?;
    let hardy_b = chain1(&c1, j1, 1.0 - h, h - 1.0)?;
    let quotient = chain1(&c1, j1, 0.0, -1.0)?;

    let fr = f / r;
    let fr2 = fr / r;
    let hardy = at.d1 + (nf - 2.0) / (2.0 * r) * f;
    let r1 = bessel + k * fr2;
    let r2 = at.d1 / r + (nf - 4.0) / 2.0 * fr2;

    let mut add = |c: Col, v: f64| out[c.index()] += v;
    add(Col::L2, f * f);
    add(Col::FOverR, fr * fr);
    add(Col::FOverR2, fr2 * fr2);
    add(Col::RadialD1, at.d1 * at.d1);
    add(Col::HardyExpanded, hardy * hardy);
    add(Col::HardyConjugated, hardy_b * hardy_b);
    add(Col::Laplacian, at.lap * at.lap);
    add(Col::Bessel, bessel * bessel);
    add(Col::BesselDivergence, a_div * a_div);
    add(Col::R1Expanded, r1 * r1);
    add(Col::R1Conjugated, r1b * r1b);
    add(Col::R1Cubic, r1c * r1c);
    add(Col::R2Expanded, r2 * r2);
    add(Col::R2Conjugated, r2b * r2b);
    add(Col::D1OverR, (at.d1 / r).powi(2));
    add(Col::QuotientD1, quotient * quotient);
    add(Col::SumL2, at.sum_l2 * at.sum_l2);
    add(Col::FD1OverR3, f * at.d1 / (r * r * r));
    add(Col::FD2OverR2, f * at.d2 / (r * r));
    add(Col::FBesselOverR2, f * bessel / (r * r));
    add(Col::QuotientCross, quotient * fr2);
    add(Col::BesselSumL2, bessel * at.sum_l2);
    add(Col::LemmaSum, (a_div + k * fr2).powi(2));

    if !angular || at.l[..n].iter().all(|&l| l == 0.0) {
        return Ok(());
    }
    let tangential = local.tangential_jets()?;
    let (mut over_r, mut dr, mut expanded, mut conjugated) = (0.0, 0.0, 0.0, 0.0);
    for (j, hj) in tangential.iter().take(n).enumerate() {
        let l = at.l[j];
        let drl = at.drl[j];
        let t = drl + (nf - 2.0) / (2.0 * r) * l;
        let tb = chain1(&c1, *hj, 1.0 - h, h - 1.0)?;
        over_r += (l / r).powi(2);
        dr += drl * drl;
        expanded += t * t;
        conjugated += tb * tb;
    }
    add(Col::AngularOverR, over_r);
    add(Col::AngularRadialD1, dr);
    add(Col::AngularHardyExpanded, expanded);
    add(Col::AngularHardyConjugated, conjugated);
    add(Col::AngularExchange, directional_bessel(family, xs, &at.l[..n])?);
    Ok(())
}

/// h·∇(Af) from one pass in the direction h = (L_1 f, …, L_n f). Since
/// h is tangential this equals Σ_j L_j(Af) · L_j f.
fn directional_bessel(family: &Family, xs: &[f64], h: &[f64]) -> Result<f64, EvalError> {
    let mut seeded = [Dual::default(); MAX_DIM];
    for (i, (x, d)) in xs.iter().zip(h).enumerate() {
        seeded[i] = Dual::new(*x, *d);
    }
    let seeded = &seeded[..xs.len()];
    let jd = jet::ensure_finite(family.eval(&jet::jet2_coordinates(seeded))?)?;
    let local = Local::new(seeded, jd)?;
    Ok(local.atoms(false)?.bessel()?.eps)
}
