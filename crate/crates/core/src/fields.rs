//! Catalog of explicit test functions on ℝⁿ.
//!
//! Each family is a pure evaluator over any [`Scalar`], so the same closed
//! form feeds the jet algebra, the finite-difference oracles and the
//! directional third-derivative passes. Complex-valued fields are pairs of
//! real families; every inner product sums the two parts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{EvalError, FieldError};
use crate::jet::{self, ensure_finite, Jet1, Jet2, Scalar, MAX_DIM};
use crate::point::Point;
use crate::special::{gaussian_moment, sphere_area};

/// One member of the test-function catalog, without its dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// f ≡ 0.
    Zero,
    /// e^{−r²/(2σ²)}.
    GaussianRadial { sigma: f64 },
    /// x^α e^{−r²/(2σ²)}; missing trailing exponents are zero.
    PolyGaussian { alpha: Vec<u32>, sigma: f64 },
    /// Smooth radial bump supported on `inner ≤ r ≤ outer`, rising and
    /// falling over `width`.
    AnnulusBump { inner: f64, outer: f64, width: f64 },
    /// x_axis e^{−r²/(2σ²)}.
    SolidGaussian { axis: usize, sigma: f64 },
    /// r^{−(n−4)/2} e^{−δ (ln r)²}.
    NearExtremiser { delta: f64 },
    /// exp(1 − 1/(1 − |x−c|²/ρ²)) on the ball |x − c| < ρ.
    ShiftedBump { center: Vec<f64>, radius: f64 },
}

/// A family together with the ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyParams {
    pub family: Family,
    pub n: usize,
}

impl FamilyParams {
    pub fn new(family: Family, n: usize) -> Self {
        Self { family, n }
    }
}

/// Where the field is C^∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Everywhere,
    Punctured,
}

/// Decay class, used to pick a radial rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// Vanishes identically.
    None,
    /// Supported in `inner ≤ r ≤ outer`.
    Compact { inner: f64, outer: f64 },
    /// Bounded by a polynomial times e^{−r²/(2σ²)}.
    Gaussian { sigma: f64 },
    /// Gaussian in s = ln r: e^{−δ s²} up to powers of r.
    LogGaussian { delta: f64 },
}

impl Family {
    fn validate(&self, n: usize) -> Result<(), FieldError> {
        let bad = |msg: String| Err(FieldError::InvalidParameter(msg));
        match self {
            Family::Zero => Ok(()),
            Family::GaussianRadial { sigma } | Family::SolidGaussian { sigma, .. }
                if !(*sigma > 0.0 && sigma.is_finite()) =>
            {
                bad(format!("sigma must be positive, got {sigma}"))
            }
            Family::GaussianRadial { .. } => Ok(()),
            Family::SolidGaussian { axis, .. } => {
                if *axis < n {
                    Ok(())
                } else {
                    bad(format!("axis {axis} must be below n = {n}"))
                }
            }
            Family::PolyGaussian { alpha, sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    bad(format!("sigma must be positive, got {sigma}"))
                } else if alpha.len() > n {
                    bad(format!("multi-index has {} entries for n = {n}", alpha.len()))
                } else {
                    Ok(())
                }
            }
            Family::AnnulusBump {
                inner,
                outer,
                width,
            } => {
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    bad(format!("need 0 < r0 < r1, got r0 = {inner}, r1 = {outer}"))
                } else if !(*width > 0.0 && width.is_finite()) {
                    bad(format!("transition width must be positive, got {width}"))
                } else {
                    Ok(())
                }
            }
            Family::NearExtremiser { delta } => {
                if *delta > 0.0 && delta.is_finite() {
                    Ok(())
                } else {
                    bad(format!("delta must be positive, got {delta}"))
                }
            }
            Family::ShiftedBump { center, radius } => {
                let c = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                if center.len() != n {
                    bad(format!("center has {} entries for n = {n}", center.len()))
                } else if !(*radius > 0.0 && c > *radius) {
                    bad(format!(
                        "need |c| > rho > 0 so the support avoids the origin, got |c| = {c}, rho = {radius}"
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_radial(&self) -> bool {
        match self {
            Family::Zero
            | Family::GaussianRadial { .. }
            | Family::AnnulusBump { .. }
            | Family::NearExtremiser { .. } => true,
            Family::PolyGaussian { alpha, .. } => alpha.iter().all(|&a| a == 0),
            Family::SolidGaussian { .. } | Family::ShiftedBump { .. } => false,
        }
    }

    /// Degree of the angular dependence when the field is a polynomial in
    /// x/|x| times a radial profile; `None` otherwise.
    pub fn angular_degree(&self) -> Option<u32> {
        match self {
            Family::PolyGaussian { alpha, .. } => Some(alpha.iter().sum()),
            Family::SolidGaussian { .. } => Some(1),
            Family::ShiftedBump { .. } => None,
            _ => Some(0),
        }
    }

    fn smoothness(&self) -> Smoothness {
        match self {
            Family::NearExtremiser { .. } => Smoothness::Punctured,
            _ => Smoothness::Everywhere,
        }
    }

    fn decay(&self) -> Decay {
        match self {
            Family::Zero => Decay::None,
            Family::GaussianRadial { sigma }
            | Family::PolyGaussian { sigma, .. }
            | Family::SolidGaussian { sigma, .. } => Decay::Gaussian { sigma: *sigma },
            Family::AnnulusBump { inner, outer, .. } => Decay::Compact {
                inner: *inner,
                outer: *outer,
            },
            Family::NearExtremiser { delta } => Decay::LogGaussian { delta: *delta },
            Family::ShiftedBump { center, radius } => {
                let c = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                Decay::Compact {
                    inner: c - radius,
                    outer: c + radius,
                }
            }
        }
    }

    /// Evaluates the family at `x` in any scalar algebra.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S, EvalError> {
        match self {
            Family::Zero => Ok(S::constant(0.0)),
            Family::GaussianRadial { sigma } => Ok(gaussian(x, *sigma)),
            Family::PolyGaussian { alpha, sigma } => {
                let mut acc = gaussian(x, *sigma);
                for (xi, &a) in x.iter().zip(alpha) {
                    acc = acc * xi.powi(a);
                }
                Ok(acc)
            }
            Family::SolidGaussian { axis, sigma } => Ok(x[*axis] * gaussian(x, *sigma)),
            Family::AnnulusBump {
                inner,
                outer,
                width,
            } => {
                let r = jet::norm(x)?;
                let rise = smooth_step((r - *inner) * (1.0 / width))?;
                if rise.value() == 0.0 {
                    return Ok(S::constant(0.0));
                }
                let fall = smooth_step((-r + *outer) * (1.0 / width))?;
                Ok(rise * fall)
            }
            Family::NearExtremiser { delta } => {
                let n = x.len() as f64;
                let s = jet::norm(x)?.ln()?;
                Ok((s * (-(n - 4.0) / 2.0) - s * s * *delta).exp())
            }
            Family::ShiftedBump { center, radius } => {
                let mut q = S::constant(0.0);
                for (xi, ci) in x.iter().zip(center) {
                    let d = *xi - *ci;
                    q = q + d * d;
                }
                let q = q * (1.0 / (radius * radius));
                if q.value() >= 1.0 {
                    return Ok(S::constant(0.0));
                }
                Ok((-(-q + 1.0).recip()? + 1.0).exp())
            }
        }
    }
}

fn gaussian<S: Scalar>(x: &[S], sigma: f64) -> S {
    (jet::sum_of_squares(x) * (-0.5 / (sigma * sigma))).exp()
}

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1, ψ(t)/(ψ(t)+ψ(1−t)) between, ψ(t) = e^{−1/t}.
fn smooth_step<S: Scalar>(t: S) -> Result<S, EvalError> {
    let v = t.value();
    if v <= 0.0 {
        return Ok(S::constant(0.0));
    }
    if v >= 1.0 {
        return Ok(S::constant(1.0));
    }
    let a = (-t.recip()?).exp();
    let b = (-(-t + 1.0).recip()?).exp();
    a.try_div(a + b)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Zero => write!(f, "zero"),
            Family::GaussianRadial { sigma } => write!(f, "gaussian:sigma={sigma}"),
            Family::PolyGaussian { alpha, sigma } => {
                let a: Vec<String> = alpha.iter().map(|v| v.to_string()).collect();
                write!(f, "poly-gaussian:alpha={},sigma={sigma}", a.join("/"))
            }
            Family::AnnulusBump {
                inner,
                outer,
                width,
            } => write!(f, "annulus-bump:r0={inner},r1={outer},width={width}"),
            Family::SolidGaussian { axis, sigma } => {
                write!(f, "solid-gaussian:axis={},sigma={sigma}", axis + 1)
            }
            Family::NearExtremiser { delta } => write!(f, "near-extremiser:delta={delta}"),
            Family::ShiftedBump { center, radius } => {
                let c: Vec<String> = center.iter().map(|v| v.to_string()).collect();
                write!(f, "shifted-bump:center={},rho={radius}", c.join("/"))
            }
        }
    }
}

/// Parses `family:key=val,…`. Axes are 1-based; vectors use `/` separators.
/// `shifted-bump` requires a full center vector since the dimension is not
/// known at parse time.
impl FromStr for Family {
    type Err = FieldError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| FieldError::Parse {
            spec: spec.to_string(),
            reason,
        };
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut kv = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{item}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |kv: &mut BTreeMap<String, String>, key: &str, default: Option<f64>| {
            match kv.remove(key) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{key}` must be a number, got `{v}`"))),
                None => default.ok_or_else(|| err(format!("missing parameter `{key}`"))),
            }
        };
        let family = match name.trim() {
            "zero" => Family::Zero,
            "gaussian" | "gaussian-radial" => Family::GaussianRadial {
                sigma: num(&mut kv, "sigma", Some(1.0))?,
            },
            "poly-gaussian" => {
                let alpha = kv
                    .remove("alpha")
                    .ok_or_else(|| err("missing parameter `alpha`".into()))?
                    .split('/')
                    .map(|a| {
                        a.trim()
                            .parse::<u32>()
                            .map_err(|_| err(format!("bad multi-index entry `{a}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Family::PolyGaussian {
                    alpha,
                    sigma: num(&mut kv, "sigma", Some(1.0))?,
                }
            }
            "annulus-bump" => {
                let inner = num(&mut kv, "r0", None)?;
                let outer = num(&mut kv, "r1", None)?;
                let width = num(&mut kv, "width", Some((outer - inner) / 2.0))?;
                Family::AnnulusBump {
                    inner,
                    outer,
                    width,
                }
            }
            "solid-gaussian" => {
                let axis = num(&mut kv, "axis", Some(1.0))?;
                if axis < 1.0 || axis.fract() != 0.0 {
                    return Err(err(format!("axis must be a positive integer, got {axis}")));
                }
                Family::SolidGaussian {
                    axis: axis as usize - 1,
                    sigma: num(&mut kv, "sigma", Some(1.0))?,
                }
            }
            "near-extremiser" => Family::NearExtremiser {
                delta: num(&mut kv, "delta", None)?,
            },
            "shifted-bump" => {
                let center = kv
                    .remove("center")
                    .ok_or_else(|| err("missing parameter `center`".into()))?
                    .split('/')
                    .map(|a| {
                        a.trim()
                            .parse::<f64>()
                            .map_err(|_| err(format!("bad center entry `{a}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Family::ShiftedBump {
                    center,
                    radius: num(&mut kv, "rho", None)?,
                }
            }
            other => return Err(err(format!("unknown family `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(err(format!("unexpected parameter `{k}`")));
        }
        Ok(family)
    }
}

/// A validated field on ℝⁿ, real or complex.
#[derive(Clone, Debug)]
pub struct ScalarField {
    n: usize,
    re: Family,
    im: Option<Family>,
    radial: bool,
    smooth_on: Smoothness,
    decay: Decay,
    closed_forms: BTreeMap<&'static str, f64>,
}

/// Builds a real field from catalog parameters.
pub fn make_field(p: &FamilyParams) -> Result<ScalarField, FieldError> {
    if p.n == 0 || p.n > MAX_DIM {
        return Err(FieldError::InvalidParameter(format!(
            "dimension {} outside 1..={MAX_DIM}",
            p.n
        )));
    }
    p.family.validate(p.n)?;
    Ok(ScalarField {
        n: p.n,
        re: p.family.clone(),
        im: None,
        radial: p.family.is_radial(),
        smooth_on: p.family.smoothness(),
        decay: p.family.decay(),
        closed_forms: closed_form_norms(p),
    })
}

/// The standard sweep: one representative of every family plus a complex
/// field. `ShiftedBump` is centered at 2e₁ with radius 1.
pub fn catalog(n: usize) -> Result<Vec<ScalarField>, FieldError> {
    let mut center = vec![0.0; n];
    if let Some(c) = center.first_mut() {
        *c = 2.0;
    }
    let families = [
        Family::Zero,
        Family::GaussianRadial { sigma: 1.0 },
        Family::PolyGaussian {
            alpha: vec![1, 1],
            sigma: 1.0,
        },
        Family::PolyGaussian {
            alpha: vec![2],
            sigma: 0.8,
        },
        Family::AnnulusBump {
            inner: 0.5,
            outer: 2.0,
            width: 0.5,
        },
        Family::SolidGaussian {
            axis: 0,
            sigma: 1.0,
        },
        Family::NearExtremiser { delta: 0.25 },
        Family::ShiftedBump {
            center,
            radius: 1.0,
        },
    ];
    let mut out = families
        .into_iter()
        .map(|f| make_field(&FamilyParams::new(f, n)))
        .collect::<Result<Vec<_>, _>>()?;
    out.push(ScalarField::complex(
        &FamilyParams::new(Family::GaussianRadial { sigma: 1.0 }, n),
        &FamilyParams::new(
            Family::SolidGaussian {
                axis: n.saturating_sub(1),
                sigma: 1.0,
            },
            n,
        ),
    )?);
    Ok(out)
}

impl ScalarField {
    /// `re + i·im`. Both parts must share a decay class.
    pub fn complex(re: &FamilyParams, im: &FamilyParams) -> Result<Self, FieldError> {
        if re.n != im.n {
            return Err(FieldError::InvalidParameter(format!(
                "real part has n = {}, imaginary part n = {}",
                re.n, im.n
            )));
        }
        let a = make_field(re)?;
        let b = make_field(im)?;
        let decay = match (a.decay, b.decay) {
            (Decay::None, d) | (d, Decay::None) => d,
            (Decay::Gaussian { sigma: s1 }, Decay::Gaussian { sigma: s2 }) => Decay::Gaussian {
                sigma: s1.max(s2),
            },
            (
                Decay::Compact {
                    inner: i1,
                    outer: o1,
                },
                Decay::Compact {
                    inner: i2,
                    outer: o2,
                },
            ) => Decay::Compact {
                inner: i1.min(i2),
                outer: o1.max(o2),
            },
            (Decay::LogGaussian { delta: d1 }, Decay::LogGaussian { delta: d2 }) => {
                Decay::LogGaussian { delta: d1.min(d2) }
            }
            (x, y) => {
                return Err(FieldError::InvalidParameter(format!(
                    "real and imaginary parts have incompatible decay ({x:?} vs {y:?})"
                )))
            }
        };
        let smooth_on = if a.smooth_on == Smoothness::Everywhere && b.smooth_on == a.smooth_on {
            Smoothness::Everywhere
        } else {
            Smoothness::Punctured
        };
        // Norms of a complex field add over the parts.
        let mut closed_forms = BTreeMap::new();
        for (k, v) in &a.closed_forms {
            if let Some(w) = b.closed_forms.get(k) {
                closed_forms.insert(*k, v + w);
            }
        }
        Ok(Self {
            n: re.n,
            re: re.family.clone(),
            im: Some(im.family.clone()),
            radial: a.radial && b.radial,
            smooth_on,
            decay,
            closed_forms,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn smooth_on(&self) -> Smoothness {
        self.smooth_on
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.re == Family::Zero && self.im.as_ref().is_none_or(|f| *f == Family::Zero)
    }

    /// Largest angular degree over the parts; `None` if some part is not a
    /// polynomial in the direction.
    pub fn angular_degree(&self) -> Option<u32> {
        self.parts()
            .map(Family::angular_degree)
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Real part first, then the imaginary part if present.
    pub fn parts(&self) -> impl Iterator<Item = &Family> {
        std::iter::once(&self.re).chain(self.im.as_ref())
    }

    /// The real family; the imaginary part, if any, is in [`Self::parts`].
    pub fn real_part(&self) -> &Family {
        &self.re
    }

    pub fn closed_forms(&self) -> &BTreeMap<&'static str, f64> {
        &self.closed_forms
    }

    /// Canonical identifier, e.g. `gaussian:sigma=1`.
    pub fn id(&self) -> String {
        match &self.im {
            None => self.re.to_string(),
            Some(im) => format!("({})+i({})", self.re, im),
        }
    }

    /// Center and radius when the support is a ball away from the origin.
    pub fn support_ball(&self) -> Option<(&[f64], f64)> {
        match (&self.re, &self.im) {
            (Family::ShiftedBump { center, radius }, None) => Some((center, *radius)),
            _ => None,
        }
    }

    fn check_point(&self, x: &Point) -> Result<(), EvalError> {
        if x.dim() != self.n {
            return Err(EvalError::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Real part at `x` in plain floating point.
    pub fn value(&self, x: &Point) -> Result<f64, EvalError> {
        self.check_point(x)?;
        ensure_finite(self.re.eval(x.coords())?)
    }

    /// Value and gradient of the real part.
    pub fn evaluate_jet1(&self, x: &Point) -> Result<Jet1<f64>, EvalError> {
        self.check_point(x)?;
        ensure_finite(self.re.eval(&jet::jet1_coordinates(x.coords()))?)
    }

    /// Value, gradient and Hessian of the real part.
    pub fn evaluate_jet2(&self, x: &Point) -> Result<Jet2<f64>, EvalError> {
        self.check_point(x)?;
        ensure_finite(self.re.eval(&jet::jet2_coordinates(x.coords()))?)
    }

    /// Second-order jets of every part (real, then imaginary).
    pub fn evaluate_parts(&self, x: &Point) -> Result<Vec<Jet2<f64>>, EvalError> {
        self.check_point(x)?;
        let coords = jet::jet2_coordinates(x.coords());
        self.parts()
            .map(|p| ensure_finite(p.eval(&coords)?))
            .collect()
    }
}

/// Laurent polynomial in r, stored as (power, coefficient).
type Profile = Vec<(i32, f64)>;

/// |angular| · ∫₀^∞ (Σ c_a r^{p_a})² r^{n−1} e^{−r²/σ²} dr.
fn profile_norm2(profile: &Profile, n: usize, sigma: f64, angular: f64) -> f64 {
    let mut acc = 0.0;
    for &(pa, ca) in profile {
        for &(pb, cb) in profile {
            acc += ca * cb * gaussian_moment(n as i32 - 1 + pa + pb, sigma);
        }
    }
    angular * acc
}

/// Exact norms from Γ-function moments, keyed by name:
///
/// | key | quantity |
/// |-----|----------|
/// | `l2` | ‖f‖² |
/// | `f_over_r` | ‖f/\|x\|‖² |
/// | `f_over_r2` | ‖f/\|x\|²‖² |
/// | `laplacian` | ‖Δf‖² |
/// | `bessel` | ‖Af‖², A = ∂_r² + (n−1)/r ∂_r |
/// | `radial_d1` | ‖∂_r f‖² (radial families) |
/// | `hardy_remainder` | ‖∂_r f + (n−2)/(2r) f‖² (radial families) |
/// | `rellich_r1` | ‖Af + n(n−4)/(4r²) f‖² (radial families) |
/// | `rellich_r2` | ‖r⁻¹∂_r f + (n−4)/(2r²) f‖² (radial families) |
///
/// Only `GaussianRadial` and `SolidGaussian` have entries. Moments that
/// diverge at the origin for the given n are omitted.
pub fn closed_form_norms(p: &FamilyParams) -> BTreeMap<&'static str, f64> {
    let n = p.n;
    let nf = n as f64;
    let mut out = BTreeMap::new();
    let mut put = |key: &'static str, profile: Profile, sigma: f64, angular: f64| {
        let min_power = profile.iter().map(|(pw, _)| *pw).min().unwrap_or(0);
        if n as i32 - 1 + 2 * min_power > -1 {
            out.insert(key, profile_norm2(&profile, n, sigma, angular));
        }
    };
    match &p.family {
        Family::GaussianRadial { sigma } => {
            let s = *sigma;
            let (s2, s4) = (s * s, s.powi(4));
            let area = sphere_area(n);
            // ∂_r f = −(r/σ²) f, ∂_r² f = (r²/σ⁴ − 1/σ²) f
            let bessel: Profile = vec![(2, 1.0 / s4), (0, -nf / s2)];
            put("l2", vec![(0, 1.0)], s, area);
            put("f_over_r", vec![(-1, 1.0)], s, area);
            put("f_over_r2", vec![(-2, 1.0)], s, area);
            put("laplacian", bessel.clone(), s, area);
            put("bessel", bessel.clone(), s, area);
            put("radial_d1", vec![(1, -1.0 / s2)], s, area);
            put(
                "hardy_remainder",
                vec![(1, -1.0 / s2), (-1, (nf - 2.0) / 2.0)],
                s,
                area,
            );
            let mut r1 = bessel;
            r1.push((-2, nf * (nf - 4.0) / 4.0));
            put("rellich_r1", r1, s, area);
            put(
                "rellich_r2",
                vec![(0, -1.0 / s2), (-2, (nf - 4.0) / 2.0)],
                s,
                area,
            );
        }
        Family::SolidGaussian { sigma, .. } => {
            let s = *sigma;
            let (s2, s4) = (s * s, s.powi(4));
            // f = r ω_j g(r); ∫ ω_j² dσ = |S^{n−1}|/n.
            let angular = sphere_area(n) / nf;
            put("l2", vec![(1, 1.0)], s, angular);
            put("f_over_r", vec![(0, 1.0)], s, angular);
            put("f_over_r2", vec![(-1, 1.0)], s, angular);
            // Δ(x_j g) = x_j (r²/σ⁴ − (n+2)/σ²) g
            put(
                "laplacian",
                vec![(3, 1.0 / s4), (1, -(nf + 2.0) / s2)],
                s,
                angular,
            );
            // A(x_j g) = ω_j (r g'' + (n+1) g' + (n−1) g / r)
            put(
                "bessel",
                vec![(3, 1.0 / s4), (1, -(nf + 2.0) / s2), (-1, nf - 1.0)],
                s,
                angular,
            );
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn field(f: Family, n: usize) -> ScalarField {
        make_field(&FamilyParams::new(f, n)).unwrap()
    }

    fn e1(n: usize, r: f64) -> Point {
        let mut x = vec![0.0; n];
        x[0] = r;
        Point::new(&x).unwrap()
    }

    #[test]
    fn catalog_values() {
        let g = field(Family::GaussianRadial { sigma: 1.0 }, 5);
        assert_relative_eq!(g.value(&e1(5, 1.0)).unwrap(), (-0.5f64).exp());

        let bump = field(
            Family::AnnulusBump {
                inner: 1.0,
                outer: 2.0,
                width: 0.5,
            },
            5,
        );
        assert_eq!(bump.value(&e1(5, 0.5)).unwrap(), 0.0);
        assert_eq!(bump.value(&e1(5, 2.5)).unwrap(), 0.0);
        assert!(bump.value(&e1(5, 1.5)).unwrap() > 0.99);

        let ne = field(Family::NearExtremiser { delta: 0.1 }, 5);
        assert_eq!(ne.value(&e1(5, 1.0)).unwrap(), 1.0);
        assert_relative_eq!(
            ne.value(&e1(5, 2.0)).unwrap(),
            2f64.powf(-0.5) * (-0.1 * 2f64.ln().powi(2)).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_jets_outside_compact_support() {
        let bump = field(
            Family::AnnulusBump {
                inner: 1.0,
                outer: 2.0,
                width: 0.5,
            },
            5,
        );
        let j = bump.evaluate_jet2(&e1(5, 2.5)).unwrap();
        assert_eq!(j.value, 0.0);
        assert!(j.gradient().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn invalid_parameters_name_the_constraint() {
        let cases = [
            Family::GaussianRadial { sigma: 0.0 },
            Family::AnnulusBump {
                inner: 2.0,
                outer: 1.0,
                width: 0.5,
            },
            Family::NearExtremiser { delta: -1.0 },
            Family::ShiftedBump {
                center: vec![0.5, 0.0, 0.0, 0.0, 0.0],
                radius: 1.0,
            },
            Family::SolidGaussian {
                axis: 5,
                sigma: 1.0,
            },
        ];
        for f in cases {
            let e = make_field(&FamilyParams::new(f, 5)).unwrap_err();
            assert!(matches!(e, FieldError::InvalidParameter(_)));
        }
    }

    #[test]
    fn parse_round_trips_through_display() {
        for s in [
            "gaussian:sigma=1",
            "poly-gaussian:alpha=1/1,sigma=0.5",
            "annulus-bump:r0=1,r1=2,width=0.5",
            "solid-gaussian:axis=2,sigma=1",
            "near-extremiser:delta=0.05",
            "shifted-bump:center=2/0/0/0/0,rho=1",
            "zero",
        ] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("gaussian:sigma=x".parse::<Family>().is_err());
        assert!("nope".parse::<Family>().is_err());
        assert!("gaussian:tau=1".parse::<Family>().is_err());
    }

    #[test]
    fn gaussian_closed_forms_match_literal_values() {
        let t = closed_form_norms(&FamilyParams::new(Family::GaussianRadial { sigma: 1.0 }, 5));
        let p52 = PI.powf(2.5);
        assert_relative_eq!(t["f_over_r2"], 4.0 * p52 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(t["laplacian"], 35.0 * p52 / 4.0, max_relative = 1e-14);
        assert_relative_eq!(t["bessel"], 35.0 * p52 / 4.0, max_relative = 1e-14);
        assert_relative_eq!(t["rellich_r1"], 5.0 * p52, max_relative = 1e-14);
        assert_relative_eq!(t["rellich_r2"], 2.0 * p52 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn complex_field_norms_add() {
        let re = FamilyParams::new(Family::GaussianRadial { sigma: 1.0 }, 5);
        let im = FamilyParams::new(Family::GaussianRadial { sigma: 2.0 }, 5);
        let c = ScalarField::complex(&re, &im).unwrap();
        let a = closed_form_norms(&re)["f_over_r2"];
        let b = closed_form_norms(&im)["f_over_r2"];
        assert_relative_eq!(c.closed_forms()["f_over_r2"], a + b);
        assert_eq!(c.decay(), Decay::Gaussian { sigma: 2.0 });
        assert!(c.is_radial());
    }
}
