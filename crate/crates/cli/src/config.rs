use std::path::{Path, PathBuf};
use std::str::FromStr;

use rellich_core::fields::{make_field, Family, FamilyParams, ScalarField};
use rellich_core::identities::Suite;
use rellich_core::jet::MAX_DIM;
use rellich_core::quadrature::sphere::MAX_DEGREE;
use rellich_core::quadrature::{QuadratureSettings, RadialMapKind, Summation};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    #[default]
    JsonLines,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialMapName {
    #[default]
    Auto,
    Legendre,
    Rational,
    Log,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummationName {
    #[default]
    Pairwise,
    Compensated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub radial_map: RadialMapName,
    pub radial_n: Option<usize>,
    /// Even total degree of the product sphere rule.
    pub sphere_degree: Option<u32>,
    pub mc_samples: usize,
    /// Dimensions from here on use Monte-Carlo.
    pub mc_from_dim: usize,
    pub summation: SummationName,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let s = QuadratureSettings::default();
        Self {
            radial_map: RadialMapName::Auto,
            radial_n: None,
            sphere_degree: None,
            mc_samples: s.mc_samples,
            mc_from_dim: s.mc_from_dim,
            summation: SummationName::Pairwise,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// Everything a run needs. Loaded from TOML, then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    /// `family:key=val,…`, or `(re)+i(im)` for a complex field.
    pub fields: Vec<String>,
    pub suites: Vec<String>,
    pub seed: Option<u64>,
    /// Sample points per field for the pointwise suite.
    pub points: usize,
    /// Random triples for the lemma suite.
    pub triples: usize,
    /// Strictly decreasing δ values for the scan suite.
    pub scan_deltas: Vec<f64>,
    pub quadrature: QuadratureConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dims: vec![5],
            fields: vec!["gaussian:sigma=1".into()],
            suites: Suite::ALL.iter().map(|s| s.name().to_string()).collect(),
            seed: None,
            points: 1000,
            triples: 1000,
            scan_deltas: vec![0.5, 0.25, 0.1, 0.05],
            quadrature: QuadratureConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn settings(&self) -> QuadratureSettings {
        let q = &self.quadrature;
        QuadratureSettings {
            radial_map: match q.radial_map {
                RadialMapName::Auto => RadialMapKind::Auto,
                RadialMapName::Legendre => RadialMapKind::Legendre,
                RadialMapName::Rational => RadialMapKind::Rational,
                RadialMapName::Log => RadialMapKind::Log,
            },
            radial_n: q.radial_n,
            sphere_degree: q.sphere_degree,
            mc_samples: q.mc_samples,
            mc_from_dim: q.mc_from_dim,
            seed: self.seed,
            summation: match q.summation {
                SummationName::Pairwise => Summation::Pairwise,
                SummationName::Compensated => Summation::Compensated,
            },
        }
    }

    /// Checks every constraint that can be checked before computing.
    pub fn validate(&self) -> Result<Plan, CliError> {
        let mut suites = Vec::new();
        for s in &self.suites {
            let suite = Suite::parse(s).ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                CliError::config("suites", format!("unknown suite `{s}` (known: {})", known.join(", ")))
            })?;
            if !suites.contains(&suite) {
                suites.push(suite);
            }
        }
        suites.sort();
        if suites.is_empty() {
            return Err(CliError::config("suites", "at least one suite is required"));
        }
        let field_suites = suites.iter().any(|s| s.uses_fields());
        let dim_suites = suites.iter().any(|s| *s != Suite::Lemma);
        if dim_suites && self.dims.is_empty() {
            return Err(CliError::config("dims", "at least one dimension is required"));
        }
        for &n in &self.dims {
            if n > MAX_DIM {
                return Err(CliError::config("dims", format!("n ≤ {MAX_DIM} required, got n = {n}")));
            }
            for s in &suites {
                if *s != Suite::Lemma && n < s.min_dim() {
                    return Err(CliError::config(
                        "dims",
                        format!("n ≥ {} required for suite `{s}`, got n = {n}", s.min_dim()),
                    ));
                }
            }
        }
        let mut fields = Vec::new();
        if field_suites {
            if self.fields.is_empty() {
                return Err(CliError::config("fields", "at least one field is required"));
            }
            for text in &self.fields {
                let spec = FieldSpec::from_str(text)?;
                for &n in &self.dims {
                    spec.instantiate(n)?;
                }
                fields.push(spec);
            }
        }
        let q = &self.quadrature;
        if let Some(d) = q.sphere_degree {
            if d % 2 == 1 || d > MAX_DEGREE {
                return Err(CliError::config(
                    "sphere_degree",
                    format!("must be even and at most {MAX_DEGREE}, got {d}"),
                ));
            }
        }
        if q.radial_n == Some(0) {
            return Err(CliError::config("radial_n", "must be positive"));
        }
        if q.mc_samples < 2 {
            return Err(CliError::config("mc_samples", "at least two samples are required"));
        }
        if suites.contains(&Suite::Pointwise) && self.points == 0 {
            return Err(CliError::config("points", "must be positive"));
        }
        if suites.contains(&Suite::Lemma) && self.triples == 0 {
            return Err(CliError::config("triples", "must be positive"));
        }
        if suites.contains(&Suite::Scan) {
            let d = &self.scan_deltas;
            if d.is_empty()
                || d.iter().any(|x| !(*x > 0.0 && x.is_finite()))
                || d.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(CliError::config(
                    "scan_deltas",
                    "must be nonempty, positive and strictly decreasing",
                ));
            }
        }
        if self.seed.is_none() {
            if let Some(why) = self.seed_reason(&suites, &fields)? {
                return Err(CliError::config("seed", format!("a seed is required: {why}")));
            }
        }
        Ok(Plan {
            dims: self.dims.clone(),
            fields,
            suites,
            settings: self.settings(),
            seed: self.seed,
            points: self.points,
            triples: self.triples,
            scan_deltas: self.scan_deltas.clone(),
        })
    }

    fn seed_reason(&self, suites: &[Suite], fields: &[FieldSpec]) -> Result<Option<String>, CliError> {
        if suites.contains(&Suite::Lemma) {
            return Ok(Some("suite `lemma` draws random triples".into()));
        }
        if suites.contains(&Suite::Pointwise) {
            return Ok(Some("suite `pointwise` draws random points".into()));
        }
        let mc_from = self.quadrature.mc_from_dim;
        if suites.iter().any(|s| s.uses_fields() && s.uses_quadrature()) {
            for spec in fields {
                for &n in &self.dims {
                    let f = spec.instantiate(n)?;
                    if n >= mc_from || f.angular_degree().is_none() {
                        return Ok(Some(format!("field `{}` at n = {n} uses Monte-Carlo", spec.text)));
                    }
                }
            }
        }
        if suites.contains(&Suite::Scan) {
            if let Some(n) = self.dims.iter().find(|&&n| n >= mc_from) {
                return Ok(Some(format!("scan at n = {n} uses Monte-Carlo")));
            }
        }
        Ok(None)
    }
}

/// A parsed field string, not yet bound to a dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub text: String,
    pub re: Family,
    pub im: Option<Family>,
}

impl FromStr for FieldSpec {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parse = |s: &str| Family::from_str(s).map_err(|e| CliError::config("fields", e.to_string()));
        let t = text.trim();
        if let Some(rest) = t.strip_prefix('(') {
            let (re, im) = rest
                .strip_suffix(')')
                .and_then(|r| r.split_once(")+i("))
                .ok_or_else(|| CliError::config("fields", format!("expected `(re)+i(im)`, got `{text}`")))?;
            return Ok(Self {
                text: text.to_string(),
                re: parse(re)?,
                im: Some(parse(im)?),
            });
        }
        Ok(Self {
            text: text.to_string(),
            re: parse(t)?,
            im: None,
        })
    }
}

/// A shifted-bump center shorter than n is padded with zeros.
fn pad(f: &Family, n: usize) -> Family {
    match f {
        Family::ShiftedBump { center, radius } if center.len() < n => {
            let mut c = center.clone();
            c.resize(n, 0.0);
            Family::ShiftedBump {
                center: c,
                radius: *radius,
            }
        }
        other => other.clone(),
    }
}

impl FieldSpec {
    pub fn instantiate(&self, n: usize) -> Result<ScalarField, CliError> {
        let re = FamilyParams::new(pad(&self.re, n), n);
        let f = match &self.im {
            None => make_field(&re),
            Some(im) => ScalarField::complex(&re, &FamilyParams::new(pad(im, n), n)),
        };
        f.map_err(|e| CliError::config("fields", format!("`{}` at n = {n}: {e}", self.text)))
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Plan {
    pub dims: Vec<usize>,
    pub fields: Vec<FieldSpec>,
    pub suites: Vec<Suite>,
    pub settings: QuadratureSettings,
    pub seed: Option<u64>,
    pub points: usize,
    pub triples: usize,
    pub scan_deltas: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::from_toml(
            r#"
            dims = [5, 6]
            fields = ["gaussian:sigma=1", "(gaussian:sigma=1)+i(solid-gaussian:axis=2)"]
            suites = ["rellich", "hardy"]
            seed = 7
            [quadrature]
            radial_n = 80
            sphere_degree = 8
            [output]
            format = "csv"
            "#,
        )
        .unwrap();
        assert_eq!(c.dims, vec![5, 6]);
        assert_eq!(c.output.format, Format::Csv);
        assert_eq!(c.quadrature.mc_samples, 1_000_000);
        let plan = c.validate().unwrap();
        assert_eq!(plan.suites, vec![Suite::Hardy, Suite::Rellich]);
        assert!(plan.fields[1].im.is_some());
        assert_eq!(plan.settings.radial_n, Some(80));
        let back = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&back).unwrap(), c);
    }

    #[test]
    fn rejections_name_the_field() {
        let mut c = RunConfig {
            suites: vec!["rellich".into()],
            dims: vec![4],
            ..RunConfig::default()
        };
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("dims") && e.contains("n ≥ 5 required"), "{e}");

        c.dims = vec![5];
        c.fields = vec!["nope:x=1".into()];
        assert!(c.validate().unwrap_err().to_string().contains("fields"));

        c.fields = vec!["shifted-bump:center=2,rho=1".into()];
        assert!(c.validate().unwrap_err().to_string().contains("seed"));
        c.seed = Some(1);
        assert!(c.validate().is_ok());

        assert!(RunConfig::from_toml("dimz = [5]").is_err());
    }

    #[test]
    fn hardy_alone_admits_dimension_three() {
        let c = RunConfig {
            suites: vec!["hardy".into()],
            dims: vec![3],
            ..RunConfig::default()
        };
        assert!(c.validate().is_ok());
    }
}
