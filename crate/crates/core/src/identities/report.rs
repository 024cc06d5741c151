use std::fmt;

use super::batch::{Col, TermBatch};

/// Identity families, in the order a full run emits them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Hardy,
    Rellich,
    Theorem2,
    Corollary,
    Inequality,
    ProofChain,
    Lemma,
    Pointwise,
    Scan,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Hardy,
        Suite::Rellich,
        Suite::Theorem2,
        Suite::Corollary,
        Suite::Inequality,
        Suite::ProofChain,
        Suite::Lemma,
        Suite::Pointwise,
        Suite::Scan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hardy => "hardy",
            Suite::Rellich => "rellich",
            Suite::Theorem2 => "theorem2",
            Suite::Corollary => "corollary",
            Suite::Inequality => "inequality",
            Suite::ProofChain => "proof-chain",
            Suite::Lemma => "lemma",
            Suite::Pointwise => "pointwise",
            Suite::Scan => "scan",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Smallest admissible dimension.
    pub fn min_dim(self) -> usize {
        match self {
            Suite::Hardy => 3,
            _ => 5,
        }
    }

    /// Whether the suite evaluates fields at all.
    pub fn uses_fields(self) -> bool {
        !matches!(self, Suite::Lemma | Suite::Scan)
    }

    /// Whether the suite integrates (as opposed to point sampling or algebra).
    pub fn uses_quadrature(self) -> bool {
        !matches!(self, Suite::Lemma | Suite::Pointwise)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One labeled term with its error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct TermValue {
    pub label: String,
    pub value: f64,
    pub error: f64,
}

/// What a report was computed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub field: String,
    pub n: usize,
    pub quadrature: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub suite: Suite,
    pub name: String,
    pub terms: Vec<TermValue>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Estimated error of lhs − rhs.
    pub error_estimate: f64,
    pub fingerprint: Fingerprint,
    /// Rellich ratio, for the inequality and scan reports.
    pub ratio: Option<f64>,
    pub note: Option<String>,
}

impl IdentityReport {
    pub fn term(&self, label: &str) -> Option<&TermValue> {
        self.terms.iter().find(|t| t.label == label)
    }

    pub(crate) fn finish(mut self) -> Self {
        self.pass = self.rel_residual <= self.tolerance
            && self.rel_residual.is_finite()
            && self.pass;
        self
    }
}

/// Residual relative to the largest participating magnitude; 0/0 is 0.
pub fn relative(abs: f64, scale: f64) -> f64 {
    if abs == 0.0 {
        0.0
    } else {
        abs / scale
    }
}

pub(crate) fn fingerprint(b: &TermBatch) -> Fingerprint {
    Fingerprint {
        field: b.field_id().to_string(),
        n: b.dim(),
        quadrature: b.spec_hash().to_string(),
        seed: b.seed(),
    }
}

/// An equality Σ lhs-terms = Σ rhs-terms between labeled column
/// combinations.
pub(crate) struct Equality<'a> {
    pub suite: Suite,
    pub name: &'a str,
    pub terms: Vec<(&'a str, Vec<(Col, f64)>)>,
    /// (term index, sign) pairs.
    pub lhs: Vec<(usize, f64)>,
    pub rhs: Vec<(usize, f64)>,
}

fn collect(terms: &[(&str, Vec<(Col, f64)>)], side: &[(usize, f64)], sign: f64, out: &mut Vec<(Col, f64)>) {
    for &(t, s) in side {
        for &(c, k) in &terms[t].1 {
            out.push((c, sign * s * k));
        }
    }
}

impl Equality<'_> {
    pub fn evaluate(&self, b: &TermBatch) -> IdentityReport {
        let terms: Vec<TermValue> = self
            .terms
            .iter()
            .map(|(label, combo)| {
                let e = b.combination(combo);
                TermValue {
                    label: label.to_string(),
                    value: e.value,
                    error: e.error,
                }
            })
            .collect();
        let mut l = Vec::new();
        collect(&self.terms, &self.lhs, 1.0, &mut l);
        let mut r = Vec::new();
        collect(&self.terms, &self.rhs, 1.0, &mut r);
        let mut res = l.clone();
        collect(&self.terms, &self.rhs, -1.0, &mut res);
        let lhs = b.combination(&l).value;
        let rhs = b.combination(&r).value;
        let residual = b.combination(&res);
        let scale = terms
            .iter()
            .map(|t| t.value.abs())
            .fold(lhs.abs().max(rhs.abs()), f64::max);
        let abs = residual.value.abs();
        IdentityReport {
            suite: self.suite,
            name: self.name.to_string(),
            terms,
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual: relative(abs, scale),
            tolerance: b.tolerance(residual.error, scale),
            pass: true,
            error_estimate: residual.error,
            fingerprint: fingerprint(b),
            ratio: None,
            note: None,
        }
        .finish()
    }
}
