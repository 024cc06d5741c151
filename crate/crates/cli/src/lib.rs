//! Configuration, orchestration and report emission for `rellich-lab`.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use rellich_core::identities::{
    batch_reports, check_pointwise, extremiser_scan, lemma_suite, IdentityReport, Suite, TermBatch,
};
use rellich_core::quadrature::io::{sphere_rule_hash, write_sphere_rule};
use rellich_core::quadrature::{sphere_product_rule, QuadratureSpec};
use thiserror::Error;

pub use config::{FieldSpec, Format, Plan, RunConfig};
pub use output::{canonical, canonical_line, Emitter, Manifest};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Process exit statuses.
pub mod status {
    pub const PASS: u8 = 0;
    pub const IDENTITY_FAILURE: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const RUNTIME: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("runtime error: {0}")]
    Runtime(#[from] rellich_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn status(&self) -> u8 {
        match self {
            CliError::Config { .. } => status::CONFIG,
            CliError::Runtime(_) | CliError::Io(_) => status::RUNTIME,
        }
    }
}

/// What a finished run found.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub reports: usize,
    /// `suite/identity [n=…, field=…]` of every failing report, in output order.
    pub failing: Vec<String>,
    /// `job: message` for every job that could not be computed.
    pub errors: Vec<String>,
}

impl RunSummary {
    pub fn status(&self) -> u8 {
        if !self.errors.is_empty() {
            status::RUNTIME
        } else if !self.failing.is_empty() {
            status::IDENTITY_FAILURE
        } else {
            status::PASS
        }
    }
}

/// One independent unit of work. Jobs run concurrently and are emitted in
/// this order.
#[derive(Clone, Debug)]
enum Job {
    Field { n: usize, field: usize },
    Lemma,
    Scan { n: usize },
}

fn jobs(plan: &Plan) -> Vec<Job> {
    let mut out = Vec::new();
    if plan.suites.iter().any(|s| s.uses_fields()) {
        for &n in &plan.dims {
            for field in 0..plan.fields.len() {
                out.push(Job::Field { n, field });
            }
        }
    }
    if plan.suites.contains(&Suite::Lemma) {
        out.push(Job::Lemma);
    }
    if plan.suites.contains(&Suite::Scan) {
        out.extend(plan.dims.iter().map(|&n| Job::Scan { n }));
    }
    out
}

fn label(plan: &Plan, job: &Job) -> String {
    match job {
        Job::Field { n, field } => format!("field {} at n = {n}", plan.fields[*field].text),
        Job::Lemma => "lemma".into(),
        Job::Scan { n } => format!("scan at n = {n}"),
    }
}

fn execute(plan: &Plan, job: &Job) -> Result<Vec<IdentityReport>, CliError> {
    match job {
        Job::Field { n, field } => {
            let f = plan.fields[*field].instantiate(*n)?;
            let integral: Vec<Suite> = plan
                .suites
                .iter()
                .copied()
                .filter(|s| s.uses_fields() && s.uses_quadrature())
                .collect();
            let mut out = Vec::new();
            if !integral.is_empty() {
                let spec = QuadratureSpec::auto(&f, &plan.settings).map_err(rellich_core::Error::from)?;
                let batch = TermBatch::compute(&f, &spec)?;
                out = batch_reports(&batch, &integral)?;
            }
            if plan.suites.contains(&Suite::Pointwise) {
                let seed = plan.seed.expect("validated");
                out.extend(check_pointwise(&f, plan.points, seed)?);
            }
            Ok(out)
        }
        Job::Lemma => Ok(lemma_suite(plan.triples, plan.seed.expect("validated"))),
        Job::Scan { n } => Ok(extremiser_scan(&plan.scan_deltas, *n, &plan.settings)?.reports()),
    }
}

fn describe(r: &IdentityReport) -> String {
    format!(
        "{}/{} [n={}, field={}]",
        r.suite, r.name, r.fingerprint.n, r.fingerprint.field
    )
}

/// Validates `config`, computes every report and writes the manifest
/// followed by one record per report. Config errors are returned before
/// anything is written.
pub fn run(config: &RunConfig, out: &mut dyn Write, timestamp: &str) -> Result<RunSummary, CliError> {
    let plan = config.validate()?;
    let echo = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?;
    let mut emitter = Emitter::new(config.output.format, out);
    emitter.manifest(&Manifest {
        record: "manifest",
        tool: "rellich-lab",
        version: VERSION,
        seed: config.seed,
        timestamp,
        config: echo,
    })?;

    let jobs = jobs(&plan);
    let results: Vec<Result<Vec<IdentityReport>, CliError>> =
        jobs.par_iter().map(|j| execute(&plan, j)).collect();

    let mut summary = RunSummary::default();
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(reports) => {
                for r in &reports {
                    emitter.report(r)?;
                    summary.reports += 1;
                    if !r.pass {
                        summary.failing.push(describe(r));
                    }
                }
            }
            Err(e) => {
                let job = label(&plan, job);
                emitter.error(&job, &e.to_string())?;
                summary.errors.push(format!("{job}: {e}"));
            }
        }
    }
    emitter.footer(summary.reports, &summary.failing, summary.errors.len())?;
    Ok(summary)
}

/// Writes the product sphere rule for (n, degree) in the tabular rule
/// format and returns its hash.
pub fn emit_rule(n: usize, degree: u32, out: &mut dyn Write) -> Result<String, CliError> {
    let rule = sphere_product_rule(n, degree).map_err(|e| CliError::config("emit-rule", e.to_string()))?;
    out.write_all(write_sphere_rule(&rule).as_bytes())?;
    Ok(sphere_rule_hash(&rule))
}

/// [`emit_rule`] into a file.
pub fn emit_rule_to(n: usize, degree: u32, path: &Path) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let hash = emit_rule(n, degree, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(hash)
}
