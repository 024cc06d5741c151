//! Report serialization. Every float in json-lines and csv output is
//! written with 17 significant digits.

use std::io::Write;

use rellich_core::identities::{IdentityReport, TermValue};
use serde::ser::{Error as _, SerializeMap};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::Format;
use crate::CliError;

/// Key excluded when comparing outputs of two runs.
pub const TIMESTAMP_KEY: &str = "timestamp";

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(num(self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

struct Terms<'a>(&'a [TermValue], bool);

impl Serialize for Terms<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for t in self.0 {
            m.serialize_entry(&t.label, &Num(if self.1 { t.error } else { t.value }))?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    record: &'static str,
    suite: &'static str,
    identity: &'a str,
    n: usize,
    field: &'a str,
    terms: Terms<'a>,
    term_errors: Terms<'a>,
    lhs: Num,
    rhs: Num,
    abs_residual: Num,
    rel_residual: Num,
    tolerance: Num,
    pass: bool,
    error_estimate: Num,
    seed: Option<u64>,
    quadrature: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

impl<'a> ReportRecord<'a> {
    fn new(r: &'a IdentityReport) -> Self {
        Self {
            record: "report",
            suite: r.suite.name(),
            identity: &r.name,
            n: r.fingerprint.n,
            field: &r.fingerprint.field,
            terms: Terms(&r.terms, false),
            term_errors: Terms(&r.terms, true),
            lhs: Num(r.lhs),
            rhs: Num(r.rhs),
            abs_residual: Num(r.abs_residual),
            rel_residual: Num(r.rel_residual),
            tolerance: Num(r.tolerance),
            pass: r.pass,
            error_estimate: Num(r.error_estimate),
            seed: r.fingerprint.seed,
            quadrature: &r.fingerprint.quadrature,
            ratio: r.ratio.map(Num),
            note: r.note.as_deref(),
        }
    }
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub record: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub timestamp: &'a str,
    pub config: serde_json::Value,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    record: &'static str,
    job: &'a str,
    message: &'a str,
}

const CSV_HEADER: [&str; 17] = [
    "record",
    "suite",
    "identity",
    "n",
    "field",
    "lhs",
    "rhs",
    "abs_residual",
    "rel_residual",
    "tolerance",
    "pass",
    "error_estimate",
    "seed",
    "quadrature",
    "ratio",
    "terms",
    "note",
];

/// Streams records in one of the three formats.
pub struct Emitter<'w> {
    format: Format,
    out: &'w mut dyn Write,
}

impl<'w> Emitter<'w> {
    pub fn new(format: Format, out: &'w mut dyn Write) -> Self {
        Self { format, out }
    }

    fn json_line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer(&mut *self.out, value).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(self.out)?;
        Ok(())
    }

    fn csv_row(&mut self, row: &[String]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.out.write_all(&bytes)?;
        Ok(())
    }

    pub fn manifest(&mut self, m: &Manifest) -> Result<(), CliError> {
        match self.format {
            Format::JsonLines => self.json_line(m),
            Format::Csv => {
                self.csv_row(&CSV_HEADER.map(String::from))?;
                let mut row = vec![String::new(); CSV_HEADER.len()];
                row[0] = "manifest".into();
                row[2] = format!("{} {}", m.tool, m.version);
                row[4] = m.config.to_string();
                row[12] = m.seed.map(|s| s.to_string()).unwrap_or_default();
                row[16] = format!("{}={}", TIMESTAMP_KEY, m.timestamp);
                self.csv_row(&row)
            }
            Format::Text => {
                writeln!(self.out, "# {} {}", m.tool, m.version)?;
                let seed = m.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
                writeln!(self.out, "# seed: {seed}")?;
                writeln!(self.out, "# {}: {}", TIMESTAMP_KEY, m.timestamp)?;
                writeln!(self.out, "# config: {}", m.config)?;
                Ok(())
            }
        }
    }

    pub fn report(&mut self, r: &IdentityReport) -> Result<(), CliError> {
        match self.format {
            Format::JsonLines => self.json_line(&ReportRecord::new(r)),
            Format::Csv => {
                let terms: Vec<String> = r
                    .terms
                    .iter()
                    .map(|t| format!("{}={}±{}", t.label, num(t.value), num(t.error)))
                    .collect();
                self.csv_row(&[
                    "report".into(),
                    r.suite.name().into(),
                    r.name.clone(),
                    r.fingerprint.n.to_string(),
                    r.fingerprint.field.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.abs_residual),
                    num(r.rel_residual),
                    num(r.tolerance),
                    r.pass.to_string(),
                    num(r.error_estimate),
                    r.fingerprint.seed.map(|s| s.to_string()).unwrap_or_default(),
                    r.fingerprint.quadrature.clone(),
                    r.ratio.map(num).unwrap_or_default(),
                    terms.join(";"),
                    r.note.clone().unwrap_or_default(),
                ])
            }
            Format::Text => self.text_report(r),
        }
    }

    fn text_report(&mut self, r: &IdentityReport) -> Result<(), CliError> {
        let status = if r.pass { "PASS" } else { "FAIL" };
        writeln!(
            self.out,
            "\n[{status}] {}/{}  n={}  field={}  quadrature={}",
            r.suite, r.name, r.fingerprint.n, r.fingerprint.field, r.fingerprint.quadrature
        )?;
        let width = r.terms.iter().map(|t| t.label.chars().count()).max().unwrap_or(0).max(12);
        for t in &r.terms {
            writeln!(self.out, "    {:<width$}  {:>24.15e}  ± {:.2e}", t.label, t.value, t.error)?;
        }
        writeln!(self.out, "    {:<width$}  {:>24.15e}", "lhs", r.lhs)?;
        writeln!(self.out, "    {:<width$}  {:>24.15e}", "rhs", r.rhs)?;
        writeln!(
            self.out,
            "    {:<width$}  {:>24.3e}  (tolerance {:.3e}, error estimate {:.3e})",
            "rel_residual", r.rel_residual, r.tolerance, r.error_estimate
        )?;
        if let Some(rho) = r.ratio {
            writeln!(self.out, "    {:<width$}  {:>24.15e}", "ratio", rho)?;
        }
        if let Some(note) = &r.note {
            writeln!(self.out, "    note: {note}")?;
        }
        Ok(())
    }

    pub fn error(&mut self, job: &str, message: &str) -> Result<(), CliError> {
        match self.format {
            Format::JsonLines => self.json_line(&ErrorRecord {
                record: "error",
                job,
                message,
            }),
            Format::Csv => {
                let mut row = vec![String::new(); CSV_HEADER.len()];
                row[0] = "error".into();
                row[4] = job.into();
                row[16] = message.into();
                self.csv_row(&row)
            }
            Format::Text => {
                writeln!(self.out, "\n[ERROR] {job}: {message}")?;
                Ok(())
            }
        }
    }

    pub fn footer(&mut self, total: usize, failing: &[String], errors: usize) -> Result<(), CliError> {
        if self.format != Format::Text {
            return Ok(());
        }
        writeln!(
            self.out,
            "\n# {} reports, {} failing, {} runtime errors",
            total,
            failing.len(),
            errors
        )?;
        for f in failing {
            writeln!(self.out, "#   FAIL {f}")?;
        }
        Ok(())
    }
}

/// One output line with any timestamp removed, for run-to-run comparison.
pub fn canonical_line(line: &str) -> String {
    if let Ok(serde_json::Value::Object(mut m)) = serde_json::from_str::<serde_json::Value>(line) {
        if m.remove(TIMESTAMP_KEY).is_some() {
            return serde_json::Value::Object(m).to_string();
        }
        return line.to_string();
    }
    let csv_marker = format!(",{TIMESTAMP_KEY}=");
    if let Some(i) = line.find(&csv_marker) {
        return line[..i].to_string();
    }
    if line.starts_with(&format!("# {TIMESTAMP_KEY}:")) {
        return String::new();
    }
    line.to_string()
}

/// Whole output with timestamps removed.
pub fn canonical(output: &str) -> String {
    output.lines().map(canonical_line).collect::<Vec<_>>().join("\n")
}
