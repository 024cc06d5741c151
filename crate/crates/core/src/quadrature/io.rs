//! Plain-text rule files: `#` header lines, then one node per line with its
//! coordinates and weight in 17 significant digits.

use sha2::{Digest, Sha256};

use super::radial::{RadialMap, RadialRule};
use super::sphere::{SphereKind, SphereRule};
use crate::error::QuadratureError;
use crate::jet::MAX_DIM;

fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&format!("{v:.16e}"));
    }
    out.push('\n');
}

pub fn write_sphere_rule(rule: &SphereRule) -> String {
    let mut out = format!(
        "# sphere-rule n={} kind={} nodes={}\n",
        rule.dim(),
        kind_tag(rule.kind()),
        rule.len()
    );
    let mut row = Vec::with_capacity(rule.dim() + 1);
    for k in 0..rule.len() {
        row.clear();
        row.extend_from_slice(rule.direction(k));
        row.push(rule.weight(k));
        push_row(&mut out, &row);
    }
    out
}

fn kind_tag(kind: SphereKind) -> String {
    match kind {
        SphereKind::Product { degree } => format!("product:{degree}"),
        SphereKind::Radial => "radial".into(),
        SphereKind::Imported => "imported".into(),
    }
}

fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>, QuadratureError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|e| {
                    QuadratureError::Parse(format!("line {}: `{t}`: {e}", lineno + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(QuadratureError::Parse(format!(
                "line {}: non-finite entry",
                lineno + 1
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter(|l| l.trim_start().starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| tok.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
}

/// Reads a sphere rule; the kind recorded in the header is kept.
pub fn read_sphere_rule(text: &str) -> Result<SphereRule, QuadratureError> {
    let rows = parse_rows(text)?;
    let Some(first) = rows.first() else {
        return Err(QuadratureError::Parse("no nodes".into()));
    };
    let n = first.len() - 1;
    if !(1..=MAX_DIM).contains(&n) {
        return Err(QuadratureError::Parse(format!(
            "rows have {} entries, expected n + 1 with 1 ≤ n ≤ {MAX_DIM}",
            first.len()
        )));
    }
    let mut directions = Vec::with_capacity(rows.len() * n);
    let mut weights = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(QuadratureError::Parse(format!(
                "node {i} has {} entries, expected {}",
                row.len(),
                n + 1
            )));
        }
        directions.extend_from_slice(&row[..n]);
        weights.push(row[n]);
    }
    let kind = match header_value(text, "kind") {
        Some("radial") => SphereKind::Radial,
        Some(k) => match k.strip_prefix("product:").map(str::parse::<u32>) {
            Some(Ok(degree)) => SphereKind::Product { degree },
            _ => SphereKind::Imported,
        },
        None => SphereKind::Imported,
    };
    Ok(SphereRule::from_parts(n, kind, directions, weights))
}

pub fn write_radial_rule(rule: &RadialRule) -> String {
    let mut out = format!("# radial-rule map={} nodes={}\n", rule.map(), rule.len());
    for (r, w) in rule.nodes().iter().zip(rule.weights()) {
        push_row(&mut out, &[*r, *w]);
    }
    out
}

/// Reads a radial rule; the map is recorded as a Legendre interval spanning
/// the nodes since the file carries no map parameters.
pub fn read_radial_rule(text: &str) -> Result<RadialRule, QuadratureError> {
    let rows = parse_rows(text)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != 2) {
        return Err(QuadratureError::Parse(
            "radial rules need one `r weight` pair per line".into(),
        ));
    }
    let nodes: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let weights: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    if nodes.iter().any(|&r| r <= 0.0) || nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QuadratureError::Parse(
            "radial nodes must be positive and increasing".into(),
        ));
    }
    let map = RadialMap::Legendre {
        a: 0.0,
        b: *nodes.last().unwrap_or(&1.0),
    };
    Ok(RadialRule::from_parts(map, nodes, weights))
}

pub(crate) fn hash_floats(h: &mut Sha256, values: &[f64]) {
    for v in values {
        h.update(v.to_bits().to_le_bytes());
    }
}

/// SHA-256 over the bit patterns of every node and weight, hex encoded.
pub fn sphere_rule_hash(rule: &SphereRule) -> String {
    let mut h = Sha256::new();
    h.update((rule.dim() as u64).to_le_bytes());
    for k in 0..rule.len() {
        hash_floats(&mut h, rule.direction(k));
        hash_floats(&mut h, &[rule.weight(k)]);
    }
    hex(&h.finalize())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sphere::sphere_product_rule;

    #[test]
    fn sphere_rule_round_trips_bit_exactly() {
        let rule = sphere_product_rule(5, 6).unwrap();
        let text = write_sphere_rule(&rule);
        let back = read_sphere_rule(&text).unwrap();
        assert_eq!(back, rule);
        assert_eq!(sphere_rule_hash(&back), sphere_rule_hash(&rule));
    }

    #[test]
    fn radial_rule_round_trips_nodes_and_weights() {
        let rule = RadialRule::new(RadialMap::Log { s_min: -3.0, s_max: 2.0 }, 30).unwrap();
        let back = read_radial_rule(&write_radial_rule(&rule)).unwrap();
        assert_eq!(back.nodes(), rule.nodes());
        assert_eq!(back.weights(), rule.weights());
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(read_sphere_rule("# nothing\n").is_err());
        assert!(read_sphere_rule("1 0 0.5\n1 0\n").is_err());
        assert!(read_sphere_rule("1 x 0.5\n").is_err());
    }
}
