//! Text formats.
//!
//! Instances are line oriented; blank lines and anything after `#` are
//! ignored:
//!
//! ```text
//! s t
//! alpha_1 .. alpha_s
//! beta_1 .. beta_t
//! w_11 .. w_1t        (s rows of t weights)
//! ```
//!
//! Results are a single JSON object on one line. Numbers use Rust's
//! shortest round-trip float formatting, so rendering is byte-stable and
//! parsing returns the identical value.

use std::fmt::Write as _;

use bmatch_core::{
    validate_instance, BEdge, BMatchInstance, BMatching, SolveReport, ValidationError,
};
use serde::Deserialize;
use thiserror::Error;

/// Version string written into every result.
pub const SOLVER_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        reason: reason.into(),
    }
}

/// Non-empty records with their 1-based line numbers, comments removed.
struct Records<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Records<'a> {
    fn new(text: &'a str) -> Self {
        Records {
            lines: text.lines().enumerate(),
            last_line: 0,
        }
    }

    fn next_record(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        for (k, raw) in self.lines.by_ref() {
            self.last_line = k + 1;
            let body = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = body.split_whitespace().collect();
            if !fields.is_empty() {
                return Ok((k + 1, fields));
            }
        }
        Err(syntax(self.last_line + 1, format!("missing {what}")))
    }

    fn values<T: std::str::FromStr>(
        &mut self,
        what: &str,
        count: usize,
    ) -> Result<Vec<T>, ParseError> {
        let (line, fields) = self.next_record(what)?;
        if fields.len() != count {
            return Err(syntax(
                line,
                format!("expected {count} values for {what}, found {}", fields.len()),
            ));
        }
        fields
            .iter()
            .map(|f| {
                f.parse()
                    .map_err(|_| syntax(line, format!("cannot parse {f:?} in {what}")))
            })
            .collect()
    }
}

/// Parses and validates an instance.
pub fn parse_instance(text: &str) -> Result<BMatchInstance, ParseError> {
    let mut records = Records::new(text);
    let header: Vec<usize> = records.values("header \"s t\"", 2)?;
    let (s, t) = (header[0], header[1]);
    if s == 0 || t == 0 {
        return Err(ValidationError::ShapeMismatch {
            reason: "both sides need at least one vertex",
        }
        .into());
    }
    let alpha: Vec<u32> = records.values("left capacities", s)?;
    let beta: Vec<u32> = records.values("right capacities", t)?;
    let mut weights = Vec::with_capacity(s * t);
    for i in 0..s {
        let row: Vec<f64> = records.values(&format!("weight row {}", i + 1), t)?;
        weights.extend(row);
    }
    for (k, raw) in records.lines.by_ref() {
        if !raw.split('#').next().unwrap_or("").trim().is_empty() {
            return Err(syntax(k + 1, "unexpected content after the weight matrix"));
        }
    }
    let inst = BMatchInstance {
        s,
        t,
        alpha,
        beta,
        weights,
    };
    validate_instance(&inst)?;
    Ok(inst)
}

fn join<T: std::fmt::Display>(out: &mut String, values: &[T]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn render_instance(inst: &BMatchInstance) -> String {
    let mut out = format!("{} {}\n", inst.s, inst.t);
    join(&mut out, &inst.alpha);
    join(&mut out, &inst.beta);
    for i in 0..inst.s {
        join(&mut out, inst.row(i));
    }
    out
}

/// Everything a result file carries.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub matching: BMatching,
    pub phase1_augmentations: u64,
    pub phase2_augmentations: u64,
    pub dual_updates: u64,
    pub solver_version: String,
}

impl ResultRecord {
    pub fn new(bm: &BMatching, report: &SolveReport) -> Self {
        ResultRecord {
            matching: bm.clone(),
            phase1_augmentations: report.phase1_augmentations,
            phase2_augmentations: report.phase2_augmentations,
            dual_updates: report.dual_updates,
            solver_version: SOLVER_VERSION.to_string(),
        }
    }
}

pub fn render_result(bm: &BMatching, report: &SolveReport) -> String {
    render_record(&ResultRecord::new(bm, report))
}

/// One-line JSON with edges sorted by `(left, right)`.
pub fn render_record(rec: &ResultRecord) -> String {
    let mut out = weight_and_edges(&rec.matching);
    writeln!(
        out,
        ",\"phase1_augmentations\":{},\"phase2_augmentations\":{},\"dual_updates\":{},\"solver_version\":{}}}",
        rec.phase1_augmentations,
        rec.phase2_augmentations,
        rec.dual_updates,
        serde_json::Value::String(rec.solver_version.clone())
    )
    .unwrap();
    out
}

/// Oracle output: just the weight and the edges.
pub fn render_matching(bm: &BMatching) -> String {
    let mut out = weight_and_edges(bm);
    out.push_str("}\n");
    out
}

/// `{"weight":W,"edges":[...]` without the closing brace.
fn weight_and_edges(bm: &BMatching) -> String {
    let mut edges = bm.edges.clone();
    edges.sort_by_key(|e| (e.left, e.right));
    let mut out = String::new();
    write!(out, "{{\"weight\":{},\"edges\":[", bm.total_weight).unwrap();
    for (k, e) in edges.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "[{},{},{}]", e.left, e.right, e.multiplicity).unwrap();
    }
    out.push(']');
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResult {
    weight: f64,
    edges: Vec<(usize, usize, u32)>,
    phase1_augmentations: Option<u64>,
    phase2_augmentations: Option<u64>,
    dual_updates: Option<u64>,
    solver_version: Option<String>,
}

impl RawResult {
    fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| syntax(e.line(), e.to_string()))
    }

    fn matching(&self) -> BMatching {
        let edges = self
            .edges
            .iter()
            .map(|&(left, right, multiplicity)| BEdge {
                left,
                right,
                multiplicity,
            })
            .collect();
        BMatching {
            edges,
            total_weight: self.weight,
        }
    }
}

/// Parses a full solver result; every field must be present.
pub fn parse_record(text: &str) -> Result<ResultRecord, ParseError> {
    let raw = RawResult::parse(text)?;
    let missing = |field: &str| syntax(1, format!("missing field `{field}`"));
    Ok(ResultRecord {
        matching: raw.matching(),
        phase1_augmentations: raw
            .phase1_augmentations
            .ok_or_else(|| missing("phase1_augmentations"))?,
        phase2_augmentations: raw
            .phase2_augmentations
            .ok_or_else(|| missing("phase2_augmentations"))?,
        dual_updates: raw.dual_updates.ok_or_else(|| missing("dual_updates"))?,
        solver_version: raw
            .solver_version
            .clone()
            .ok_or_else(|| missing("solver_version"))?,
    })
}

/// Parses the matching out of a solver result or an oracle result.
pub fn parse_result(text: &str) -> Result<BMatching, ParseError> {
    RawResult::parse(text).map(|raw| raw.matching())
}
