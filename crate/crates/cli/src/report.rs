//! Report documents written by the tool and the `verify` pass over every
//! document type.

use mpf_core::atlas::FrameField;
use mpf_core::bundle::{HolonomyReport, ObstructionReport};
use mpf_core::{is_parseval, stacked_residual, DMatrix, Tolerances};
use serde::{Deserialize, Serialize};

use crate::input::Document;

/// One line of a verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Row {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uv: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub input: String,
    pub tolerance: f64,
    pub rows: Vec<Row>,
    pub worst: f64,
    pub worst_index: usize,
    pub passed: bool,
}

impl VerifyReport {
    fn new(input: &str, tolerance: f64, rows: Vec<Row>) -> Self {
        let (worst_index, worst) = rows
            .iter()
            .map(|r| r.residual)
            .enumerate()
            .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        let passed = rows.iter().all(|r| r.passed);
        Self { input: input.to_string(), tolerance, rows, worst, worst_index, passed }
    }

    pub fn print(&self) {
        println!("{:>6}  {:>12}  {:>12}  {:>12}  status", "index", "u", "v", "residual");
        for r in &self.rows {
            let (u, v) = r.uv.map_or((String::from("-"), String::from("-")), |[u, v]| {
                (format!("{u:.6}"), format!("{v:.6}"))
            });
            let status = if r.passed { "ok" } else { "FAIL" };
            let label = r.label.as_deref().map(|l| format!("  {l}")).unwrap_or_default();
            println!("{:>6}  {u:>12}  {v:>12}  {:>12.3e}  {status}{label}", r.index, r.residual);
        }
        println!(
            "{} {}: worst residual {:.3e} at row {} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.input,
            self.worst,
            self.worst_index,
            self.tolerance
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DimRow {
    pub k: usize,
    pub n: usize,
    pub measured: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DimcheckReport {
    pub seed: u64,
    pub rows: Vec<DimRow>,
    pub passed: bool,
}

impl DimcheckReport {
    pub fn new(seed: u64, rows: Vec<DimRow>) -> Self {
        let passed = rows.iter().all(|r| r.measured == r.expected);
        Self { seed, rows, passed }
    }

    pub fn print(&self) {
        println!("{:>4}  {:>4}  {:>9}  {:>9}", "k", "n", "measured", "expected");
        for r in &self.rows {
            println!("{:>4}  {:>4}  {:>9}  {:>9}", r.k, r.n, r.measured, r.expected);
        }
        println!("{}", if self.passed { "PASS" } else { "FAIL" });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// A measured quantity with its acceptance bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        let comparison = Comparison::AtMost;
        Self { name: name.into(), value, limit, comparison, passed: holds(value, limit, comparison) }
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        let comparison = Comparison::AtLeast;
        Self { name: name.into(), value, limit, comparison, passed: holds(value, limit, comparison) }
    }

    /// How far the value is on the wrong side of the limit (0 when it holds).
    fn violation(&self) -> f64 {
        match self.comparison {
            Comparison::AtMost => (self.value - self.limit).max(0.0),
            Comparison::AtLeast => (self.limit - self.value).max(0.0),
        }
    }
}

fn holds(value: f64, limit: f64, comparison: Comparison) -> bool {
    match comparison {
        Comparison::AtMost => value <= limit,
        Comparison::AtLeast => value >= limit,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DemoReport {
    pub demo: String,
    pub resolution: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionReport>,
}

impl DemoReport {
    pub fn print(&self) {
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let status = if c.passed { "ok" } else { "FAIL" };
            println!("{:<40} {:>12.3e} {op} {:<10.1e} {status}", c.name, c.value, c.limit);
        }
        if let Some(h) = &self.holonomy {
            println!(
                "holonomy {:?}: ‖H − I‖ = {:.6}, det = {:.6}, {} samples",
                h.classification, h.distance_from_identity, h.determinant, h.loop_length
            );
        }
        if let Some(o) = &self.obstruction {
            println!("zero hits per analytic zero {:?}", o.hits_per_zero);
        }
        println!("{} demo {}", if self.passed { "PASS" } else { "FAIL" }, self.demo);
    }
}

fn field_rows(field: &FrameField, residuals: &[f64], tol: f64) -> Vec<Row> {
    field
        .samples
        .iter()
        .zip(residuals)
        .enumerate()
        .map(|(index, (s, &residual))| Row {
            index,
            uv: Some(s.uv),
            label: None,
            residual,
            passed: residual <= tol,
        })
        .collect()
}

fn single(residual: f64, tol: f64) -> Vec<Row> {
    vec![Row { index: 0, uv: None, label: None, residual, passed: residual <= tol }]
}

/// Re-derives the pass/fail state of a document: Parseval or stacked
/// orthogonality residuals for frames and fields, orthogonality of the
/// holonomy array for holonomy reports, and the recorded checks of reports.
pub fn verify(doc: &Document, tol: &Tolerances) -> VerifyReport {
    let t = tol.parseval;
    let rows = match doc {
        Document::Frame(f) => single(is_parseval(f, t).residual, t),
        Document::Pair(p) => single(stacked_residual(&p.base, &p.complement), t),
        Document::Field(field) => {
            let summary = field.parseval_summary(t);
            field_rows(field, &summary.residuals, t)
        }
        Document::Complement(c) => field_rows(&c.base, &c.stack_residuals(), t),
        Document::Holonomy(h) => {
            let m = h.holonomy_matrix();
            let id = DMatrix::<f64>::identity(m.nrows(), m.nrows());
            single((&m * m.transpose() - id).norm(), t)
        }
        Document::Verify(v) => v
            .rows
            .iter()
            .map(|r| Row { passed: r.residual <= v.tolerance, ..r.clone() })
            .collect(),
        Document::Dimcheck(d) => d
            .rows
            .iter()
            .enumerate()
            .map(|(index, r)| Row {
                index,
                uv: None,
                label: Some(format!("k = {}, n = {}", r.k, r.n)),
                residual: r.measured.abs_diff(r.expected) as f64,
                passed: r.measured == r.expected,
            })
            .collect(),
        Document::Demo(d) => d
            .checks
            .iter()
            .enumerate()
            .map(|(index, c)| Row {
                index,
                uv: None,
                label: Some(c.name.clone()),
                residual: c.violation(),
                passed: holds(c.value, c.limit, c.comparison),
            })
            .collect(),
    };
    VerifyReport::new(doc.kind(), t, rows)
}
