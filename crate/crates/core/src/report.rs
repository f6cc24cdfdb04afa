//! Report files. Every JSON file carries a `schema` field and every CSV file
//! starts with a `# schema: ...` comment line.
//!
//! Verify CSV (`gbc-table/v1`): one row per field and excision radius plus a
//! row with `epsilon = 0` for the extrapolated value. The `seconds` column is
//! left empty so reports from repeated runs are byte-identical; wall time is
//! in the JSON report.
//!
//! Lemma CSV (`gbc-lemma-table/v1`): one row per metric and identity with the
//! largest residual, then one `fd_order` row per metric whose `value` is the
//! measured convergence order of the difference oracle.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{GbcError, Result};
use crate::lemmas::LemmaReport;
use crate::verify::GbcReport;

pub const VERIFY_SCHEMA: &str = "gbc-report/v1";
pub const VERIFY_TABLE_SCHEMA: &str = "gbc-table/v1";
pub const LEMMA_SCHEMA: &str = "gbc-lemmas/v1";
pub const LEMMA_TABLE_SCHEMA: &str = "gbc-lemma-table/v1";

pub const VERIFY_COLUMNS: &str = "metric,flavor,field,epsilon,estimate,target,abs_error,nodes,seconds";
pub const LEMMA_COLUMNS: &str = "metric,dim,check,points,value,threshold,pass";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub schema: String,
    pub config: ExperimentConfig,
    pub tolerance: f64,
    pub runs: Vec<GbcReport>,
    /// `|difference|` of the extrapolated estimates of the first two fields.
    pub field_agreement: Option<f64>,
    pub pass: bool,
    /// Set when the run stopped early; `runs` then holds what finished.
    pub error: Option<String>,
}

impl VerifyOutput {
    pub fn new(config: &ExperimentConfig, runs: Vec<GbcReport>, error: Option<String>) -> Self {
        let tol = config.tolerance;
        let field_agreement = match runs.as_slice() {
            [a, b, ..] => Some((a.extrapolated - b.extrapolated).abs()),
            _ => None,
        };
        let pass = error.is_none()
            && !runs.is_empty()
            && runs.iter().all(|r| r.passes(tol))
            && field_agreement.map_or(true, |d| d < tol);
        VerifyOutput { schema: VERIFY_SCHEMA.into(), config: config.clone(), tolerance: tol, runs, field_agreement, pass, error }
    }

    pub fn csv(&self) -> String {
        let mut out = format!("# schema: {VERIFY_TABLE_SCHEMA}\n{VERIFY_COLUMNS}\n");
        for r in &self.runs {
            let mut line = |eps: f64, est: f64, nodes: usize| {
                let _ = writeln!(
                    out,
                    "{},{},{},{:e},{:e},{:e},{:e},{},",
                    r.metric,
                    r.flavor,
                    r.field,
                    eps,
                    est,
                    r.target,
                    (est - r.target).abs(),
                    nodes
                );
            };
            for row in &r.rows {
                line(row.epsilon, row.estimate, row.nodes);
            }
            line(0.0, r.extrapolated, r.rows.last().map_or(0, |x| x.nodes));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaOutput {
    pub schema: String,
    pub config: ExperimentConfig,
    pub report: LemmaReport,
    pub pass: bool,
    pub error: Option<String>,
}

impl LemmaOutput {
    pub fn new(config: &ExperimentConfig, report: LemmaReport, error: Option<String>) -> Self {
        let pass = error.is_none() && !report.rows.is_empty() && report.all_pass();
        LemmaOutput { schema: LEMMA_SCHEMA.into(), config: config.clone(), report, pass, error }
    }

    pub fn csv(&self) -> String {
        let mut out = format!("# schema: {LEMMA_TABLE_SCHEMA}\n{LEMMA_COLUMNS}\n");
        for r in &self.report.rows {
            let _ = writeln!(out, "{},{},{},{},{:e},{:e},{}", r.metric, r.dim, r.check, r.points, r.max_residual, r.tolerance, r.pass);
        }
        for f in &self.report.fd_orders {
            let _ = writeln!(out, "{},{},fd_order,{},{:e},{:e},{}", f.metric, f.dim, f.points, f.order, 2.0, f.pass);
        }
        out
    }
}

/// Write `<stem>.json` and `<stem>.csv` under `dir`, returning both paths.
pub fn write_pair<T: Serialize>(dir: &Path, stem: &str, json: &T, csv: &str) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let jp = dir.join(format!("{stem}.json"));
    let cp = dir.join(format!("{stem}.csv"));
    let text = serde_json::to_string_pretty(json).map_err(|e| GbcError::Config(format!("report serialization: {e}")))?;
    fs::write(&jp, text + "\n")?;
    fs::write(&cp, csv)?;
    Ok((jp, cp))
}
