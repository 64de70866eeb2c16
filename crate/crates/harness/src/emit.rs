//! Report writers: JSON mirrors [`RunReport`], CSV has one row per
//! (identity, corpus element, grid level), text is a summary table.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fueterlab_core::report::Status;

use crate::suite::RunReport;

pub const CSV_HEADER: [&str; 8] = ["suite", "identity", "corpus", "nodes", "epsilon", "residual_abs", "residual_rel", "pass"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub fn to_json(r: &RunReport) -> Result<String, EmitError> {
    Ok(serde_json::to_string_pretty(r)?)
}

pub fn from_json(s: &str) -> Result<RunReport, EmitError> {
    Ok(serde_json::from_str(s)?)
}

fn pass_cell(s: Status) -> &'static str {
    match s {
        Status::Pass => "true",
        Status::Fail => "false",
        Status::NotApplicable => "skipped",
    }
}

pub fn to_csv(r: &RunReport) -> Result<String, EmitError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for c in &r.checks {
        let p = &c.report;
        w.write_record([
            c.suite.as_str(),
            p.identity.as_str(),
            p.corpus.as_str(),
            &p.nodes.to_string(),
            &format!("{:e}", p.epsilon),
            &format!("{:e}", p.residual_abs),
            &format!("{:e}", p.residual_rel),
            pass_cell(p.status),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| EmitError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_text(r: &RunReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:<11} {:<22} {:<44} {:<34} {:>5} {:>10} {:>10}  {}\n", "suite", "case", "identity", "corpus", "nodes", "abs", "rel", "status"));
    for c in &r.checks {
        let p = &c.report;
        let status = match p.status {
            Status::Pass => "pass".to_string(),
            Status::Fail => "FAIL".to_string(),
            Status::NotApplicable => format!("NotApplicable ({})", p.note.clone().unwrap_or_default()),
        };
        s.push_str(&format!(
            "{:<11} {:<22} {:<44} {:<34} {:>5} {:>10.3e} {:>10.3e}  {status}\n",
            c.suite, c.case, p.identity, p.corpus, p.nodes, p.residual_abs, p.residual_rel
        ));
    }
    if !r.convergence.is_empty() {
        s.push_str("\nconvergence\n");
        for t in &r.convergence {
            let res: Vec<String> = t.study.residuals.iter().map(|v| format!("{v:.2e}")).collect();
            let ratio = t.study.ratio.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:<11} {:<22} {:<44} {:<34} nodes {:?} residuals [{}] ratio {ratio} {:?}\n",
                t.suite,
                t.case,
                t.study.identity,
                t.study.corpus,
                t.study.nodes,
                res.join(", "),
                t.study.status
            ));
        }
    }
    let skipped = r.checks.iter().filter(|c| c.skipped()).count();
    let failed = r.checks.iter().filter(|c| c.report.status == Status::Fail).count();
    s.push_str(&format!(
        "\n{} checks, {} failed, {} skipped; overall {}\n",
        r.checks.len(),
        failed,
        skipped,
        if r.overall_pass { "PASS" } else { "FAIL" }
    ));
    s
}

pub fn render(r: &RunReport, format: Format) -> Result<String, EmitError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => to_csv(r),
        Format::Text => Ok(to_text(r)),
    }
}

pub fn emit_report(r: &RunReport, format: Format, path: &Path) -> Result<(), EmitError> {
    let body = render(r, format)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())?;
    Ok(())
}
