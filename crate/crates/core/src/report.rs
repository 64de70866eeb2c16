//! Residual reports and refinement studies.

use serde::{Deserialize, Serialize};

use crate::quadrature::Point4;

/// Relative residuals at or below this level count as converged in trend checks.
pub const TREND_FLOOR_REL: f64 = 1e-9;
/// Minimum first-to-last residual ratio across a refinement ladder.
pub const TREND_FACTOR: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub corpus: String,
    pub nodes: usize,
    pub epsilon: f64,
    pub fd_step: Option<f64>,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub probes: Vec<Point4>,
    pub status: Status,
    pub note: Option<String>,
}

impl IdentityReport {
    pub fn new(identity: &str, corpus: &str, nodes: usize) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            corpus: corpus.to_string(),
            nodes,
            epsilon: 0.0,
            fd_step: None,
            residual_abs: 0.0,
            residual_rel: 0.0,
            scale: 1.0,
            tolerance: 0.0,
            probes: Vec::new(),
            status: Status::NotApplicable,
            note: None,
        }
    }

    pub fn epsilon(mut self, e: f64) -> Self {
        self.epsilon = e;
        self
    }

    pub fn fd_step(mut self, h: f64) -> Self {
        self.fd_step = Some(h);
        self
    }

    pub fn probe(mut self, x: Point4) -> Self {
        self.probes.push(x);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    /// Sets residuals and decides the status: `residual_abs / max(scale, 1e-14) ≤ tol`.
    pub fn judge(mut self, residual_abs: f64, scale: f64, tol: f64) -> Self {
        self.residual_abs = residual_abs;
        self.scale = scale;
        self.residual_rel = residual_abs / scale.max(1e-14);
        self.tolerance = tol;
        self.status = if self.residual_rel <= tol { Status::Pass } else { Status::Fail };
        self
    }

    pub fn not_applicable(mut self, why: impl Into<String>) -> Self {
        self.status = Status::NotApplicable;
        self.note = Some(why.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// Worst of several sub-reports under one name.
    pub fn worst(identity: &str, corpus: &str, parts: &[IdentityReport]) -> IdentityReport {
        let mut best = parts
            .iter()
            .filter(|r| r.status != Status::NotApplicable)
            .max_by(|a, b| a.residual_rel.total_cmp(&b.residual_rel))
            .or(parts.first())
            .cloned()
            .unwrap_or_else(|| IdentityReport::new(identity, corpus, 0));
        best.identity = identity.to_string();
        best.corpus = corpus.to_string();
        if parts.iter().any(|r| r.status == Status::Fail) {
            best.status = Status::Fail;
        }
        for p in parts {
            for q in &p.probes {
                if !best.probes.contains(q) {
                    best.probes.push(*q);
                }
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrendStatus {
    Decreasing,
    AtFloor,
    NotDecreasing,
    InsufficientLadder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub identity: String,
    pub corpus: String,
    pub nodes: Vec<usize>,
    pub residuals: Vec<f64>,
    pub ratio: Option<f64>,
    pub status: TrendStatus,
}

impl ConvergenceStudy {
    /// Builds a study from reports of one identity on one corpus element, ordered by level.
    /// A trend passes when the first-to-last ratio is at least [`TREND_FACTOR`] or the
    /// last relative residual is at the floor.
    pub fn from_reports(reports: &[IdentityReport]) -> Self {
        let (identity, corpus) = reports
            .first()
            .map(|r| (r.identity.clone(), r.corpus.clone()))
            .unwrap_or_default();
        let nodes: Vec<usize> = reports.iter().map(|r| r.nodes).collect();
        let residuals: Vec<f64> = reports.iter().map(|r| r.residual_rel).collect();
        if reports.len() < 2 {
            return ConvergenceStudy { identity, corpus, nodes, residuals, ratio: None, status: TrendStatus::InsufficientLadder };
        }
        let first = residuals[0];
        let last = *residuals.last().unwrap();
        let ratio = if last > 0.0 { first / last } else { f64::INFINITY };
        let status = if last <= TREND_FLOOR_REL {
            TrendStatus::AtFloor
        } else if ratio >= TREND_FACTOR {
            TrendStatus::Decreasing
        } else {
            TrendStatus::NotDecreasing
        };
        ConvergenceStudy { identity, corpus, nodes, residuals, ratio: Some(ratio).filter(|r| r.is_finite()), status }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, TrendStatus::Decreasing | TrendStatus::AtFloor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(n: usize, r: f64) -> IdentityReport {
        IdentityReport::new("id", "c", n).judge(r, 1.0, 1.0)
    }

    #[test]
    fn relative_residual_guards_tiny_scale() {
        let r = IdentityReport::new("x", "c", 8).judge(1e-20, 0.0, 1e-3);
        assert_eq!(r.residual_rel, 1e-6);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn trend_rules() {
        assert_eq!(ConvergenceStudy::from_reports(&[rep(8, 1e-2)]).status, TrendStatus::InsufficientLadder);
        assert_eq!(ConvergenceStudy::from_reports(&[rep(8, 1e-2), rep(16, 4e-3)]).status, TrendStatus::Decreasing);
        assert_eq!(ConvergenceStudy::from_reports(&[rep(8, 1e-2), rep(16, 9e-3)]).status, TrendStatus::NotDecreasing);
        assert_eq!(ConvergenceStudy::from_reports(&[rep(8, 1e-13), rep(16, 2e-13)]).status, TrendStatus::AtFloor);
    }
}
