//! Verification harness: configuration, suite runner and report writers.

pub mod config;
pub mod emit;
pub mod suite;

pub use config::{ConfigError, SuiteConfig, SuiteName};
pub use emit::{emit_report, render, EmitError, Format};
pub use suite::{run_suite, CheckRecord, RunReport, TrendRecord};

/// Thread count from `FUETERLAB_JOBS`, or 1.
pub fn default_jobs() -> usize {
    std::env::var("FUETERLAB_JOBS").ok().and_then(|v| v.parse().ok()).filter(|n| *n > 0).unwrap_or(1)
}
