use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fueterlab::config::{parse_cq, parse_list, parse_order};
use fueterlab::{default_jobs, emit_report, render, run_suite, ConfigError, Format, SuiteConfig, SuiteName};

#[derive(Parser)]
#[command(name = "fueterlab", version, about = "Residual checks for ψ-hyperholomorphic and fractional ψ-Fueter identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite: classical, fractional, perturbed or all.
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Refinement ladder, e.g. 8,12,16.
        #[arg(long)]
        nodes: Option<String>,
        /// Ladder of the perturbed Borel-Pompeiu checks.
        #[arg(long)]
        theorem_nodes: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to FUETERLAB_JOBS or 1.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, requires = "format")]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn build_config(
    suite: &str,
    config: Option<PathBuf>,
    overrides: &[(&str, Option<String>)],
    seed: Option<u64>,
) -> Result<SuiteConfig, ConfigError> {
    let mut cfg = match config {
        Some(p) => SuiteConfig::from_file(&p)?,
        None => SuiteConfig::default(),
    };
    cfg.suite = SuiteName::parse(suite).ok_or_else(|| ConfigError { line: None, field: "suite".into(), msg: format!("unknown suite `{suite}`") })?;
    for (key, val) in overrides {
        if let Some(v) = val {
            match *key {
                "nodes" => cfg.nodes = parse_list(v, "--nodes", None)?,
                "theorem_nodes" => cfg.theorem_nodes = parse_list(v, "--theorem-nodes", None)?,
                "alpha" => cfg.alpha = parse_order(v, "--alpha", None)?,
                "beta" => cfg.beta = parse_order(v, "--beta", None)?,
                "u" => cfg.u = parse_cq(v, "--u", None)?,
                "v" => cfg.v = parse_cq(v, "--v", None)?,
                _ => unreachable!("fixed override keys"),
            }
        }
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Cmd::Verify { suite, config, nodes, theorem_nodes, alpha, beta, u, v, seed, jobs, report, format } = cli.cmd;
    let overrides = [("nodes", nodes), ("theorem_nodes", theorem_nodes), ("alpha", alpha), ("beta", beta), ("u", u), ("v", v)];
    let cfg = match build_config(&suite, config, &overrides, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rep = match run_suite(&cfg, jobs.unwrap_or_else(default_jobs)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match (report, format) {
        (Some(path), Some(fmt)) => {
            if let Err(e) = emit_report(&rep, fmt, &path) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            print!("{}", render(&rep, Format::Text).unwrap_or_default());
        }
        (None, Some(fmt)) => match render(&rep, fmt) {
            Ok(s) => print!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        _ => print!("{}", render(&rep, Format::Text).unwrap_or_default()),
    }
    if rep.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
