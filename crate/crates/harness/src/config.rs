//! Flat `key = value` configuration with `#` comments.
//!
//! ```text
//! suite = perturbed          # classical | fractional | perturbed | all
//! box.lo = 0, 0, 0, 0
//! box.hi = 1, 1, 1, 1
//! alpha = 0.5                # one value or four, each `re` or `re;im`
//! beta = 0.25
//! u = 0.3                    # one value (scalar) or four components
//! v = 0; 0.2; 0.1; 0
//! nodes = 8, 12, 16
//! theorem_nodes = 4, 6, 8
//! potential_nodes = 6, 9, 12
//! seed = 20211188
//! corpus = all               # names or groups, comma separated
//! frames = rotated
//! anchors = 2
//! timings = false
//! tol.stokes = 1e-8
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use fueterlab_core::corpus;
use fueterlab_core::fracfueter::FracOrderVec;
use fueterlab_core::quadrature::{Box4, Point4};
use fueterlab_core::CQ;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}, field `{}`: {}", self.field, self.msg),
            None => write!(f, "config field `{}`: {}", self.field, self.msg),
        }
    }
}

fn err(line: Option<usize>, field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError { line, field: field.to_string(), msg: msg.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Classical,
    Fractional,
    Perturbed,
    All,
}

impl SuiteName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "classical" => Some(SuiteName::Classical),
            "fractional" => Some(SuiteName::Fractional),
            "perturbed" => Some(SuiteName::Perturbed),
            "all" => Some(SuiteName::All),
            _ => None,
        }
    }

    pub fn includes(&self, s: SuiteName) -> bool {
        *self == SuiteName::All || *self == s
    }
}

/// Tolerance families, keyed as `tol.<family>`.
pub const TOLERANCE_KEYS: [&str; 8] =
    ["stokes", "borel-pompeiu", "fueter-inverse", "fractional", "proposition", "stokes-perturbed", "borel-pompeiu-perturbed", "cauchy"];

fn default_tolerances() -> BTreeMap<String, f64> {
    let vals = [1e-8, 5e-2, 5e-2, 1e-3, 1e-3, 5e-2, 1e-1, 1.0];
    TOLERANCE_KEYS.iter().zip(vals).map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    pub lo: Point4,
    pub hi: Point4,
    pub alpha: [Complex64; 4],
    pub beta: [Complex64; 4],
    pub u: CQ,
    pub v: CQ,
    /// Refinement ladder of the classical, fractional and Stokes checks.
    pub nodes: Vec<usize>,
    /// Ladder of the perturbed Borel-Pompeiu checks.
    pub theorem_nodes: Vec<usize>,
    /// Ladder of the potential-form Stokes check when `u` or `v` is nonzero.
    pub potential_nodes: Vec<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub corpus: Vec<String>,
    pub frames: Vec<String>,
    /// Seeded anchors besides the box center.
    pub anchors: usize,
    /// Record wall-clock seconds per check. Off by default so reports are byte-stable.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let perts = corpus::perturbations(corpus::DEFAULT_SEED);
        let c = |a: f64| [Complex64::new(a, 0.0); 4];
        SuiteConfig {
            suite: SuiteName::All,
            lo: [0.0; 4],
            hi: [1.0; 4],
            alpha: c(0.5),
            beta: c(0.25),
            u: perts[0].1,
            v: perts[1].1,
            nodes: vec![8, 12, 16],
            theorem_nodes: vec![4, 6, 8],
            potential_nodes: vec![6, 9, 12],
            tolerances: default_tolerances(),
            seed: corpus::DEFAULT_SEED,
            corpus: vec!["all".into()],
            frames: vec!["rotated".into()],
            anchors: 2,
            timings: false,
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str, field: &str, line: Option<usize>) -> Result<Vec<T>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| err(line, field, format!("cannot parse `{t}`"))))
        .collect()
}

fn parse_complex(s: &str, field: &str, line: Option<usize>) -> Result<Complex64, ConfigError> {
    let bad = || err(line, field, format!("cannot parse `{s}` as `re` or `re;im`"));
    let mut it = s.split(';').map(str::trim);
    let re: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match it.next() {
        Some(t) => t.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// One value (repeated) or four comma-separated values.
pub fn parse_order(s: &str, field: &str, line: Option<usize>) -> Result<[Complex64; 4], ConfigError> {
    let v: Vec<Complex64> = s.split(',').map(|t| parse_complex(t.trim(), field, line)).collect::<Result<_, _>>()?;
    match v.len() {
        1 => Ok([v[0]; 4]),
        4 => Ok([v[0], v[1], v[2], v[3]]),
        n => Err(err(line, field, format!("expected 1 or 4 values, got {n}"))),
    }
}

/// One value (scalar part) or four components.
pub fn parse_cq(s: &str, field: &str, line: Option<usize>) -> Result<CQ, ConfigError> {
    let v: Vec<Complex64> = s.split(',').map(|t| parse_complex(t.trim(), field, line)).collect::<Result<_, _>>()?;
    match v.len() {
        1 => Ok(CQ::scalar(v[0])),
        4 => Ok(CQ::from_components([v[0], v[1], v[2], v[3]])),
        n => Err(err(line, field, format!("expected 1 or 4 components, got {n}"))),
    }
}

fn parse_point(s: &str, field: &str, line: Option<usize>) -> Result<Point4, ConfigError> {
    let v: Vec<f64> = parse_list(s, field, line)?;
    <[f64; 4]>::try_from(v).map_err(|v| err(line, field, format!("expected 4 coordinates, got {}", v.len())))
}

impl SuiteConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "suite" => self.suite = SuiteName::parse(value).ok_or_else(|| err(line, key, format!("unknown suite `{value}`")))?,
            "box.lo" => self.lo = parse_point(value, key, line)?,
            "box.hi" => self.hi = parse_point(value, key, line)?,
            "alpha" => self.alpha = parse_order(value, key, line)?,
            "beta" => self.beta = parse_order(value, key, line)?,
            "u" => self.u = parse_cq(value, key, line)?,
            "v" => self.v = parse_cq(value, key, line)?,
            "nodes" => self.nodes = parse_list(value, key, line)?,
            "theorem_nodes" => self.theorem_nodes = parse_list(value, key, line)?,
            "potential_nodes" => self.potential_nodes = parse_list(value, key, line)?,
            "seed" => self.seed = value.parse().map_err(|_| err(line, key, format!("cannot parse `{value}`")))?,
            "corpus" => self.corpus = parse_list(value, key, line)?,
            "frames" => self.frames = parse_list(value, key, line)?,
            "anchors" => self.anchors = value.parse().map_err(|_| err(line, key, format!("cannot parse `{value}`")))?,
            "timings" => self.timings = value.parse().map_err(|_| err(line, key, "expected true or false"))?,
            k if k.starts_with("tol.") => {
                let name = &k[4..];
                if !TOLERANCE_KEYS.contains(&name) {
                    return Err(err(line, key, format!("unknown tolerance family; expected one of {}", TOLERANCE_KEYS.join(", "))));
                }
                let t: f64 = value.parse().map_err(|_| err(line, key, format!("cannot parse `{value}`")))?;
                self.tolerances.insert(name.to_string(), t);
            }
            _ => return Err(err(line, key, "unknown key")),
        }
        Ok(())
    }

    /// Parses a config text over the defaults and validates the result.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SuiteConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| err(Some(i + 1), line, "expected `key = value`"))?;
            cfg.set(k.trim(), v, Some(i + 1))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| err(None, "config", format!("{}: {e}", path.display())))?;
        SuiteConfig::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, ladder) in [("nodes", &self.nodes), ("theorem_nodes", &self.theorem_nodes), ("potential_nodes", &self.potential_nodes)] {
            if ladder.is_empty() {
                return Err(err(None, name, "empty ladder"));
            }
            if ladder.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(None, name, "ladder must be strictly increasing"));
            }
            if ladder[0] < 2 {
                return Err(err(None, name, "at least 2 nodes per axis"));
            }
        }
        for (k, t) in &self.tolerances {
            if !(*t > 0.0) {
                return Err(err(None, &format!("tol.{k}"), "tolerance must be positive"));
            }
        }
        Box4::new(self.lo, self.hi).map_err(|e| err(None, "box", e.to_string()))?;
        self.alpha_vec()?;
        self.beta_vec()?;
        self.alpha_vec().and_then(|a| a.sum(&self.beta_vec()?).map_err(|e| err(None, "beta", format!("alpha + beta: {e}"))))?;
        if self.corpus.is_empty() {
            return Err(err(None, "corpus", "empty corpus"));
        }
        corpus::select(&self.corpus).map_err(|e| err(None, "corpus", e.to_string()))?;
        if self.frames.is_empty() {
            return Err(err(None, "frames", "no frames selected"));
        }
        let known: Vec<&str> = corpus::frames().iter().map(|(n, _)| *n).collect();
        for f in &self.frames {
            if !known.contains(&f.as_str()) {
                return Err(err(None, "frames", format!("unknown frame `{f}`; expected one of {}", known.join(", "))));
            }
        }
        Ok(())
    }

    pub fn alpha_vec(&self) -> Result<FracOrderVec, ConfigError> {
        FracOrderVec::new(self.alpha).map_err(|e| err(None, "alpha", e.to_string()))
    }

    pub fn beta_vec(&self) -> Result<FracOrderVec, ConfigError> {
        FracOrderVec::new(self.beta).map_err(|e| err(None, "beta", e.to_string()))
    }

    pub fn bx(&self) -> Box4 {
        Box4::new(self.lo, self.hi).expect("validated box")
    }

    pub fn tol(&self, family: &str) -> f64 {
        self.tolerances.get(family).copied().unwrap_or(1e-3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_overrides() {
        let c = SuiteConfig::parse("# header\nsuite = classical  # trailing\nnodes = 4, 6\nalpha = 0.25;0.1\nu = 0.3\n").unwrap();
        assert_eq!(c.suite, SuiteName::Classical);
        assert_eq!(c.nodes, vec![4, 6]);
        assert_eq!(c.alpha[3], Complex64::new(0.25, 0.1));
        assert_eq!(c.u, CQ::scalar(Complex64::new(0.3, 0.0)));
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = SuiteConfig::parse("suite = all\nnodes = 8, x\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (Some(2), "nodes"));
        let e = SuiteConfig::parse("nodes = 12, 8\n").unwrap_err();
        assert_eq!(e.field, "nodes");
        let e = SuiteConfig::parse("tol.stokes = 0\n").unwrap_err();
        assert_eq!(e.field, "tol.stokes");
        let e = SuiteConfig::parse("alpha = 1.2\n").unwrap_err();
        assert_eq!(e.field, "alpha");
        let e = SuiteConfig::parse("colour = red\n").unwrap_err();
        assert_eq!((e.line, e.msg.as_str()), (Some(1), "unknown key"));
    }
}
