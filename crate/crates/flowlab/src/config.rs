//! Experiment configuration files.
//!
//! A config is a TOML document. Every number is a string holding an exact
//! fraction (`3/2`), a terminating decimal, or a constant name (`pi-3`,
//! `2-sqrt2`, `golden`). Sections other than `[experiment]` and `[roof]` are
//! optional; an absent task section means the task is not run.
//!
//! ```toml
//! [experiment]
//! alpha = "cf:3,(2)"
//! beta = "1/2"
//! precision_bits = 256
//! depth = 30
//!
//! [roof]
//! a = "3"
//! b = "1"
//!
//! [budget]
//! breakpoints = 2000000
//!
//! [classify]
//!
//! [rigidity]
//! times = "denominators:1..8"
//! range = [3, 500]
//! multiples = 4
//!
//! [figures]
//! powers = [1, 7, 21]
//! out = "figures"
//! svg = true
//! exact = false
//!
//! [output]
//! report = "report.json"
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cocycle_core::constants::NamedConstant;
use cocycle_core::continued_fractions::{AlphaSpec, CFExpansion};
use cocycle_core::exact::{int, parse_scalar, ExactScalar};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

/// A number or named constant, resolved to an exact rational.
pub fn resolve_scalar(text: &str, precision_bits: u32) -> Result<ExactScalar, String> {
    let t = text.trim();
    if let Ok(c) = NamedConstant::from_str(t) {
        return Ok(c.enclosure(precision_bits).midpoint());
    }
    parse_scalar(t).map_err(|e| e.to_string())
}

/// Which times a rigidity experiment visits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TimeSpec {
    /// `q_n` for `n` in the inclusive range.
    Denominators { from: usize, to: usize },
    Explicit(Vec<BigInt>),
}

impl FromStr for TimeSpec {
    type Err = String;

    /// `denominators:2..8` or a comma list `7,106,113`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(range) = s.strip_prefix("denominators:") {
            let (a, b) = range
                .split_once("..")
                .ok_or_else(|| format!("expected `denominators:FROM..TO`, got `{s}`"))?;
            let b = b.strip_prefix('=').unwrap_or(b);
            let from: usize = a.trim().parse().map_err(|_| format!("bad index `{a}`"))?;
            let to: usize = b.trim().parse().map_err(|_| format!("bad index `{b}`"))?;
            if from > to {
                return Err(format!("empty range {from}..{to}"));
            }
            return Ok(TimeSpec::Denominators { from, to });
        }
        let times = s
            .split(',')
            .map(|t| BigInt::from_str(t.trim()).map_err(|_| format!("bad time `{t}`")))
            .collect::<Result<Vec<_>, _>>()?;
        if times.is_empty() || times.iter().any(|t| !t.is_positive()) {
            return Err("times must be positive integers".into());
        }
        Ok(TimeSpec::Explicit(times))
    }
}

impl TimeSpec {
    /// `(time, Some(n))` when the time is the denominator `q_n`.
    pub fn resolve(&self, cf: &CFExpansion) -> Vec<(BigInt, Option<usize>)> {
        match self {
            TimeSpec::Denominators { from, to } => (*from..=*to).map(|n| (cf.q(n).clone(), Some(n))).collect(),
            TimeSpec::Explicit(ts) => ts
                .iter()
                .map(|t| {
                    let n = (0..=cf.validated_depth).find(|&n| cf.q(n) == t);
                    (t.clone(), n)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    roof: RawRoof,
    #[serde(default)]
    budget: RawBudget,
    classify: Option<RawClassify>,
    rigidity: Option<RawRigidity>,
    figures: Option<RawFigures>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    alpha: String,
    beta: Option<String>,
    #[serde(default = "default_bits")]
    precision_bits: u32,
    #[serde(default = "default_depth")]
    depth: usize,
}

fn default_bits() -> u32 {
    256
}

fn default_depth() -> usize {
    30
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoof {
    a: String,
    b: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudget {
    breakpoints: Option<u64>,
    max_time: Option<u64>,
    quotient_cap: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassify {
    depth: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRigidity {
    times: String,
    range: Option<[u64; 2]>,
    multiples: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFigures {
    powers: Vec<i64>,
    out: PathBuf,
    #[serde(default)]
    svg: bool,
    #[serde(default)]
    exact: bool,
    grid: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub breakpoints: u64,
    pub max_time: u64,
    pub quotient_cap: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            breakpoints: 2_000_000,
            max_time: 200_000,
            quotient_cap: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifyTask {
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigidityTask {
    pub times: TimeSpec,
    pub range: Option<(u64, u64)>,
    /// Largest `m` in the distribution comparison of `F^(m q)` with `m F^(q)`.
    pub multiples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FigureTask {
    pub powers: Vec<i64>,
    pub out: PathBuf,
    pub svg: bool,
    pub exact: bool,
    /// Denominator of the grid lines `k / grid`; defaults to `q_1`.
    pub grid: Option<u64>,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub alpha_spec: String,
    pub beta_spec: Option<String>,
    pub precision_bits: u32,
    pub depth: usize,
    #[serde(with = "cocycle_core::exact::serde_scalar")]
    pub a: ExactScalar,
    #[serde(with = "cocycle_core::exact::serde_scalar")]
    pub b: ExactScalar,
    pub budgets: Budgets,
    pub classify: Option<ClassifyTask>,
    pub rigidity: Option<RigidityTask>,
    pub figures: Option<FigureTask>,
    pub report: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Minimal config with no tasks.
    pub fn new(alpha_spec: &str, a: ExactScalar, b: ExactScalar) -> Result<Self, ConfigError> {
        let cfg = ExperimentConfig {
            alpha_spec: alpha_spec.to_string(),
            beta_spec: None,
            precision_bits: default_bits(),
            depth: default_depth(),
            a,
            b,
            budgets: Budgets::default(),
            classify: None,
            rigidity: None,
            figures: None,
            report: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: describe_toml_error(text, &e),
        })?;
        let bits = raw.experiment.precision_bits;
        let a = resolve_scalar(&raw.roof.a, bits).map_err(|m| invalid("roof.a", m))?;
        let b = resolve_scalar(&raw.roof.b, bits).map_err(|m| invalid("roof.b", m))?;
        let defaults = Budgets::default();
        let rigidity = match raw.rigidity {
            Some(r) => Some(RigidityTask {
                times: r.times.parse().map_err(|m| invalid("rigidity.times", m))?,
                range: r.range.map(|[lo, hi]| (lo, hi)),
                multiples: r.multiples.unwrap_or(4),
            }),
            None => None,
        };
        let cfg = ExperimentConfig {
            alpha_spec: raw.experiment.alpha,
            beta_spec: raw.experiment.beta,
            precision_bits: bits,
            depth: raw.experiment.depth,
            a,
            b,
            budgets: Budgets {
                breakpoints: raw.budget.breakpoints.unwrap_or(defaults.breakpoints),
                max_time: raw.budget.max_time.unwrap_or(defaults.max_time),
                quotient_cap: raw.budget.quotient_cap.unwrap_or(defaults.quotient_cap),
            },
            classify: raw.classify.map(|c| ClassifyTask {
                depth: c.depth.unwrap_or(raw.experiment.depth),
            }),
            rigidity,
            figures: raw.figures.map(|f| FigureTask {
                powers: f.powers,
                out: f.out,
                svg: f.svg,
                exact: f.exact,
                grid: f.grid,
            }),
            report: raw.output.report,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        AlphaSpec::from_str(&self.alpha_spec).map_err(|e| invalid("experiment.alpha", e.to_string()))?;
        if let Some(beta) = &self.beta_spec {
            resolve_scalar(beta, self.precision_bits).map_err(|m| invalid("experiment.beta", m))?;
        }
        if self.depth == 0 {
            return Err(invalid("experiment.depth", "must be at least 1"));
        }
        if self.precision_bits < 32 {
            return Err(invalid("experiment.precision_bits", "must be at least 32"));
        }
        if !self.a.is_positive() {
            return Err(invalid("roof.a", "must be positive"));
        }
        if !self.b.is_positive() {
            return Err(invalid("roof.b", "must be positive"));
        }
        if self.classify.is_some() && self.beta_spec.is_none() {
            return Err(invalid("experiment.beta", "required by [classify]"));
        }
        if let Some(f) = &self.figures {
            if self.beta_spec.is_none() {
                return Err(invalid("experiment.beta", "required by [figures]"));
            }
            if f.powers.is_empty() {
                return Err(invalid("figures.powers", "must not be empty"));
            }
            if f.grid == Some(0) {
                return Err(invalid("figures.grid", "must be positive"));
            }
        }
        if let Some(r) = &self.rigidity {
            if let Some((lo, hi)) = r.range {
                if lo == 0 || lo > hi {
                    return Err(invalid("rigidity.range", "need 1 <= lo <= hi"));
                }
            }
            if r.multiples == 0 {
                return Err(invalid("rigidity.multiples", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// True for roofs with `a - b = 2`, whose centred version is the
    /// `+-1` cocycle.
    pub fn unit_jump_roof(&self) -> bool {
        &self.a - &self.b == int(2)
    }

    pub fn beta(&self) -> Option<ExactScalar> {
        self.beta_spec
            .as_ref()
            .map(|b| resolve_scalar(b, self.precision_bits).expect("validated"))
    }

    pub fn has_tasks(&self) -> bool {
        self.classify.is_some() || self.rigidity.is_some() || self.figures.is_some()
    }
}

fn describe_toml_error(text: &str, e: &toml::de::Error) -> String {
    let msg = e.message().to_string();
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {msg}")
        }
        None => msg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cocycle_core::exact::ratio;

    const SAMPLE: &str = r#"
[experiment]
alpha = "cf:3,(2)"
beta = "1/2"
depth = 20

[roof]
a = "3"
b = "1"

[classify]

[rigidity]
times = "denominators:1..6"
range = [3, 50]
"#;

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::parse(SAMPLE, "sample").unwrap();
        assert_eq!(c.beta(), Some(ratio(1, 2)));
        assert!(c.unit_jump_roof());
        assert_eq!(c.classify, Some(ClassifyTask { depth: 20 }));
        let r = c.rigidity.unwrap();
        assert_eq!(r.times, TimeSpec::Denominators { from: 1, to: 6 });
        assert_eq!(r.range, Some((3, 50)));
        assert_eq!(c.budgets, Budgets::default());
    }

    #[test]
    fn reports_line_of_syntax_error() {
        let text = "[experiment]\nalpha = \"golden\"\n\n[roof]\na = 3\nb = \"1\"\n";
        let err = ExperimentConfig::parse(text, "bad.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.toml") && msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn rejects_non_positive_roof() {
        let text = SAMPLE.replace("b = \"1\"", "b = \"-1/2\"");
        assert!(matches!(
            ExperimentConfig::parse(&text, "x"),
            Err(ConfigError::Invalid { key: "roof.b", .. })
        ));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = SAMPLE.replace("depth = 20", "depht = 20");
        assert!(ExperimentConfig::parse(&text, "x").is_err());
    }

    #[test]
    fn named_constants_resolve() {
        let v = resolve_scalar("2-sqrt2", 128).unwrap();
        let x = cocycle_core::exact::to_f64(&v);
        assert!((x - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(resolve_scalar("0.25", 64).unwrap(), ratio(1, 4));
    }

    #[test]
    fn time_specs() {
        assert_eq!("denominators:2..8".parse::<TimeSpec>().unwrap(), TimeSpec::Denominators { from: 2, to: 8 });
        assert_eq!(
            "7, 106".parse::<TimeSpec>().unwrap(),
            TimeSpec::Explicit(vec![BigInt::from(7), BigInt::from(106)])
        );
        assert!("denominators:5..2".parse::<TimeSpec>().is_err());
        assert!("0".parse::<TimeSpec>().is_err());
    }
}
