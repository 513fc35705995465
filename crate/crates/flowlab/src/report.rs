//! Orchestration of a configured run and its JSON report.
//!
//! The report is a pure function of the config and the tool version: no
//! timestamps, host names or map iteration order leak into it.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use cocycle_core::cocycle_diagnostics::{classify_coboundary, ClassifyBudget, DiagnosisReport, Verdict};
use cocycle_core::continued_fractions::{cf_expand, AlphaSpec, CFExpansion, CfError};
use cocycle_core::exact::{ratio, to_fraction_string};

use crate::config::ExperimentConfig;
use crate::figures::{figure_emit, FigureOptions, FigureOutput};
use crate::rigidity::{rigidity_experiment, RigidityReport};

pub const SCHEMA: &str = "flowlab-report/1";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("alpha: {0}")]
    Alpha(#[from] CfError),
    #[error("cannot write report {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionStatus {
    Ok,
    BudgetExhausted,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaSummary {
    pub spec: String,
    pub precision_bits: u32,
    pub validated_depth: usize,
    pub partial_quotients: Vec<String>,
    pub denominators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifySection {
    pub status: SectionStatus,
    pub beta: String,
    pub diagnosis: Option<DiagnosisReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigiditySection {
    pub status: SectionStatus,
    pub all_checks_hold: bool,
    pub result: RigidityReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FigureSection {
    pub status: SectionStatus,
    pub output: Option<FigureOutput>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub config: ExperimentConfig,
    pub unit_jump_roof: bool,
    pub alpha: Option<AlphaSummary>,
    pub classify: Option<ClassifySection>,
    pub rigidity: Option<RigiditySection>,
    pub figures: Option<FigureSection>,
}

/// Process outcome, mapped to exit codes by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    InconclusiveOnly,
    BudgetExhausted,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::InconclusiveOnly => 2,
            Outcome::BudgetExhausted => 3,
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn outcome(&self) -> Outcome {
        let exhausted = self.classify.as_ref().map(|c| c.status) == Some(SectionStatus::BudgetExhausted)
            || self.rigidity.as_ref().map(|r| r.status) == Some(SectionStatus::BudgetExhausted)
            || self.figures.as_ref().map(|f| f.status) == Some(SectionStatus::BudgetExhausted);
        if exhausted {
            return Outcome::BudgetExhausted;
        }
        let inconclusive = self
            .classify
            .as_ref()
            .and_then(|c| c.diagnosis.as_ref())
            .is_some_and(|d| d.verdict == Verdict::Inconclusive);
        if inconclusive {
            Outcome::InconclusiveOnly
        } else {
            Outcome::Success
        }
    }
}

fn summarize(cf: &CFExpansion, spec: &str) -> AlphaSummary {
    let d = cf.validated_depth;
    AlphaSummary {
        spec: spec.to_string(),
        precision_bits: cf.precision_bits,
        validated_depth: d,
        partial_quotients: (1..=d).map(|n| cf.a(n).to_string()).collect(),
        denominators: (0..=d).map(|n| cf.q(n).to_string()).collect(),
    }
}

/// Runs every task in `cfg`. Failures inside a task are recorded in its
/// section; only an unusable `alpha` aborts the run.
pub fn run_report(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut report = Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        unit_jump_roof: cfg.unit_jump_roof(),
        alpha: None,
        classify: None,
        rigidity: None,
        figures: None,
    };
    if !cfg.has_tasks() {
        return Ok(report);
    }
    let spec: AlphaSpec = cfg.alpha_spec.parse()?;
    let cf = cf_expand(&spec, cfg.precision_bits, cfg.depth)?;
    report.alpha = Some(summarize(&cf, &cfg.alpha_spec));
    let beta = cfg.beta();

    if let (Some(task), Some(beta)) = (&cfg.classify, &beta) {
        let budget = ClassifyBudget {
            max_depth: task.depth,
            breakpoints: cfg.budgets.breakpoints,
            max_time: cfg.budgets.max_time,
            quotient_cap: cfg.budgets.quotient_cap,
            rational_s_max: 12,
            separation_delta: ratio(1, 100),
        };
        report.classify = Some(match classify_coboundary(&cf, beta, &budget) {
            Ok(d) => ClassifySection {
                status: if d.budget_used.exhausted {
                    SectionStatus::BudgetExhausted
                } else {
                    SectionStatus::Ok
                },
                beta: to_fraction_string(beta),
                diagnosis: Some(d),
                error: None,
            },
            Err(e) => ClassifySection {
                status: SectionStatus::Failed,
                beta: to_fraction_string(beta),
                diagnosis: None,
                error: Some(e.to_string()),
            },
        });
    }

    if let Some(task) = &cfg.rigidity {
        let result = rigidity_experiment(&cf, &cfg.a, &cfg.b, task, &cfg.budgets);
        report.rigidity = Some(RigiditySection {
            status: if result.budget_exhausted {
                SectionStatus::BudgetExhausted
            } else {
                SectionStatus::Ok
            },
            all_checks_hold: result.all_checks_hold(),
            result,
        });
    }

    if let (Some(task), Some(beta)) = (&cfg.figures, &beta) {
        let opts = FigureOptions {
            svg: task.svg,
            exact: task.exact,
            grid: task.grid.unwrap_or_else(|| cf.q_u64(1)),
            breakpoint_budget: cfg.budgets.breakpoints,
        };
        report.figures = Some(match figure_emit(cf.alpha(), beta, &task.powers, &task.out, &opts) {
            Ok(out) => FigureSection {
                status: SectionStatus::Ok,
                output: Some(out),
                error: None,
            },
            Err(crate::figures::FigureError::Step(e)) => FigureSection {
                status: SectionStatus::BudgetExhausted,
                output: None,
                error: Some(e.to_string()),
            },
            Err(e) => FigureSection {
                status: SectionStatus::Failed,
                output: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(report)
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Write {
            path: dir.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, report.to_json()).map_err(|source| RunError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cocycle_core::exact::int;

    fn cfg(alpha: &str, beta: &str) -> ExperimentConfig {
        let text = format!(
            "[experiment]\nalpha = \"{alpha}\"\nbeta = \"{beta}\"\ndepth = 24\n\n[roof]\na = \"3\"\nb = \"1\"\n\n[classify]\n"
        );
        ExperimentConfig::parse(&text, "test").unwrap()
    }

    #[test]
    fn empty_task_list_echoes_config() {
        let c = ExperimentConfig::new("golden", int(3), int(1)).unwrap();
        let r = run_report(&c).unwrap();
        assert!(r.alpha.is_none() && r.classify.is_none() && r.rigidity.is_none() && r.figures.is_none());
        let json = r.to_json();
        assert!(json.contains("\"schema\": \"flowlab-report/1\""));
        assert!(json.contains("\"alpha_spec\": \"golden\""));
        assert_eq!(r.outcome(), Outcome::Success);
    }

    #[test]
    fn bounded_type_is_ergodic() {
        let r = run_report(&cfg("golden", "1/3")).unwrap();
        let d = r.classify.unwrap().diagnosis.unwrap();
        assert_eq!(d.verdict, Verdict::EvidenceErgodic);
    }

    #[test]
    fn odd_denominators_with_half() {
        let r = run_report(&cfg("cf:3,(2)", "1/2")).unwrap();
        let d = r.classify.unwrap().diagnosis.unwrap();
        assert!(matches!(d.verdict, Verdict::EvidenceNotCoboundary(_)));
    }

    #[test]
    fn report_is_deterministic() {
        let c = cfg("cf:3,(2)", "1/2");
        assert_eq!(run_report(&c).unwrap().to_json(), run_report(&c).unwrap().to_json());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::Success.exit_code(), 0);
        assert_eq!(Outcome::InconclusiveOnly.exit_code(), 2);
        assert_eq!(Outcome::BudgetExhausted.exit_code(), 3);
    }
}
