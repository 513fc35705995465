//! Special flows over irrational rotations under step roofs: flow and skew
//! evaluation, rigidity experiments, figure data, configured runs with JSON
//! reports, and the `flowlab` command line.

pub mod cli;
pub mod config;
pub mod figures;
pub mod flow;
pub mod report;
pub mod rigidity;

pub use config::{ConfigError, ExperimentConfig, TimeSpec};
pub use figures::{figure_emit, FigureOptions};
pub use flow::{flow_step, skew_step, FlowPoint};
pub use report::{run_report, Report};
pub use rigidity::rigidity_experiment;
