//! Command-line interface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use cocycle_core::cocycle_diagnostics::{classify_coboundary, ClassifyBudget, Verdict};
use cocycle_core::continued_fractions::{cf_expand, AlphaSpec, CFExpansion};
use cocycle_core::exact::{int, parse_scalar, to_decimal_string, to_fraction_string, ExactScalar};
use cocycle_core::fourier_tools::{hoelder_build, hoelder_modulus, series_norm, FourierSeriesSpec, DEFAULT_QUOTIENT_CAP};
use cocycle_core::ostrowski::{ostrowski_expand, synth_beta};
use cocycle_core::step_circle::{StepFunction, StepKind};

use crate::config::{resolve_scalar, Budgets, ExperimentConfig, RigidityTask, TimeSpec};
use crate::figures::{figure_emit, FigureOptions};
use crate::report::{run_report, write_report};
use crate::rigidity::rigidity_experiment;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "flowlab", version, about = "Exact experiments with step cocycles and special flows over rotations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// Rotation number: a constant name, an exact number, or `cf:a1,a2,(period)`.
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 256)]
    pub bits: u32,
    #[arg(long, default_value_t = 24)]
    pub depth: usize,
}

impl AlphaArgs {
    fn expand(&self) -> Result<CFExpansion, Failure> {
        let spec = AlphaSpec::from_str(&self.alpha).map_err(|e| Failure::config(format!("--alpha: {e}")))?;
        cf_expand(&spec, self.bits, self.depth).map_err(|e| Failure::config(format!("--alpha: {e}")))
    }

    fn scalar(&self, name: &str, text: &str) -> Result<ExactScalar, Failure> {
        resolve_scalar(text, self.bits).map_err(|e| Failure::config(format!("--{name}: {e}")))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task in a config file and write the JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; overrides the config and defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write CSV (and optionally SVG) data for Birkhoff sums of phi_beta.
    Figures {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        beta: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1i64, 7, 21])]
        powers: Vec<i64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
        /// Write exact fractions instead of decimals.
        #[arg(long)]
        exact: bool,
        /// Grid denominator; defaults to q_1.
        #[arg(long)]
        grid: Option<u64>,
    },
    /// Laws and norms of Birkhoff sums of the centred roof f_{a,b}.
    Rigidity {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// `denominators:FROM..TO` or a comma list of times.
        #[arg(long)]
        times: String,
        /// Also minimize the norm over `LO..HI`.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 4)]
        multiples: u64,
    },
    /// Continued-fraction table.
    Cf {
        #[command(flatten)]
        alpha: AlphaArgs,
    },
    /// Classify whether phi_beta is a coboundary.
    Diag {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        beta: String,
    },
    /// Ostrowski digits.
    #[command(subcommand)]
    Ostrowski(OstrowskiCommand),
    /// Fourier-side tools.
    #[command(subcommand)]
    Fourier(FourierCommand),
}

#[derive(Debug, Subcommand)]
pub enum OstrowskiCommand {
    /// Digits of beta.
    Expand {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        beta: String,
    },
    /// The point with the given digits.
    Synth {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, value_delimiter = ',')]
        digits: Vec<BigInt>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FourierCommand {
    /// Squared L2 norm of F^(q) from a truncated series, with tail bound.
    Norm {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 100_000)]
        truncation: u64,
        /// Use phi_beta instead of F.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Empirical modulus of continuity of a lacunary series.
    Hoelder {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value = "1/4")]
        delta: String,
        #[arg(long, default_value_t = 6)]
        terms: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Write `x,value_lo,value_hi` samples.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn other(message: impl ToString) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

fn print_json<T: Serialize>(out: &mut dyn std::io::Write, v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(Failure::other)?;
    writeln!(out, "{s}").map_err(Failure::other)
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: Command, out: &mut dyn std::io::Write) -> Result<i32, Failure> {
    match cmd {
        Command::Run { config, out: path } => {
            let cfg = ExperimentConfig::load(&config).map_err(|e| Failure::config(e.to_string()))?;
            let report = run_report(&cfg).map_err(|e| Failure::config(e.to_string()))?;
            match path.or_else(|| cfg.report.clone()) {
                Some(p) => write_report(&report, &p).map_err(Failure::other)?,
                None => write!(out, "{}", report.to_json()).map_err(Failure::other)?,
            }
            Ok(report.outcome().exit_code())
        }
        Command::Figures {
            alpha,
            beta,
            powers,
            out: dir,
            svg,
            exact,
            grid,
        } => {
            let cf = alpha.expand()?;
            let beta = alpha.scalar("beta", &beta)?;
            let opts = FigureOptions {
                svg,
                exact,
                grid: grid.unwrap_or_else(|| cf.q_u64(1)),
                breakpoint_budget: Budgets::default().breakpoints,
            };
            let res = figure_emit(cf.alpha(), &beta, &powers, &dir, &opts).map_err(|e| match e {
                crate::figures::FigureError::Step(s) => Failure {
                    code: EXIT_BUDGET,
                    message: s.to_string(),
                },
                other => Failure::other(other),
            })?;
            print_json(out, &res)?;
            Ok(EXIT_OK)
        }
        Command::Rigidity {
            alpha,
            a,
            b,
            times,
            range,
            multiples,
        } => {
            let cf = alpha.expand()?;
            let a = alpha.scalar("a", &a)?;
            let b = alpha.scalar("b", &b)?;
            if a <= int(0) || b <= int(0) {
                return Err(Failure::config("--a and --b must be positive"));
            }
            let times = TimeSpec::from_str(&times).map_err(|e| Failure::config(format!("--times: {e}")))?;
            let range = match range {
                Some(r) => Some(parse_range(&r).ok_or_else(|| Failure::config(format!("--range: bad range `{r}`")))?),
                None => None,
            };
            let task = RigidityTask { times, range, multiples };
            let report = rigidity_experiment(&cf, &a, &b, &task, &Budgets::default());
            print_json(out, &report)?;
            Ok(if report.budget_exhausted { EXIT_BUDGET } else { EXIT_OK })
        }
        Command::Cf { alpha } => {
            let cf = alpha.expand()?;
            writeln!(out, "n\ta_n\tq_n\t||q_n alpha||\tparity").map_err(Failure::other)?;
            for n in 0..=cf.validated_depth.min(alpha.depth) {
                let a = if n == 0 { "-".to_string() } else { cf.a(n).to_string() };
                let dist = to_decimal_string(&cf.norm_q_alpha(n), 12, 12);
                let parity = if cf.q_is_odd(n) { "odd" } else { "even" };
                writeln!(out, "{n}\t{a}\t{}\t{dist}\t{parity}", cf.q(n)).map_err(Failure::other)?;
            }
            Ok(EXIT_OK)
        }
        Command::Diag { alpha, beta } => {
            let cf = alpha.expand()?;
            let beta = alpha.scalar("beta", &beta)?;
            let budget = ClassifyBudget {
                max_depth: alpha.depth,
                ..ClassifyBudget::default()
            };
            let d = classify_coboundary(&cf, &beta, &budget).map_err(Failure::other)?;
            print_json(out, &d)?;
            Ok(match d.verdict {
                _ if d.budget_used.exhausted => EXIT_BUDGET,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
                _ => EXIT_OK,
            })
        }
        Command::Ostrowski(OstrowskiCommand::Expand { alpha, beta }) => {
            let cf = alpha.expand()?;
            let beta = alpha.scalar("beta", &beta)?;
            let e = ostrowski_expand(&cf, &beta, alpha.depth).map_err(Failure::other)?;
            print_json(out, &e)?;
            Ok(EXIT_OK)
        }
        Command::Ostrowski(OstrowskiCommand::Synth { alpha, digits }) => {
            let cf = alpha.expand()?;
            let x = synth_beta(&cf, &digits).map_err(|e| Failure::config(e.to_string()))?;
            writeln!(out, "{}", to_fraction_string(&x)).map_err(Failure::other)?;
            Ok(EXIT_OK)
        }
        Command::Fourier(FourierCommand::Norm {
            alpha,
            q,
            truncation,
            beta,
        }) => {
            let cf = alpha.expand()?;
            let kind = match beta {
                Some(b) => StepKind::PhiBeta(alpha.scalar("beta", &b)?),
                None => StepKind::F,
            };
            let f = StepFunction::make(&kind).map_err(Failure::other)?;
            let s = series_norm(&FourierSeriesSpec::Step(f), &cf, q, truncation).map_err(Failure::other)?;
            writeln!(
                out,
                "norm_sq in [{:e}, {:e}]\ntruncated in [{:e}, {:e}]\ntail_bound {:e}",
                s.norm_sq.lo, s.norm_sq.hi, s.truncated.lo, s.truncated.hi, s.tail_bound
            )
            .map_err(Failure::other)?;
            Ok(EXIT_OK)
        }
        Command::Fourier(FourierCommand::Hoelder {
            alpha,
            delta,
            terms,
            samples,
            emit,
        }) => {
            let cf = alpha.expand()?;
            let delta = parse_scalar(&delta).map_err(|e| Failure::config(format!("--delta: {e}")))?;
            let spec = hoelder_build(&cf, None, &delta, terms, DEFAULT_QUOTIENT_CAP).map_err(Failure::other)?;
            let m = hoelder_modulus(&spec.poly, samples).map_err(Failure::other)?;
            if let Some(path) = emit {
                let mut csv = String::from("x,value_lo,value_hi\n");
                for k in 0..samples {
                    let x = ExactScalar::new(BigInt::from(k), BigInt::from(samples));
                    let v = spec.poly.eval(&x);
                    csv.push_str(&format!("{},{:e},{:e}\n", to_fraction_string(&x), v.lo, v.hi));
                }
                std::fs::write(&path, csv).map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
            }
            writeln!(
                out,
                "empirical_c {:e}\nworst_x {}\nworst_h {}\nevaluations {}",
                m.empirical_c,
                to_fraction_string(&m.worst_x),
                to_fraction_string(&m.worst_h),
                m.evaluations
            )
            .map_err(Failure::other)?;
            Ok(EXIT_OK)
        }
    }
}

fn parse_range(s: &str) -> Option<(u64, u64)> {
    let (a, b) = s.split_once("..")?;
    let lo: u64 = a.trim().parse().ok()?;
    let hi: u64 = b.trim().trim_start_matches('=').parse().ok()?;
    (1 <= lo && lo <= hi).then_some((lo, hi))
}
