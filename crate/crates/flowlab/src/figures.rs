//! CSV and SVG output for Birkhoff sums of `phi_beta`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use cocycle_core::exact::{int, parse_scalar, ratio, to_decimal_string, to_f64, to_fraction_string, ExactScalar};
use cocycle_core::step_circle::{StepError, StepFunction, StepKind};

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("sum of three rotates differs from the direct sum at power {0}")]
    IdentityFailed(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureOptions {
    pub svg: bool,
    /// Write breakpoints and values as exact fractions.
    pub exact: bool,
    /// Grid lines at `k / grid`.
    pub grid: u64,
    pub breakpoint_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerSummary {
    pub power: i64,
    pub discontinuities: usize,
    pub values: Vec<String>,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FigureOutput {
    pub powers: Vec<PowerSummary>,
    pub grid: PathBuf,
    /// Powers whose three-rotate decomposition was checked.
    pub identity_checked: Vec<i64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FigureError + '_ {
    move |source| FigureError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `phi^(p) = phi^(p/3) + phi^(p/3)(. + (p/3) alpha) + phi^(p/3)(. + 2 (p/3) alpha)`.
pub fn three_rotate_sum(base: &StepFunction, alpha: &ExactScalar, third: i64) -> StepFunction {
    let shift = alpha * int(third);
    base.add(&base.rotate(&shift)).add(&base.rotate(&(shift * int(2))))
}

/// Writes `phi_beta_<p>.csv` for every power, `grid.csv`, and optional SVG
/// plots into `out`.
pub fn figure_emit(
    alpha: &ExactScalar,
    beta: &ExactScalar,
    powers: &[i64],
    out: &Path,
    opts: &FigureOptions,
) -> Result<FigureOutput, FigureError> {
    let phi = StepFunction::make(&StepKind::PhiBeta(beta.clone()))?;
    let mut sums = Vec::with_capacity(powers.len());
    let mut identity_checked = Vec::new();
    for &p in powers {
        let g = phi.ergodic_sum_with_budget(alpha, p, opts.breakpoint_budget)?;
        if p != 0 && p % 3 == 0 {
            let third = p / 3;
            let base = phi.ergodic_sum_with_budget(alpha, third, opts.breakpoint_budget)?;
            if three_rotate_sum(&base, alpha, third) != g {
                return Err(FigureError::IdentityFailed(p));
            }
            identity_checked.push(p);
        }
        sums.push((p, g));
    }

    fs::create_dir_all(out).map_err(io_err(out))?;
    let grid_path = out.join("grid.csv");
    let mut grid = String::from("k,position\n");
    for k in 0..=opts.grid {
        let x = ratio(k as i64, opts.grid as i64);
        writeln!(grid, "{k},{}", render(&x, opts.exact)).unwrap();
    }
    fs::write(&grid_path, grid).map_err(io_err(&grid_path))?;

    let mut summaries = Vec::new();
    for (p, g) in &sums {
        let csv = out.join(format!("phi_beta_{p}.csv"));
        fs::write(&csv, step_csv(g, opts.exact)).map_err(io_err(&csv))?;
        let svg = if opts.svg {
            let path = out.join(format!("phi_beta_{p}.svg"));
            fs::write(&path, step_svg(g, opts.grid, &format!("power {p}"))).map_err(io_err(&path))?;
            Some(path)
        } else {
            None
        };
        summaries.push(PowerSummary {
            power: *p,
            discontinuities: g.discontinuities().len(),
            values: g.value_set().iter().map(to_fraction_string).collect(),
            csv,
            svg,
        });
    }
    Ok(FigureOutput {
        powers: summaries,
        grid: grid_path,
        identity_checked,
    })
}

fn render(x: &ExactScalar, exact: bool) -> String {
    if exact {
        to_fraction_string(x)
    } else {
        to_decimal_string(x, 17, 17)
    }
}

/// `breakpoint,value` rows: the value holds from its breakpoint to the next.
pub fn step_csv(g: &StepFunction, exact: bool) -> String {
    let mut s = String::from("breakpoint,value\n");
    for (b, v) in g.breakpoints().iter().zip(g.values()) {
        writeln!(s, "{},{}", render(b, exact), render(v, exact)).unwrap();
    }
    s
}

/// Inverse of [`step_csv`]; exact when the file was written exactly.
pub fn read_step_csv(path: &Path) -> Result<StepFunction, FigureError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parse_err = |line: usize, message: String| FigureError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "breakpoint,value")) => {}
        _ => return Err(parse_err(1, "expected header `breakpoint,value`".into())),
    }
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (b, v) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected two fields".into()))?;
        bps.push(parse_scalar(b).map_err(|e| parse_err(i + 1, e.to_string()))?);
        vals.push(parse_scalar(v).map_err(|e| parse_err(i + 1, e.to_string()))?);
    }
    StepFunction::from_arcs(bps, vals).map_err(|e| parse_err(0, e.to_string()))
}

/// Self-contained SVG step plot with dashed grid lines at `k / grid`.
pub fn step_svg(g: &StepFunction, grid: u64, title: &str) -> String {
    const W: f64 = 800.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let vals: Vec<f64> = g.values().iter().map(to_f64).collect();
    let lo = vals.iter().cloned().fold(0.0f64, f64::min) - 0.5;
    let hi = vals.iter().cloned().fold(0.0f64, f64::max) + 0.5;
    let px = |x: f64| PAD + x * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - lo) / (hi - lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{title}</text>"#).unwrap();
    for k in 0..=grid {
        let x = px(k as f64 / grid as f64);
        writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
            PAD,
            H - PAD
        )
        .unwrap();
    }
    writeln!(
        s,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888"/>"##,
        px(0.0),
        px(1.0),
        y = py(0.0)
    )
    .unwrap();

    // the last arc wraps through 1, so the plot starts with its value at 0
    let bps: Vec<f64> = g.breakpoints().iter().map(to_f64).collect();
    let n = bps.len();
    let mut pts = Vec::with_capacity(2 * n + 2);
    let mut cur = vals[n - 1];
    pts.push((0.0, cur));
    for i in 0..n {
        if bps[i] > 0.0 {
            pts.push((bps[i], cur));
        }
        cur = vals[i];
        pts.push((bps[i], cur));
    }
    pts.push((1.0, cur));
    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{}"/>"##,
        path.join(" ")
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use cocycle_core::exact::ratio;

    fn opts(exact: bool) -> FigureOptions {
        FigureOptions {
            svg: true,
            exact,
            grid: 7,
            breakpoint_budget: 1_000_000,
        }
    }

    #[test]
    fn exact_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let alpha = ratio(16, 113);
        let beta = ratio(7, 12);
        let out = figure_emit(&alpha, &beta, &[1, 7, 21], dir.path(), &opts(true)).unwrap();
        assert_eq!(out.identity_checked, vec![21]);
        let phi = StepFunction::make(&StepKind::PhiBeta(beta)).unwrap();
        for s in &out.powers {
            let g = phi.ergodic_sum(&alpha, s.power).unwrap();
            assert_eq!(read_step_csv(&s.csv).unwrap(), g);
            assert!(s.svg.as_ref().unwrap().exists());
        }
        assert_eq!(out.powers[0].discontinuities, 4);
        let grid = fs::read_to_string(&out.grid).unwrap();
        assert_eq!(grid.lines().count(), 9);
        assert!(grid.contains("\n3,3/7\n"));
    }

    #[test]
    fn decimal_csv_is_readable() {
        let g = StepFunction::make(&StepKind::PhiBeta(ratio(1, 3))).unwrap();
        let csv = step_csv(&g, false);
        assert!(csv.starts_with("breakpoint,value\n0,"));
        assert!(csv.contains("0.33333333333333333"));
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = figure_emit(&ratio(5, 13), &ratio(1, 3), &[1], &blocker.join("sub"), &opts(false)).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }

    #[test]
    fn missing_header_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "0,1\n").unwrap();
        assert!(matches!(read_step_csv(&p), Err(FigureError::Parse { line: 1, .. })));
    }
}
