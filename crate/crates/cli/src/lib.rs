//! Batch front-end for `fkdet-core`: closed forms, series dumps, bound
//! sweeps, Mahler measures, figure reproduction and the Lehmer report.

pub mod plot;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use fkdet_core::catalog::{self, NamedOperator};
use fkdet_core::determinant::{
    self, free_closed_form, mahler_1d, mahler_nd, symmetric_free_closed_form, upper_bounds,
    ApproxParams, LambdaPolicy, LaurentPoly,
};
use fkdet_core::series::{self, SeriesCoeffs};
use fkdet_core::words::load_representation_file;
use fkdet_core::{Complex64, Error as CoreError, GroupSpec, TraceSchedule, Word};

pub const DEFAULT_GRID: &str = "0.001:4:200";
pub const CSV_HEADER: &str = "t,n,lambda,bound,certified";

#[derive(Parser, Debug)]
#[command(name = "fkdet", version, about = "Fuglede-Kadison determinant bounds for group-ring operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form determinant of a free family.
    Exact {
        #[arg(long, value_enum, default_value = "free")]
        family: Family,
        #[arg(long)]
        d: usize,
    },
    /// Exact coefficients of the path-counting series.
    Series {
        #[arg(long, value_enum, default_value = "free")]
        family: Family,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Also compute the traces by brute force and fail on mismatch.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Upper-bound sequences over a t grid.
    Approx {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mahler measure of a Laurent polynomial.
    Mahler {
        #[arg(long)]
        poly: String,
        /// Torus grid per dimension; univariate input without a grid uses roots.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Reproduce the figure-eight knot sweeps.
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, default_value = DEFAULT_GRID)]
        t_grid: TGrid,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "paper")]
        lambda: LambdaChoice,
        #[arg(long)]
        rep: Option<PathBuf>,
        /// Output path; extensions are added per format.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        format: OutputFormat,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Volume bounds exp(vol/6π) against 2/√3.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Free,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperatorChoice {
    /// Id + R_x1 + … over F_{d−1}, series route.
    Free,
    /// Σ R_xi + R_xi⁻¹ over F_d, series route.
    Symmetric,
    /// Id − t·R_g over ℤ.
    Linear,
    Fig8Wirtinger,
    Fig8Twist,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub operator: OperatorChoice,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value = DEFAULT_GRID)]
    pub t_grid: TGrid,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value = "safe")]
    pub lambda: LambdaChoice,
    #[arg(long)]
    pub rep: Option<PathBuf>,
    #[arg(long)]
    pub budget: Option<usize>,
}

/// `start:stop:count` with 0 < start ≤ stop and count ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

impl FromStr for TGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
        let start = num(parts[0])?;
        let stop = num(parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|e| format!("`{}`: {e}", parts[2]))?;
        if !(start > 0.0) || !(start <= stop) || count == 0 {
            return Err(format!("need 0 < start ≤ stop and count ≥ 1, got `{s}`"));
        }
        Ok(TGrid { start, stop, count })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaChoice {
    Safe,
    Published,
    Value(BigRational),
}

impl FromStr for LambdaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "safe" => Ok(LambdaChoice::Safe),
            "paper" => Ok(LambdaChoice::Published),
            _ => {
                let v = if s.contains('/') {
                    s.parse::<BigRational>().map_err(|e| format!("`{s}`: {e}"))?
                } else {
                    let f: f64 = s.parse().map_err(|e| format!("`{s}`: {e}"))?;
                    BigRational::from_float(f).ok_or_else(|| format!("`{s}` is not finite"))?
                };
                if v <= BigRational::zero() {
                    return Err("λ must be positive".into());
                }
                Ok(LambdaChoice::Value(v))
            }
        }
    }
}

impl fmt::Display for LambdaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaChoice::Safe => write!(f, "safe"),
            LambdaChoice::Published => write!(f, "paper"),
            LambdaChoice::Value(v) => write!(f, "{v}"),
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub t: Option<f64>,
    pub n: usize,
    pub lambda: f64,
    pub bound: f64,
    pub certified: bool,
}

/// `x` with 12 significant digits, switching to exponent form outside
/// [1e−4, 1e12).
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Row]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let t = r.t.map(sig12).unwrap_or_default();
        writeln!(out, "{t},{},{},{},{}", r.n, sig12(r.lambda), sig12(r.bound), r.certified)?;
    }
    Ok(())
}

/// Worker pool capped by `FKDET_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("FKDET_THREADS") {
        let n: usize = v.parse().with_context(|| format!("FKDET_THREADS=`{v}`"))?;
        if n > 0 {
            b = b.num_threads(n);
        }
    }
    Ok(b.build()?)
}

fn budget_or_default(b: Option<usize>) -> usize {
    b.unwrap_or(fkdet_core::DEFAULT_TERM_BUDGET)
}

pub fn cmd_exact(family: Family, d: usize) -> Result<String> {
    let v = match family {
        Family::Free => free_closed_form(d)?,
        Family::Symmetric => symmetric_free_closed_form(d)?,
    };
    Ok(sig12(v))
}

fn family_series(family: Family, d: usize, k: usize) -> Result<SeriesCoeffs> {
    Ok(match family {
        Family::Free => series::free_series(d, k)?,
        Family::Symmetric => series::symmetric_free_series(d, k)?,
    })
}

/// CSV `k,coefficient`; with `verify`, errors unless brute force agrees.
pub fn cmd_series(family: Family, d: usize, k: usize, verify: bool, budget: Option<usize>) -> Result<String> {
    let s = family_series(family, d, k)?;
    if verify {
        let op = match family {
            Family::Free => catalog::free_operator_exact(d)?,
            Family::Symmetric => catalog::symmetric_operator_exact(d)?,
        };
        let traces = op.element.power_traces(k, budget_or_default(budget))?;
        if traces.values != s.coeffs {
            let at = traces
                .values
                .iter()
                .zip(&s.coeffs)
                .position(|(a, b)| a != b)
                .unwrap_or(0);
            bail!(
                "brute-force traces disagree at k = {at}: {} vs series {}",
                traces.values[at],
                s.coeffs[at]
            );
        }
    }
    let mut out = String::from("k,coefficient\n");
    for (i, c) in s.coeffs.iter().enumerate() {
        out.push_str(&format!("{i},{c}\n"));
    }
    Ok(out)
}

fn load_spec(rep: Option<&Path>, default: fn() -> fkdet_core::Result<Arc<GroupSpec>>) -> Result<Arc<GroupSpec>> {
    Ok(match rep {
        Some(p) => {
            let spec = load_representation_file(p).map_err(|e| match e {
                CoreError::Io(io) => CoreError::RepFormat(format!("cannot read {}: {io}", p.display())),
                other => other,
            });
            Arc::new(spec.with_context(|| format!("loading {}", p.display()))?)
        }
        None => default()?,
    })
}

fn resolve_lambda<C: fkdet_core::Scalar>(op: &NamedOperator<C>, choice: &LambdaChoice) -> Result<(BigRational, bool)> {
    Ok(match choice {
        LambdaChoice::Safe => (op.certified_lambda.clone(), true),
        LambdaChoice::Published => (
            op.published_lambda
                .clone()
                .ok_or_else(|| anyhow!("{} has no published λ; use --lambda safe", op.name))?,
            false,
        ),
        LambdaChoice::Value(v) => (v.clone(), false),
    })
}

fn rows_from_bounds(t: Option<f64>, bounds: &[f64], lambda: &BigRational, certified: bool, factor: f64) -> Vec<Row> {
    let lam = lambda.to_f64().unwrap_or(f64::NAN);
    bounds
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, b)| Row {
            t,
            n,
            lambda: lam,
            bound: b * factor,
            certified,
        })
        .collect()
}

fn rational_t(t: f64) -> Result<BigRational> {
    BigRational::from_float(t).ok_or_else(|| anyhow!("t = {t} is not finite"))
}

/// Bounds for one figure-eight operator at one t, float mode.
fn fig8_rows(
    which: OperatorChoice,
    spec: &Arc<GroupSpec>,
    t: f64,
    n: usize,
    lambda: &LambdaChoice,
    budget: usize,
) -> Result<Vec<Row>> {
    let tq = rational_t(t)?;
    let op: NamedOperator<Complex64> = match which {
        OperatorChoice::Fig8Wirtinger => catalog::fig8_wirtinger(&tq, spec.clone())?,
        OperatorChoice::Fig8Twist => catalog::fig8_twist(&tq, spec.clone())?,
        _ => unreachable!("figure-eight operators only"),
    };
    let (lam, certified) = resolve_lambda(&op, lambda)?;
    let mut params = ApproxParams::with_lambda(lam.clone(), n, certified);
    params.budget = budget;
    let est = determinant::det_upper_bound_with(&op.det_element(), &params)?;
    Ok(rows_from_bounds(Some(t), &est.bounds, &lam, certified, op.output_factor))
}

fn linear_rows(t: f64, n: usize, lambda: &LambdaChoice, budget: usize) -> Result<Vec<Row>> {
    let spec = Arc::new(GroupSpec::free_abelian(1));
    let tq = rational_t(t)?;
    let a = fkdet_core::ExactElement::from_terms(
        spec,
        [(Word::empty(), BigRational::from_integer(1.into())), (Word::generator(1), -tq)],
    )?;
    let (policy, certified) = match lambda {
        LambdaChoice::Safe => (LambdaPolicy::Safe, true),
        LambdaChoice::Published => bail!("linear operator has no published λ; use --lambda safe"),
        LambdaChoice::Value(v) => (LambdaPolicy::Published(v.clone()), false),
    };
    let est = determinant::det_upper_bound(&a, &policy, n, budget)?;
    Ok(rows_from_bounds(Some(t), &est.bounds, &est.lambda, certified, 1.0))
}

fn series_rows(family: Family, d: usize, n: usize, lambda: &LambdaChoice) -> Result<Vec<Row>> {
    let op = match family {
        Family::Free => catalog::free_operator_exact(d)?,
        Family::Symmetric => catalog::symmetric_operator_exact(d)?,
    };
    let (lam, certified) = resolve_lambda(&op, lambda)?;
    let u = family_series(family, d, n)?;
    let params = ApproxParams::with_lambda(lam.clone(), n, certified);
    let est = upper_bounds(&TraceSchedule { values: u.coeffs }, &params)?;
    Ok(rows_from_bounds(None, &est.bounds, &lam, certified, 1.0))
}

/// Rows for a sweep, in grid order then n order.
pub fn cmd_approx(sweep: &SweepArgs) -> Result<Vec<Row>> {
    let budget = budget_or_default(sweep.budget);
    match sweep.operator {
        OperatorChoice::Free => series_rows(Family::Free, sweep.d, sweep.n, &sweep.lambda),
        OperatorChoice::Symmetric => series_rows(Family::Symmetric, sweep.d, sweep.n, &sweep.lambda),
        OperatorChoice::Linear => parallel_rows(&sweep.t_grid, |t| linear_rows(t, sweep.n, &sweep.lambda, budget)),
        which @ (OperatorChoice::Fig8Wirtinger | OperatorChoice::Fig8Twist) => {
            let default = if which == OperatorChoice::Fig8Wirtinger {
                catalog::wirtinger_group
            } else {
                catalog::twist_group
            };
            let spec = load_spec(sweep.rep.as_deref(), default)?;
            parallel_rows(&sweep.t_grid, |t| fig8_rows(which, &spec, t, sweep.n, &sweep.lambda, budget))
        }
    }
}

fn parallel_rows<F>(grid: &TGrid, f: F) -> Result<Vec<Row>>
where
    F: Fn(f64) -> Result<Vec<Row>> + Sync,
{
    let points = grid.points();
    let pool = thread_pool()?;
    let per_t: Vec<Result<Vec<Row>>> = pool.install(|| points.par_iter().map(|&t| f(t)).collect());
    let mut rows = Vec::new();
    for r in per_t {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn cmd_mahler(poly: &str, grid: Option<usize>) -> Result<String> {
    let p = LaurentPoly::parse(poly)?;
    let v = match grid {
        None if p.dims() == 1 => mahler_1d(&p)?,
        None => mahler_nd(&p, 2048)?,
        Some(g) => mahler_nd(&p, g)?,
    };
    Ok(sig12(v))
}

/// Figure description: operator and default number of terms.
pub fn figure_setup(which: u8) -> Result<(OperatorChoice, usize)> {
    match which {
        1 => Ok((OperatorChoice::Fig8Wirtinger, 6)),
        2 => Ok((OperatorChoice::Fig8Twist, 7)),
        _ => bail!("no figure {which}"),
    }
}

pub fn figure_rows(
    which: u8,
    t_grid: &TGrid,
    n: Option<usize>,
    lambda: &LambdaChoice,
    rep: Option<&Path>,
    budget: Option<usize>,
) -> Result<Vec<Row>> {
    let (operator, default_n) = figure_setup(which)?;
    let sweep = SweepArgs {
        operator,
        d: 3,
        t_grid: t_grid.clone(),
        n: n.unwrap_or(default_n),
        lambda: lambda.clone(),
        rep: rep.map(Path::to_path_buf),
        budget,
    };
    cmd_approx(&sweep)
}

/// Known values of the figure-eight L²-Alexander invariant: 1 on (0, 0.38),
/// 1.113 at t = 1, t² on (2.618, 4).
pub fn exact_overlay(t: f64) -> Option<f64> {
    if t > 0.0 && t < 0.38 {
        Some(1.0)
    } else if t == 1.0 {
        Some(1.113)
    } else if t > 2.618 && t < 4.0 {
        Some(t * t)
    } else {
        None
    }
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    match cli.command {
        Command::Exact { family, d } => writeln!(out, "{}", cmd_exact(family, d)?)?,
        Command::Series { family, d, k, verify, budget } => {
            write!(out, "{}", cmd_series(family, d, k, verify, budget)?)?
        }
        Command::Approx { sweep, out: path } => {
            let rows = cmd_approx(&sweep)?;
            match path {
                Some(p) => {
                    let mut f = std::io::BufWriter::new(std::fs::File::create(&p)?);
                    write_csv(&mut f, &rows)?;
                }
                None => write_csv(out, &rows)?,
            }
        }
        Command::Mahler { poly, grid } => writeln!(out, "{}", cmd_mahler(&poly, grid)?)?,
        Command::Figures { which, t_grid, n, lambda, rep, out: path, format, budget } => {
            let rows = figure_rows(which, &t_grid, n, &lambda, rep.as_deref(), budget)?;
            let (_, default_n) = figure_setup(which)?;
            let n = n.unwrap_or(default_n);
            match path {
                None => {
                    if format == OutputFormat::Svg {
                        bail!("--format svg needs --out");
                    }
                    write_csv(out, &rows)?;
                }
                Some(base) => {
                    if format != OutputFormat::Svg {
                        let p = base.with_extension("csv");
                        let mut f = std::io::BufWriter::new(std::fs::File::create(&p)?);
                        write_csv(&mut f, &rows)?;
                        writeln!(out, "wrote {}", p.display())?;
                    }
                    if format != OutputFormat::Csv {
                        let p = base.with_extension("svg");
                        plot::render_svg(&p, which, &rows, n, &t_grid)?;
                        writeln!(out, "wrote {}", p.display())?;
                    }
                }
            }
        }
        Command::Report => writeln!(out, "{}", catalog::lehmer_report())?,
    }
    Ok(())
}

/// Process exit code for an error: 2 for validation failures, 3 for
/// exhausted budgets, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            if e.is_validation() {
                return 2;
            }
            if matches!(e, CoreError::BudgetExceeded { .. }) {
                return 3;
            }
        }
    }
    1
}

/// Parse a row back from CSV, for tests and downstream tools.
pub fn parse_csv(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        bail!("missing header");
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                bail!("bad row `{l}`");
            }
            Ok(Row {
                t: if f[0].is_empty() { None } else { Some(f[0].parse()?) },
                n: f[1].parse()?,
                lambda: f[2].parse()?,
                bound: f[3].parse()?,
                certified: f[4].parse()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: TGrid = DEFAULT_GRID.parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 200);
        assert_eq!(p[0], 0.001);
        assert_eq!(p[199], 4.0);
        assert_eq!("2:2:1".parse::<TGrid>().unwrap().points(), vec![2.0]);
        assert!("0:1:3".parse::<TGrid>().is_err());
        assert!("2:1:3".parse::<TGrid>().is_err());
        assert!("1:2:0".parse::<TGrid>().is_err());
        assert!("1:2".parse::<TGrid>().is_err());
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!("safe".parse::<LambdaChoice>().unwrap(), LambdaChoice::Safe);
        assert_eq!(
            "1/5".parse::<LambdaChoice>().unwrap(),
            LambdaChoice::Value(BigRational::new(1.into(), 5.into()))
        );
        assert_eq!(
            "0.25".parse::<LambdaChoice>().unwrap(),
            LambdaChoice::Value(BigRational::new(1.into(), 4.into()))
        );
        assert!("-1/5".parse::<LambdaChoice>().is_err());
        assert!("fast".parse::<LambdaChoice>().is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(2.0 / 3f64.sqrt()), "1.15470053838");
        assert_eq!(sig12(2.0), "2.00000000000");
        assert_eq!(sig12(16.0), "16.0000000000");
        assert_eq!(sig12(0.2), "0.200000000000");
        assert_eq!(sig12(3e15), "3.00000000000e15");
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![
            Row { t: Some(0.5), n: 1, lambda: 0.2, bound: 1.5, certified: false },
            Row { t: None, n: 2, lambda: 1.0 / 9.0, bound: 1.2, certified: true },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let back = parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].t, Some(0.5));
        assert_eq!(back[1].t, None);
        assert!((back[1].lambda - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn overlay_pieces() {
        assert_eq!(exact_overlay(0.1), Some(1.0));
        assert_eq!(exact_overlay(1.0), Some(1.113));
        assert_eq!(exact_overlay(3.0), Some(9.0));
        assert_eq!(exact_overlay(2.0), None);
    }

    #[test]
    fn exit_codes() {
        let e: anyhow::Error = CoreError::RepFormat("x".into()).into();
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = CoreError::BudgetExceeded { terms: 2, budget: 1 }.into();
        assert_eq!(exit_code(&e.context("sweep")), 3);
        assert_eq!(exit_code(&anyhow!("other")), 1);
    }
}
