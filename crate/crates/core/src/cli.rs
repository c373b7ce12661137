//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the process exit code: 0 on success, 2 on bad input, 3 when the
//! answer is negative (not calibrated, vacuous bound, failed verification).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::calibration::{self, check_calibrated_analytic, check_calibrated_numeric, mu_curve};
use crate::envelope::{self, biconjugate, nu_curve};
use crate::error::{Error, Result};
use crate::loss::{constrained_optimal_risk, h_alpha, optimal_conditional_risk, CostParam, Loss};
use crate::suites::{run_suite, Suite};
use crate::uneven::{alpha_of_gamma, make_uneven_loss, Family, UnevenMarginSpec, ALPHA_OF_GAMMA_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "surrogate-regret",
    version,
    about = "Calibration diagnostics and regret bounds for cost-sensitive surrogate losses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a loss is calibrated for a cost and print the report as JSON
    Check(CheckArgs),
    /// Write H, nu, mu, psi, C_star and C_minus samples as CSV
    Curve(CurveArgs),
    /// Tabulate the calibrating cost alpha(gamma) of the sigmoid family as CSV
    AlphaGamma(AlphaGammaArgs),
    /// Run invariant suites and print pass/fail counts as JSON
    Verify(VerifyArgs),
    /// Bound the cost-sensitive regret from a surrogate regret
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LossArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    /// Scale of the negative partial; defaults to 1/gamma
    #[arg(long)]
    pub beta: Option<f64>,
    /// Margin stretch of the negative partial
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Cost of a false positive; false negatives cost 1 - alpha
    #[arg(long)]
    pub alpha: f64,
    /// Weight the partials by (1 - alpha, alpha)
    #[arg(long)]
    pub weighted: bool,
}

impl LossArgs {
    pub fn spec(&self) -> UnevenMarginSpec {
        let spec = UnevenMarginSpec::new(self.family, self.beta.unwrap_or(1.0 / self.gamma), self.gamma);
        if self.weighted {
            spec.weighted(self.alpha)
        } else {
            spec
        }
    }

    pub fn build(&self) -> Result<(Loss, CostParam)> {
        let cost = CostParam::new(self.alpha)?;
        Ok((make_uneven_loss(&self.spec())?, cost))
    }
}

fn at_least<const MIN: usize>(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= MIN => Ok(n),
        _ => Err(format!("expected an integer >= {MIN}")),
    }
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse::<Family>().map_err(|_| {
        let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMethod {
    /// Analytic when the partials are convex with known derivatives, numeric otherwise
    Auto,
    Analytic,
    Numeric,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub loss: LossArgs,
    #[arg(long, value_enum, default_value_t = CheckMethod::Auto)]
    pub method: CheckMethod,
    #[arg(long, default_value_t = calibration::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = calibration::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    CMinus,
    CStar,
    H,
    Mu,
    Nu,
    Psi,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::CMinus,
        Quantity::CStar,
        Quantity::H,
        Quantity::Mu,
        Quantity::Nu,
        Quantity::Psi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::CMinus => "C_minus",
            Quantity::CStar => "C_star",
            Quantity::H => "H",
            Quantity::Mu => "mu",
            Quantity::Nu => "nu",
            Quantity::Psi => "psi",
        }
    }
}

fn parse_quantity(s: &str) -> std::result::Result<Quantity, String> {
    Quantity::ALL
        .into_iter()
        .find(|q| q.name() == s)
        .ok_or_else(|| "expected one of H, nu, mu, psi, C_star, C_minus".to_string())
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub loss: LossArgs,
    /// Comma-separated subset of H, nu, mu, psi, C_star, C_minus
    #[arg(long, value_delimiter = ',', value_parser = parse_quantity,
          default_value = "H,nu,mu,psi,C_star,C_minus")]
    pub quantities: Vec<Quantity>,
    /// Uniform samples per curve
    #[arg(long, default_value_t = envelope::DEFAULT_GRID,
          value_parser = at_least::<3>)]
    pub grid: usize,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlphaGammaArgs {
    #[arg(long)]
    pub gamma_min: f64,
    #[arg(long)]
    pub gamma_max: f64,
    #[arg(long, value_parser = at_least::<1>)]
    pub points: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    ClosedForms,
    Identities,
    Bounds,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::ClosedForms => Suite::ClosedForms,
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, value_parser = parse_suite)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_suite(s: &str) -> std::result::Result<SuiteArg, String> {
    match s {
        "closed_forms" => Ok(SuiteArg::ClosedForms),
        "identities" => Ok(SuiteArg::Identities),
        "bounds" => Ok(SuiteArg::Bounds),
        "all" => Ok(SuiteArg::All),
        _ => Err("expected one of closed_forms, identities, bounds, all".into()),
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub loss: LossArgs,
    #[arg(long)]
    pub surrogate_regret: f64,
    #[arg(long, default_value_t = envelope::DEFAULT_GRID,
          value_parser = at_least::<3>)]
    pub grid: usize,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Positive,
    Negative,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(Outcome::Positive) => EXIT_OK,
        Ok(Outcome::Negative) => EXIT_NEGATIVE,
        Err(Error::VacuousBound(msg)) => {
            let _ = writeln!(err, "error: vacuous bound: {msg}");
            EXIT_NEGATIVE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Invalid(format!("output: {e}"))
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(io_error),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Check(a) => cmd_check(a, out),
        Command::Curve(a) => cmd_curve(a, out).map(|_| Outcome::Positive),
        Command::AlphaGamma(a) => cmd_alpha_gamma(a, out).map(|_| Outcome::Positive),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bound(a) => cmd_bound(a, out).map(|_| Outcome::Positive),
    }
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<Outcome> {
    let (loss, cost) = a.loss.build()?;
    let report = match a.method {
        CheckMethod::Analytic => check_calibrated_analytic(&loss, cost)?,
        CheckMethod::Numeric => check_calibrated_numeric(&loss, cost, a.grid, a.tol)?,
        CheckMethod::Auto if calibration::analytic_applicable(&loss) => {
            check_calibrated_analytic(&loss, cost)?
        }
        CheckMethod::Auto => check_calibrated_numeric(&loss, cost, a.grid, a.tol)?,
    };
    emit(&json(&report), None, out)?;
    Ok(if report.is_calibrated() {
        Outcome::Positive
    } else {
        Outcome::Negative
    })
}

/// `(quantity, x, value, side)` rows for a curve request, sorted for output.
pub fn curve_rows(
    loss: &Loss,
    cost: CostParam,
    quantities: &[Quantity],
    grid: usize,
) -> Result<Vec<(Quantity, f64, f64, &'static str)>> {
    let mut wanted: Vec<Quantity> = quantities.to_vec();
    wanted.sort();
    wanted.dedup();
    if wanted.is_empty() {
        return Err(Error::Invalid("quantities: empty".into()));
    }

    let mut etas: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    if !etas.contains(&cost.alpha()) {
        etas.push(cost.alpha());
        etas.sort_by(f64::total_cmp);
    }
    let nu = if wanted.iter().any(|q| matches!(q, Quantity::Nu | Quantity::Mu | Quantity::Psi)) {
        Some(nu_curve(loss, cost, grid)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for q in wanted {
        match q {
            Quantity::H | Quantity::CStar | Quantity::CMinus => {
                for &eta in &etas {
                    let v = match q {
                        Quantity::H => h_alpha(loss, cost, eta)?,
                        Quantity::CStar => optimal_conditional_risk(loss, eta)?,
                        _ => constrained_optimal_risk(loss, cost, eta)?,
                    };
                    rows.push((q, eta, v, "both"));
                }
            }
            Quantity::Nu | Quantity::Mu => {
                let nu = nu.as_ref().expect("sampled above");
                let curve = if q == Quantity::Mu { mu_curve(nu)? } else { nu.clone() };
                rows.extend(curve.knots().iter().map(|k| (q, k.eps, k.value, k.side.name())));
            }
            Quantity::Psi => {
                let env = biconjugate(nu.as_ref().expect("sampled above"))?;
                rows.extend(env.hull_knots().iter().map(|&(e, v)| (q, e, v, "both")));
            }
        }
    }
    Ok(rows)
}

fn cmd_curve(a: &CurveArgs, out: &mut dyn Write) -> Result<()> {
    let (loss, cost) = a.loss.build()?;
    let rows = curve_rows(&loss, cost, &a.quantities, a.grid)?;
    let mut text = String::from("x,quantity,value,side\n");
    for (q, x, v, side) in rows {
        let _ = writeln!(text, "{x},{},{v},{side}", q.name());
    }
    emit(&text, a.output.as_ref(), out)
}

/// Log-spaced `γ` grid with exact endpoints, plus `γ = 1` when in range.
pub fn gamma_grid(gamma_min: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(gamma_min > 0.0 && gamma_min.is_finite()) {
        return Err(Error::Domain {
            what: "gamma_min",
            value: gamma_min,
            expected: "(0, inf)",
        });
    }
    if !(gamma_max >= gamma_min && gamma_max.is_finite()) {
        return Err(Error::Domain {
            what: "gamma_max",
            value: gamma_max,
            expected: "[gamma_min, inf)",
        });
    }
    if points == 0 {
        return Err(Error::Domain {
            what: "points",
            value: 0.0,
            expected: "[1, inf)",
        });
    }
    let (lo, hi) = (gamma_min.ln(), gamma_max.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|k| match k {
            0 => gamma_min,
            k if k == points - 1 => gamma_max,
            _ if gamma_min == gamma_max => gamma_min,
            k => (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp(),
        })
        .collect();
    if (gamma_min..=gamma_max).contains(&1.0) {
        match grid.iter_mut().find(|g| (**g - 1.0).abs() <= 1e-12) {
            Some(g) => *g = 1.0,
            None => grid.push(1.0),
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

fn cmd_alpha_gamma(a: &AlphaGammaArgs, out: &mut dyn Write) -> Result<()> {
    let mut text = String::from("gamma,ln_gamma,alpha\n");
    for g in gamma_grid(a.gamma_min, a.gamma_max, a.points)? {
        let alpha = alpha_of_gamma(g, ALPHA_OF_GAMMA_TOL)?;
        let _ = writeln!(text, "{g},{},{alpha}", g.ln());
    }
    emit(&text, a.output.as_ref(), out)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<Outcome> {
    let summary = run_suite(a.suite.into(), a.seed)?;
    emit(&json(&summary), None, out)?;
    Ok(if summary.all_passed {
        Outcome::Positive
    } else {
        Outcome::Negative
    })
}

fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    let (loss, cost) = a.loss.build()?;
    let bound = envelope::regret_bound(&loss, cost, a.surrogate_regret, a.grid)?;
    emit(&json(&serde_json::json!({ "bound": bound })), None, out)
}
