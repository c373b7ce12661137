//! Calibration for a cost `α`: the derivative test for convex losses, a grid
//! test for everything else, and the calibration functions `δ(ε, η)`, `δ(ε)`
//! and `μ_{L,α}`.

use serde::{Deserialize, Serialize};

use crate::envelope::{self, Knot, SampledCurve};
use crate::error::{check_unit, Error, Result};
use crate::loss::{h_alpha, CostParam, Loss};

pub const DEFAULT_GRID: usize = 1001;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative tolerance of the first-order condition `αL₁'(0) + (1−α)L₋₁'(0) = 0`.
pub const DERIVATIVE_REL_TOL: f64 = 1e-12;

const REFINE_FACTOR: usize = 10;
const REFINE_CANDIDATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Calibrated,
    NotCalibrated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticConvex,
    NumericGrid,
}

/// The quantities checked by the derivative test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub pos: f64,
    pub neg: f64,
    pub weighted_sum: f64,
    pub violated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub verdict: Verdict,
    pub method: Method,
    pub alpha: f64,
    /// `(η, H_{L,α}(η))` pairs. For a negative verdict these are points off
    /// `α` where `H` vanishes; for a positive one, the smallest `H` seen.
    pub witnesses: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub grid_size: Option<usize>,
    pub derivatives: Option<DerivativeCheck>,
}

impl CalibrationReport {
    pub fn is_calibrated(&self) -> bool {
        self.verdict == Verdict::Calibrated
    }
}

/// `δ` values may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedValue {
    Finite(f64),
    Infinite,
}

impl ExtendedValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedValue::Finite(v) => v,
            ExtendedValue::Infinite => f64::INFINITY,
        }
    }
}

fn derivative_conditions(d1: f64, dm1: f64, alpha: f64) -> DerivativeCheck {
    let sum = alpha * d1 + (1.0 - alpha) * dm1;
    let scale = d1.abs().max(dm1.abs());
    let mut violated = Vec::new();
    if d1.is_nan() || d1 >= 0.0 {
        violated.push(format!("L1'(0) = {d1} is not negative"));
    }
    if dm1.is_nan() || dm1 <= 0.0 {
        violated.push(format!("L-1'(0) = {dm1} is not positive"));
    }
    if sum.abs() > DERIVATIVE_REL_TOL * scale {
        violated.push(format!("alpha L1'(0) + (1 - alpha) L-1'(0) = {sum} is not zero"));
    }
    DerivativeCheck {
        pos: d1,
        neg: dm1,
        weighted_sum: sum,
        violated,
    }
}

/// Outcome of the derivative test, or `None` if either derivative is missing.
/// Only meaningful for convex partials.
pub(crate) fn derivative_test(loss: &Loss, cost: CostParam) -> Option<bool> {
    let d1 = loss.pos().deriv_at_zero()?;
    let dm1 = loss.neg().deriv_at_zero()?;
    Some(derivative_conditions(d1, dm1, cost.alpha()).violated.is_empty())
}

/// Whether [`check_calibrated_analytic`] applies to `loss`.
pub fn analytic_applicable(loss: &Loss) -> bool {
    loss.both_convex() && loss.pos().deriv_at_zero().is_some() && loss.neg().deriv_at_zero().is_some()
}

/// Derivative test at zero for losses with convex partials.
///
/// A negative verdict comes with a posterior where `H` vanishes: an endpoint
/// when a derivative has the wrong sign, otherwise the midpoint between `α`
/// and the cost the loss is actually calibrated for.
pub fn check_calibrated_analytic(loss: &Loss, cost: CostParam) -> Result<CalibrationReport> {
    if !loss.both_convex() {
        return Err(Error::Precondition(
            "analytic check needs convex partials; use the numeric check".into(),
        ));
    }
    let (Some(d1), Some(dm1)) = (loss.pos().deriv_at_zero(), loss.neg().deriv_at_zero()) else {
        return Err(Error::Precondition(
            "analytic check needs derivatives at zero; use the numeric check".into(),
        ));
    };
    let alpha = cost.alpha();
    let check = derivative_conditions(d1, dm1, alpha);
    let calibrated = check.violated.is_empty();
    let witnesses = if calibrated {
        Vec::new()
    } else {
        let eta = if d1 >= 0.0 {
            1.0
        } else if dm1 <= 0.0 {
            0.0
        } else {
            0.5 * (alpha + dm1 / (dm1 - d1))
        };
        vec![(eta, h_alpha(loss, cost, eta)?)]
    };
    Ok(CalibrationReport {
        verdict: if calibrated {
            Verdict::Calibrated
        } else {
            Verdict::NotCalibrated
        },
        method: Method::AnalyticConvex,
        alpha,
        witnesses,
        tolerance: DERIVATIVE_REL_TOL,
        grid_size: None,
        derivatives: Some(check),
    })
}

/// Grid test: `H_{L,α}` must exceed `tolerance` on `{i/(n−1)}` away from `α`.
///
/// Points within `1/(2n)` of `α` are skipped. The cells around the lowest
/// local minima are then resampled ten times finer, which catches zero sets
/// narrower than the grid spacing.
pub fn check_calibrated_numeric(
    loss: &Loss,
    cost: CostParam,
    grid_size: usize,
    tolerance: f64,
) -> Result<CalibrationReport> {
    if grid_size < 3 {
        return Err(Error::Domain {
            what: "grid_size",
            value: grid_size as f64,
            expected: "[3, inf)",
        });
    }
    let alpha = cost.alpha();
    let radius = 0.5 / grid_size as f64;
    let step = 1.0 / (grid_size - 1) as f64;
    let keep = |eta: f64| (eta - alpha).abs() >= radius;

    let mut samples = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let eta = i as f64 * step;
        if keep(eta) {
            samples.push((eta, h_alpha(loss, cost, eta)?));
        }
    }

    let mut minima: Vec<usize> = (0..samples.len())
        .filter(|&i| {
            let h = samples[i].1;
            (i == 0 || h <= samples[i - 1].1) && (i + 1 == samples.len() || h <= samples[i + 1].1)
        })
        .collect();
    minima.sort_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1));
    minima.truncate(REFINE_CANDIDATES);

    // cells between a minimum and its sampled neighbours, which span the
    // excluded gap when the minimum borders it
    let fine = step / REFINE_FACTOR as f64;
    let mut extra = Vec::new();
    for &i in &minima {
        let lo = samples[i.saturating_sub(1)].0;
        let hi = samples[(i + 1).min(samples.len() - 1)].0;
        let cells = ((hi - lo) / fine).round() as usize;
        for k in 1..cells {
            let eta = lo + k as f64 * (hi - lo) / cells as f64;
            if eta != samples[i].0 && keep(eta) {
                extra.push((eta, h_alpha(loss, cost, eta)?));
            }
        }
    }
    samples.extend(extra);

    let witnesses: Vec<(f64, f64)> = samples.iter().copied().filter(|s| s.1 <= tolerance).collect();
    let (verdict, witnesses) = if witnesses.is_empty() {
        let lowest = samples
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .into_iter()
            .collect();
        (Verdict::Calibrated, lowest)
    } else {
        (Verdict::NotCalibrated, witnesses)
    };
    Ok(CalibrationReport {
        verdict,
        method: Method::NumericGrid,
        alpha,
        witnesses,
        tolerance,
        grid_size: Some(grid_size),
        derivatives: None,
    })
}

/// The analytic check when it applies, the default grid check otherwise.
pub fn check_calibrated(loss: &Loss, cost: CostParam) -> Result<CalibrationReport> {
    if analytic_applicable(loss) {
        check_calibrated_analytic(loss, cost)
    } else {
        check_calibrated_numeric(loss, cost, DEFAULT_GRID, DEFAULT_TOL)
    }
}

fn require_continuity(loss: &Loss) -> Result<()> {
    if loss.pos().is_continuous_at_zero() && loss.neg().is_continuous_at_zero() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "calibration functions need partials continuous at zero".into(),
        ))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "eps",
            value: eps,
            expected: "(0, inf)",
        })
    }
}

/// `δ(ε, η)`: `∞` when `ε > |η − α|`, otherwise `H_{L,α}(η)`.
pub fn calibration_fn(loss: &Loss, cost: CostParam, eps: f64, eta: f64) -> Result<ExtendedValue> {
    require_continuity(loss)?;
    check_eps(eps)?;
    check_unit("eta", eta)?;
    if eps > (eta - cost.alpha()).abs() {
        Ok(ExtendedValue::Infinite)
    } else {
        h_alpha(loss, cost, eta).map(ExtendedValue::Finite)
    }
}

/// `δ(ε)` with the default ν grid.
pub fn uniform_calibration_fn(loss: &Loss, cost: CostParam, eps: f64) -> Result<ExtendedValue> {
    uniform_calibration_fn_with_grid(loss, cost, eps, envelope::DEFAULT_GRID)
}

/// `δ(ε)`: `∞` above `B_α`, otherwise `μ_{L,α}(ε) = inf_{ε ≤ ε' ≤ B_α} ν(ε')`,
/// taken over `ν(ε)` itself and the sampled knots beyond `ε`.
pub fn uniform_calibration_fn_with_grid(
    loss: &Loss,
    cost: CostParam,
    eps: f64,
    grid_size: usize,
) -> Result<ExtendedValue> {
    require_continuity(loss)?;
    check_eps(eps)?;
    if eps > cost.b_max() {
        return Ok(ExtendedValue::Infinite);
    }
    let curve = envelope::nu_curve(loss, cost, grid_size)?;
    let tail = curve
        .knots()
        .iter()
        .filter(|k| k.eps >= eps)
        .map(|k| k.value)
        .fold(f64::INFINITY, f64::min);
    let at = envelope::nu_at(loss, cost, eps)?;
    Ok(ExtendedValue::Finite(at.min(tail)))
}

/// Suffix minimum of `ν`: `μ(ε_i) = min_{j ≥ i} ν(ε_j)`.
pub fn mu_curve(nu: &SampledCurve) -> Result<SampledCurve> {
    let knots = nu.knots();
    if knots.is_empty() {
        return Err(Error::Domain {
            what: "knot count",
            value: 0.0,
            expected: "[1, inf)",
        });
    }
    let mut out: Vec<Knot> = knots.to_vec();
    let mut running = f64::INFINITY;
    for k in out.iter_mut().rev() {
        running = running.min(k.value);
        k.value = running;
    }
    SampledCurve::new(nu.domain_max(), out)
}
