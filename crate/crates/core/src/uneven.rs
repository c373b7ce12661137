//! Uneven margin losses `1{y=1} φ(t) + 1{y=-1} β φ(−γt)` for the hinge,
//! squared, exponential and sigmoid margin functions.
//!
//! Two independent routes to the optimal risks live here:
//!
//! * [`tagged_infimum`] minimizes `a φ(t) + c φ(−γt)` over a score region for
//!   any positive weights, any `β`, and (for the sigmoid) `γ = 2`. Losses made
//!   by [`make_uneven_loss`] dispatch to it automatically.
//! * [`closed_forms`] evaluates the textbook formulas for `t*`, `C*` and `H`
//!   in the calibrated configuration `β = 1/γ` only.
//!
//! The numeric search in [`crate::oracle`] is the third, assumption-free route.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::loss::{ExtendedScore, Loss, PartialLoss, ScoreRegion};

/// Residual bound for the quartic satisfied by `exp(t₋(η))`.
pub const QUARTIC_TOL: f64 = 1e-9;

/// Default bracket width for [`alpha_of_gamma`].
pub const ALPHA_OF_GAMMA_TOL: f64 = 1e-12;

/// `(3 + 4√2) / 23`, the cost at which the `γ = 2` sigmoid loss is calibrated.
pub fn sigmoid_alpha_two() -> f64 {
    (3.0 + 4.0 * std::f64::consts::SQRT_2) / 23.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hinge,
    Squared,
    Exponential,
    Sigmoid,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Hinge,
        Family::Squared,
        Family::Exponential,
        Family::Sigmoid,
    ];

    pub const CONVEX: [Family; 3] = [Family::Hinge, Family::Squared, Family::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hinge => "hinge",
            Family::Squared => "squared",
            Family::Exponential => "exponential",
            Family::Sigmoid => "sigmoid",
        }
    }

    /// The margin function `φ`.
    pub fn phi(self, t: f64) -> f64 {
        match self {
            Family::Hinge => (1.0 - t).max(0.0),
            Family::Squared => (1.0 - t) * (1.0 - t),
            Family::Exponential => (-t).exp(),
            Family::Sigmoid => {
                // 1 / (1 + e^t) without overflow on either side
                if t > 0.0 {
                    let e = (-t).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + t.exp())
                }
            }
        }
    }

    pub fn phi_deriv_at_zero(self) -> f64 {
        match self {
            Family::Hinge | Family::Exponential => -1.0,
            Family::Squared => -2.0,
            Family::Sigmoid => -0.25,
        }
    }

    pub fn is_convex(self) -> bool {
        !matches!(self, Family::Sigmoid)
    }

    /// `(φ(−∞), φ(+∞))`.
    fn phi_limits(self) -> (f64, f64) {
        match self {
            Family::Hinge | Family::Exponential => (f64::INFINITY, 0.0),
            Family::Squared => (f64::INFINITY, f64::INFINITY),
            Family::Sigmoid => (1.0, 0.0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("family '{s}'")))
    }
}

/// Parameters of an uneven margin loss, optionally reweighted by `(1 − α, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnevenMarginSpec {
    pub family: Family,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_weight: Option<f64>,
}

impl UnevenMarginSpec {
    pub fn new(family: Family, beta: f64, gamma: f64) -> Self {
        UnevenMarginSpec {
            family,
            beta,
            gamma,
            alpha_weight: None,
        }
    }

    /// `β = 1/γ`; for the sigmoid this is only calibrated at `γ = 2`.
    pub fn calibrated(family: Family, gamma: f64) -> Self {
        Self::new(family, 1.0 / gamma, gamma)
    }

    pub fn weighted(mut self, alpha: f64) -> Self {
        self.alpha_weight = Some(alpha);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain {
                what: "beta",
                value: self.beta,
                expected: "(0, inf)",
            });
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain {
                what: "gamma",
                value: self.gamma,
                expected: "(0, inf)",
            });
        }
        if let Some(a) = self.alpha_weight {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Domain {
                    what: "alpha_weight",
                    value: a,
                    expected: "(0, 1)",
                });
            }
        }
        Ok(())
    }
}

/// Family parameters carried by a loss so its risks can be minimized exactly.
/// The weights are the outer multipliers on the two partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct UnevenTag {
    pub family: Family,
    pub beta: f64,
    pub gamma: f64,
    pub pos_weight: f64,
    pub neg_weight: f64,
}

impl UnevenTag {
    pub fn reweighted(self, pos: f64, neg: f64) -> Self {
        UnevenTag {
            pos_weight: self.pos_weight * pos,
            neg_weight: self.neg_weight * neg,
            ..self
        }
    }
}

/// Builds `L₁(t) = w₁ φ(t)` and `L₋₁(t) = w₋₁ β φ(−γt)`, with `(w₁, w₋₁) =
/// (1 − α, α)` when `alpha_weight` is set and `(1, 1)` otherwise.
pub fn make_uneven_loss(spec: &UnevenMarginSpec) -> Result<Loss> {
    spec.validate()?;
    let UnevenMarginSpec {
        family,
        beta,
        gamma,
        alpha_weight,
    } = *spec;
    let (wp, wn) = match alpha_weight {
        Some(a) => (1.0 - a, a),
        None => (1.0, 1.0),
    };
    let (lo, hi) = family.phi_limits();
    let d = family.phi_deriv_at_zero();
    let convex = family.is_convex();

    let pos = PartialLoss::new(move |t| wp * family.phi(t))
        .convex(convex)
        .with_derivative_at_zero(wp * d)
        .with_limits(wp * lo, wp * hi);
    let nb = wn * beta;
    // t → ∓∞ sends −γt → ±∞
    let neg = PartialLoss::new(move |t| nb * family.phi(-gamma * t))
        .convex(convex)
        .with_derivative_at_zero(-nb * gamma * d)
        .with_limits(nb * hi, nb * lo);
    let tag = UnevenTag {
        family,
        beta,
        gamma,
        pos_weight: wp,
        neg_weight: wn,
    };
    Ok(Loss::tagged(pos, neg, tag))
}

/// Exact infimum of `C_L(η, ·)` over `region` for a tagged loss, or `None`
/// when the family has no closed form at these parameters.
pub(crate) fn tagged_infimum(
    tag: &UnevenTag,
    eta: f64,
    region: ScoreRegion,
) -> Option<(ExtendedScore, f64)> {
    let a = tag.pos_weight * eta;
    let c = tag.neg_weight * tag.beta * (1.0 - eta);
    let g = tag.gamma;
    match tag.family {
        Family::Hinge => Some(hinge_min(a, c, g, region)),
        Family::Squared => Some(squared_min(a, c, g, region)),
        Family::Exponential => Some(exponential_min(a, c, g, region)),
        Family::Sigmoid if g == 2.0 => Some(sigmoid_min(a, c, region)),
        Family::Sigmoid => None,
    }
}

fn hinge_min(a: f64, c: f64, g: f64, region: ScoreRegion) -> (ExtendedScore, f64) {
    let risk = |t: f64| a * (1.0 - t).max(0.0) + c * (1.0 + g * t).max(0.0);
    // the infimum of a convex piecewise-linear function on a half-line sits at
    // a kink or at the boundary; ascending order resolves ties to the left
    let mut best: Option<(f64, f64)> = None;
    for t in [-1.0 / g, 0.0, 1.0] {
        if !region.contains(ExtendedScore::Finite(t)) {
            continue;
        }
        let v = risk(t);
        if best.map_or(true, |(_, b)| v < b) {
            best = Some((t, v));
        }
    }
    let (t, v) = best.expect("every region contains 0");
    (ExtendedScore::Finite(t), v)
}

fn squared_min(a: f64, c: f64, g: f64, region: ScoreRegion) -> (ExtendedScore, f64) {
    let denom = a + c * g * g;
    if denom == 0.0 {
        return (ExtendedScore::Finite(0.0), 0.0);
    }
    let t = (a - c * g) / denom;
    if region.contains(ExtendedScore::Finite(t)) {
        let v = a * c * (1.0 + g) * (1.0 + g) / denom;
        (ExtendedScore::Finite(t), v)
    } else {
        (ExtendedScore::Finite(0.0), a + c)
    }
}

fn exponential_min(a: f64, c: f64, g: f64, region: ScoreRegion) -> (ExtendedScore, f64) {
    let at_zero = (ExtendedScore::Finite(0.0), a + c);
    if a == 0.0 && c == 0.0 {
        return (ExtendedScore::Finite(0.0), 0.0);
    }
    if a == 0.0 {
        return if region.contains(ExtendedScore::NegInf) {
            (ExtendedScore::NegInf, 0.0)
        } else {
            at_zero
        };
    }
    if c == 0.0 {
        return if region.contains(ExtendedScore::PosInf) {
            (ExtendedScore::PosInf, 0.0)
        } else {
            at_zero
        };
    }
    let t = (a.ln() - (c * g).ln()) / (1.0 + g);
    if region.contains(ExtendedScore::Finite(t)) {
        (ExtendedScore::Finite(t), a * (-t).exp() + c * (g * t).exp())
    } else {
        at_zero
    }
}

/// `η φ(t) + (1 − η)/2 · φ(−2t)`, the `β = 1/2, γ = 2` sigmoid risk.
fn sigmoid_risk(eta: f64, t: f64) -> f64 {
    eta * Family::Sigmoid.phi(t) + 0.5 * (1.0 - eta) * Family::Sigmoid.phi(-2.0 * t)
}

fn sigmoid_min(a: f64, c: f64, region: ScoreRegion) -> (ExtendedScore, f64) {
    // a φ(t) + c φ(−2t) = s · [η' φ(t) + (1 − η')/2 · φ(−2t)]
    let s = a + 2.0 * c;
    if s == 0.0 {
        return (ExtendedScore::Finite(0.0), 0.0);
    }
    let e = a / s;
    let mut candidates = vec![(ExtendedScore::PosInf, 0.5 * (1.0 - e))];
    if e > 0.0 && e < 0.5 {
        let t = t_minus_unchecked(e);
        candidates.push((ExtendedScore::Finite(t), sigmoid_risk(e, t)));
    }
    candidates.push((ExtendedScore::Finite(0.0), 0.25 * (1.0 + e)));
    candidates.push((ExtendedScore::NegInf, e));

    let mut best: Option<(ExtendedScore, f64)> = None;
    for (t, v) in candidates {
        if region.contains(t) && best.map_or(true, |(_, b)| v < b) {
            best = Some((t, v));
        }
    }
    let (t, v) = best.expect("every region contains 0");
    (t, s * v)
}

/// `t*`, `C*` and `H_L` from the published formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub t_star: Option<ExtendedScore>,
    pub c_star: f64,
    pub h_cc: f64,
}

/// Closed forms for the calibrated configurations: `β = 1/γ` for the convex
/// families, and `β = 1/2, γ = 2` for the sigmoid. Weighted specs are rejected.
pub fn closed_forms(spec: &UnevenMarginSpec, eta: f64) -> Result<ClosedForms> {
    spec.validate()?;
    check_unit("eta", eta)?;
    if spec.alpha_weight.is_some() {
        return Err(Error::Unsupported(
            "closed forms are for the unweighted loss".into(),
        ));
    }
    let g = spec.gamma;
    if spec.family == Family::Sigmoid {
        if g != 2.0 || spec.beta != 0.5 {
            return Err(Error::Unsupported(format!(
                "sigmoid closed forms need beta = 1/2, gamma = 2 (got beta = {}, gamma = {g})",
                spec.beta
            )));
        }
        return Ok(sigmoid_closed_forms(eta));
    }
    if (spec.beta * g - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "{} closed forms need beta = 1/gamma (got beta = {}, gamma = {g})",
            spec.family, spec.beta
        )));
    }

    // C⁻ at cost 1/2 for a calibrated convex loss is C(η, 0)
    let at_zero = eta + (1.0 - eta) / g;
    let (t_star, c_star) = match spec.family {
        Family::Hinge => {
            let c = (1.0 + g) / g * eta.min(1.0 - eta);
            let t = if eta <= 0.5 { -1.0 / g } else { 1.0 };
            (ExtendedScore::Finite(t), c)
        }
        Family::Squared => {
            let d = eta + g * (1.0 - eta);
            let t = (2.0 * eta - 1.0) / d;
            let c = (1.0 + g) * (1.0 + g) / g * eta * (1.0 - eta) / d;
            (ExtendedScore::Finite(t), c)
        }
        Family::Exponential => {
            if eta == 0.0 {
                (ExtendedScore::NegInf, 0.0)
            } else if eta == 1.0 {
                (ExtendedScore::PosInf, 0.0)
            } else {
                let r = eta / (1.0 - eta);
                let t = r.ln() / (1.0 + g);
                // C(η, t*) with the 1/γ scale kept on the negative term
                let c = eta * r.powf(-1.0 / (1.0 + g)) + (1.0 - eta) / g * r.powf(g / (1.0 + g));
                (ExtendedScore::Finite(t), c)
            }
        }
        Family::Sigmoid => unreachable!(),
    };
    Ok(ClosedForms {
        t_star: Some(t_star),
        c_star,
        h_cc: (at_zero - c_star).max(0.0),
    })
}

fn sigmoid_closed_forms(eta: f64) -> ClosedForms {
    let alpha = sigmoid_alpha_two();
    let (t_star, c_star) = if eta == 0.0 {
        (ExtendedScore::NegInf, 0.0)
    } else if eta < alpha {
        let t = t_minus_unchecked(eta);
        (ExtendedScore::Finite(t), sigmoid_risk(eta, t))
    } else {
        (ExtendedScore::PosInf, 0.5 * (1.0 - eta))
    };
    let constrained = if eta < 0.5 {
        (0.25 * (1.0 + eta)).min(0.5 * (1.0 - eta))
    } else if eta > 0.5 {
        0.25 * (1.0 + eta)
    } else {
        c_star
    };
    ClosedForms {
        t_star: Some(t_star),
        c_star,
        h_cc: (constrained - c_star).max(0.0),
    }
}

fn t_minus_unchecked(eta: f64) -> f64 {
    let q = 1.0 - eta;
    let w = (q + (q * q + 8.0 * eta * q).sqrt()) / (2.0 * eta);
    // (w − √(w² − 4)) / 2 rewritten to avoid cancellation as w → ∞
    let z = 2.0 / (w + (w * w - 4.0).max(0.0).sqrt());
    z.ln()
}

/// `ηz⁴ − (1−η)z³ + 2(2η−1)z² − (1−η)z + η`; vanishes at stationary points
/// `z = e^t` of the `γ = 2` sigmoid risk.
pub fn sigmoid_quartic(eta: f64, z: f64) -> f64 {
    let q = 1.0 - eta;
    (((eta * z - q) * z + 2.0 * (2.0 * eta - 1.0)) * z - q) * z + eta
}

/// The negative local minimizer `t₋(η)` of the `γ = 2` sigmoid risk, for `η ∈ (0, 1/2)`.
pub fn sigmoid_t_minus(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::Domain {
            what: "eta",
            value: eta,
            expected: "(0, 1/2)",
        });
    }
    Ok(t_minus_unchecked(eta))
}

/// `C⁻_{L,α}(η)` for the `γ = 2` sigmoid at `α = (3 + 4√2)/23`, branch by branch.
pub fn sigmoid_c_minus(eta: f64) -> Result<f64> {
    check_unit("eta", eta)?;
    let alpha = sigmoid_alpha_two();
    Ok(if eta <= 1.0 / 3.0 || eta >= 0.5 {
        0.25 * (1.0 + eta)
    } else if eta < alpha {
        0.5 * (1.0 - eta)
    } else {
        sigmoid_risk(eta, t_minus_unchecked(eta))
    })
}

/// The unique cost `α(γ)` at which the sigmoid loss with `β = 1/γ` is calibrated.
///
/// Bisection on `η ∈ (1/(1+γ), 1)` for `γ > 1`, reflection `α(γ) = 1 − α(1/γ)`
/// for `γ < 1`. The result is the midpoint of a bracket no wider than `tol`.
pub fn alpha_of_gamma(gamma: f64, tol: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            what: "gamma",
            value: gamma,
            expected: "(0, inf)",
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            expected: "(0, inf)",
        });
    }
    if gamma == 1.0 {
        return Ok(0.5);
    }
    if gamma < 1.0 {
        return alpha_of_gamma(1.0 / gamma, tol).map(|a| 1.0 - a);
    }
    let f = |eta: f64| {
        let z = (eta * gamma - 1.0 + eta) / (1.0 - eta) * gamma / (gamma - 1.0);
        eta * (gamma * gamma * z.powf(gamma - 1.0) + 1.0) - 1.0
    };
    let mut lo = 1.0 / (1.0 + gamma) + 1e-12;
    let mut hi = 1.0 - 1e-12;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
