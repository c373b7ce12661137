//! Losses as pairs of partial losses, and the conditional-risk quantities
//! built from them.
//!
//! A loss `L(y, t)` is stored as its two partial losses `L(1, ·)` and
//! `L(-1, ·)`. For a posterior `η = P(Y = 1 | x)` and a score `t` the
//! conditional risk is `η L₁(t) + (1 − η) L₋₁(t)`. Everything else here is an
//! infimum of that quantity over some set of scores:
//!
//! * [`optimal_conditional_risk`]: over all scores, including `±∞`.
//! * [`constrained_optimal_risk`]: over scores whose sign weakly disagrees
//!   with `η − α`, i.e. `t (η − α) ≤ 0`.
//! * [`h_alpha`]: the gap between the two, whose positivity away from
//!   `η = α` is what makes a loss calibrated for cost `α`.
//!
//! Losses built by [`crate::uneven`] carry a family tag and are evaluated in
//! closed form. Anything else goes through the grid-and-refine search in
//! [`crate::oracle`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calibration;
use crate::error::{check_unit, Error, Result};
use crate::oracle;
use crate::uneven::{self, UnevenTag};

/// Absolute tolerance for agreement between the convex shortcut for the
/// constrained risk and the constrained search.
pub const SHORTCUT_AGREEMENT_TOL: f64 = 1e-6;

/// A score on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedScore {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtendedScore {
    /// Sign with the convention `sign(0) = -1`, `sign(±∞) = ±1`.
    pub fn sign(self) -> i8 {
        match self {
            ExtendedScore::Finite(t) if t > 0.0 => 1,
            ExtendedScore::Finite(_) => -1,
            ExtendedScore::PosInf => 1,
            ExtendedScore::NegInf => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedScore::Finite(t) => t,
            ExtendedScore::PosInf => f64::INFINITY,
            ExtendedScore::NegInf => f64::NEG_INFINITY,
        }
    }

    /// Maps `±inf` floats onto the infinite variants.
    pub fn from_f64(t: f64) -> Self {
        if t == f64::INFINITY {
            ExtendedScore::PosInf
        } else if t == f64::NEG_INFINITY {
            ExtendedScore::NegInf
        } else {
            ExtendedScore::Finite(t)
        }
    }
}

impl fmt::Display for ExtendedScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedScore::Finite(t) => write!(f, "{t}"),
            ExtendedScore::PosInf => f.write_str("+inf"),
            ExtendedScore::NegInf => f.write_str("-inf"),
        }
    }
}

/// Which scores an infimum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreRegion {
    All,
    /// `t ≤ 0`, together with `-∞`.
    NonPositive,
    /// `t ≥ 0`, together with `+∞`.
    NonNegative,
}

impl ScoreRegion {
    pub fn contains(self, t: ExtendedScore) -> bool {
        match (self, t) {
            (ScoreRegion::All, _) => true,
            (ScoreRegion::NonPositive, ExtendedScore::Finite(t)) => t <= 0.0,
            (ScoreRegion::NonNegative, ExtendedScore::Finite(t)) => t >= 0.0,
            (ScoreRegion::NonPositive, s) => s == ExtendedScore::NegInf,
            (ScoreRegion::NonNegative, s) => s == ExtendedScore::PosInf,
        }
    }

    /// The region `{t : t (η − α) ≤ 0}`.
    pub fn disagreeing(cost: CostParam, eta: f64) -> Self {
        let d = eta - cost.alpha();
        if d > 0.0 {
            ScoreRegion::NonPositive
        } else if d < 0.0 {
            ScoreRegion::NonNegative
        } else {
            ScoreRegion::All
        }
    }
}

/// Cost asymmetry `α ∈ (0, 1)`: false negatives cost `1 − α`, false positives `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParam {
    alpha: f64,
    b_max: f64,
    b_min: f64,
}

impl CostParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                what: "alpha",
                value: alpha,
                expected: "(0, 1)",
            });
        }
        let other = 1.0 - alpha;
        Ok(CostParam {
            alpha,
            b_max: alpha.max(other),
            b_min: alpha.min(other),
        })
    }

    /// The cost-insensitive case `α = 1/2`.
    pub fn symmetric() -> Self {
        CostParam {
            alpha: 0.5,
            b_max: 0.5,
            b_min: 0.5,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `max(α, 1 − α)`, the largest possible cost regret.
    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    /// `min(α, 1 − α)`, where the calibration curve may jump.
    pub fn b_min(&self) -> f64 {
        self.b_min
    }

    /// `ϑ_α(η)` and `w_α(η)`, see [`theta_alpha`].
    pub fn theta(&self, eta: f64) -> (f64, f64) {
        let w = (1.0 - self.alpha) * eta + self.alpha * (1.0 - eta);
        ((1.0 - self.alpha) * eta / w, w)
    }
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One half of a loss: the loss as a function of the score with the label fixed.
///
/// Limits at `±∞` are optional. An undeclared limit makes infinite scores
/// unavailable for this partial; use `f64::INFINITY` to declare divergence.
#[derive(Clone)]
pub struct PartialLoss {
    eval: EvalFn,
    value_at_zero: f64,
    deriv_at_zero: Option<f64>,
    is_convex: bool,
    is_continuous_at_zero: bool,
    limit_neg_inf: Option<f64>,
    limit_pos_inf: Option<f64>,
}

impl fmt::Debug for PartialLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialLoss")
            .field("value_at_zero", &self.value_at_zero)
            .field("deriv_at_zero", &self.deriv_at_zero)
            .field("is_convex", &self.is_convex)
            .field("is_continuous_at_zero", &self.is_continuous_at_zero)
            .field("limit_neg_inf", &self.limit_neg_inf)
            .field("limit_pos_inf", &self.limit_pos_inf)
            .finish_non_exhaustive()
    }
}

impl PartialLoss {
    /// Wraps `eval`; `value_at_zero` is taken from `eval(0)`. Metadata
    /// defaults to non-convex, continuous at zero, no derivative, no limits.
    pub fn new<F>(eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let value_at_zero = eval(0.0);
        PartialLoss {
            eval: Arc::new(eval),
            value_at_zero,
            deriv_at_zero: None,
            is_convex: false,
            is_continuous_at_zero: true,
            limit_neg_inf: None,
            limit_pos_inf: None,
        }
    }

    pub fn with_derivative_at_zero(mut self, d: f64) -> Self {
        self.deriv_at_zero = Some(d);
        self
    }

    pub fn convex(mut self, is_convex: bool) -> Self {
        self.is_convex = is_convex;
        self
    }

    pub fn continuous_at_zero(mut self, yes: bool) -> Self {
        self.is_continuous_at_zero = yes;
        self
    }

    pub fn with_limits(mut self, neg_inf: f64, pos_inf: f64) -> Self {
        self.limit_neg_inf = Some(neg_inf);
        self.limit_pos_inf = Some(pos_inf);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Evaluates at a finite score or a declared limit.
    pub fn eval_extended(&self, t: ExtendedScore) -> Result<f64> {
        match t {
            ExtendedScore::Finite(t) => Ok(self.eval(t)),
            ExtendedScore::PosInf => self.limit_pos_inf.ok_or(Error::UnsupportedLimit("+inf")),
            ExtendedScore::NegInf => self.limit_neg_inf.ok_or(Error::UnsupportedLimit("-inf")),
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn deriv_at_zero(&self) -> Option<f64> {
        self.deriv_at_zero
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    pub fn is_continuous_at_zero(&self) -> bool {
        self.is_continuous_at_zero
    }

    pub fn limit_neg_inf(&self) -> Option<f64> {
        self.limit_neg_inf
    }

    pub fn limit_pos_inf(&self) -> Option<f64> {
        self.limit_pos_inf
    }

    /// `c · self`, metadata included. `c` must be positive.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        PartialLoss {
            eval: Arc::new(move |t| c * inner(t)),
            value_at_zero: c * self.value_at_zero,
            deriv_at_zero: self.deriv_at_zero.map(|d| c * d),
            is_convex: self.is_convex,
            is_continuous_at_zero: self.is_continuous_at_zero,
            limit_neg_inf: self.limit_neg_inf.map(|v| c * v),
            limit_pos_inf: self.limit_pos_inf.map(|v| c * v),
        }
    }
}

/// A binary classification loss `L(y, t) = 1{y=1} L₁(t) + 1{y=-1} L₋₁(t)`.
#[derive(Debug, Clone)]
pub struct Loss {
    pos: PartialLoss,
    neg: PartialLoss,
    pub(crate) tag: Option<UnevenTag>,
}

impl Loss {
    pub fn new(pos: PartialLoss, neg: PartialLoss) -> Self {
        Loss {
            pos,
            neg,
            tag: None,
        }
    }

    pub(crate) fn tagged(pos: PartialLoss, neg: PartialLoss, tag: UnevenTag) -> Self {
        Loss {
            pos,
            neg,
            tag: Some(tag),
        }
    }

    /// `L₁`, the loss paid on positive examples.
    pub fn pos(&self) -> &PartialLoss {
        &self.pos
    }

    /// `L₋₁`, the loss paid on negative examples.
    pub fn neg(&self) -> &PartialLoss {
        &self.neg
    }

    /// Family of an uneven margin loss; `None` for hand-built losses.
    pub fn family(&self) -> Option<uneven::Family> {
        self.tag.map(|t| t.family)
    }

    /// Drops the family tag so every quantity goes through the numeric search.
    pub fn untagged(&self) -> Self {
        Loss::new(self.pos.clone(), self.neg.clone())
    }

    pub fn both_convex(&self) -> bool {
        self.pos.is_convex && self.neg.is_convex
    }
}

/// The cost-sensitive 0-1 loss `U_α(y, t) = (1−α) 1{y=1} 1{t≤0} + α 1{y=-1} 1{t>0}`.
pub fn cost_sensitive_loss(cost: CostParam) -> Loss {
    let a = cost.alpha();
    let pos = PartialLoss::new(move |t| if t <= 0.0 { 1.0 - a } else { 0.0 })
        .continuous_at_zero(false)
        .with_limits(1.0 - a, 0.0);
    let neg = PartialLoss::new(move |t| if t > 0.0 { a } else { 0.0 })
        .continuous_at_zero(false)
        .with_limits(0.0, a);
    Loss::new(pos, neg)
}

/// `η · v` with the measure-theoretic convention `0 · ∞ = 0`.
#[inline]
pub(crate) fn weight(eta: f64, v: f64) -> f64 {
    if eta == 0.0 {
        0.0
    } else {
        eta * v
    }
}

/// `C_L(η, t) = η L₁(t) + (1 − η) L₋₁(t)`. May be `+∞` at an infinite score.
pub fn conditional_risk(loss: &Loss, eta: f64, t: ExtendedScore) -> Result<f64> {
    check_unit("eta", eta)?;
    let p = loss.pos.eval_extended(t)?;
    let n = loss.neg.eval_extended(t)?;
    Ok(weight(eta, p) + weight(1.0 - eta, n))
}

/// Infimum of `C_L(η, ·)` over `region`, with a point (possibly infinite) attaining it.
pub fn infimum(loss: &Loss, eta: f64, region: ScoreRegion) -> Result<(ExtendedScore, f64)> {
    check_unit("eta", eta)?;
    if let Some(tag) = &loss.tag {
        if let Some(found) = uneven::tagged_infimum(tag, eta, region) {
            return Ok(found);
        }
    }
    oracle::brute_force_min(loss, eta, region)
}

/// `C*_L(η) = inf_t C_L(η, t)`.
pub fn optimal_conditional_risk(loss: &Loss, eta: f64) -> Result<f64> {
    infimum(loss, eta, ScoreRegion::All).map(|(_, v)| v)
}

/// `C⁻_{L,α}(η)`, the infimum of `C_L(η, t)` over `t (η − α) ≤ 0`.
///
/// When both partials are convex and the loss passes the derivative test
/// for `α`, the value must equal `η L₁(0) + (1 − η) L₋₁(0)`; a disagreement
/// beyond [`SHORTCUT_AGREEMENT_TOL`] is reported as an error.
pub fn constrained_optimal_risk(loss: &Loss, cost: CostParam, eta: f64) -> Result<f64> {
    let region = ScoreRegion::disagreeing(cost, eta);
    let (_, searched) = infimum(loss, eta, region)?;
    if loss.both_convex() && calibration::derivative_test(loss, cost) == Some(true) {
        let shortcut = eta * loss.pos.value_at_zero + (1.0 - eta) * loss.neg.value_at_zero;
        if (shortcut - searched).abs() > SHORTCUT_AGREEMENT_TOL {
            return Err(Error::Inconsistent(format!(
                "convex shortcut {shortcut} vs constrained search {searched} at eta = {eta}"
            )));
        }
    }
    Ok(searched)
}

/// `H_{L,α}(η) = C⁻_{L,α}(η) − C*_L(η)`.
pub fn h_alpha(loss: &Loss, cost: CostParam, eta: f64) -> Result<f64> {
    let constrained = constrained_optimal_risk(loss, cost, eta)?;
    let best = optimal_conditional_risk(loss, eta)?;
    Ok((constrained - best).max(0.0))
}

/// `H_L(η)`, the cost-insensitive gap; identical to `h_alpha` at `α = 1/2`.
pub fn h_cc(loss: &Loss, eta: f64) -> Result<f64> {
    h_alpha(loss, CostParam::symmetric(), eta)
}

/// Conditional regret of the cost-sensitive 0-1 loss:
/// `1{sign(t) ≠ sign(η − α)} |η − α|`.
pub fn cost_regret(cost: CostParam, eta: f64, t: ExtendedScore) -> f64 {
    let d = eta - cost.alpha();
    let target = if d > 0.0 { 1 } else { -1 };
    if t.sign() != target {
        d.abs()
    } else {
        0.0
    }
}

/// `L_α`: partials reweighted to `(1 − α) L₁` and `α L₋₁`.
pub fn alpha_transform(loss: &Loss, cost: CostParam) -> Loss {
    let a = cost.alpha();
    Loss {
        pos: loss.pos.scaled(1.0 - a),
        neg: loss.neg.scaled(a),
        tag: loss.tag.map(|t| t.reweighted(1.0 - a, a)),
    }
}

/// `(ϑ_α(η), w_α(η))` with `w_α(η) = (1−α)η + α(1−η)` and `ϑ_α(η) = (1−α)η / w_α(η)`.
pub fn theta_alpha(cost: CostParam, eta: f64) -> Result<(f64, f64)> {
    check_unit("eta", eta)?;
    Ok(cost.theta(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uneven::{make_uneven_loss, Family, UnevenMarginSpec};
    use approx::assert_abs_diff_eq;

    fn uneven(family: Family, beta: f64, gamma: f64) -> Loss {
        make_uneven_loss(&UnevenMarginSpec::new(family, beta, gamma)).unwrap()
    }

    fn weighted(family: Family, gamma: f64, alpha: f64) -> Loss {
        make_uneven_loss(&UnevenMarginSpec::new(family, 1.0 / gamma, gamma).weighted(alpha))
            .unwrap()
    }

    #[test]
    fn conditional_risk_examples() {
        let hinge = uneven(Family::Hinge, 1.0, 1.0);
        let v = conditional_risk(&hinge, 0.5, ExtendedScore::Finite(0.0)).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);

        let sig = uneven(Family::Sigmoid, 0.5, 2.0);
        let v = conditional_risk(&sig, 0.3, ExtendedScore::PosInf).unwrap();
        assert_abs_diff_eq!(v, 0.35, epsilon = 1e-15);

        let h2 = uneven(Family::Hinge, 0.5, 2.0);
        let v = conditional_risk(&h2, 0.3, ExtendedScore::Finite(-1.0)).unwrap();
        assert_abs_diff_eq!(v, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn conditional_risk_rejects_bad_eta_and_missing_limits() {
        let hinge = uneven(Family::Hinge, 1.0, 1.0);
        assert!(matches!(
            conditional_risk(&hinge, 1.5, ExtendedScore::Finite(0.0)),
            Err(Error::Domain { .. })
        ));
        let bare = Loss::new(PartialLoss::new(|t| t * t), PartialLoss::new(|t| t * t));
        assert_eq!(
            conditional_risk(&bare, 0.5, ExtendedScore::PosInf),
            Err(Error::UnsupportedLimit("+inf"))
        );
    }

    #[test]
    fn zero_weight_times_infinite_limit_is_zero() {
        let hinge = uneven(Family::Hinge, 1.0, 1.0);
        // L₁(-∞) = ∞ but η = 0
        let v = conditional_risk(&hinge, 0.0, ExtendedScore::NegInf).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn optimal_risk_examples() {
        let h2 = uneven(Family::Hinge, 0.5, 2.0);
        assert_abs_diff_eq!(optimal_conditional_risk(&h2, 0.3).unwrap(), 0.45, epsilon = 1e-12);
        let sq = uneven(Family::Squared, 1.0, 1.0);
        assert_abs_diff_eq!(optimal_conditional_risk(&sq, 0.5).unwrap(), 1.0, epsilon = 1e-12);
        let (arg, _) = infimum(&sq, 0.5, ScoreRegion::All).unwrap();
        assert_eq!(arg, ExtendedScore::Finite(0.0));
    }

    #[test]
    fn constrained_risk_examples() {
        let h2 = uneven(Family::Hinge, 0.5, 2.0);
        let cost = CostParam::new(0.3).unwrap();
        // constraint vacuous at η = α
        assert_abs_diff_eq!(
            constrained_optimal_risk(&h2, cost, 0.3).unwrap(),
            optimal_conditional_risk(&h2, 0.3).unwrap(),
            epsilon = 1e-15
        );
        // h2 is CC, so the convex shortcut applies at α = 1/2
        let half = CostParam::symmetric();
        assert_abs_diff_eq!(
            constrained_optimal_risk(&h2, half, 0.3).unwrap(),
            0.65,
            epsilon = 1e-12
        );

        let sig = uneven(Family::Sigmoid, 0.5, 2.0);
        let a2 = CostParam::new((3.0 + 4.0 * 2f64.sqrt()) / 23.0).unwrap();
        assert_abs_diff_eq!(constrained_optimal_risk(&sig, a2, 0.2).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn h_alpha_examples() {
        let l = weighted(Family::Hinge, 2.0, 0.3);
        let cost = CostParam::new(0.3).unwrap();
        assert_abs_diff_eq!(h_alpha(&l, cost, 0.5).unwrap(), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(h_alpha(&l, cost, 0.1).unwrap(), 0.1, epsilon = 1e-12);
        assert_eq!(h_alpha(&l, cost, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn h_cc_examples() {
        let h2 = uneven(Family::Hinge, 0.5, 2.0);
        assert_abs_diff_eq!(h_cc(&h2, 0.3).unwrap(), 0.2, epsilon = 1e-12);
        let sq = uneven(Family::Squared, 1.0, 1.0);
        assert_abs_diff_eq!(h_cc(&sq, 0.75).unwrap(), 0.25, epsilon = 1e-12);
        assert_eq!(h_cc(&sq, 0.5).unwrap(), 0.0);
        let half = CostParam::symmetric();
        for i in 0..=20 {
            let eta = i as f64 / 20.0;
            assert_eq!(h_cc(&h2, eta).unwrap(), h_alpha(&h2, half, eta).unwrap());
        }
    }

    #[test]
    fn cost_regret_examples() {
        let cost = CostParam::new(0.3).unwrap();
        assert_abs_diff_eq!(cost_regret(cost, 0.8, ExtendedScore::Finite(-1.0)), 0.5, epsilon = 1e-15);
        assert_eq!(cost_regret(cost, 0.8, ExtendedScore::Finite(1.0)), 0.0);
        for t in [-2.0, 0.0, 2.0] {
            assert_eq!(cost_regret(cost, 0.3, ExtendedScore::Finite(t)), 0.0);
        }
        // sign(0) = -1: predicting 0 is wrong when η > α
        assert_abs_diff_eq!(cost_regret(cost, 0.8, ExtendedScore::Finite(0.0)), 0.5, epsilon = 1e-15);
        assert_eq!(cost_regret(cost, 0.8, ExtendedScore::PosInf), 0.0);
        assert_abs_diff_eq!(cost_regret(cost, 0.1, ExtendedScore::PosInf), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn alpha_transform_scales_partials_and_metadata() {
        let hinge = uneven(Family::Hinge, 1.0, 1.0);
        let half = alpha_transform(&hinge, CostParam::symmetric());
        for t in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert_abs_diff_eq!(half.pos().eval(t), 0.5 * hinge.pos().eval(t), epsilon = 1e-15);
            assert_abs_diff_eq!(half.neg().eval(t), 0.5 * hinge.neg().eval(t), epsilon = 1e-15);
        }
        let l = alpha_transform(&hinge, CostParam::new(0.3).unwrap());
        assert_abs_diff_eq!(l.pos().deriv_at_zero().unwrap(), -0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(l.neg().deriv_at_zero().unwrap(), 0.3, epsilon = 1e-15);
        assert_eq!(l.pos().limit_neg_inf(), Some(f64::INFINITY));
    }

    #[test]
    fn composed_transforms_scale_by_alpha_one_minus_alpha() {
        let sq = uneven(Family::Squared, 0.5, 2.0);
        let a = 0.3;
        let cost = CostParam::new(a).unwrap();
        let flipped = CostParam::new(1.0 - a).unwrap();
        let twice = alpha_transform(&alpha_transform(&sq, flipped), cost);
        for t in [-1.5, 0.0, 0.4, 2.0] {
            assert_abs_diff_eq!(twice.pos().eval(t), a * (1.0 - a) * sq.pos().eval(t), epsilon = 1e-14);
            assert_abs_diff_eq!(twice.neg().eval(t), a * (1.0 - a) * sq.neg().eval(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn theta_alpha_examples() {
        let cost = CostParam::new(0.3).unwrap();
        let (th, w) = theta_alpha(cost, 0.3).unwrap();
        assert_abs_diff_eq!(th, 0.5, epsilon = 1e-15);
        assert!(w > 0.0);
        let (th, _) = theta_alpha(CostParam::symmetric(), 0.27).unwrap();
        assert_abs_diff_eq!(th, 0.27, epsilon = 1e-15);
        let (th, w) = theta_alpha(cost, 0.5).unwrap();
        assert_abs_diff_eq!(th, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn cost_param_rejects_endpoints() {
        assert!(CostParam::new(0.0).is_err());
        assert!(CostParam::new(1.0).is_err());
        assert!(CostParam::new(f64::NAN).is_err());
        let c = CostParam::new(0.3).unwrap();
        assert_eq!(c.b_max() + c.b_min(), 1.0);
    }

    #[test]
    fn cost_sensitive_loss_regret_matches_formula() {
        let cost = CostParam::new(0.3).unwrap();
        let u = cost_sensitive_loss(cost);
        for i in 0..=10 {
            let eta = i as f64 / 10.0;
            let best = optimal_conditional_risk(&u, eta).unwrap();
            for t in [-1.0, 0.0, 1e-3, 2.0] {
                let s = ExtendedScore::Finite(t);
                let c = conditional_risk(&u, eta, s).unwrap();
                assert_abs_diff_eq!(c - best, cost_regret(cost, eta, s), epsilon = 1e-12);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn theta_sign_matches_eta_minus_alpha(alpha in 0.01f64..0.99, eta in 0.0f64..=1.0) {
                let cost = CostParam::new(alpha).unwrap();
                let (th, w) = theta_alpha(cost, eta).unwrap();
                prop_assert!(w > 0.0);
                prop_assert!((0.0..=1.0).contains(&th));
                let lhs = 2.0 * th - 1.0;
                let rhs = (eta - alpha) / w;
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }

            #[test]
            fn risk_dominates_optimum(eta in 0.0f64..=1.0, t in -5.0f64..5.0, gamma in 0.25f64..4.0) {
                for family in Family::ALL {
                    let l = uneven(family, 1.0 / gamma, gamma);
                    let c = conditional_risk(&l, eta, ExtendedScore::Finite(t)).unwrap();
                    let best = optimal_conditional_risk(&l, eta).unwrap();
                    prop_assert!(c >= best - 1e-12, "{family:?}: {c} < {best}");
                }
            }
        }
    }
}
