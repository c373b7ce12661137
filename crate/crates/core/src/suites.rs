//! Named batches of invariant checks, run by `surrogate-regret verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calibration::{self, check_calibrated_analytic, check_calibrated_numeric, mu_curve};
use crate::envelope::{self, biconjugate, envelope_eval, jump_at_bmin, nu_curve};
use crate::error::{Error, Result};
use crate::loss::{
    alpha_transform, conditional_risk, h_alpha, h_cc,
    optimal_conditional_risk, CostParam, ExtendedScore, Loss, ScoreRegion,
};
use crate::oracle::{brute_force_min, fuzz_bound};
use crate::uneven::{
    alpha_of_gamma, closed_forms, make_uneven_loss, sigmoid_alpha_two, sigmoid_c_minus,
    sigmoid_quartic, sigmoid_t_minus, Family, UnevenMarginSpec, ALPHA_OF_GAMMA_TOL, QUARTIC_TOL,
};

pub const ALPHAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const GAMMAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
pub const BOUND_TRIALS: usize = 1000;

const CLOSED_FORM_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-10;
const CURVE_GRID: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ClosedForms,
    Identities,
    Bounds,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForms => "closed_forms",
            Suite::Identities => "identities",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::ClosedForms, Suite::Identities, Suite::Bounds, Suite::All]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed error, where the check has one.
    pub max_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    max_error: Option<f64>,
}

impl Tally {
    fn check(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn within(&mut self, err: f64, tol: f64) {
        self.max_error = Some(self.max_error.map_or(err, |m| m.max(err)));
        self.check(err <= tol);
    }

    fn finish(self, name: &str) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: self.passed,
            failed: self.failed,
            max_error: self.max_error,
        }
    }
}

pub fn eta_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

/// The calibrated configurations with published closed forms.
pub fn calibrated_specs() -> Vec<UnevenMarginSpec> {
    let mut specs: Vec<_> = Family::CONVEX
        .iter()
        .flat_map(|&f| GAMMAS.map(|g| UnevenMarginSpec::calibrated(f, g)))
        .collect();
    specs.push(UnevenMarginSpec::calibrated(Family::Sigmoid, 2.0));
    specs
}

fn build(spec: &UnevenMarginSpec) -> Result<Loss> {
    make_uneven_loss(spec)
}

fn closed_form_checks() -> Result<Vec<CheckResult>> {
    let mut vs_oracle = Tally::default();
    let mut vs_engine = Tally::default();
    for spec in calibrated_specs() {
        let l = build(&spec)?;
        let bare = l.untagged();
        for eta in eta_grid(101) {
            let cf = closed_forms(&spec, eta)?;
            let (_, oracle) = brute_force_min(&bare, eta, ScoreRegion::All)?;
            vs_oracle.within((cf.c_star - oracle).abs(), CLOSED_FORM_TOL);
            vs_engine.within((cf.c_star - optimal_conditional_risk(&l, eta)?).abs(), IDENTITY_TOL);
        }
    }

    let mut shortcut = Tally::default();
    for family in Family::CONVEX {
        for gamma in GAMMAS {
            for alpha in ALPHAS {
                let cost = CostParam::new(alpha)?;
                let l = build(&UnevenMarginSpec::calibrated(family, gamma).weighted(alpha))?;
                let bare = l.untagged();
                for eta in eta_grid(101) {
                    let region = ScoreRegion::disagreeing(cost, eta);
                    let (_, v) = brute_force_min(&bare, eta, region)?;
                    let at_zero = eta * l.pos().value_at_zero() + (1.0 - eta) * l.neg().value_at_zero();
                    shortcut.within((v - at_zero).abs(), CLOSED_FORM_TOL);
                }
            }
        }
    }

    let mut stationary = Tally::default();
    for family in [Family::Squared, Family::Exponential] {
        for gamma in GAMMAS {
            let spec = UnevenMarginSpec::calibrated(family, gamma);
            let l = build(&spec)?;
            for eta in eta_grid(101).filter(|&e| e > 0.0 && e < 1.0) {
                let t = closed_forms(&spec, eta)?.t_star.map_or(0.0, |s| s.as_f64());
                let h = 1e-6;
                let c = |t| conditional_risk(&l, eta, ExtendedScore::Finite(t));
                let d = (c(t + h)? - c(t - h)?) / (2.0 * h);
                stationary.within(d.abs(), 1e-6);
            }
        }
    }

    let mut quartic = Tally::default();
    let mut sig_minus = Tally::default();
    let sig = build(&UnevenMarginSpec::calibrated(Family::Sigmoid, 2.0))?.untagged();
    let a2 = CostParam::new(sigmoid_alpha_two())?;
    for i in 1..50 {
        let eta = i as f64 / 100.0;
        let z = sigmoid_t_minus(eta)?.exp();
        quartic.within(sigmoid_quartic(eta, z).abs(), QUARTIC_TOL);
    }
    for eta in eta_grid(101) {
        let (_, v) = brute_force_min(&sig, eta, ScoreRegion::disagreeing(a2, eta))?;
        sig_minus.within((sigmoid_c_minus(eta)? - v).abs(), CLOSED_FORM_TOL);
    }

    Ok(vec![
        vs_oracle.finish("c_star_vs_oracle"),
        vs_engine.finish("c_star_vs_exact_engine"),
        shortcut.finish("constrained_vs_value_at_zero"),
        stationary.finish("minimizer_stationarity"),
        quartic.finish("sigmoid_quartic_residual"),
        sig_minus.finish("sigmoid_c_minus_vs_oracle"),
    ])
}

fn identity_checks() -> Result<Vec<CheckResult>> {
    let mut hlaa = Tally::default();
    let mut hinge = Tally::default();
    let mut half = Tally::default();
    let mut symmetry = Tally::default();
    for family in Family::CONVEX {
        for gamma in GAMMAS {
            let base = build(&UnevenMarginSpec::calibrated(family, gamma))?;
            for alpha in ALPHAS {
                let cost = CostParam::new(alpha)?;
                let weighted = alpha_transform(&base, cost);
                for eta in eta_grid(101) {
                    let (theta, w) = cost.theta(eta);
                    let lhs = h_alpha(&weighted, cost, eta)?;
                    hlaa.within((lhs - w * h_cc(&base, theta)?).abs(), IDENTITY_TOL);
                    if family == Family::Hinge {
                        let want = if eta >= alpha { eta - alpha } else { (alpha - eta) / gamma };
                        hinge.within((lhs - want).abs(), IDENTITY_TOL);
                    }
                }
            }
            for eta in eta_grid(101) {
                let a = h_cc(&base, eta)?;
                half.check(a == h_alpha(&base, CostParam::symmetric(), eta)?);
            }
        }
        let margin = build(&UnevenMarginSpec::new(family, 1.0, 1.0))?;
        for eta in eta_grid(101) {
            symmetry.within((h_cc(&margin, eta)? - h_cc(&margin, 1.0 - eta)?).abs(), IDENTITY_TOL);
        }
    }

    let mut reflect = Tally::default();
    for gamma in [1.5, 2.0, 3.0, 5.0, 8.0] {
        let a = alpha_of_gamma(gamma, ALPHA_OF_GAMMA_TOL)?;
        let b = alpha_of_gamma(1.0 / gamma, ALPHA_OF_GAMMA_TOL)?;
        reflect.within((a + b - 1.0).abs(), 2.0 * ALPHA_OF_GAMMA_TOL);
    }

    let mut jumps = Tally::default();
    for gamma in GAMMAS {
        let base = build(&UnevenMarginSpec::calibrated(Family::Hinge, gamma))?;
        for alpha in ALPHAS {
            let cost = CostParam::new(alpha)?;
            let curve = nu_curve(&alpha_transform(&base, cost), cost, CURVE_GRID)?;
            let predicted = (alpha - 0.5) * (gamma - 1.0) < 0.0;
            jumps.check(jump_at_bmin(&curve)?.has_jump == predicted);
        }
    }

    let mut hulls = Tally::default();
    let mut verdicts = Tally::default();
    for family in Family::CONVEX {
        for gamma in GAMMAS {
            let base = build(&UnevenMarginSpec::calibrated(family, gamma))?;
            for alpha in ALPHAS {
                let cost = CostParam::new(alpha)?;
                let l = alpha_transform(&base, cost);
                let nu = nu_curve(&l, cost, CURVE_GRID)?;
                hulls.within(hull_gap(&nu)?, 1e-9);
                // the weighted loss is calibrated for α; the unweighted one only at 1/2
                for (loss, c) in [(&l, cost), (&base, cost)] {
                    let a = check_calibrated_analytic(loss, c)?.verdict;
                    let n = check_calibrated_numeric(loss, c, calibration::DEFAULT_GRID, calibration::DEFAULT_TOL)?
                        .verdict;
                    verdicts.check(a == n);
                }
            }
        }
    }
    let sig = build(&UnevenMarginSpec::calibrated(Family::Sigmoid, 2.0))?;
    let a2 = sigmoid_alpha_two();
    for (alpha, expect) in [(a2, true), (a2 - 0.02, false), (a2 + 0.02, false)] {
        let cost = CostParam::new(alpha)?;
        let r = check_calibrated_numeric(&sig, cost, calibration::DEFAULT_GRID, calibration::DEFAULT_TOL)?;
        verdicts.check(r.is_calibrated() == expect);
        hulls.within(hull_gap(&nu_curve(&sig, cost, CURVE_GRID)?)?, 1e-9);
    }

    Ok(vec![
        hlaa.finish("alpha_transform_identity"),
        hinge.finish("hinge_piecewise_h"),
        half.finish("h_cc_is_h_alpha_at_half"),
        symmetry.finish("margin_loss_symmetry"),
        reflect.finish("alpha_of_gamma_reflection"),
        jumps.finish("hinge_nu_jump_characterization"),
        hulls.finish("mu_nu_hull_equality"),
        verdicts.finish("verdict_agreement"),
    ])
}

/// Largest gap between the hulls of `μ` and `ν` over the knots of `ν`.
pub fn hull_gap(nu: &envelope::SampledCurve) -> Result<f64> {
    let a = biconjugate(nu)?;
    let b = biconjugate(&mu_curve(nu)?)?;
    let mut gap: f64 = 0.0;
    for k in nu.knots() {
        gap = gap.max((envelope_eval(&a, k.eps)? - envelope_eval(&b, k.eps)?).abs());
    }
    Ok(gap)
}

fn bound_checks(seed: u64) -> Result<Vec<CheckResult>> {
    Family::ALL
        .into_iter()
        .map(|family| {
            let records = fuzz_bound(seed, family, BOUND_TRIALS)?;
            let mut t = Tally::default();
            for r in &records {
                t.within((r.psi_value - r.surrogate_regret).max(0.0), crate::oracle::BOUND_TOL);
            }
            Ok(t.finish(&format!("bound_fuzz_{family}")))
        })
        .collect()
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteSummary> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::ClosedForms | Suite::All) {
        checks.extend(closed_form_checks()?);
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        checks.extend(identity_checks()?);
    }
    if matches!(suite, Suite::Bounds | Suite::All) {
        checks.extend(bound_checks(seed)?);
    }
    let all_passed = checks.iter().all(|c| c.failed == 0);
    Ok(SuiteSummary {
        suite: suite.name().to_string(),
        seed,
        checks,
        all_passed,
    })
}
