//! Brute-force references: grid-and-golden-section minimization of the
//! conditional risk, central differences, exact risks over finite
//! distributions, and a seeded fuzzer for the regret bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::envelope::{self, ConvexEnvelope};
use crate::error::{check_unit, Error, Result};
use crate::loss::{
    conditional_risk, cost_regret, infimum, optimal_conditional_risk, CostParam, ExtendedScore,
    Loss, PartialLoss, ScoreRegion,
};
use crate::uneven::{self, make_uneven_loss, Family, UnevenMarginSpec};

/// Points per half-line in the coarse search grid.
pub const GRID_POINTS: usize = 400;
/// Smallest nonzero magnitude on the coarse grid.
pub const GRID_MIN: f64 = 1e-6;
/// Largest magnitude on the coarse grid; beyond it only declared limits count.
pub const GRID_MAX: f64 = 50.0;
/// Slack in the bound check `ψ(cost regret) ≤ surrogate regret + BOUND_TOL`.
pub const BOUND_TOL: f64 = 1e-8;

const GOLDEN_ITERS: usize = 200;
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// The coarse grid `{0} ∪ ±logspace(GRID_MIN, GRID_MAX, GRID_POINTS)`, ascending.
pub fn search_grid() -> Vec<f64> {
    let ratio = (GRID_MAX / GRID_MIN).ln() / (GRID_POINTS - 1) as f64;
    let pos: Vec<f64> = (0..GRID_POINTS)
        .map(|k| {
            if k == GRID_POINTS - 1 {
                GRID_MAX
            } else {
                GRID_MIN * (ratio * k as f64).exp()
            }
        })
        .collect();
    let mut grid: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    grid.push(0.0);
    grid.extend(pos);
    grid
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `C_L(η, ·)` over `region` without using any family knowledge.
///
/// A coarse grid locates the best sample; golden-section search refines it on
/// the bracket formed by its grid neighbours. The admissible infinite limits
/// are then compared, and win ties.
pub fn brute_force_min(
    loss: &Loss,
    eta: f64,
    region: ScoreRegion,
) -> Result<(ExtendedScore, f64)> {
    check_unit("eta", eta)?;
    let risk = |t: f64| {
        let p = loss.pos().eval(t);
        let n = loss.neg().eval(t);
        crate::loss::weight(eta, p) + crate::loss::weight(1.0 - eta, n)
    };
    let grid: Vec<f64> = search_grid()
        .into_iter()
        .filter(|&t| region.contains(ExtendedScore::Finite(t)))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| risk(t)).collect();
    let mut k = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[k] {
            k = i;
        }
    }
    let (mut arg, mut best) = (grid[k], values[k]);
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    if hi > lo {
        let (t, v) = golden_section(risk, lo, hi);
        if v < best {
            arg = t;
            best = v;
        }
    }

    let mut result = (ExtendedScore::Finite(arg), best);
    for limit in [ExtendedScore::PosInf, ExtendedScore::NegInf] {
        if region.contains(limit) {
            let v = conditional_risk(loss, eta, limit)?;
            if v <= result.1 {
                result = (limit, v);
            }
        }
    }
    Ok(result)
}

/// Central difference `(p(t + h) − p(t − h)) / 2h`.
pub fn finite_diff_check(p: &PartialLoss, t: f64, h: f64) -> f64 {
    (p.eval(t + h) - p.eval(t - h)) / (2.0 * h)
}

/// A distribution over posteriors `η(X)` with finitely many atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl FiniteDistribution {
    /// Atoms are `(mass, η)` pairs; masses must be positive and sum to 1.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Invalid("distribution: no atoms".into()));
        }
        for &(m, eta) in &atoms {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Invalid(format!("distribution: mass {m}")));
            }
            check_unit("eta", eta)?;
        }
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("distribution: masses sum to {total}")));
        }
        Ok(FiniteDistribution { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// One score per atom of a [`FiniteDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionAssignment {
    pub scores: Vec<ExtendedScore>,
}

impl DecisionAssignment {
    pub fn new(scores: Vec<ExtendedScore>) -> Self {
        DecisionAssignment { scores }
    }

    /// Scores minimizing the conditional risk at every atom.
    pub fn optimal(loss: &Loss, dist: &FiniteDistribution) -> Result<Self> {
        let scores = dist
            .atoms()
            .iter()
            .map(|&(_, eta)| infimum(loss, eta, ScoreRegion::All).map(|(t, _)| t))
            .collect::<Result<_>>()?;
        Ok(DecisionAssignment { scores })
    }
}

/// `(R_α(f) − R_α*, R_L(f) − R_L*)` for the classifier `f` on `dist`.
pub fn empirical_regrets(
    dist: &FiniteDistribution,
    f: &DecisionAssignment,
    loss: &Loss,
    cost: CostParam,
) -> Result<(f64, f64)> {
    if f.scores.len() != dist.atoms().len() {
        return Err(Error::Invalid(format!(
            "assignment: {} scores for {} atoms",
            f.scores.len(),
            dist.atoms().len()
        )));
    }
    let mut cost_total = 0.0;
    let mut surrogate_total = 0.0;
    for (&(mass, eta), &t) in dist.atoms().iter().zip(&f.scores) {
        cost_total += mass * cost_regret(cost, eta, t);
        let excess = conditional_risk(loss, eta, t)? - optimal_conditional_risk(loss, eta)?;
        surrogate_total += mass * excess.max(0.0);
    }
    Ok((cost_total, surrogate_total))
}

/// One evaluation of the regret bound on a random problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTrialRecord {
    pub seed: u64,
    pub family: Family,
    pub alpha: f64,
    pub gamma: f64,
    pub cost_regret: f64,
    pub surrogate_regret: f64,
    pub psi_value: f64,
    pub passed: bool,
}

/// Evaluates `ψ(R_α(f) − R_α*)` against `R_L(f) − R_L*` using a prebuilt envelope.
pub fn evaluate_bound(
    loss: &Loss,
    cost: CostParam,
    env: &ConvexEnvelope,
    dist: &FiniteDistribution,
    f: &DecisionAssignment,
) -> Result<(f64, f64, f64)> {
    let (cr, sr) = empirical_regrets(dist, f, loss, cost)?;
    let psi = envelope::envelope_eval(env, cr.min(env.domain_max()))?;
    Ok((cr, sr, psi))
}

/// The loss and cost a fuzz trial draws for `family`.
///
/// Convex families get `β = 1/γ` with `γ` log-uniform on `[1/4, 4]`, weighted
/// by a uniform `α ∈ [0.05, 0.95]`. The sigmoid is the unweighted `γ = 2`
/// loss at its calibrating cost.
pub fn trial_loss<R: Rng>(rng: &mut R, family: Family) -> Result<(Loss, CostParam, f64)> {
    match family {
        Family::Sigmoid => {
            let loss = make_uneven_loss(&UnevenMarginSpec::calibrated(Family::Sigmoid, 2.0))?;
            let alpha = uneven::alpha_of_gamma(2.0, uneven::ALPHA_OF_GAMMA_TOL)?;
            Ok((loss, CostParam::new(alpha)?, 2.0))
        }
        _ => {
            let alpha = rng.random_range(0.05..0.95);
            let gamma = rng.random_range(0.25f64.ln()..4f64.ln()).exp();
            let spec = UnevenMarginSpec::calibrated(family, gamma).weighted(alpha);
            Ok((make_uneven_loss(&spec)?, CostParam::new(alpha)?, gamma))
        }
    }
}

/// A random distribution with 1 to 20 atoms, masses from a flat Dirichlet draw.
pub fn random_distribution<R: Rng>(rng: &mut R) -> FiniteDistribution {
    let n = rng.random_range(1..=20);
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect::<Vec<f64>>();
    let total: f64 = raw.iter().sum();
    let mut atoms: Vec<(f64, f64)> = raw
        .iter()
        .map(|m| (m / total, rng.random_range(0.0..=1.0)))
        .collect();
    // absorb rounding so the masses sum to one
    let drift: f64 = 1.0 - atoms.iter().map(|a| a.0).sum::<f64>();
    atoms[0].0 += drift;
    FiniteDistribution::new(atoms).expect("normalized masses")
}

/// Scores uniform on `[−3, 3]`, or `±∞` with probability 0.05 each.
pub fn random_assignment<R: Rng>(rng: &mut R, atoms: usize) -> DecisionAssignment {
    let scores = (0..atoms)
        .map(|_| {
            let u: f64 = rng.random();
            if u < 0.05 {
                ExtendedScore::NegInf
            } else if u < 0.10 {
                ExtendedScore::PosInf
            } else {
                ExtendedScore::Finite(rng.random_range(-3.0..=3.0))
            }
        })
        .collect();
    DecisionAssignment { scores }
}

/// Seed of trial `index` in a run started from `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(SEED_STRIDE))
}

/// Runs one seeded trial.
pub fn bound_trial(seed: u64, family: Family, grid_size: usize) -> Result<BoundTrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (loss, cost, gamma) = trial_loss(&mut rng, family)?;
    let dist = random_distribution(&mut rng);
    let f = random_assignment(&mut rng, dist.atoms().len());
    let env = envelope::biconjugate(&envelope::nu_curve(&loss, cost, grid_size)?)?;
    let (cr, sr, psi) = evaluate_bound(&loss, cost, &env, &dist, &f)?;
    Ok(BoundTrialRecord {
        seed,
        family,
        alpha: cost.alpha(),
        gamma,
        cost_regret: cr,
        surrogate_regret: sr,
        psi_value: psi,
        passed: psi <= sr + BOUND_TOL,
    })
}

/// `n_trials` seeded bound checks, in trial order.
pub fn fuzz_bound(seed: u64, family: Family, n_trials: usize) -> Result<Vec<BoundTrialRecord>> {
    (0..n_trials as u64)
        .map(|i| bound_trial(trial_seed(seed, i), family, envelope::DEFAULT_GRID))
        .collect()
}
