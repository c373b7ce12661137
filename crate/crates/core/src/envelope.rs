//! The `ν_{L,α}` curve, its lower convex envelope `ψ_{L,α}`, and the regret
//! bound obtained by inverting `ψ`.

use serde::{Deserialize, Serialize};

use crate::calibration;
use crate::error::{Error, Result};
use crate::loss::{h_alpha, CostParam, Loss};

/// Uniform `ε` samples in a `ν` curve, before the knots at `b_min`.
pub const DEFAULT_GRID: usize = 2001;
/// Left and right values at `b_min` further apart than this count as a jump.
pub const JUMP_TOL: f64 = 1e-9;

const DOMAIN_SLACK: f64 = 1e-12;

/// Which one-sided value a knot carries when a curve jumps at its `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Both,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub eps: f64,
    pub value: f64,
    pub side: Side,
}

impl Knot {
    pub fn new(eps: f64, value: f64, side: Side) -> Self {
        Knot { eps, value, side }
    }
}

/// A function on `[0, domain_max]` given by knots. A jump at `ε` is a
/// `left` knot followed by a `right` knot at the same `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    domain_max: f64,
    knots: Vec<Knot>,
}

impl SampledCurve {
    pub fn new(domain_max: f64, knots: Vec<Knot>) -> Result<Self> {
        let (Some(first), Some(last)) = (knots.first(), knots.last()) else {
            return Err(Error::Invalid("curve: no knots".into()));
        };
        if first.eps != 0.0 || last.eps != domain_max {
            return Err(Error::Invalid(format!(
                "curve: knots span [{}, {}], expected [0, {domain_max}]",
                first.eps, last.eps
            )));
        }
        for k in &knots {
            if !(k.value >= 0.0 && k.value.is_finite()) {
                return Err(Error::Invalid(format!("curve: value {} at eps {}", k.value, k.eps)));
            }
        }
        for w in knots.windows(2) {
            let ok = w[0].eps < w[1].eps
                || (w[0].eps == w[1].eps && w[0].side == Side::Left && w[1].side == Side::Right);
            if !ok {
                return Err(Error::Invalid(format!("curve: knot order at eps {}", w[1].eps)));
            }
        }
        Ok(SampledCurve { domain_max, knots })
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }
}

/// A continuous, convex, nondecreasing piecewise-linear function through
/// `hull_knots`, starting at `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexEnvelope {
    hull_knots: Vec<(f64, f64)>,
}

impl ConvexEnvelope {
    pub fn hull_knots(&self) -> &[(f64, f64)] {
        &self.hull_knots
    }

    pub fn domain_max(&self) -> f64 {
        self.hull_knots.last().expect("at least two knots").0
    }

    /// Whether `ψ(ε) > 0` for all `ε > 0`, i.e. whether `ψ` is invertible.
    pub fn is_strictly_increasing(&self) -> bool {
        self.hull_knots[1].1 > 0.0
    }

    /// The hull as a curve, for feeding back into [`biconjugate`].
    pub fn to_curve(&self) -> SampledCurve {
        let knots = self
            .hull_knots
            .iter()
            .map(|&(e, v)| Knot::new(e, v, Side::Both))
            .collect();
        SampledCurve::new(self.domain_max(), knots).expect("hull knots are ordered")
    }
}

fn eta_at(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn nu_two_sided(loss: &Loss, cost: CostParam, eps: f64) -> Result<f64> {
    let a = cost.alpha();
    Ok(h_alpha(loss, cost, eta_at(a + eps))?.min(h_alpha(loss, cost, eta_at(a - eps))?))
}

fn nu_one_sided(loss: &Loss, cost: CostParam, eps: f64) -> Result<f64> {
    let a = cost.alpha();
    let eta = if a <= 0.5 { a + eps } else { a - eps };
    h_alpha(loss, cost, eta_at(eta))
}

/// `ν_{L,α}(ε) = min_{|η−α| = ε} H_{L,α}(η)` for `ε ∈ [0, B_α]`.
pub fn nu_at(loss: &Loss, cost: CostParam, eps: f64) -> Result<f64> {
    if !(0.0..=cost.b_max() + DOMAIN_SLACK).contains(&eps) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            expected: "[0, B_alpha]",
        });
    }
    if eps <= cost.b_min() {
        nu_two_sided(loss, cost, eps)
    } else {
        nu_one_sided(loss, cost, eps)
    }
}

/// Samples `ν_{L,α}` at `grid_size` uniform points of `[0, B_α]`, plus a
/// left/right pair at `b_α` where the two-sided branch hands over to the
/// one-sided one.
pub fn nu_curve(loss: &Loss, cost: CostParam, grid_size: usize) -> Result<SampledCurve> {
    if grid_size < 3 {
        return Err(Error::Domain {
            what: "grid_size",
            value: grid_size as f64,
            expected: "[3, inf)",
        });
    }
    let b = cost.b_max();
    let b_min = cost.b_min();
    let mut knots = Vec::with_capacity(grid_size + 2);
    let mut pair_done = false;
    let push_pair = |knots: &mut Vec<Knot>| -> Result<()> {
        let left = nu_two_sided(loss, cost, b_min)?;
        let right = if cost.alpha() == 0.5 {
            left
        } else {
            nu_one_sided(loss, cost, b_min)?
        };
        knots.push(Knot::new(b_min, left, Side::Left));
        knots.push(Knot::new(b_min, right, Side::Right));
        Ok(())
    };
    for i in 0..grid_size {
        let eps = if i == grid_size - 1 {
            b
        } else {
            b * i as f64 / (grid_size - 1) as f64
        };
        if (eps - b_min).abs() <= DOMAIN_SLACK {
            continue;
        }
        if eps > b_min && !pair_done {
            push_pair(&mut knots)?;
            pair_done = true;
        }
        let value = if eps < b_min {
            nu_two_sided(loss, cost, eps)?
        } else {
            nu_one_sided(loss, cost, eps)?
        };
        knots.push(Knot::new(eps, value, Side::Both));
    }
    if !pair_done {
        push_pair(&mut knots)?;
    }
    SampledCurve::new(b, knots)
}

/// Values on either side of `b_α` in a curve from [`nu_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub has_jump: bool,
    pub left: f64,
    pub right: f64,
}

pub fn jump_at_bmin(curve: &SampledCurve) -> Result<Jump> {
    let pair = curve
        .knots()
        .windows(2)
        .find(|w| w[0].side == Side::Left && w[1].side == Side::Right);
    match pair {
        Some(w) => Ok(Jump {
            has_jump: (w[1].value - w[0].value).abs() > JUMP_TOL,
            left: w[0].value,
            right: w[1].value,
        }),
        None => Err(Error::Domain {
            what: "left/right knot pairs",
            value: 0.0,
            expected: "exactly one",
        }),
    }
}

/// Lower convex hull of the knots (monotone chain). Coincident knots
/// contribute their smaller value.
pub fn biconjugate(curve: &SampledCurve) -> Result<ConvexEnvelope> {
    let knots = curve.knots();
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for k in knots {
        match points.last_mut() {
            Some(last) if last.0 == k.eps => last.1 = last.1.min(k.value),
            _ => points.push((k.eps, k.value)),
        }
    }
    if points.len() < 2 {
        return Err(Error::Domain {
            what: "distinct knot count",
            value: points.len() as f64,
            expected: "[2, inf)",
        });
    }
    if points[0] != (0.0, 0.0) {
        return Err(Error::Invalid(format!(
            "curve: first knot ({}, {}) is not the origin",
            points[0].0, points[0].1
        )));
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(ConvexEnvelope { hull_knots: hull })
}

/// `ψ(ε)` by linear interpolation between hull knots.
pub fn envelope_eval(env: &ConvexEnvelope, eps: f64) -> Result<f64> {
    let max = env.domain_max();
    if !(eps >= -DOMAIN_SLACK && eps <= max + DOMAIN_SLACK) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            expected: "[0, domain_max]",
        });
    }
    let eps = eps.clamp(0.0, max);
    let k = &env.hull_knots;
    let j = k.partition_point(|p| p.0 < eps);
    if j == 0 {
        return Ok(k[0].1);
    }
    let (x0, y0) = k[j - 1];
    let (x1, y1) = k[j];
    if x1 == eps {
        return Ok(y1);
    }
    Ok(y0 + (y1 - y0) * (eps - x0) / (x1 - x0))
}

/// `sup{ε : ψ(ε) ≤ y}`, which is `domain_max` once `y` reaches `ψ(domain_max)`.
pub fn envelope_invert(env: &ConvexEnvelope, y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::Domain {
            what: "y",
            value: y,
            expected: "[0, inf)",
        });
    }
    let k = &env.hull_knots;
    let j = k.partition_point(|p| p.1 <= y);
    if j == k.len() {
        return Ok(env.domain_max());
    }
    // j ≥ 1 since ψ(0) = 0 ≤ y
    let (x0, y0) = k[j - 1];
    let (x1, y1) = k[j];
    Ok(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
}

/// `ψ_{L,α}` built from a `grid_size` sample of `ν_{L,α}`.
pub fn psi_envelope(loss: &Loss, cost: CostParam, grid_size: usize) -> Result<ConvexEnvelope> {
    biconjugate(&nu_curve(loss, cost, grid_size)?)
}

/// Upper bound `ψ⁻¹(surrogate_regret)` on the cost-sensitive regret, capped at `B_α`.
///
/// Fails with [`Error::VacuousBound`] unless the loss is calibrated for `cost`.
pub fn regret_bound(
    loss: &Loss,
    cost: CostParam,
    surrogate_regret: f64,
    grid_size: usize,
) -> Result<f64> {
    if surrogate_regret.is_nan() || surrogate_regret < 0.0 {
        return Err(Error::Domain {
            what: "surrogate_regret",
            value: surrogate_regret,
            expected: "[0, inf)",
        });
    }
    let report = calibration::check_calibrated(loss, cost)?;
    if !report.is_calibrated() {
        return Err(Error::VacuousBound(format!(
            "loss is not calibrated for alpha = {}",
            cost.alpha()
        )));
    }
    let env = psi_envelope(loss, cost, grid_size)?;
    Ok(envelope_invert(&env, surrogate_regret)?.min(cost.b_max()))
}

/// The cost-insensitive transfer function `ψ_L(ε) = ψ_{L,1/2}(ε/2)`, `ε ∈ [0, 1]`.
pub fn psi_costinsensitive(loss: &Loss, eps: f64, grid_size: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            expected: "[0, 1]",
        });
    }
    let env = psi_envelope(loss, CostParam::symmetric(), grid_size)?;
    envelope_eval(&env, 0.5 * eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::alpha_transform;
    use crate::uneven::{make_uneven_loss, Family, UnevenMarginSpec};
    use approx::assert_abs_diff_eq;

    fn loss(spec: UnevenMarginSpec) -> Loss {
        make_uneven_loss(&spec).unwrap()
    }

    fn hinge_weighted(gamma: f64, alpha: f64) -> (Loss, CostParam) {
        let cost = CostParam::new(alpha).unwrap();
        let l = alpha_transform(&loss(UnevenMarginSpec::calibrated(Family::Hinge, gamma)), cost);
        (l, cost)
    }

    fn example_hull() -> ConvexEnvelope {
        let knots = vec![
            Knot::new(0.0, 0.0, Side::Both),
            Knot::new(0.3, 0.15, Side::Left),
            Knot::new(0.3, 0.3, Side::Right),
            Knot::new(0.7, 0.7, Side::Both),
        ];
        biconjugate(&SampledCurve::new(0.7, knots).unwrap()).unwrap()
    }

    #[test]
    fn nu_examples() {
        let (l, c) = hinge_weighted(2.0, 0.3);
        assert_abs_diff_eq!(nu_at(&l, c, 0.2).unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(nu_at(&l, c, 0.5).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(nu_at(&l, c, 0.0).unwrap(), 0.0);
        let curve = nu_curve(&l, c, 2001).unwrap();
        assert_eq!(curve.knots()[0].value, 0.0);
        assert_eq!(curve.domain_max(), 0.7);
        assert!(nu_at(&l, c, 0.8).is_err());
    }

    #[test]
    fn nu_curve_layout() {
        let (l, c) = hinge_weighted(2.0, 0.3);
        let curve = nu_curve(&l, c, 3).unwrap();
        let eps: Vec<f64> = curve.knots().iter().map(|k| k.eps).collect();
        assert_eq!(eps, vec![0.0, 0.3, 0.3, 0.35, 0.7]);
        let sides: Vec<Side> = curve.knots().iter().map(|k| k.side).collect();
        assert_eq!(sides, vec![Side::Both, Side::Left, Side::Right, Side::Both, Side::Both]);

        // b_min on the grid is replaced by the pair rather than duplicated
        let curve = nu_curve(&l, c, 15).unwrap();
        assert_eq!(curve.knots().len(), 16);
        assert!(nu_curve(&l, c, 2).is_err());

        let half = CostParam::symmetric();
        let curve = nu_curve(&l, half, 11).unwrap();
        let n = curve.knots().len();
        assert_eq!(curve.knots()[n - 1].side, Side::Right);
        assert_eq!(curve.knots()[n - 1].eps, 0.5);
    }

    #[test]
    fn jump_examples() {
        let (l, c) = hinge_weighted(2.0, 0.3);
        let j = jump_at_bmin(&nu_curve(&l, c, 101).unwrap()).unwrap();
        assert!(j.has_jump);
        assert_abs_diff_eq!(j.left, 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(j.right, 0.3, epsilon = 1e-12);

        let (l, c) = hinge_weighted(2.0, 0.7);
        assert!(!jump_at_bmin(&nu_curve(&l, c, 101).unwrap()).unwrap().has_jump);
        let (l, c) = hinge_weighted(1.0, 0.5);
        assert!(!jump_at_bmin(&nu_curve(&l, c, 101).unwrap()).unwrap().has_jump);

        let plain = SampledCurve::new(1.0, vec![Knot::new(0.0, 0.0, Side::Both), Knot::new(1.0, 1.0, Side::Both)])
            .unwrap();
        assert!(matches!(jump_at_bmin(&plain), Err(Error::Domain { .. })));
    }

    #[test]
    fn biconjugate_examples() {
        let env = example_hull();
        assert_eq!(env.hull_knots(), &[(0.0, 0.0), (0.3, 0.15), (0.7, 0.7)]);
        assert_abs_diff_eq!(envelope_eval(&env, 0.5).unwrap(), 0.425, epsilon = 1e-15);

        let (l, c) = hinge_weighted(1.0, 0.5);
        let curve = nu_curve(&l, c, 101).unwrap();
        let env = biconjugate(&curve).unwrap();
        for k in curve.knots() {
            assert_abs_diff_eq!(envelope_eval(&env, k.eps).unwrap(), k.eps, epsilon = 1e-12);
        }

        let sq = loss(UnevenMarginSpec::new(Family::Squared, 1.0, 1.0));
        let env = psi_envelope(&sq, CostParam::symmetric(), 2001).unwrap();
        for i in 0..=50 {
            let e = 0.5 * i as f64 / 50.0;
            assert_abs_diff_eq!(envelope_eval(&env, e).unwrap(), 4.0 * e * e, epsilon = 1e-7);
        }
    }

    #[test]
    fn biconjugate_errors() {
        let one = SampledCurve::new(0.0, vec![Knot::new(0.0, 0.0, Side::Both)]).unwrap();
        assert!(matches!(biconjugate(&one), Err(Error::Domain { .. })));
        let lifted = SampledCurve::new(1.0, vec![Knot::new(0.0, 0.1, Side::Both), Knot::new(1.0, 1.0, Side::Both)])
            .unwrap();
        assert!(matches!(biconjugate(&lifted), Err(Error::Invalid(_))));
    }

    #[test]
    fn curve_validation() {
        let k = |e, v, s| Knot::new(e, v, s);
        assert!(SampledCurve::new(1.0, vec![]).is_err());
        assert!(SampledCurve::new(1.0, vec![k(0.0, 0.0, Side::Both), k(0.9, 1.0, Side::Both)]).is_err());
        assert!(SampledCurve::new(1.0, vec![k(0.0, 0.0, Side::Both), k(1.0, -1.0, Side::Both)]).is_err());
        let swapped = vec![
            k(0.0, 0.0, Side::Both),
            k(0.5, 0.3, Side::Right),
            k(0.5, 0.1, Side::Left),
            k(1.0, 1.0, Side::Both),
        ];
        assert!(SampledCurve::new(1.0, swapped).is_err());
    }

    #[test]
    fn eval_and_invert_examples() {
        let env = example_hull();
        assert_abs_diff_eq!(envelope_eval(&env, 0.3).unwrap(), 0.15, epsilon = 1e-15);
        assert_eq!(envelope_eval(&env, 0.0).unwrap(), 0.0);
        assert!(envelope_eval(&env, 0.8).is_err());
        assert!(envelope_eval(&env, -0.1).is_err());

        assert_abs_diff_eq!(envelope_invert(&env, 0.15).unwrap(), 0.3, epsilon = 1e-15);
        assert_eq!(envelope_invert(&env, 0.0).unwrap(), 0.0);
        assert_eq!(envelope_invert(&env, 10.0).unwrap(), 0.7);
        assert!(envelope_invert(&env, -1e-3).is_err());
    }

    #[test]
    fn invert_takes_supremum_on_flat_start() {
        let knots = vec![
            Knot::new(0.0, 0.0, Side::Both),
            Knot::new(0.2, 0.0, Side::Both),
            Knot::new(0.6, 0.4, Side::Both),
        ];
        let env = biconjugate(&SampledCurve::new(0.6, knots).unwrap()).unwrap();
        assert!(!env.is_strictly_increasing());
        assert_eq!(envelope_invert(&env, 0.0).unwrap(), 0.2);
        assert_abs_diff_eq!(envelope_invert(&env, 0.2).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn regret_bound_examples() {
        let (l, c) = hinge_weighted(1.0, 0.3);
        assert_abs_diff_eq!(regret_bound(&l, c, 1.2, 2001).unwrap(), 0.7, epsilon = 1e-12);
        assert_eq!(regret_bound(&l, c, 0.0, 2001).unwrap(), 0.0);

        let sq = loss(UnevenMarginSpec::new(Family::Squared, 1.0, 1.0));
        let b = regret_bound(&sq, CostParam::symmetric(), 0.04, 2001).unwrap();
        assert_abs_diff_eq!(b, 0.1, epsilon = 1e-6);

        let bad = loss(UnevenMarginSpec::new(Family::Hinge, 1.0, 2.0));
        assert!(matches!(
            regret_bound(&bad, CostParam::symmetric(), 0.1, 2001),
            Err(Error::VacuousBound(_))
        ));
        assert!(regret_bound(&sq, CostParam::symmetric(), -0.1, 2001).is_err());
    }

    #[test]
    fn psi_costinsensitive_examples() {
        let sq = loss(UnevenMarginSpec::new(Family::Squared, 1.0, 1.0));
        assert_abs_diff_eq!(psi_costinsensitive(&sq, 0.5, 2001).unwrap(), 0.25, epsilon = 1e-9);
        let hinge = loss(UnevenMarginSpec::new(Family::Hinge, 1.0, 1.0));
        assert_abs_diff_eq!(psi_costinsensitive(&hinge, 0.5, 2001).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(psi_costinsensitive(&hinge, 0.0, 2001).unwrap(), 0.0);
        assert!(psi_costinsensitive(&hinge, 1.5, 2001).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn curve() -> impl Strategy<Value = SampledCurve> {
            prop::collection::vec((0.001f64..1.0, 0.0f64..2.0), 1..60).prop_map(|mut pts| {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                pts.dedup_by(|a, b| a.0 == b.0);
                let max = pts.last().unwrap().0;
                let mut knots = vec![Knot::new(0.0, 0.0, Side::Both)];
                knots.extend(pts.into_iter().map(|(e, v)| Knot::new(e, v, Side::Both)));
                SampledCurve::new(max, knots).unwrap()
            })
        }

        proptest! {
            #[test]
            fn hull_is_convex_monotone_minorant(c in curve()) {
                let env = biconjugate(&c).unwrap();
                let h = env.hull_knots();
                prop_assert_eq!(h[0], (0.0, 0.0));
                let slopes: Vec<f64> = h.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
                prop_assert!(slopes[0] >= 0.0);
                for s in slopes.windows(2) {
                    prop_assert!(s[0] <= s[1] + 1e-12);
                }
                for k in c.knots() {
                    prop_assert!(envelope_eval(&env, k.eps).unwrap() <= k.value + 1e-12);
                }
            }

            #[test]
            fn hull_is_idempotent(c in curve()) {
                let env = biconjugate(&c).unwrap();
                prop_assert_eq!(biconjugate(&env.to_curve()).unwrap(), env);
            }

            #[test]
            fn invert_is_right_inverse(c in curve(), u in 0.0f64..1.0) {
                let env = biconjugate(&c).unwrap();
                let e = u * env.domain_max();
                let y = envelope_eval(&env, e).unwrap();
                if y > 0.0 {
                    prop_assert!(envelope_invert(&env, y).unwrap() >= e - 1e-12);
                }
            }
        }
    }
}
