//! Calibration diagnostics and surrogate regret bounds for binary
//! classification losses under label-dependent costs.
//!
//! A [`Loss`] is a pair of partial losses. For a cost `α ∈ (0, 1)` the crate
//! computes the calibration gap `H_{L,α}`, decides whether the loss is
//! calibrated for `α`, samples `ν_{L,α}`, hulls it into the transfer function
//! `ψ_{L,α}`, and inverts `ψ` to bound cost-sensitive regret by surrogate regret.
//!
//! ```
//! use surrogate_regret::{envelope, make_uneven_loss, CostParam, Family, UnevenMarginSpec};
//!
//! let loss = make_uneven_loss(&UnevenMarginSpec::new(Family::Squared, 1.0, 1.0))?;
//! let bound = envelope::regret_bound(&loss, CostParam::symmetric(), 0.04, 2001)?;
//! assert!((bound - 0.1).abs() < 1e-6);
//! # Ok::<(), surrogate_regret::Error>(())
//! ```

pub mod calibration;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod loss;
pub mod oracle;
pub mod suites;
pub mod uneven;

pub use calibration::{CalibrationReport, ExtendedValue, Method, Verdict};
pub use envelope::{ConvexEnvelope, Knot, SampledCurve, Side};
pub use error::{Error, Result};
pub use loss::{
    alpha_transform, conditional_risk, constrained_optimal_risk, cost_regret,
    cost_sensitive_loss, h_alpha, h_cc, optimal_conditional_risk, theta_alpha, CostParam,
    ExtendedScore, Loss, PartialLoss, ScoreRegion,
};
pub use oracle::{BoundTrialRecord, DecisionAssignment, FiniteDistribution};
pub use uneven::{make_uneven_loss, Family, UnevenMarginSpec};
