//! Branch weights for the stochastic-derivative estimator.
//!
//! A weight is the infinitesimal rate at which the realized accept/reject
//! decision would flip under a parameter perturbation, divided by the
//! probability of the realized branch. The pruning step keeps a single
//! tracked alternative, selected with probability proportional to weight.

use crate::dual::DualValue;
use crate::error::{Error, Result};
use crate::stream::RandomStream;

/// Nonnegative accumulated weight of the tracked alternative branch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BranchWeight(f64);

impl BranchWeight {
    pub const ZERO: BranchWeight = BranchWeight(0.0);

    pub fn new(w: f64) -> Self {
        debug_assert!(w >= 0.0 && w.is_finite(), "invalid branch weight {w}");
        BranchWeight(w)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

/// Weight of flipping the realized accept/reject decision.
///
/// Accepted steps weigh the rejection alternative by `max(0, -d alpha) / alpha`;
/// rejected steps weigh the acceptance alternative by `max(0, d alpha) / (1 - alpha)`.
pub fn flip_weight(alpha: DualValue, accepted: bool) -> Result<BranchWeight> {
    debug_assert!((0.0..=1.0).contains(&alpha.value));
    let (numer, denom) = if accepted {
        ((-alpha.deriv).max(0.0), alpha.value)
    } else {
        (alpha.deriv.max(0.0), 1.0 - alpha.value)
    };
    if numer == 0.0 {
        // No flip in this direction; avoids 0/0 when the branch is sure.
        return Ok(BranchWeight::ZERO);
    }
    if denom <= 0.0 {
        return Err(Error::ImpossibleBranch {
            alpha: alpha.value,
            accepted,
        });
    }
    Ok(BranchWeight::new(numer / denom))
}

/// Stochastically select between the previously tracked alternative and the
/// new one, with probability proportional to weight. Returns the combined
/// weight and whether the new alternative was taken. A zero combined weight
/// never selects the new branch.
pub fn prune(
    w_prev: BranchWeight,
    w_new: BranchWeight,
    stream: &mut RandomStream,
) -> (BranchWeight, bool) {
    let combined = BranchWeight::new(w_prev.get() + w_new.get());
    let pick = stream.uniform();
    let take_new = pick * combined.get() < w_new.get();
    (combined, take_new)
}
