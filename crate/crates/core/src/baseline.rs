//! Greedy target-sampling benchmark: repeatedly take the candidate that
//! measures the most points not yet measured, preferring short moves.
//!
//! This approximates a viewpoint-count plus path-length objective with
//! greedy max coverage and path-aware tie-breaking. It can run with or
//! without the per-point uncertainty gate.

use crate::candidates::CandidateSet;
use crate::error::{PlanError, Result};
use crate::geometry::{MeasurementPoint, Vec3};

/// Candidate ids in pick order.
///
/// With `gated` the four-gate visible sets are used; otherwise the sets
/// that ignore the uncertainty budgets. Ties on new coverage go to the
/// candidate closer to the previous pick (`home` for the first), then to
/// the lowest id.
pub fn greedy_target_sampling(
    candidates: &CandidateSet,
    mps: &[MeasurementPoint],
    home: &Vec3,
    gated: bool,
) -> Result<Vec<usize>> {
    let sets = if gated { &candidates.visible } else { &candidates.ungated };
    let missing = candidates.uncovered(mps.len(), gated);
    if !missing.is_empty() {
        return Err(PlanError::CoverageFailure {
            iterations: 0,
            uncovered: missing.into_iter().map(|i| mps[i].id.clone()).collect(),
        });
    }

    let mut covered = vec![false; mps.len()];
    let mut left = mps.len();
    let mut picks = Vec::new();
    let mut last = *home;
    while left > 0 {
        let mut best: Option<(usize, usize, f64)> = None;
        for (c, set) in sets.iter().enumerate() {
            let gain = set.mps().filter(|&m| !covered[m]).count();
            if gain == 0 {
                continue;
            }
            let dist = (candidates.viewpoints[c].position - last).norm();
            let better = match best {
                None => true,
                Some((_, g, d)) => gain > g || (gain == g && dist < d),
            };
            if better {
                best = Some((c, gain, dist));
            }
        }
        // the coverage check above guarantees progress
        let (c, gain, _) = best.expect("uncovered point with no candidate");
        for m in sets[c].mps() {
            covered[m] = true;
        }
        left -= gain;
        picks.push(c);
        last = candidates.viewpoints[c].position;
    }
    Ok(picks)
}
