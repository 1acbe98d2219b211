//! Initial candidate viewpoints: for every voxel, poses sampled inside the
//! admissible incidence cone at the sensor stand-off, with roll variants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::geometry::{frame_from_axis, MeasurementPoint, Vec3, Voxel};
use crate::uncertainty::UncertaintyBudget;
use crate::visibility::{Viewpoint, Visibility, VisibleSet};

/// Sampling density of the per-voxel pose grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateGrid {
    /// Incident-angle rings, including normal incidence. Ring `i` of `n`
    /// sits at `i / n` of the voxel's admissible angle.
    pub rings: usize,
    /// Azimuth samples around the voxel normal on each tilted ring.
    pub azimuths: usize,
    /// Stand-off samples; one means the nominal scan depth only.
    pub depths: usize,
    /// Roll angles, degrees.
    pub rolls_deg: Vec<f64>,
}

impl Default for CandidateGrid {
    fn default() -> Self {
        CandidateGrid {
            rings: 3,
            azimuths: 8,
            depths: 1,
            rolls_deg: vec![0.0, 90.0, 180.0, 270.0],
        }
    }
}

impl CandidateGrid {
    pub fn validate(&self) -> Result<()> {
        if self.rings == 0 || self.azimuths == 0 || self.depths == 0 || self.rolls_deg.is_empty() {
            return Err(PlanError::Config("candidate grid dimensions must be positive".into()));
        }
        Ok(())
    }

    /// Stand-off depths. Multiple samples spread over the middle half of the
    /// depth of field so that points off the voxel center stay in range.
    fn depth_samples(&self, scan_depth: f64, dof: f64) -> Vec<f64> {
        if self.depths == 1 {
            return vec![scan_depth];
        }
        (0..self.depths)
            .map(|j| scan_depth + dof * 0.5 * (j as f64 / (self.depths - 1) as f64 - 0.5))
            .collect()
    }

    /// (tilt, azimuth) pairs; normal incidence appears once.
    fn directions(&self, max_angle: f64) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0)];
        for i in 1..self.rings {
            let tilt = max_angle * i as f64 / self.rings as f64;
            if tilt == 0.0 {
                continue;
            }
            for k in 0..self.azimuths {
                out.push((tilt, std::f64::consts::TAU * k as f64 / self.azimuths as f64));
            }
        }
        out
    }
}

/// Candidate viewpoints with their visible sets, indexed by viewpoint id.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub viewpoints: Vec<Viewpoint>,
    /// All four gates.
    pub visible: Vec<VisibleSet>,
    /// Without the per-point uncertainty gate.
    pub ungated: Vec<VisibleSet>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.viewpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.viewpoints.is_empty()
    }

    /// Builds a set from explicit viewpoints and precomputed visible sets.
    /// Ungated sets default to the gated ones.
    pub fn from_parts(viewpoints: Vec<Viewpoint>, visible: Vec<VisibleSet>) -> Self {
        let ungated = visible.clone();
        CandidateSet {
            viewpoints,
            visible,
            ungated,
        }
    }

    /// Measurement point indices (out of `n_mps`) that no candidate covers.
    pub fn uncovered(&self, n_mps: usize, gated: bool) -> Vec<usize> {
        let sets = if gated { &self.visible } else { &self.ungated };
        let mut seen = vec![false; n_mps];
        for s in sets {
            for m in s.mps() {
                seen[m] = true;
            }
        }
        (0..n_mps).filter(|&i| !seen[i]).collect()
    }
}

/// Samples feasible candidate poses for every voxel.
///
/// Poses failing accessibility or collision, or that do not measure their
/// own voxel's point within budget, are dropped. Ids follow
/// (voxel, grid index) order.
pub fn generate_candidates(
    voxels: &[Voxel],
    mps: &[MeasurementPoint],
    budgets: &[UncertaintyBudget],
    grid: &CandidateGrid,
    vis: &Visibility<'_>,
) -> Result<CandidateSet> {
    grid.validate()?;
    let depths = grid.depth_samples(vis.sensor.scan_depth, vis.sensor.dof);

    let per_voxel: Vec<Vec<(Viewpoint, VisibleSet)>> = voxels
        .par_iter()
        .map(|voxel| {
            let budget = &budgets[voxel.mp];
            let mut kept = Vec::new();
            for (tilt, azimuth) in grid.directions(budget.max_angle) {
                let dir = cone_direction(&voxel.normal, tilt, azimuth);
                for &depth in &depths {
                    for &roll in &grid.rolls_deg {
                        let mut vp = Viewpoint::new(0, voxel.center + dir * depth, -dir, roll.to_radians());
                        vp.voxel = Some(voxel.id);
                        let set = vis.determination_set(&vp, mps, budgets);
                        if set.contains(voxel.mp) {
                            kept.push((vp, set));
                        }
                    }
                }
            }
            kept
        })
        .collect();

    if let Some(i) = per_voxel.iter().position(Vec::is_empty) {
        return Err(PlanError::UncoverableVoxel { voxel: voxels[i].id });
    }

    let mut viewpoints = Vec::new();
    let mut visible = Vec::new();
    for (vp, mut set) in per_voxel.into_iter().flatten() {
        let id = viewpoints.len();
        set.viewpoint = id;
        viewpoints.push(Viewpoint { id, ..vp });
        visible.push(set);
    }
    let ungated = viewpoints.par_iter().map(|vp| vis.ungated_set(vp, mps)).collect();
    Ok(CandidateSet {
        viewpoints,
        visible,
        ungated,
    })
}

/// Evaluates the visible sets of arbitrary viewpoints and checks that
/// together they cover every measurement point.
pub fn cache_visible_sets(
    viewpoints: Vec<Viewpoint>,
    mps: &[MeasurementPoint],
    budgets: &[UncertaintyBudget],
    vis: &Visibility<'_>,
) -> Result<CandidateSet> {
    if viewpoints.is_empty() {
        return Err(PlanError::Config("no candidate viewpoints".into()));
    }
    let visible = viewpoints
        .par_iter()
        .map(|vp| vis.determination_set(vp, mps, budgets))
        .collect();
    let ungated = viewpoints.par_iter().map(|vp| vis.ungated_set(vp, mps)).collect();
    let set = CandidateSet {
        viewpoints,
        visible,
        ungated,
    };
    let missing = set.uncovered(mps.len(), true);
    if !missing.is_empty() {
        return Err(PlanError::IncompleteCoverage {
            missing: missing.into_iter().map(|i| mps[i].id.clone()).collect(),
        });
    }
    Ok(set)
}

/// Direction of a pose tilted `tilt` from `normal` at `azimuth`, in the
/// frame used by the candidate grid.
pub fn cone_direction(normal: &Vec3, tilt: f64, azimuth: f64) -> Vec3 {
    let [t1, t2, n] = frame_from_axis(normal);
    n * tilt.cos() + (t1 * azimuth.cos() + t2 * azimuth.sin()) * tilt.sin()
}
