//! Viewpoint subset selection by a cost-guided RRT* variant.
//!
//! The tree grows over the discrete candidate set. Each iteration samples a
//! random candidate, extends toward it with the unselected candidate closest
//! to the line from the current nearest node, and attaches that candidate
//! under the neighbor whose first-time coverage gives the lowest cost. The
//! search stops as soon as one root path measures every point.

mod graph;
mod weights;

pub use graph::{path_objective, GraphNode, PlanGraph};
pub use weights::{entropy_weights, EntropyWeights};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::candidates::CandidateSet;
use crate::error::{PlanError, Result};
use crate::geometry::{min_distance_point_to_line, MeasurementPoint, Vec3};
use crate::visibility::VisibleMp;

/// What the neighbor contributes to the parent-selection cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborTerm {
    /// Every point first measured along the neighbor's root path. The cost
    /// then scores the whole path through the new viewpoint, which lets
    /// single paths grow long enough to cover the part.
    #[default]
    Path,
    /// Only the points the neighbor itself measured first. Favors shallow
    /// parents with large first-time sets; on compact parts the tree stays
    /// bushy and rarely completes coverage.
    Own,
}

/// Search weights and limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Weight of the mean first-time uncertainty in the objective.
    pub beta1: f64,
    /// Per-viewpoint penalty in the objective.
    pub gamma1: f64,
    /// Weight of the mean uncertainty in the parent-selection cost.
    pub beta2: f64,
    /// Weight of the combined new-coverage count in the parent-selection
    /// cost. Negative values reward coverage.
    pub gamma2: f64,
    /// Minimum distance between an extension and the current nearest node,
    /// mm. Defaults to the far-FOV width.
    pub spacing: Option<f64>,
    /// Neighborhood radius, mm. Defaults to twice the spacing.
    pub radius: Option<f64>,
    pub max_iterations: usize,
    /// Refresh the nearest node from the random sample before extending,
    /// instead of reusing the one found in the previous iteration.
    pub refresh_before_extend: bool,
    pub neighbor_term: NeighborTerm,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            beta1: 1.0,
            gamma1: 0.05,
            beta2: 1.0,
            gamma2: -0.02,
            spacing: None,
            radius: None,
            max_iterations: 5000,
            refresh_before_extend: false,
            neighbor_term: NeighborTerm::Path,
        }
    }
}

impl SamplerConfig {
    pub fn spacing_for(&self, far_width: f64) -> f64 {
        self.spacing.unwrap_or(far_width)
    }

    pub fn radius_for(&self, far_width: f64) -> f64 {
        self.radius.unwrap_or(2.0 * self.spacing_for(far_width))
    }

    pub fn validate(&self, far_width: f64) -> Result<()> {
        if !(self.beta1 > 0.0 && self.beta2 > 0.0) {
            return Err(PlanError::Config("sampler weights beta1 and beta2 must be positive".into()));
        }
        if !(self.spacing_for(far_width) > 0.0 && self.radius_for(far_width) > 0.0) {
            return Err(PlanError::Config("sampler spacing and radius must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(PlanError::Config("sampler max_iterations must be at least 1".into()));
        }
        if ![self.gamma1, self.gamma2].iter().all(|w| w.is_finite()) {
            return Err(PlanError::Config("sampler weights must be finite".into()));
        }
        Ok(())
    }
}

/// Parent-selection cost of attaching `q_new` below a neighbor.
///
/// `new_u` lists the uncertainties of points `q_new` would measure first
/// under that parent, `near_u` those credited to the neighbor (see
/// [`NeighborTerm`]).
pub fn cost(new_u: &[f64], near_u: &[f64], beta2: f64, gamma2: f64) -> Result<f64> {
    cost_from_sums(
        new_u.iter().sum::<f64>() + near_u.iter().sum::<f64>(),
        new_u.len() + near_u.len(),
        beta2,
        gamma2,
    )
}

fn cost_from_sums(sum: f64, count: usize, beta2: f64, gamma2: f64) -> Result<f64> {
    if count == 0 {
        return Err(PlanError::DegenerateCost);
    }
    Ok(beta2 * sum / count as f64 + gamma2 * count as f64)
}

/// Picks the unselected candidate farther than `spacing` from `q_nearest`
/// that lies closest to the line through `q_rand` and `q_nearest`.
///
/// When the two points coincide the line is undefined and the plain
/// distance to `q_rand` is used. Ties go to the lowest index. Returns
/// `None` when every unselected candidate is within `spacing`.
pub fn extend(
    q_rand: &Vec3,
    q_nearest: &Vec3,
    positions: &[Vec3],
    selected: &FixedBitSet,
    spacing: f64,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in positions.iter().enumerate() {
        if selected.contains(i) || (p - q_nearest).norm() <= spacing {
            continue;
        }
        let d = min_distance_point_to_line(q_rand, q_nearest, p).unwrap_or_else(|_| (p - q_rand).norm());
        if best.is_none_or(|(_, d0)| d < d0) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Read-only view the search needs for cost evaluation.
struct Search<'a> {
    candidates: &'a CandidateSet,
    cfg: &'a SamplerConfig,
    radius: f64,
}

impl Search<'_> {
    /// Points candidate `c` would measure first below `node`.
    fn new_under(&self, graph: &PlanGraph, node: usize, c: usize) -> Vec<VisibleMp> {
        let covered = &graph.node(node).covered;
        self.candidates.visible[c]
            .entries
            .iter()
            .filter(|e| !covered.contains(e.mp))
            .copied()
            .collect()
    }

    /// Cost of `c` below `node`, or `None` if `c` would add nothing there.
    fn cost_under(&self, graph: &PlanGraph, node: usize, c: usize) -> Option<f64> {
        let fresh = self.new_under(graph, node, c);
        if fresh.is_empty() {
            return None;
        }
        let n = graph.node(node);
        let (near_sum, near_count) = match self.cfg.neighbor_term {
            NeighborTerm::Path => (n.path_u_sum, n.covered_count()),
            NeighborTerm::Own => (n.new_uncertainties().sum::<f64>(), n.new_count()),
        };
        let sum = fresh.iter().map(|e| e.u_sen).sum::<f64>() + near_sum;
        cost_from_sums(sum, fresh.len() + near_count, self.cfg.beta2, self.cfg.gamma2).ok()
    }

    fn neighbors(&self, graph: &PlanGraph, at: &Vec3) -> Vec<usize> {
        (0..graph.len())
            .filter(|&i| (graph.node(i).position - at).norm() < self.radius)
            .collect()
    }

    /// Lowest-cost node within the radius; the Euclidean-nearest node if
    /// none there can take `c`.
    fn find_best_neighbor(&self, graph: &PlanGraph, c: usize) -> usize {
        let at = self.candidates.viewpoints[c].position;
        let mut best: Option<(usize, f64)> = None;
        for i in self.neighbors(graph, &at) {
            if let Some(k) = self.cost_under(graph, i, c) {
                if best.is_none_or(|(_, k0)| cheaper(k, k0)) {
                    best = Some((i, k));
                }
            }
        }
        best.map(|(i, _)| i).unwrap_or_else(|| nearest_node(graph, &at))
    }

    /// Parent for `c`: `q_nearest` unless a neighbor is strictly cheaper.
    /// `None` if no candidate parent leaves `c` anything new to measure.
    fn choose_parent(&self, graph: &PlanGraph, near: &[usize], c: usize, q_nearest: usize) -> Option<usize> {
        let mut best = self.cost_under(graph, q_nearest, c).map(|k| (q_nearest, k));
        for &i in near {
            if let Some(k) = self.cost_under(graph, i, c) {
                if best.is_none_or(|(_, k0)| cheaper(k, k0)) {
                    best = Some((i, k));
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Relative gap below which two costs count as equal. Means of identical
/// uncertainties differ in the last bits depending on how many are summed.
const COST_TIE: f64 = 1e-12;

fn cheaper(k: f64, k0: f64) -> bool {
    k < k0 - COST_TIE * k.abs().max(k0.abs())
}

fn nearest_node(graph: &PlanGraph, at: &Vec3) -> usize {
    let mut best = (PlanGraph::ROOT, f64::INFINITY);
    for (i, n) in graph.nodes().iter().enumerate() {
        let d = (n.position - at).norm();
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Public form of the neighbor search, for inspection and testing.
pub fn find_best_neighbor(graph: &PlanGraph, candidates: &CandidateSet, c: usize, cfg: &SamplerConfig, radius: f64) -> usize {
    Search { candidates, cfg, radius }.find_best_neighbor(graph, c)
}

/// Public form of the parent choice, for inspection and testing.
pub fn choose_parent(
    graph: &PlanGraph,
    candidates: &CandidateSet,
    near: &[usize],
    c: usize,
    q_nearest: usize,
    cfg: &SamplerConfig,
) -> Option<usize> {
    Search {
        candidates,
        cfg,
        radius: 0.0,
    }
    .choose_parent(graph, near, c, q_nearest)
}

/// Result of a search, complete or not.
#[derive(Debug, Clone)]
pub struct SamplerRun {
    pub graph: PlanGraph,
    pub iterations: usize,
    /// Iterations in which no candidate lay beyond the spacing.
    pub extension_failures: usize,
}

impl SamplerRun {
    pub fn is_complete(&self) -> bool {
        self.graph.best.is_some()
    }

    /// Points missing from the most covering root path.
    pub fn uncovered(&self) -> Vec<usize> {
        let covered = &self.graph.node(self.graph.most_covering()).covered;
        (0..self.graph.n_mps()).filter(|&i| !covered.contains(i)).collect()
    }

    /// The graph if coverage is complete, else a coverage failure naming the
    /// missing points.
    pub fn require_complete(self, mps: &[MeasurementPoint]) -> Result<PlanGraph> {
        if self.is_complete() {
            return Ok(self.graph);
        }
        Err(PlanError::CoverageFailure {
            iterations: self.iterations,
            uncovered: self.uncovered().into_iter().map(|i| mps[i].id.clone()).collect(),
        })
    }
}

/// Grows the search tree from `home` until one root path covers all
/// `n_mps` points or the iteration limit is hit.
///
/// Candidates are taken as already accessible and collision-free. When an
/// extension fails the nearest node is reset to the root so the next
/// iteration can branch out again.
pub fn plan_viewpoints(
    candidates: &CandidateSet,
    n_mps: usize,
    home: Vec3,
    cfg: &SamplerConfig,
    far_width: f64,
    seed: u64,
) -> Result<SamplerRun> {
    cfg.validate(far_width)?;
    if candidates.is_empty() {
        return Err(PlanError::Config("no candidate viewpoints".into()));
    }
    let spacing = cfg.spacing_for(far_width);
    let search = Search {
        candidates,
        cfg,
        radius: cfg.radius_for(far_width),
    };
    let positions: Vec<Vec3> = candidates.viewpoints.iter().map(|v| v.position).collect();
    let mut graph = PlanGraph::new(home, n_mps);
    let mut run = SamplerRun {
        graph: graph.clone(),
        iterations: 0,
        extension_failures: 0,
    };
    if n_mps == 0 {
        graph.best = Some(PlanGraph::ROOT);
        run.graph = graph;
        return Ok(run);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = FixedBitSet::with_capacity(candidates.len());
    let mut q_nearest = PlanGraph::ROOT;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let q_rand = rng.gen_range(0..candidates.len());
        if cfg.refresh_before_extend {
            q_nearest = search.find_best_neighbor(&graph, q_rand);
        }
        let Some(q_new) = extend(&positions[q_rand], &graph.node(q_nearest).position, &positions, &selected, spacing)
        else {
            run.extension_failures += 1;
            q_nearest = PlanGraph::ROOT;
            continue;
        };
        q_nearest = search.find_best_neighbor(&graph, q_new);
        let near = search.neighbors(&graph, &positions[q_new]);
        let Some(parent) = search.choose_parent(&graph, &near, q_new, q_nearest) else {
            continue;
        };
        let fresh = search.new_under(&graph, parent, q_new);
        let node = graph.attach(parent, q_new, positions[q_new], fresh);
        selected.insert(q_new);
        if graph.is_complete(node) {
            graph.best = Some(node);
            break;
        }
    }
    run.graph = graph;
    run.iterations = iterations;
    Ok(run)
}
