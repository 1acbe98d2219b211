use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::error::{PlanError, Result};
use crate::geometry::{MeasurementPoint, Vec3};
use crate::visibility::VisibleMp;

/// One selected viewpoint in the search tree.
#[derive(Debug, Clone)]
pub struct GraphNode {
    /// Candidate id, `None` for the home pose at the root.
    pub candidate: Option<usize>,
    pub position: Vec3,
    pub parent: Option<usize>,
    /// Points this node measures for the first time along its root path.
    pub new_mps: Vec<VisibleMp>,
    /// Union of `new_mps` over the root path, root included.
    pub covered: FixedBitSet,
    /// Sum of first-time uncertainties over the root path.
    pub path_u_sum: f64,
}

impl GraphNode {
    pub fn new_count(&self) -> usize {
        self.new_mps.len()
    }

    pub fn new_uncertainties(&self) -> impl Iterator<Item = f64> + '_ {
        self.new_mps.iter().map(|e| e.u_sen)
    }

    pub fn covered_count(&self) -> usize {
        self.covered.count_ones(..)
    }
}

/// Tree of selected viewpoints rooted at the home pose.
#[derive(Debug, Clone)]
pub struct PlanGraph {
    nodes: Vec<GraphNode>,
    n_mps: usize,
    /// Node whose root path covers every point, once found.
    pub best: Option<usize>,
}

impl PlanGraph {
    pub fn new(home: Vec3, n_mps: usize) -> Self {
        PlanGraph {
            nodes: vec![GraphNode {
                candidate: None,
                position: home,
                parent: None,
                new_mps: Vec::new(),
                covered: FixedBitSet::with_capacity(n_mps),
                path_u_sum: 0.0,
            }],
            n_mps,
            best: None,
        }
    }

    pub const ROOT: usize = 0;

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &GraphNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_mps(&self) -> usize {
        self.n_mps
    }

    /// Adds a child of `parent` that first measures `new_mps`; returns the
    /// new node's index.
    pub fn attach(&mut self, parent: usize, candidate: usize, position: Vec3, new_mps: Vec<VisibleMp>) -> usize {
        let mut covered = self.nodes[parent].covered.clone();
        let path_u_sum = self.nodes[parent].path_u_sum + new_mps.iter().map(|e| e.u_sen).sum::<f64>();
        for e in &new_mps {
            debug_assert!(!covered.contains(e.mp));
            covered.insert(e.mp);
        }
        self.nodes.push(GraphNode {
            candidate: Some(candidate),
            position,
            parent: Some(parent),
            new_mps,
            covered,
            path_u_sum,
        });
        self.nodes.len() - 1
    }

    pub fn is_complete(&self, node: usize) -> bool {
        self.nodes[node].covered_count() == self.n_mps
    }

    /// Node indices from the first child of the root down to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = Some(node);
        while let Some(i) = cur {
            if i != Self::ROOT {
                path.push(i);
            }
            cur = self.nodes[i].parent;
        }
        path.reverse();
        path
    }

    /// Node with the largest root-path coverage, lowest index on ties.
    pub fn most_covering(&self) -> usize {
        let mut best = Self::ROOT;
        for i in 1..self.nodes.len() {
            if self.nodes[i].covered_count() > self.nodes[best].covered_count() {
                best = i;
            }
        }
        best
    }

    /// Path used for reporting: to `best` if complete, else to the most
    /// covering node.
    pub fn final_path(&self) -> Vec<usize> {
        self.path_to(self.best.unwrap_or_else(|| self.most_covering()))
    }

    /// Candidate ids along [`final_path`](Self::final_path).
    pub fn selected_candidates(&self) -> Vec<usize> {
        self.final_path()
            .into_iter()
            .filter_map(|i| self.nodes[i].candidate)
            .collect()
    }

    /// Weighted objective of the final path.
    pub fn objective(&self, beta1: f64, gamma1: f64) -> Result<f64> {
        let path = self.final_path();
        let groups: Vec<Vec<f64>> = path
            .iter()
            .map(|&i| self.nodes[i].new_uncertainties().collect())
            .collect();
        path_objective(&groups, beta1, gamma1).map_err(|e| match e {
            PlanError::InvalidGraph { node } => PlanError::InvalidGraph { node: path[node] },
            other => other,
        })
    }

    /// Checks the tree invariants: parents precede children, every non-root
    /// node adds coverage, and coverage sets nest along edges.
    pub fn validate(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let p = n.parent.filter(|&p| p < i).ok_or(PlanError::InvalidGraph { node: i })?;
            if n.new_mps.is_empty() {
                return Err(PlanError::InvalidGraph { node: i });
            }
            let mut expect = self.nodes[p].covered.clone();
            for e in &n.new_mps {
                if expect.put(e.mp) {
                    return Err(PlanError::InvalidGraph { node: i });
                }
            }
            if expect != n.covered {
                return Err(PlanError::InvalidGraph { node: i });
            }
        }
        Ok(())
    }

    /// Line-oriented dump of the whole tree and its final path.
    pub fn to_text(&self, mps: &[MeasurementPoint], objective: f64) -> String {
        let mut out = String::from("# scanplan-graph v1\n");
        let _ = writeln!(out, "nodes {}", self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
            let cand = n.candidate.map_or("home".to_string(), |c| c.to_string());
            let ids: Vec<&str> = n.new_mps.iter().map(|e| mps[e.mp].id.as_str()).collect();
            let _ = writeln!(
                out,
                "node {i} parent {parent} candidate {cand} pos {:.6} {:.6} {:.6} new {} {}",
                n.position.x,
                n.position.y,
                n.position.z,
                n.new_count(),
                if ids.is_empty() { "-".to_string() } else { ids.join(",") }
            );
        }
        let best = self.best.map_or("-".to_string(), |b| b.to_string());
        let path: Vec<String> = self.final_path().iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "best {best}");
        let _ = writeln!(out, "path {}", path.join(" "));
        let _ = writeln!(out, "objective {objective:.9}");
        out
    }
}

/// `beta1 * sum of per-viewpoint mean first-time uncertainty + gamma1 * m`,
/// where `groups[i]` lists the uncertainties first measured by viewpoint `i`.
pub fn path_objective(groups: &[Vec<f64>], beta1: f64, gamma1: f64) -> Result<f64> {
    let mut total = 0.0;
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(PlanError::InvalidGraph { node: i });
        }
        total += g.iter().sum::<f64>() / g.len() as f64;
    }
    Ok(beta1 * total + gamma1 * groups.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vm(mp: usize, u: f64) -> VisibleMp {
        VisibleMp { mp, angle: 0.0, u_sen: u }
    }

    #[test]
    fn objective_examples() {
        assert!((path_objective(&[vec![0.05]], 1.0, 1.0).unwrap() - 1.05).abs() < 1e-12);
        assert_eq!(path_objective(&[vec![0.3, 0.1], vec![0.2]], 0.0, 0.25).unwrap(), 0.5);
        assert!((path_objective(&[vec![0.04], vec![0.06]], 1.0, 0.0).unwrap() - 0.10).abs() < 1e-12);
        assert!(matches!(
            path_objective(&[vec![0.04], vec![]], 1.0, 0.0),
            Err(PlanError::InvalidGraph { node: 1 })
        ));
    }

    #[test]
    fn paths_and_coverage_nest() {
        let mut g = PlanGraph::new(Vec3::zeros(), 4);
        let a = g.attach(PlanGraph::ROOT, 7, Vec3::x(), vec![vm(0, 0.04), vm(2, 0.05)]);
        let b = g.attach(a, 3, Vec3::y(), vec![vm(1, 0.06)]);
        let c = g.attach(PlanGraph::ROOT, 5, Vec3::z(), vec![vm(3, 0.04)]);
        g.validate().unwrap();
        assert_eq!(g.path_to(b), vec![a, b]);
        assert_eq!(g.path_to(c), vec![c]);
        assert_eq!(g.most_covering(), b);
        assert!(!g.is_complete(b));
        let d = g.attach(b, 9, Vec3::zeros(), vec![vm(3, 0.07)]);
        assert!(g.is_complete(d));
        g.best = Some(d);
        assert_eq!(g.selected_candidates(), vec![7, 3, 9]);
        let f = g.objective(1.0, 0.0).unwrap();
        assert!((f - (0.045 + 0.06 + 0.07)).abs() < 1e-12);
    }

    #[test]
    fn text_dump_lists_every_node() {
        let mps: Vec<MeasurementPoint> = (0..2)
            .map(|i| {
                MeasurementPoint::new(
                    format!("p{i}"),
                    Vec3::zeros(),
                    Vec3::z(),
                    crate::geometry::MpKind::Hole,
                    1.0,
                    true,
                )
                .unwrap()
            })
            .collect();
        let mut g = PlanGraph::new(Vec3::zeros(), 2);
        let a = g.attach(0, 4, Vec3::new(1.0, 2.0, 3.0), vec![vm(0, 0.04), vm(1, 0.05)]);
        g.best = Some(a);
        let text = g.to_text(&mps, 0.1);
        assert!(text.starts_with("# scanplan-graph v1\nnodes 2\n"));
        assert!(text.contains("node 0 parent - candidate home"));
        assert!(text.contains("node 1 parent 0 candidate 4 pos 1.000000 2.000000 3.000000 new 2 p0,p1"));
        assert!(text.ends_with("best 1\npath 1\nobjective 0.100000000\n"));
    }
}
