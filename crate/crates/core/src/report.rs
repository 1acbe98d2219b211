//! Plan evaluation and the text artifacts: plan and metrics documents,
//! search-tree dump, strategy comparison, and the uncertainty heatmap.
//!
//! Every document starts with a versioned header line and prints floats with
//! a fixed number of decimals so that reruns can be diffed byte for byte.

use std::fmt::Write as _;

use crate::config::Strategy;
use crate::geometry::{MeasurementPoint, MpKind, TriangleMesh};
use crate::pipeline::PlanOutcome;
use crate::sampler::PlanGraph;
use crate::uncertainty::{combined_uncertainty, complies, UncertaintyParams};

/// Counts of values per bin. Bin `i` is `[edges[i], edges[i + 1])`, except
/// the last, which also takes its upper edge so the curve maximum lands
/// inside.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Values below the first edge.
    pub under: usize,
    /// Values above the last edge.
    pub over: usize,
}

impl Histogram {
    pub fn new(edges: &[f64], values: impl IntoIterator<Item = f64>) -> Self {
        let mut h = Histogram {
            edges: edges.to_vec(),
            counts: vec![0; edges.len().saturating_sub(1)],
            under: 0,
            over: 0,
        };
        for v in values {
            h.add(v);
        }
        h
    }

    fn add(&mut self, v: f64) {
        let last = *self.edges.last().unwrap();
        if v < self.edges[0] {
            self.under += 1;
        } else if v > last {
            self.over += 1;
        } else if v == last {
            *self.counts.last_mut().unwrap() += 1;
        } else {
            let i = self.edges.partition_point(|e| *e <= v) - 1;
            self.counts[i] += 1;
        }
    }

    /// Bin label, edges printed as configured.
    pub fn label(&self, i: usize) -> String {
        let close = if i + 2 == self.edges.len() { ']' } else { ')' };
        format!("[{},{}{}", self.edges[i], self.edges[i + 1], close)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.under + self.over
    }
}

/// Per-kind summary.
#[derive(Debug, Clone, PartialEq)]
pub struct KindMetrics {
    pub kind: MpKind,
    pub count: usize,
    /// Mean achieved sensor uncertainty over measured points, mm.
    pub mean_u: Option<f64>,
    pub compliant: usize,
}

impl KindMetrics {
    pub fn ratio(&self) -> Option<f64> {
        (self.count > 0).then(|| self.compliant as f64 / self.count as f64)
    }
}

/// Summary of one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub strategy: Strategy,
    pub seed: u64,
    pub n_mps: usize,
    pub n_candidates: usize,
    pub viewpoints: usize,
    pub total_time: f64,
    pub unmeasured: usize,
    pub compliant: usize,
    pub kinds: Vec<KindMetrics>,
    pub histogram: Histogram,
}

impl Metrics {
    /// A point complies when it is measured and its achieved uncertainty
    /// keeps `k * U` within `T / 8`.
    pub fn compute(outcome: &PlanOutcome, mps: &[MeasurementPoint], params: &UncertaintyParams, bins: &[f64]) -> Self {
        let ok: Vec<bool> = mps
            .iter()
            .zip(&outcome.achieved)
            .map(|(mp, a)| a.is_some_and(|a| complies(a.u_sen, mp.tolerance, params)))
            .collect();
        let kinds = MpKind::ALL
            .iter()
            .map(|&kind| {
                let idx: Vec<usize> = (0..mps.len()).filter(|&i| mps[i].kind == kind).collect();
                let us: Vec<f64> = idx.iter().filter_map(|&i| outcome.achieved[i].map(|a| a.u_sen)).collect();
                KindMetrics {
                    kind,
                    count: idx.len(),
                    mean_u: (!us.is_empty()).then(|| us.iter().sum::<f64>() / us.len() as f64),
                    compliant: idx.iter().filter(|&&i| ok[i]).count(),
                }
            })
            .collect();
        Metrics {
            strategy: outcome.strategy,
            seed: outcome.seed,
            n_mps: mps.len(),
            n_candidates: outcome.n_candidates,
            viewpoints: outcome.viewpoints.len(),
            total_time: outcome.total_time,
            unmeasured: outcome.achieved.iter().filter(|a| a.is_none()).count(),
            compliant: ok.iter().filter(|&&b| b).count(),
            kinds,
            histogram: Histogram::new(bins, outcome.achieved.iter().flatten().map(|a| a.u_sen)),
        }
    }

    pub fn compliance_ratio(&self) -> f64 {
        if self.n_mps == 0 {
            1.0
        } else {
            self.compliant as f64 / self.n_mps as f64
        }
    }
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or("-".to_string(), |v| format!("{v:.decimals$}"))
}

/// Fixed-point text without a sign on values that round to zero.
fn fixed(x: f64, precision: usize) -> String {
    let t = format!("{x:.precision$}");
    match t.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => t,
    }
}

/// Ordered poses, leg times and per-point achieved uncertainty.
pub fn plan_document(outcome: &PlanOutcome, mps: &[MeasurementPoint], params: &UncertaintyParams) -> String {
    let mut s = String::from("# scanplan-plan v1\n");
    let _ = writeln!(s, "strategy {}", outcome.strategy.as_str());
    let _ = writeln!(s, "seed {}", outcome.seed);
    let _ = writeln!(s, "points {}", mps.len());
    let _ = writeln!(s, "candidates {}", outcome.n_candidates);
    let _ = writeln!(s, "viewpoints {}", outcome.viewpoints.len());
    let _ = writeln!(s, "scan_time {:.6}", outcome.scan_time);
    let _ = writeln!(s, "total_time {:.6}", outcome.total_time);
    let _ = writeln!(s, "# rank candidate x y z ax ay az roll_deg leg_in_s");
    for (rank, (vp, cand)) in outcome.viewpoints.iter().zip(&outcome.order).enumerate() {
        let _ = writeln!(
            s,
            "vp {rank} {cand} {} {} {} {} {} {} {:.6} {:.6}",
            fixed(vp.position.x, 6),
            fixed(vp.position.y, 6),
            fixed(vp.position.z, 6),
            fixed(vp.axis.x, 9),
            fixed(vp.axis.y, 9),
            fixed(vp.axis.z, 9),
            vp.roll.to_degrees(),
            outcome.legs[rank]
        );
    }
    let _ = writeln!(s, "return {:.6}", outcome.legs.last().copied().unwrap_or(0.0));
    let _ = writeln!(s, "# id kind tolerance rank angle_deg u_sen expanded_u status");
    for (mp, a) in mps.iter().zip(&outcome.achieved) {
        match a {
            Some(a) => {
                let expanded = params.k * combined_uncertainty(a.u_sen, params.u_mat, params.u_rot);
                let status = if complies(a.u_sen, mp.tolerance, params) { "ok" } else { "fail" };
                let _ = writeln!(
                    s,
                    "mp {} {} {:.6} {} {:.6} {:.6} {:.6} {status}",
                    mp.id,
                    mp.kind,
                    mp.tolerance,
                    a.rank,
                    a.angle.to_degrees(),
                    a.u_sen,
                    expanded
                );
            }
            None => {
                let _ = writeln!(s, "mp {} {} {:.6} - - - - unmeasured", mp.id, mp.kind, mp.tolerance);
            }
        }
    }
    s
}

/// Counts, time, compliance and the uncertainty histogram.
pub fn metrics_document(m: &Metrics) -> String {
    let mut s = String::from("# scanplan-metrics v1\n");
    let _ = writeln!(s, "strategy {}", m.strategy.as_str());
    let _ = writeln!(s, "seed {}", m.seed);
    let _ = writeln!(s, "points {}", m.n_mps);
    let _ = writeln!(s, "candidates {}", m.n_candidates);
    let _ = writeln!(s, "viewpoints {}", m.viewpoints);
    let _ = writeln!(s, "total_time {:.6}", m.total_time);
    let _ = writeln!(s, "unmeasured {}", m.unmeasured);
    let _ = writeln!(s, "compliant {}", m.compliant);
    let _ = writeln!(s, "compliance_ratio {:.6}", m.compliance_ratio());
    let _ = writeln!(s, "# kind count mean_u compliant ratio");
    for k in &m.kinds {
        let _ = writeln!(
            s,
            "kind {} {} {} {} {}",
            k.kind,
            k.count,
            opt(k.mean_u, 6),
            k.compliant,
            opt(k.ratio(), 6)
        );
    }
    let h = &m.histogram;
    let edges: Vec<String> = h.edges.iter().map(|e| e.to_string()).collect();
    let _ = writeln!(s, "histogram_edges {}", edges.join(" "));
    let _ = writeln!(s, "bin_under {}", h.under);
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(s, "bin {} {c}", h.label(i));
    }
    let _ = writeln!(s, "bin_over {}", h.over);
    s
}

/// Search-tree dump with the final objective.
pub fn graph_document(graph: &PlanGraph, mps: &[MeasurementPoint], objective: f64) -> String {
    graph.to_text(mps, objective)
}

/// One row of a strategy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub strategy: Strategy,
    pub viewpoints: usize,
    pub total_time: f64,
    /// Mean achieved uncertainty per kind, in [`MpKind::ALL`] order.
    pub mean_u: Vec<Option<f64>>,
    pub compliance_ratio: f64,
}

impl ComparisonRow {
    pub fn from_metrics(m: &Metrics) -> Self {
        ComparisonRow {
            strategy: m.strategy,
            viewpoints: m.viewpoints,
            total_time: m.total_time,
            mean_u: m.kinds.iter().map(|k| k.mean_u).collect(),
            compliance_ratio: m.compliance_ratio(),
        }
    }
}

/// Fixed-width side-by-side table.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let mut s = String::from("# scanplan-compare v1\n");
    let _ = write!(s, "{:<10} {:>4} {:>12}", "strategy", "m", "time_s");
    for k in MpKind::ALL {
        let _ = write!(s, " {:>10}", format!("u_{k}"));
    }
    let _ = writeln!(s, " {:>8}", "r");
    for r in rows {
        let _ = write!(s, "{:<10} {:>4} {:>12.3}", r.strategy.as_str(), r.viewpoints, r.total_time);
        for u in &r.mean_u {
            let _ = write!(s, " {:>10}", opt(*u, 4));
        }
        let _ = writeln!(s, " {:>7.2}%", 100.0 * r.compliance_ratio);
    }
    s
}

/// Color of `u` on a blue-to-red ramp over `[lo, hi]`.
pub fn ramp(u: f64, lo: f64, hi: f64) -> [u8; 3] {
    let t = if hi > lo { ((u - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
    [(255.0 * t).round() as u8, (255.0 * (1.0 - (2.0 * t - 1.0).abs())).round() as u8, (255.0 * (1.0 - t)).round() as u8]
}

const UNMEASURED: [u8; 3] = [128, 128, 128];

/// ASCII PLY of the part with every vertex colored by the achieved
/// uncertainty of its nearest measurement point. The legend is written as
/// header comments, one per bin, colored at the bin middle.
pub fn export_heatmap(mesh: &TriangleMesh, mps: &[MeasurementPoint], achieved_u: &[Option<f64>], bins: &[f64]) -> String {
    let lo = bins[0];
    let hi = *bins.last().unwrap();
    let mut s = String::from("ply\nformat ascii 1.0\ncomment scanplan-heatmap v1\n");
    for w in bins.windows(2).enumerate() {
        let (i, e) = w;
        let c = ramp(0.5 * (e[0] + e[1]), lo, hi);
        let close = if i + 2 == bins.len() { ']' } else { ')' };
        let _ = writeln!(s, "comment legend [{},{}{} {} {} {}", e[0], e[1], close, c[0], c[1], c[2]);
    }
    let _ = writeln!(
        s,
        "comment legend unmeasured {} {} {}",
        UNMEASURED[0], UNMEASURED[1], UNMEASURED[2]
    );
    let _ = writeln!(s, "element vertex {}", mesh.vertices().len());
    s.push_str("property float x\nproperty float y\nproperty float z\n");
    s.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    let _ = writeln!(s, "element face {}", mesh.len());
    s.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in mesh.vertices() {
        let nearest = (0..mps.len()).min_by(|&a, &b| {
            (mps[a].position - v)
                .norm_squared()
                .total_cmp(&(mps[b].position - v).norm_squared())
        });
        let c = nearest
            .and_then(|i| achieved_u[i])
            .map_or(UNMEASURED, |u| ramp(u, lo, hi));
        let _ = writeln!(s, "{:.6} {:.6} {:.6} {} {} {}", v.x, v.y, v.z, c[0], c[1], c[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DEFAULT_BINS;
    use crate::geometry::Vec3;

    #[test]
    fn histogram_places_values_by_hand() {
        let h = Histogram::new(&DEFAULT_BINS, [0.03, 0.04, 0.0699, 0.07, 0.12, 0.19, 0.2, 0.16]);
        assert_eq!(h.counts, vec![2, 1, 1, 0, 2]);
        assert_eq!((h.under, h.over), (1, 1));
        assert_eq!(h.total(), 8);
        assert_eq!(h.label(0), "[0.04,0.07)");
        assert_eq!(h.label(4), "[0.16,0.19]");
    }

    #[test]
    fn ramp_ends() {
        assert_eq!(ramp(0.04, 0.04, 0.19), [0, 0, 255]);
        assert_eq!(ramp(0.19, 0.04, 0.19), [255, 0, 0]);
        assert_eq!(ramp(1.0, 0.04, 0.19), [255, 0, 0]);
    }

    fn plate_and_points() -> (TriangleMesh, Vec<MeasurementPoint>) {
        let mesh = TriangleMesh::new(
            vec![
                Vec3::zeros(),
                Vec3::new(100.0, 0.0, 0.0),
                Vec3::new(100.0, 100.0, 0.0),
                Vec3::new(0.0, 100.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let mps = [(0.0, 0.0), (100.0, 100.0)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                MeasurementPoint::new(format!("p{i}"), Vec3::new(x, y, 0.0), Vec3::z(), MpKind::Surface, 2.0, false)
                    .unwrap()
            })
            .collect();
        (mesh, mps)
    }

    fn vertex_colors(ply: &str) -> Vec<String> {
        let body = ply.split("end_header\n").nth(1).unwrap();
        body.lines()
            .take(4)
            .map(|l| l.split(' ').skip(3).collect::<Vec<_>>().join(" "))
            .collect()
    }

    #[test]
    fn heatmap_single_color_when_uniform() {
        let (mesh, mps) = plate_and_points();
        let ply = export_heatmap(&mesh, &mps, &[Some(0.04), Some(0.04)], &DEFAULT_BINS);
        let colors = vertex_colors(&ply);
        assert!(colors.iter().all(|c| c == "0 0 255"));
    }

    #[test]
    fn heatmap_extremes_and_legend() {
        let (mesh, mps) = plate_and_points();
        let ply = export_heatmap(&mesh, &mps, &[Some(0.04), Some(0.19)], &DEFAULT_BINS);
        let colors = vertex_colors(&ply);
        assert!(colors.contains(&"0 0 255".to_string()));
        assert!(colors.contains(&"255 0 0".to_string()));
        for label in ["[0.04,0.07)", "[0.07,0.1)", "[0.1,0.13)", "[0.13,0.16)", "[0.16,0.19]"] {
            assert!(ply.contains(&format!("comment legend {label} ")), "{label}");
        }
        assert!(ply.contains("element vertex 4\n"));
        assert!(ply.trim_end().ends_with("3 0 2 3"));
    }

    #[test]
    fn comparison_rows_align() {
        let row = ComparisonRow {
            strategy: Strategy::Rrt,
            viewpoints: 3,
            total_time: 12.5,
            mean_u: vec![Some(0.05), None, None, Some(0.061)],
            compliance_ratio: 1.0,
        };
        let t = comparison_table(&[row.clone(), row]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], lines[3]);
        assert!(lines[2].contains("0.0500") && lines[2].ends_with("100.00%"));
    }
}
