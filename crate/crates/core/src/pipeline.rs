//! End-to-end orchestration: load, budget, voxelize, generate candidates,
//! select viewpoints, sequence, and evaluate what the plan achieves.

use std::fmt;
use std::fs;

use crate::baseline::greedy_target_sampling;
use crate::candidates::{generate_candidates, CandidateSet};
use crate::config::{Config, Strategy};
use crate::error::PlanError;
use crate::geometry::{load_measurement_points, load_mesh, voxelize, MeasurementPoint, TriangleMesh, Vec3};
use crate::report::{
    comparison_table, export_heatmap, graph_document, metrics_document, plan_document, ComparisonRow, Metrics,
};
use crate::sampler::plan_viewpoints;
use crate::sequencer::{build_time_matrix, solve_tsp_sa, Motion};
use crate::uncertainty::{SensorUncertaintyCurve, UncertaintyBudget, UncertaintyParams};
use crate::visibility::{AccessibilityOracle, Scene, Viewpoint, Visibility};

/// A module error tagged with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: PlanError,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.error.exit_code()
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait Stage<T> {
    fn stage(self, stage: &'static str) -> StageResult<T>;
}

impl<T> Stage<T> for crate::Result<T> {
    fn stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|error| StageError { stage, error })
    }
}

/// Everything up to and including the candidate set; shared by both
/// strategies.
pub struct Prepared {
    pub mesh: TriangleMesh,
    pub scene: Scene,
    pub mps: Vec<MeasurementPoint>,
    pub budgets: Vec<UncertaintyBudget>,
    pub params: UncertaintyParams,
    pub curve: SensorUncertaintyCurve,
    pub oracle: Box<dyn AccessibilityOracle>,
    pub candidates: CandidateSet,
    pub home: Viewpoint,
}

impl Prepared {
    pub fn visibility<'a>(&'a self, cfg: &'a Config) -> Visibility<'a> {
        Visibility {
            sensor: &cfg.sensor,
            curve: &self.curve,
            oracle: self.oracle.as_ref(),
            scene: &self.scene,
            body: &cfg.sensor_body,
            mode: cfg.uncertainty.incidence,
        }
    }
}

/// Loads the inputs named in `cfg` and builds the candidate set.
pub fn prepare(cfg: &Config) -> StageResult<Prepared> {
    cfg.validate().stage("config")?;
    let mesh = load_mesh(cfg.input.mesh.as_ref().expect("validated")).stage("load mesh")?;
    let obstacles = cfg
        .input
        .obstacles
        .iter()
        .map(load_mesh)
        .collect::<crate::Result<Vec<_>>>()
        .stage("load obstacles")?;
    let mps = load_measurement_points(cfg.input.points.as_ref().expect("validated"), &cfg.tolerances)
        .stage("load points")?;
    prepare_from(cfg, mesh, &obstacles, mps)
}

/// Same as [`prepare`] with the geometry already in memory.
pub fn prepare_from(
    cfg: &Config,
    mesh: TriangleMesh,
    obstacles: &[TriangleMesh],
    mps: Vec<MeasurementPoint>,
) -> StageResult<Prepared> {
    if mps.is_empty() {
        return Err(StageError {
            stage: "load points",
            error: PlanError::Config("no measurement points to plan".into()),
        });
    }
    let params = cfg.uncertainty.params();
    let curve = cfg.uncertainty.curve().stage("budget")?;
    let budgets = mps
        .iter()
        .map(|mp| UncertaintyBudget::derive(mp.tolerance, &params, &curve))
        .collect::<crate::Result<Vec<_>>>()
        .stage("budget")?;
    let voxels = voxelize(&mesh, &mps, cfg.voxel.edge, cfg.sensor.far_width()).stage("voxelize")?;
    let scene = Scene::new(&mesh, obstacles);
    let home = Viewpoint::new(usize::MAX, cfg.home_position(scene.bounds()), -Vec3::z(), 0.0);
    let oracle = cfg.robot.oracle();
    let mut prepared = Prepared {
        mesh,
        scene,
        mps,
        budgets,
        params,
        curve,
        oracle,
        candidates: CandidateSet::default(),
        home,
    };
    let vis = prepared.visibility(cfg);
    let candidates =
        generate_candidates(&voxels, &prepared.mps, &prepared.budgets, &cfg.candidates, &vis).stage("candidates")?;
    prepared.candidates = candidates;
    Ok(prepared)
}

/// How one measurement point is measured by the finished plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Achieved {
    /// Position in the visiting order.
    pub rank: usize,
    /// Incident angle, rad.
    pub angle: f64,
    pub u_sen: f64,
}

/// A finished plan.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub strategy: Strategy,
    pub seed: u64,
    pub n_candidates: usize,
    /// Candidate ids in visiting order.
    pub order: Vec<usize>,
    pub viewpoints: Vec<Viewpoint>,
    /// Home to first, between consecutive viewpoints, last to home.
    pub legs: Vec<f64>,
    pub scan_time: f64,
    pub total_time: f64,
    /// Per measurement point, the lowest-angle plan viewpoint that sees it.
    pub achieved: Vec<Option<Achieved>>,
    /// Search-tree dump for the sampler strategy.
    pub graph: Option<String>,
}

/// Selects, sequences and evaluates viewpoints with `strategy`.
pub fn plan_with(prepared: &Prepared, cfg: &Config, strategy: Strategy) -> StageResult<PlanOutcome> {
    let cands = &prepared.candidates;
    let (selected, graph) = match strategy {
        Strategy::Rrt => {
            let run = plan_viewpoints(
                cands,
                prepared.mps.len(),
                prepared.home.position,
                &cfg.sampler,
                cfg.sensor.far_width(),
                cfg.seed,
            )
            .stage("sample")?;
            let graph = run.graph.clone();
            let graph = run.require_complete(&prepared.mps).map(|_| graph).stage("sample")?;
            let objective = graph
                .objective(cfg.sampler.beta1, cfg.sampler.gamma1)
                .stage("sample")?;
            (graph.selected_candidates(), Some(graph_document(&graph, &prepared.mps, objective)))
        }
        Strategy::Baseline => {
            let picks = greedy_target_sampling(cands, &prepared.mps, &prepared.home.position, cfg.baseline.gated)
                .stage("baseline")?;
            (picks, None)
        }
    };

    let vps: Vec<Viewpoint> = selected
        .iter()
        .enumerate()
        .map(|(i, &c)| Viewpoint {
            id: i,
            ..cands.viewpoints[c]
        })
        .collect();
    let motion = Motion {
        scene: &prepared.scene,
        body: &cfg.sensor_body,
        speeds: cfg.robot.speeds,
        detour: cfg.sequencer.detour,
    };
    let table = build_time_matrix(&vps, &prepared.home, &motion, cfg.sensor.scan_time, cfg.seed)
        .map_err(|e| relabel_unreachable(e, &selected))
        .stage("sequence")?;
    let tour = solve_tsp_sa(&table.matrix, &cfg.sequencer.anneal, cfg.seed);

    let tm = &table.matrix;
    let mut legs = vec![tm.home(tour.order[0])];
    legs.extend(tour.order.windows(2).map(|w| tm.get(w[0], w[1])));
    legs.push(tm.home(*tour.order.last().unwrap()));

    let order: Vec<usize> = tour.order.iter().map(|&i| selected[i]).collect();
    let viewpoints: Vec<Viewpoint> = tour
        .order
        .iter()
        .enumerate()
        .map(|(rank, &i)| Viewpoint { id: rank, ..vps[i] })
        .collect();
    let achieved = achieved_uncertainty(prepared, cfg, &viewpoints);
    Ok(PlanOutcome {
        strategy,
        seed: cfg.seed,
        n_candidates: cands.len(),
        order,
        viewpoints,
        legs,
        scan_time: cfg.sensor.scan_time,
        total_time: tour.total,
        achieved,
        graph,
    })
}

fn relabel_unreachable(e: PlanError, selected: &[usize]) -> PlanError {
    let name = |s: &str| match s.parse::<usize>() {
        Ok(i) if i < selected.len() => format!("candidate {}", selected[i]),
        _ => "home".to_string(),
    };
    match e {
        PlanError::UnreachablePair { from, to } => PlanError::UnreachablePair {
            from: name(&from),
            to: name(&to),
        },
        other => other,
    }
}

/// Re-evaluates every plan viewpoint without the uncertainty gate and keeps,
/// per point, the lowest incident angle (earliest in the order on ties).
pub fn achieved_uncertainty(prepared: &Prepared, cfg: &Config, viewpoints: &[Viewpoint]) -> Vec<Option<Achieved>> {
    let vis = prepared.visibility(cfg);
    let mut out: Vec<Option<Achieved>> = vec![None; prepared.mps.len()];
    for (rank, vp) in viewpoints.iter().enumerate() {
        for e in vis.ungated_set(vp, &prepared.mps).entries {
            let slot = &mut out[e.mp];
            if slot.is_none_or(|a| e.angle < a.angle) {
                *slot = Some(Achieved {
                    rank,
                    angle: e.angle,
                    u_sen: e.u_sen,
                });
            }
        }
    }
    out
}

/// Files written by [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub outcome: PlanOutcome,
    pub metrics: Metrics,
    pub plan_text: String,
    pub metrics_text: String,
}

/// Plans with the configured strategy and writes `plan.txt`,
/// `metrics.txt`, `heatmap.ply` and, for the sampler, `graph.txt` to the
/// output directory.
pub fn run_pipeline(cfg: &Config) -> StageResult<Artifacts> {
    let prepared = prepare(cfg)?;
    let outcome = plan_with(&prepared, cfg, cfg.strategy)?;
    let metrics = Metrics::compute(&outcome, &prepared.mps, &prepared.params, &cfg.report.bins);
    let plan_text = plan_document(&outcome, &prepared.mps, &prepared.params);
    let metrics_text = metrics_document(&metrics);

    let dir = &cfg.output.dir;
    let write = |name: &str, body: &str| {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| PlanError::io(path, e))
    };
    fs::create_dir_all(dir).map_err(|e| PlanError::io(dir, e)).stage("export")?;
    write("plan.txt", &plan_text).stage("export")?;
    write("metrics.txt", &metrics_text).stage("export")?;
    let u: Vec<Option<f64>> = outcome.achieved.iter().map(|a| a.map(|a| a.u_sen)).collect();
    write("heatmap.ply", &export_heatmap(&prepared.mesh, &prepared.mps, &u, &cfg.report.bins)).stage("export")?;
    if let Some(g) = &outcome.graph {
        write("graph.txt", g).stage("export")?;
    }
    Ok(Artifacts {
        outcome,
        metrics,
        plan_text,
        metrics_text,
    })
}

/// Runs both strategies on the same candidate set.
pub fn compare_strategies(cfg: &Config, strategies: &[Strategy]) -> StageResult<(Vec<ComparisonRow>, String)> {
    let prepared = prepare(cfg)?;
    compare_prepared(&prepared, cfg, strategies)
}

pub fn compare_prepared(
    prepared: &Prepared,
    cfg: &Config,
    strategies: &[Strategy],
) -> StageResult<(Vec<ComparisonRow>, String)> {
    let rows = strategies
        .iter()
        .map(|&s| {
            let o = plan_with(prepared, cfg, s)?;
            let m = Metrics::compute(&o, &prepared.mps, &prepared.params, &cfg.report.bins);
            Ok(ComparisonRow::from_metrics(&m))
        })
        .collect::<StageResult<Vec<_>>>()?;
    let text = comparison_table(&rows);
    Ok((rows, text))
}

/// Plans with the configured strategy and returns only the heatmap.
pub fn heatmap(cfg: &Config) -> StageResult<String> {
    let prepared = prepare(cfg)?;
    let outcome = plan_with(&prepared, cfg, cfg.strategy)?;
    let u: Vec<Option<f64>> = outcome.achieved.iter().map(|a| a.map(|a| a.u_sen)).collect();
    Ok(export_heatmap(&prepared.mesh, &prepared.mps, &u, &cfg.report.bins))
}
