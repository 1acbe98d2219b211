use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = PlanError> = std::result::Result<T, E>;

/// Everything that can go wrong between loading a part and exporting a plan.
#[derive(Debug, Error)]
pub enum PlanError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {what}: {message}")]
    Parse { what: String, message: String },

    #[error("unsupported mesh format for {0}")]
    UnsupportedFormat(PathBuf),

    #[error("mesh is empty")]
    EmptyMesh,

    #[error("triangle {index} references a vertex out of range")]
    IndexOutOfRange { index: usize },

    #[error("triangle {index} is degenerate (zero area)")]
    DegenerateTriangle { index: usize },

    #[error("invalid measurement point {id}: {reason}")]
    InvalidMeasurementPoint { id: String, reason: String },

    #[error("voxel edge {edge} mm must be below half the far-FOV width ({limit} mm)")]
    EdgeTooLarge { edge: f64, limit: f64 },

    #[error("measurement points {first} and {second} cannot be separated above the 0.01 mm subdivision floor")]
    SubdivisionFloor { first: String, second: String },

    #[error("measurement point {id} lies {deviation} mm off the surface (limit {limit} mm)")]
    OffSurface { id: String, deviation: f64, limit: f64 },

    #[error("line through two coincident points is undefined")]
    DegenerateLine,

    #[error("invalid uncertainty curve: {0}")]
    InvalidCurve(String),

    #[error("incident angle {angle} rad exceeds the curve validity limit {limit} rad")]
    OutOfValidity { angle: f64, limit: f64 },

    #[error("tolerance {tolerance} mm is unachievable: (T/8k)^2 <= U_mat^2 + U_rot^2")]
    InfeasibleTolerance { tolerance: f64 },

    #[error("sensor uncertainty budget {budget} mm is below the curve minimum {minimum} mm")]
    InfeasibleBudget { budget: f64, minimum: f64 },

    #[error("invalid sensor model: {0}")]
    InvalidSensor(String),

    #[error("voxel {voxel} has no feasible candidate viewpoint")]
    UncoverableVoxel { voxel: usize },

    #[error("candidate viewpoints leave measurement points uncovered: {missing:?}")]
    IncompleteCoverage { missing: Vec<String> },

    #[error("plan graph node {node} covers no new measurement point")]
    InvalidGraph { node: usize },

    #[error("parent choice contributes no new coverage")]
    DegenerateCost,

    #[error("coverage failed after {iterations} iterations, uncovered: {uncovered:?}")]
    CoverageFailure {
        iterations: usize,
        uncovered: Vec<String>,
    },

    #[error("no collision-free path between viewpoints {from} and {to}")]
    UnreachablePair { from: String, to: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl PlanError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PlanError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, message: impl ToString) -> Self {
        PlanError::Parse {
            what: what.into(),
            message: message.to_string().trim_end().to_string(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            PlanError::Io { .. }
            | PlanError::Parse { .. }
            | PlanError::UnsupportedFormat(_)
            | PlanError::EmptyMesh
            | PlanError::IndexOutOfRange { .. }
            | PlanError::DegenerateTriangle { .. }
            | PlanError::InvalidMeasurementPoint { .. }
            | PlanError::EdgeTooLarge { .. }
            | PlanError::InvalidCurve(_)
            | PlanError::InvalidSensor(_)
            | PlanError::Config(_) => 2,
            PlanError::UncoverableVoxel { .. }
            | PlanError::IncompleteCoverage { .. }
            | PlanError::CoverageFailure { .. } => 3,
            PlanError::InfeasibleTolerance { .. } | PlanError::InfeasibleBudget { .. } => 4,
            PlanError::UnreachablePair { .. } => 5,
            _ => 1,
        }
    }
}
