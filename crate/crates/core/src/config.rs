//! Run configuration: one TOML file, every key optional except the input
//! paths, plus `section.key=value` overrides from the command line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::candidates::CandidateGrid;
use crate::error::{PlanError, Result};
use crate::geometry::{KindTolerances, Vec3};
use crate::sampler::SamplerConfig;
use crate::sequencer::{AnnealConfig, DetourConfig, MotionSpeeds};
use crate::uncertainty::{SensorUncertaintyCurve, UncertaintyParams, DEFAULT_CURVE_DEG};
use crate::visibility::{AccessibilityOracle, IncidenceMode, SensorBody, SensorModel, ShellConeOracle, Unrestricted};

/// Viewpoint selection method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Rrt,
    Baseline,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Rrt => "rrt",
            Strategy::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rrt" => Ok(Strategy::Rrt),
            "baseline" => Ok(Strategy::Baseline),
            other => Err(PlanError::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Part surface, STL or OBJ.
    pub mesh: Option<PathBuf>,
    /// Measurement point CSV.
    pub points: Option<PathBuf>,
    /// Fixtures and other obstacles, STL or OBJ.
    pub obstacles: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyConfig {
    pub k: f64,
    pub u_mat: f64,
    pub u_rot: f64,
    /// Sensor curve knots as `[angle_deg, u_sen_mm]`.
    pub curve_deg: Vec<[f64; 2]>,
    pub incidence: IncidenceMode,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        let p = UncertaintyParams::default();
        UncertaintyConfig {
            k: p.k,
            u_mat: p.u_mat,
            u_rot: p.u_rot,
            curve_deg: DEFAULT_CURVE_DEG.iter().map(|&(a, u)| [a, u]).collect(),
            incidence: IncidenceMode::default(),
        }
    }
}

impl UncertaintyConfig {
    pub fn params(&self) -> UncertaintyParams {
        UncertaintyParams {
            k: self.k,
            u_mat: self.u_mat,
            u_rot: self.u_rot,
        }
    }

    pub fn curve(&self) -> Result<SensorUncertaintyCurve> {
        let knots: Vec<(f64, f64)> = self.curve_deg.iter().map(|k| (k[0], k[1])).collect();
        SensorUncertaintyCurve::from_degrees(&knots)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VoxelConfig {
    /// Grid edge, mm; must stay below half the far-FOV width.
    pub edge: f64,
}

impl Default for VoxelConfig {
    fn default() -> Self {
        VoxelConfig { edge: 40.0 }
    }
}

/// Which reachability model to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    #[default]
    Shell,
    Unrestricted,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub oracle: OracleKind,
    pub shell: ShellConeOracle,
    pub speeds: MotionSpeeds,
    /// Home position of the sensor origin, looking straight down. Placed
    /// well above the part when absent.
    pub home: Option<[f64; 3]>,
}

impl RobotConfig {
    pub fn oracle(&self) -> Box<dyn AccessibilityOracle> {
        match self.oracle {
            OracleKind::Shell => Box::new(self.shell),
            OracleKind::Unrestricted => Box::new(Unrestricted),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequencerConfig {
    pub anneal: AnnealConfig,
    pub detour: DetourConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Apply the per-point uncertainty gate to the greedy baseline.
    pub gated: bool,
}

/// Upper bin edges of the uncertainty histogram, mm.
pub const DEFAULT_BINS: [f64; 6] = [0.04, 0.07, 0.10, 0.13, 0.16, 0.19];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub bins: Vec<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            bins: DEFAULT_BINS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub strategy: Strategy,
    pub input: InputConfig,
    pub output: OutputConfig,
    pub sensor: SensorModel,
    pub sensor_body: SensorBody,
    pub uncertainty: UncertaintyConfig,
    pub tolerances: KindTolerances,
    pub voxel: VoxelConfig,
    pub robot: RobotConfig,
    pub candidates: CandidateGrid,
    pub sampler: SamplerConfig,
    pub sequencer: SequencerConfig,
    pub baseline: BaselineConfig,
    pub report: ReportConfig,
}

impl Config {
    /// Reads `path`, applies `overrides` and resolves relative paths against
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Config> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PlanError::io(path, e))?;
        let mut cfg = Config::from_toml(&text, overrides)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    /// Parses configuration text; paths stay as written.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Config> {
        let mut table: toml::Table = text.parse().map_err(|e| PlanError::parse("config", e))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| PlanError::parse("config", e))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.input.mesh.as_mut() {
            fix(p);
        }
        if let Some(p) = self.input.points.as_mut() {
            fix(p);
        }
        self.input.obstacles.iter_mut().for_each(fix);
        fix(&mut self.output.dir);
    }

    /// Checks everything that can be checked without reading the inputs.
    pub fn validate(&self) -> Result<()> {
        if self.input.mesh.is_none() {
            return Err(PlanError::Config("input.mesh is required".into()));
        }
        if self.input.points.is_none() {
            return Err(PlanError::Config("input.points is required".into()));
        }
        self.sensor.validate()?;
        self.uncertainty.curve()?;
        let p = self.uncertainty.params();
        if !(p.k > 0.0 && p.u_mat >= 0.0 && p.u_rot >= 0.0) {
            return Err(PlanError::Config("uncertainty k must be positive and u_mat, u_rot non-negative".into()));
        }
        let t = &self.tolerances;
        if ![t.hole, t.slot, t.trimming, t.surface].iter().all(|v| *v > 0.0) {
            return Err(PlanError::Config("tolerances must be positive".into()));
        }
        if self.body_invalid() {
            return Err(PlanError::Config("sensor body size must be positive and clearance non-negative".into()));
        }
        let s = &self.robot.speeds;
        if !(s.v_lin > 0.0 && s.v_ang_deg > 0.0) {
            return Err(PlanError::Config("robot speeds must be positive".into()));
        }
        self.candidates.validate()?;
        self.sampler.validate(self.sensor.far_width())?;
        self.sequencer.anneal.validate()?;
        let d = &self.sequencer.detour;
        if !(d.step > 0.0 && d.check_step > 0.0 && d.margin >= 0.0 && (0.0..=1.0).contains(&d.goal_bias)) {
            return Err(PlanError::Config("invalid detour planner settings".into()));
        }
        let b = &self.report.bins;
        if b.len() < 2 || b.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(PlanError::Config("report.bins must hold at least two increasing edges".into()));
        }
        Ok(())
    }

    fn body_invalid(&self) -> bool {
        !(self.sensor_body.size.iter().all(|v| *v > 0.0) && self.sensor_body.clearance >= 0.0)
    }

    /// Configured home position, or one far above the part so that the
    /// first extension always has room.
    pub fn home_position(&self, bounds: (Vec3, Vec3)) -> Vec3 {
        if let Some(h) = self.robot.home {
            return Vec3::from(h);
        }
        let (lo, hi) = bounds;
        let center = (lo + hi) * 0.5;
        let lift = 0.5 * (hi - lo).norm() + self.sensor.far_depth() + 2.0 * self.sampler.spacing_for(self.sensor.far_width());
        Vec3::new(center.x, center.y, hi.z + lift)
    }
}

/// Applies one `dotted.key=value` override. The value is read as a TOML
/// literal when possible and as a bare string otherwise.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| PlanError::Config(format!("override {spec:?} is not key=value")))?;
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(PlanError::Config(format!("bad override key {key:?}")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| PlanError::Config(format!("override {key:?}: {p} is not a section")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
