//! Sensor frustum, robot accessibility, collision, and the four-gate test
//! that decides which measurement points a viewpoint actually measures.

mod collision;
mod oracle;
mod sensor;

pub use collision::{Scene, SensorBody};
pub use oracle::{AccessibilityOracle, ShellConeOracle, Unrestricted};
pub use sensor::{incident_angle, Fov, IncidenceMode, SensorModel, Viewpoint};

use crate::geometry::MeasurementPoint;
use crate::uncertainty::{SensorUncertaintyCurve, UncertaintyBudget};

/// One measurement point seen from a viewpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibleMp {
    /// Index into the measurement point list.
    pub mp: usize,
    /// Incident angle, rad.
    pub angle: f64,
    /// Sensor uncertainty at that angle, mm.
    pub u_sen: f64,
}

/// Measurement points that pass every gate for one viewpoint, ordered by
/// measurement point index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VisibleSet {
    pub viewpoint: usize,
    pub entries: Vec<VisibleMp>,
}

impl VisibleSet {
    pub fn empty(viewpoint: usize) -> Self {
        VisibleSet {
            viewpoint,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mps(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.mp)
    }

    pub fn get(&self, mp: usize) -> Option<&VisibleMp> {
        self.entries
            .binary_search_by_key(&mp, |e| e.mp)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn contains(&self, mp: usize) -> bool {
        self.get(mp).is_some()
    }
}

/// Everything needed to evaluate visibility; immutable and shareable across
/// threads.
#[derive(Clone, Copy)]
pub struct Visibility<'a> {
    pub sensor: &'a SensorModel,
    pub curve: &'a SensorUncertaintyCurve,
    pub oracle: &'a dyn AccessibilityOracle,
    pub scene: &'a Scene,
    pub body: &'a SensorBody,
    pub mode: IncidenceMode,
}

impl<'a> Visibility<'a> {
    /// Gates 1 and 2: reachable and collision-free.
    pub fn pose_feasible(&self, vp: &Viewpoint) -> bool {
        self.oracle.is_accessible(vp) && !self.scene.collides(self.body, vp)
    }

    /// All four gates, with each point's admissible cone taken from its
    /// budget.
    pub fn determination_set(
        &self,
        vp: &Viewpoint,
        mps: &[MeasurementPoint],
        budgets: &[UncertaintyBudget],
    ) -> VisibleSet {
        debug_assert_eq!(mps.len(), budgets.len());
        if !self.pose_feasible(vp) {
            return VisibleSet::empty(vp.id);
        }
        self.in_view(vp, mps, |i| budgets[i].max_angle)
    }

    /// Gates 1 to 3 only; the incident angle is limited just by the range
    /// over which the sensor curve is defined.
    pub fn ungated_set(&self, vp: &Viewpoint, mps: &[MeasurementPoint]) -> VisibleSet {
        if !self.pose_feasible(vp) {
            return VisibleSet::empty(vp.id);
        }
        let limit = self.curve.limit();
        self.in_view(vp, mps, |_| limit)
    }

    fn in_view(&self, vp: &Viewpoint, mps: &[MeasurementPoint], cap: impl Fn(usize) -> f64) -> VisibleSet {
        let entries = mps
            .iter()
            .enumerate()
            .filter(|(_, mp)| self.sensor.frustum_contains(vp, &mp.position))
            .filter_map(|(i, mp)| {
                let angle = incident_angle(vp, &mp.position, &mp.normal, self.mode);
                if angle > cap(i) {
                    return None;
                }
                let u_sen = self.curve.sensor_uncertainty_at(angle).ok()?;
                Some(VisibleMp { mp: i, angle, u_sen })
            })
            .collect();
        VisibleSet {
            viewpoint: vp.id,
            entries,
        }
    }
}
