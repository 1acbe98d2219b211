use nalgebra::{Matrix3, Rotation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::geometry::{frame_from_axis, Vec3};

/// Rectangular field-of-view cross-section, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fov {
    pub width: f64,
    pub height: f64,
}

/// Optical line scanner: a truncated pyramid between the near and far
/// rectangles, centered on the nominal scan depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorModel {
    pub near: Fov,
    pub far: Fov,
    /// Depth of field, mm.
    pub dof: f64,
    /// Nominal stand-off d, mm.
    pub scan_depth: f64,
    /// Time spent scanning at each viewpoint t0, s.
    pub scan_time: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            near: Fov {
                width: 90.0,
                height: 60.0,
            },
            far: Fov {
                width: 160.0,
                height: 90.0,
            },
            dof: 100.0,
            scan_depth: 250.0,
            scan_time: 5.0,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.near.width < self.far.width && self.near.height < self.far.height) {
            return Err(PlanError::InvalidSensor("near FOV must be smaller than far FOV".into()));
        }
        if !(self.near.width > 0.0 && self.near.height > 0.0) {
            return Err(PlanError::InvalidSensor("FOV dimensions must be positive".into()));
        }
        if !(self.dof > 0.0) {
            return Err(PlanError::InvalidSensor("depth of field must be positive".into()));
        }
        if !(self.near_depth() > 0.0) {
            return Err(PlanError::InvalidSensor("scan depth must exceed half the depth of field".into()));
        }
        if !(self.scan_time >= 0.0) {
            return Err(PlanError::InvalidSensor("scan time must be non-negative".into()));
        }
        Ok(())
    }

    /// Far-FOV width L, also the default sampler spacing.
    pub fn far_width(&self) -> f64 {
        self.far.width
    }

    pub fn near_depth(&self) -> f64 {
        self.scan_depth - 0.5 * self.dof
    }

    pub fn far_depth(&self) -> f64 {
        self.scan_depth + 0.5 * self.dof
    }

    /// True iff `p` lies inside the measuring volume of `vp`.
    pub fn frustum_contains(&self, vp: &Viewpoint, p: &Vec3) -> bool {
        let [x, y, z] = vp.frame();
        let d = p - vp.position;
        let depth = d.dot(&z);
        if depth < self.near_depth() || depth > self.far_depth() {
            return false;
        }
        let t = (depth - self.near_depth()) / self.dof;
        let half_w = 0.5 * (self.near.width + t * (self.far.width - self.near.width));
        let half_h = 0.5 * (self.near.height + t * (self.far.height - self.near.height));
        d.dot(&x).abs() <= half_w && d.dot(&y).abs() <= half_h
    }
}

/// Sensor pose: optical origin, viewing direction and roll about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewpoint {
    pub id: usize,
    pub position: Vec3,
    /// Unit optical axis n_l, pointing from the sensor toward the part.
    pub axis: Vec3,
    /// Roll about the axis, rad.
    pub roll: f64,
    /// Voxel this candidate was generated for, if any.
    pub voxel: Option<usize>,
}

impl Viewpoint {
    pub fn new(id: usize, position: Vec3, axis: Vec3, roll: f64) -> Self {
        Viewpoint {
            id,
            position,
            axis: axis.normalize(),
            roll,
            voxel: None,
        }
    }

    /// Sensor frame: scan-line (width) direction, height direction, axis.
    pub fn frame(&self) -> [Vec3; 3] {
        let [x0, y0, z] = frame_from_axis(&self.axis);
        let (s, c) = self.roll.sin_cos();
        [x0 * c + y0 * s, y0 * c - x0 * s, z]
    }

    pub fn orientation(&self) -> UnitQuaternion<f64> {
        let [x, y, z] = self.frame();
        let m = Matrix3::from_columns(&[x, y, z]);
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m))
    }
}

/// Which direction the incident angle is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IncidenceMode {
    /// Ray from the measurement point to the sensor origin.
    #[default]
    Beam,
    /// The sensor's optical axis.
    Axis,
}

/// Angle between the viewing ray and a surface normal, folded into
/// `[0, pi/2]` so a surface facing the sensor reads as zero.
pub fn incident_angle(vp: &Viewpoint, mp_position: &Vec3, mp_normal: &Vec3, mode: IncidenceMode) -> f64 {
    let view = match mode {
        IncidenceMode::Beam => {
            let d = vp.position - mp_position;
            let n = d.norm();
            if n == 0.0 {
                -vp.axis
            } else {
                d / n
            }
        }
        IncidenceMode::Axis => vp.axis,
    };
    let raw = view.dot(mp_normal).clamp(-1.0, 1.0).acos();
    if raw > std::f64::consts::FRAC_PI_2 {
        std::f64::consts::PI - raw
    } else {
        raw
    }
}
