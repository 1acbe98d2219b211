use serde::{Deserialize, Serialize};

use super::sensor::Viewpoint;
use crate::geometry::Vec3;

/// Decides whether the robot can place the sensor at a pose.
///
/// Implement this over a real inverse-kinematics solver to replace the
/// geometric proxy.
pub trait AccessibilityOracle: Send + Sync {
    fn is_accessible(&self, vp: &Viewpoint) -> bool;
}

/// Reachability proxy: the sensor origin must lie in a spherical shell
/// around the robot base, the optical axis inside a cone, and the roll inside
/// a closed range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShellConeOracle {
    pub base: [f64; 3],
    pub r_min: f64,
    pub r_max: f64,
    /// Central direction of the admissible axis cone.
    pub cone_axis: [f64; 3],
    /// Half-angle of the axis cone, degrees.
    pub cone_half_angle_deg: f64,
    /// Admissible roll range, degrees, inclusive.
    pub roll_range_deg: [f64; 2],
}

impl Default for ShellConeOracle {
    fn default() -> Self {
        ShellConeOracle {
            base: [0.0, 0.0, 0.0],
            r_min: 150.0,
            r_max: 1300.0,
            cone_axis: [0.0, 0.0, -1.0],
            cone_half_angle_deg: 90.0,
            roll_range_deg: [0.0, 360.0],
        }
    }
}

impl AccessibilityOracle for ShellConeOracle {
    fn is_accessible(&self, vp: &Viewpoint) -> bool {
        let r = (vp.position - Vec3::from(self.base)).norm();
        if r < self.r_min || r > self.r_max {
            return false;
        }
        let cone = Vec3::from(self.cone_axis).normalize();
        let off_axis = vp.axis.dot(&cone).clamp(-1.0, 1.0).acos();
        if off_axis > self.cone_half_angle_deg.to_radians() + 1e-12 {
            return false;
        }
        let roll = vp.roll.to_degrees().rem_euclid(360.0);
        let [lo, hi] = self.roll_range_deg;
        (lo..=hi).contains(&roll)
    }
}

/// Accepts every pose.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unrestricted;

impl AccessibilityOracle for Unrestricted {
    fn is_accessible(&self, _vp: &Viewpoint) -> bool {
        true
    }
}
