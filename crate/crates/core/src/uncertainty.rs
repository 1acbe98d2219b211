//! Tolerance-driven uncertainty budgets and the incident-angle response of the
//! sensor.
//!
//! A feature with tolerance band `T` is measurable when the expanded
//! uncertainty `k * sqrt(U_sen^2 + U_mat^2 + U_rot^2)` stays within `T / 8`.
//! Solving for the sensor term gives the per-feature budget; inverting the
//! monotone sensor curve turns that budget into the widest admissible
//! incident angle.

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};

/// Slack allowed on the `k * U <= T / 8` check.
pub const COMPLIANCE_EPS: f64 = 1e-9;

/// Scalar contributions that do not depend on the viewpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyParams {
    /// Coverage factor (2 gives roughly 95% confidence).
    pub k: f64,
    /// Material uncertainty, mm.
    pub u_mat: f64,
    /// Robot positioning uncertainty, mm.
    pub u_rot: f64,
}

impl Default for UncertaintyParams {
    fn default() -> Self {
        UncertaintyParams {
            k: 2.0,
            u_mat: 0.01,
            u_rot: 0.01,
        }
    }
}

/// Piecewise-linear sensor uncertainty as a function of incident angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorUncertaintyCurve {
    /// (angle rad, U_sen mm), strictly increasing in both coordinates.
    knots: Vec<(f64, f64)>,
}

impl SensorUncertaintyCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(PlanError::InvalidCurve("need at least two knots".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(PlanError::InvalidCurve("first knot must sit at zero incidence".into()));
        }
        if knots[0].1 <= 0.0 {
            return Err(PlanError::InvalidCurve("uncertainty must be positive".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(PlanError::InvalidCurve(format!(
                    "knots must increase strictly in angle and uncertainty: {:?} -> {:?}",
                    w[0], w[1]
                )));
            }
        }
        if knots.last().unwrap().0 >= std::f64::consts::FRAC_PI_2 {
            return Err(PlanError::InvalidCurve("validity limit must stay below 90 degrees".into()));
        }
        Ok(SensorUncertaintyCurve { knots })
    }

    /// Knots given as (degrees, mm).
    pub fn from_degrees(knots: &[(f64, f64)]) -> Result<Self> {
        Self::new(knots.iter().map(|&(a, u)| (a.to_radians(), u)).collect())
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Largest angle the curve is valid for.
    pub fn limit(&self) -> f64 {
        self.knots.last().unwrap().0
    }

    pub fn minimum(&self) -> f64 {
        self.knots[0].1
    }

    /// Returns a copy with every uncertainty multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.knots.iter().map(|&(a, u)| (a, u * factor)).collect())
    }

    /// `U_sen` at incident angle `angle`.
    pub fn sensor_uncertainty_at(&self, angle: f64) -> Result<f64> {
        if !(0.0..=self.limit()).contains(&angle) {
            return Err(PlanError::OutOfValidity {
                angle,
                limit: self.limit(),
            });
        }
        let i = self.knots.partition_point(|&(a, _)| a <= angle);
        if i >= self.knots.len() {
            return Ok(self.knots.last().unwrap().1);
        }
        let (a0, u0) = self.knots[i - 1];
        let (a1, u1) = self.knots[i];
        Ok(u0 + (angle - a0) / (a1 - a0) * (u1 - u0))
    }

    /// Largest angle whose uncertainty stays within `budget`, clamped to the
    /// validity limit.
    pub fn max_incident_angle(&self, budget: f64) -> Result<f64> {
        if budget < self.minimum() {
            return Err(PlanError::InfeasibleBudget {
                budget,
                minimum: self.minimum(),
            });
        }
        let (limit_angle, limit_u) = *self.knots.last().unwrap();
        if budget >= limit_u {
            return Ok(limit_angle);
        }
        let i = self.knots.partition_point(|&(_, u)| u <= budget);
        let (a0, u0) = self.knots[i - 1];
        let (a1, u1) = self.knots[i];
        Ok(a0 + (budget - u0) / (u1 - u0) * (a1 - a0))
    }
}

impl Default for SensorUncertaintyCurve {
    /// Synthetic monotone response spanning 0.04 mm at normal incidence to
    /// 0.19 mm at 75 degrees.
    fn default() -> Self {
        Self::from_degrees(&DEFAULT_CURVE_DEG).expect("default curve is valid")
    }
}

pub const DEFAULT_CURVE_DEG: [(f64, f64); 5] =
    [(0.0, 0.04), (20.0, 0.05), (40.0, 0.07), (60.0, 0.10), (75.0, 0.19)];

/// Maximum admissible sensor uncertainty for tolerance band `tolerance`.
pub fn budget_from_tolerance(tolerance: f64, k: f64, u_mat: f64, u_rot: f64) -> Result<f64> {
    if !(tolerance > 0.0) || !(k > 0.0) || u_mat < 0.0 || u_rot < 0.0 {
        return Err(PlanError::Config(format!(
            "invalid budget inputs T={tolerance} k={k} U_mat={u_mat} U_rot={u_rot}"
        )));
    }
    let cap = tolerance / (8.0 * k);
    let slack = cap * cap - u_mat * u_mat - u_rot * u_rot;
    if slack <= 0.0 {
        return Err(PlanError::InfeasibleTolerance { tolerance });
    }
    Ok(slack.sqrt())
}

pub fn combined_uncertainty(u_sen: f64, u_mat: f64, u_rot: f64) -> f64 {
    (u_sen * u_sen + u_mat * u_mat + u_rot * u_rot).sqrt()
}

/// True when a sensor uncertainty keeps the expanded uncertainty within
/// `T / 8`.
pub fn complies(u_sen: f64, tolerance: f64, params: &UncertaintyParams) -> bool {
    params.k * combined_uncertainty(u_sen, params.u_mat, params.u_rot) <= tolerance / 8.0 + COMPLIANCE_EPS
}

/// Budget and admissible cone for one measurement point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBudget {
    pub tolerance: f64,
    pub k: f64,
    pub u_mat: f64,
    pub u_rot: f64,
    pub sensor_max: f64,
    /// Widest admissible incident angle, rad.
    pub max_angle: f64,
}

impl UncertaintyBudget {
    pub fn derive(tolerance: f64, params: &UncertaintyParams, curve: &SensorUncertaintyCurve) -> Result<Self> {
        let sensor_max = budget_from_tolerance(tolerance, params.k, params.u_mat, params.u_rot)?;
        let max_angle = curve.max_incident_angle(sensor_max)?;
        Ok(UncertaintyBudget {
            tolerance,
            k: params.k,
            u_mat: params.u_mat,
            u_rot: params.u_rot,
            sensor_max,
            max_angle,
        })
    }
}
