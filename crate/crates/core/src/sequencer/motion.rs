use nalgebra::UnitQuaternion;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::geometry::Vec3;
use crate::visibility::{Scene, SensorBody, Viewpoint};

/// Synchronized point-to-point motion at constant speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionSpeeds {
    /// Linear speed of the sensor origin, mm/s.
    pub v_lin: f64,
    /// Angular speed of the sensor frame, deg/s.
    pub v_ang_deg: f64,
}

impl Default for MotionSpeeds {
    fn default() -> Self {
        MotionSpeeds {
            v_lin: 100.0,
            v_ang_deg: 60.0,
        }
    }
}

impl MotionSpeeds {
    /// Time of one segment; translation and rotation run together, so the
    /// slower of the two decides.
    pub fn segment_time(&self, length: f64, rotation: f64) -> f64 {
        (length / self.v_lin).max(rotation / self.v_ang_deg.to_radians())
    }
}

/// Limits of the sampling-based detour planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetourConfig {
    pub max_iterations: usize,
    /// Tree step length, mm.
    pub step: f64,
    /// Probability of sampling the goal directly.
    pub goal_bias: f64,
    /// Spacing of collision checks along a segment, mm.
    pub check_step: f64,
    /// Free space added around the scene bounds for sampling, mm.
    pub margin: f64,
}

impl Default for DetourConfig {
    fn default() -> Self {
        DetourConfig {
            max_iterations: 4000,
            step: 60.0,
            goal_bias: 0.1,
            check_step: 10.0,
            margin: 400.0,
        }
    }
}

/// A collision-free local path between two poses.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPath {
    /// Polyline of sensor origins, both endpoints included.
    pub waypoints: Vec<Vec3>,
    pub time: f64,
    /// Whether the straight segment was blocked.
    pub detoured: bool,
}

/// Everything needed to time moves between poses.
#[derive(Clone, Copy)]
pub struct Motion<'a> {
    pub scene: &'a Scene,
    pub body: &'a SensorBody,
    pub speeds: MotionSpeeds,
    pub detour: DetourConfig,
}

impl Motion<'_> {
    /// Pose at `p` with orientation slerped between `a` and `b` by the
    /// progress of `p` along `a -> b`.
    fn orientation_at(
        &self,
        a: &Viewpoint,
        b: &Viewpoint,
        qa: &UnitQuaternion<f64>,
        qb: &UnitQuaternion<f64>,
        p: &Vec3,
    ) -> UnitQuaternion<f64> {
        let ab = b.position - a.position;
        let len2 = ab.norm_squared();
        let t = if len2 > 0.0 {
            ((p - a.position).dot(&ab) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        qa.try_slerp(qb, t, 1e-12).unwrap_or(*qa)
    }

    fn pose_clear(&self, p: &Vec3, q: &UnitQuaternion<f64>) -> bool {
        let frame = [q * Vec3::x(), q * Vec3::y(), q * Vec3::z()];
        let bx = self.body.posed_at(p, frame).inflated(self.body.clearance);
        !self.scene.intersects_box(&bx)
    }

    /// Checks the box swept from `p0` to `p1` at `check_step` spacing, with
    /// orientations interpolated between `q0` and `q1`.
    fn segment_clear(&self, p0: &Vec3, q0: &UnitQuaternion<f64>, p1: &Vec3, q1: &UnitQuaternion<f64>) -> bool {
        let n = ((p1 - p0).norm() / self.detour.check_step).ceil().max(1.0) as usize;
        let n = n.max((q0.angle_to(q1).to_degrees() / 2.0).ceil() as usize);
        (0..=n).all(|k| {
            let t = k as f64 / n as f64;
            let q = q0.try_slerp(q1, t, 1e-12).unwrap_or(*q0);
            self.pose_clear(&p0.lerp(p1, t), &q)
        })
    }

    /// Time of a polyline whose orientation follows the progress rule.
    fn polyline_time(&self, a: &Viewpoint, b: &Viewpoint, pts: &[Vec3]) -> f64 {
        let (qa, qb) = (a.orientation(), b.orientation());
        let turn = qa.angle_to(&qb);
        let ab = b.position - a.position;
        let len2 = ab.norm_squared();
        let progress = |p: &Vec3| {
            if len2 > 0.0 {
                ((p - a.position).dot(&ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        pts.windows(2)
            .map(|w| {
                let rot = turn * (progress(&w[1]) - progress(&w[0])).abs();
                self.speeds.segment_time((w[1] - w[0]).norm(), rot)
            })
            .sum()
    }

    /// Collision-free path and travel time from `a` to `b`.
    ///
    /// The straight move is used when its swept body is clear; otherwise a
    /// goal-biased tree in position space finds a detour, which is then
    /// shortcut. `seed` makes the detour reproducible.
    pub fn local_path(&self, a: &Viewpoint, b: &Viewpoint, seed: u64) -> Result<LocalPath> {
        let unreachable = || PlanError::UnreachablePair {
            from: a.id.to_string(),
            to: b.id.to_string(),
        };
        let (qa, qb) = (a.orientation(), b.orientation());
        if !self.pose_clear(&a.position, &qa) || !self.pose_clear(&b.position, &qb) {
            return Err(unreachable());
        }
        if self.segment_clear(&a.position, &qa, &b.position, &qb) {
            let turn = qa.angle_to(&qb);
            return Ok(LocalPath {
                waypoints: vec![a.position, b.position],
                time: self.speeds.segment_time((b.position - a.position).norm(), turn),
                detoured: false,
            });
        }
        let pts = self.detour_polyline(a, b, &qa, &qb, seed).ok_or_else(unreachable)?;
        let time = self.polyline_time(a, b, &pts);
        Ok(LocalPath {
            waypoints: pts,
            time,
            detoured: true,
        })
    }

    fn detour_polyline(
        &self,
        a: &Viewpoint,
        b: &Viewpoint,
        qa: &UnitQuaternion<f64>,
        qb: &UnitQuaternion<f64>,
        seed: u64,
    ) -> Option<Vec<Vec3>> {
        let (lo, hi) = self.scene.bounds();
        let m = Vec3::repeat(self.detour.margin);
        let lo = lo.inf(&a.position).inf(&b.position) - m;
        let hi = hi.sup(&a.position).sup(&b.position) + m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orient = |p: &Vec3| self.orientation_at(a, b, qa, qb, p);
        let edge_clear = |p: &Vec3, q: &Vec3| self.segment_clear(p, &orient(p), q, &orient(q));

        let mut nodes = vec![a.position];
        let mut parent = vec![usize::MAX];
        let mut reached = None;
        for _ in 0..self.detour.max_iterations {
            let target = if rng.gen::<f64>() < self.detour.goal_bias {
                b.position
            } else {
                Vec3::new(
                    rng.gen_range(lo.x..=hi.x),
                    rng.gen_range(lo.y..=hi.y),
                    rng.gen_range(lo.z..=hi.z),
                )
            };
            let near = (0..nodes.len())
                .min_by(|&i, &j| (nodes[i] - target).norm().total_cmp(&(nodes[j] - target).norm()))
                .unwrap();
            let dir = target - nodes[near];
            let d = dir.norm();
            if d == 0.0 {
                continue;
            }
            let new = nodes[near] + dir * (self.detour.step.min(d) / d);
            if !self.pose_clear(&new, &orient(&new)) || !edge_clear(&nodes[near], &new) {
                continue;
            }
            nodes.push(new);
            parent.push(near);
            let idx = nodes.len() - 1;
            if (b.position - new).norm() <= self.detour.step && edge_clear(&new, &b.position) {
                nodes.push(b.position);
                parent.push(idx);
                reached = Some(nodes.len() - 1);
                break;
            }
        }
        let mut path = Vec::new();
        let mut cur = reached?;
        while cur != usize::MAX {
            path.push(nodes[cur]);
            cur = parent[cur];
        }
        path.reverse();
        Some(self.shortcut(&path, &edge_clear))
    }

    /// Greedy shortcutting: from each kept waypoint jump to the farthest one
    /// still in direct line of motion.
    fn shortcut(&self, path: &[Vec3], edge_clear: &impl Fn(&Vec3, &Vec3) -> bool) -> Vec<Vec3> {
        let mut out = vec![path[0]];
        let mut i = 0;
        while i + 1 < path.len() {
            let mut j = path.len() - 1;
            while j > i + 1 && !edge_clear(&path[i], &path[j]) {
                j -= 1;
            }
            out.push(path[j]);
            i = j;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriangleMesh;

    fn quad(z: f64, half: f64) -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(-half, -half, z),
                Vec3::new(half, -half, z),
                Vec3::new(half, half, z),
                Vec3::new(-half, half, z),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    /// Vertical wall in the plane x = 0, spanning |y| <= half_y and
    /// z in [0, height].
    fn wall(half_y: f64, height: f64) -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(0.0, -half_y, 0.0),
                Vec3::new(0.0, half_y, 0.0),
                Vec3::new(0.0, half_y, height),
                Vec3::new(0.0, -half_y, height),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    fn down(id: usize, p: Vec3) -> Viewpoint {
        Viewpoint::new(id, p, -Vec3::z(), 0.0)
    }

    #[test]
    fn straight_line_times() {
        let scene = Scene::new(&quad(0.0, 100.0), &[]);
        let body = SensorBody::default();
        let m = Motion {
            scene: &scene,
            body: &body,
            speeds: MotionSpeeds::default(),
            detour: DetourConfig::default(),
        };
        let a = down(0, Vec3::new(0.0, 0.0, 250.0));
        let b = down(1, Vec3::new(100.0, 0.0, 250.0));
        let p = m.local_path(&a, &b, 0).unwrap();
        assert!(!p.detoured);
        assert!((p.time - 1.0).abs() < 1e-12);
        assert_eq!(m.local_path(&a, &a, 0).unwrap().time, 0.0);

        // a pure quarter-turn of roll at 60 deg/s takes 1.5 s
        let c = Viewpoint::new(2, a.position, -Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert!((m.local_path(&a, &c, 0).unwrap().time - 1.5).abs() < 1e-9);
        // translation and rotation overlap, the longer one counts
        let d = Viewpoint::new(3, Vec3::new(300.0, 0.0, 250.0), -Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert!((m.local_path(&a, &d, 0).unwrap().time - 3.0).abs() < 1e-9);
    }

    #[test]
    fn wall_forces_a_longer_detour() {
        let scene = Scene::new(&quad(0.0, 100.0), &[wall(150.0, 400.0)]);
        let body = SensorBody::default();
        let m = Motion {
            scene: &scene,
            body: &body,
            speeds: MotionSpeeds::default(),
            detour: DetourConfig::default(),
        };
        let a = down(0, Vec3::new(-150.0, 0.0, 250.0));
        let b = down(1, Vec3::new(150.0, 0.0, 250.0));
        let p = m.local_path(&a, &b, 7).unwrap();
        assert!(p.detoured);
        assert!(p.time > 3.0);
        assert_eq!(p.waypoints.first(), Some(&a.position));
        assert_eq!(p.waypoints.last(), Some(&b.position));
        let again = m.local_path(&a, &b, 7).unwrap();
        assert_eq!(p, again);
        // every leg of the polyline is itself clear
        let (qa, qb) = (a.orientation(), b.orientation());
        for w in p.waypoints.windows(2) {
            let o0 = m.orientation_at(&a, &b, &qa, &qb, &w[0]);
            let o1 = m.orientation_at(&a, &b, &qa, &qb, &w[1]);
            assert!(m.segment_clear(&w[0], &o0, &w[1], &o1));
        }
    }

    fn closed_box(lo: Vec3, hi: Vec3) -> TriangleMesh {
        let v: Vec<Vec3> = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { lo.x } else { hi.x },
                    if i & 2 == 0 { lo.y } else { hi.y },
                    if i & 4 == 0 { lo.z } else { hi.z },
                )
            })
            .collect();
        let faces = [[0, 1, 3, 2], [4, 6, 7, 5], [0, 4, 5, 1], [2, 3, 7, 6], [0, 2, 6, 4], [1, 5, 7, 3]];
        let tris = faces.iter().flat_map(|f| [[f[0], f[1], f[2]], [f[0], f[2], f[3]]]).collect();
        TriangleMesh::new(v, tris).unwrap()
    }

    #[test]
    fn enclosed_goal_is_unreachable() {
        let cage = closed_box(Vec3::new(-200.0, -200.0, 100.0), Vec3::new(200.0, 200.0, 600.0));
        let scene = Scene::new(&quad(0.0, 100.0), &[cage]);
        let body = SensorBody::default();
        let m = Motion {
            scene: &scene,
            body: &body,
            speeds: MotionSpeeds::default(),
            detour: DetourConfig {
                max_iterations: 300,
                ..DetourConfig::default()
            },
        };
        let outside = down(0, Vec3::new(-600.0, 0.0, 250.0));
        let inside = down(1, Vec3::new(0.0, 0.0, 250.0));
        assert!(matches!(
            m.local_path(&outside, &inside, 0),
            Err(PlanError::UnreachablePair { .. })
        ));
    }

    #[test]
    fn colliding_endpoint_is_unreachable() {
        let scene = Scene::new(&quad(0.0, 100.0), &[quad(260.0, 2000.0)]);
        let body = SensorBody::default();
        let m = Motion {
            scene: &scene,
            body: &body,
            speeds: MotionSpeeds::default(),
            detour: DetourConfig::default(),
        };
        let a = down(0, Vec3::new(0.0, 0.0, 250.0));
        let b = down(1, Vec3::new(50.0, 0.0, 250.0));
        assert!(matches!(m.local_path(&a, &b, 0), Err(PlanError::UnreachablePair { .. })));
    }
}
