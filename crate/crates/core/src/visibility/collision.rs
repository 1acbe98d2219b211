use serde::{Deserialize, Serialize};

use super::sensor::Viewpoint;
use crate::geometry::{OrientedBox, TriangleMesh, Vec3};

/// Box-shaped envelope of the sensor head, in the sensor frame.
///
/// The front face sits at the optical origin and the body extends
/// `size[2]` mm back along the negative axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorBody {
    /// Extent along the scan-line, height and axis directions, mm.
    pub size: [f64; 3],
    /// Required free distance around the body, mm. Contact at exactly this
    /// distance is allowed.
    pub clearance: f64,
}

impl Default for SensorBody {
    fn default() -> Self {
        SensorBody {
            size: [120.0, 80.0, 150.0],
            clearance: 20.0,
        }
    }
}

impl SensorBody {
    /// Body box posed at `vp`, without clearance.
    pub fn posed(&self, vp: &Viewpoint) -> OrientedBox {
        self.posed_at(&vp.position, vp.frame())
    }

    pub fn posed_at(&self, position: &Vec3, frame: [Vec3; 3]) -> OrientedBox {
        let half = Vec3::from(self.size) * 0.5;
        OrientedBox {
            center: position - frame[2] * half.z,
            axes: frame,
            half_extents: half,
        }
    }
}

/// Static environment: the part plus fixtures and other obstacles.
#[derive(Debug, Clone)]
pub struct Scene {
    mesh: TriangleMesh,
    boxes: Vec<(Vec3, Vec3)>,
}

impl Scene {
    pub fn new(part: &TriangleMesh, obstacles: &[TriangleMesh]) -> Self {
        let mesh = obstacles.iter().fold(part.clone(), |acc, o| acc.merged(o));
        let boxes = (0..mesh.len())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                (a.inf(b).inf(c), a.sup(b).sup(c))
            })
            .collect();
        Scene { mesh, boxes }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        self.mesh.bounds()
    }

    /// True iff `bx` overlaps any scene triangle.
    pub fn intersects_box(&self, bx: &OrientedBox) -> bool {
        let (lo, hi) = bx.aabb();
        self.boxes.iter().enumerate().any(|(i, (tlo, thi))| {
            let overlaps = (0..3).all(|k| thi[k] > lo[k] && tlo[k] < hi[k]);
            overlaps && bx.intersects_triangle(self.mesh.triangle(i))
        })
    }

    /// True iff the sensor body at `vp`, grown by its clearance, overlaps
    /// the scene.
    pub fn collides(&self, body: &SensorBody, vp: &Viewpoint) -> bool {
        self.intersects_box(&body.posed(vp).inflated(body.clearance))
    }
}
