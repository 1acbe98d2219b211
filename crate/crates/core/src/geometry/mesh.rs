use super::primitives::{closest_point_on_triangle, Vec3};
use crate::error::{PlanError, Result};

// Triangles with less area than this (mm^2) are treated as degenerate.
const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Validated triangle soup with per-face unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
}

impl TriangleMesh {
    /// Builds a mesh, recomputing normals from the winding order.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(PlanError::EmptyMesh);
        }
        let mut normals = Vec::with_capacity(triangles.len());
        for (index, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(PlanError::IndexOutOfRange { index });
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let cross = (b - a).cross(&(c - a));
            if 0.5 * cross.norm() < MIN_TRIANGLE_AREA {
                return Err(PlanError::DegenerateTriangle { index });
            }
            normals.push(cross.normalize());
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            normals,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, index: usize) -> [&Vec3; 3] {
        self.triangles[index].map(|v| &self.vertices[v])
    }

    /// Axis-aligned bounds as (min, max).
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            min = min.inf(v);
            max = max.sup(v);
        }
        (min, max)
    }

    /// Closest surface point to `p` with the triangle it lies on.
    pub fn closest_point(&self, p: &Vec3) -> (Vec3, usize) {
        let mut best = (Vec3::zeros(), 0, f64::INFINITY);
        for index in 0..self.triangles.len() {
            let [a, b, c] = self.triangle(index);
            let q = closest_point_on_triangle(p, a, b, c);
            let d = (q - p).norm_squared();
            if d < best.2 {
                best = (q, index, d);
            }
        }
        (best.0, best.1)
    }

    /// Concatenates two meshes into one scene.
    pub fn merged(&self, other: &TriangleMesh) -> TriangleMesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        triangles.extend(other.triangles.iter().map(|t| t.map(|v| v + offset)));
        let mut normals = self.normals.clone();
        normals.extend_from_slice(&other.normals);
        TriangleMesh {
            vertices,
            triangles,
            normals,
        }
    }
}

/// Feature category of a measurement point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MpKind {
    Hole,
    Slot,
    Trimming,
    Surface,
}

impl MpKind {
    pub const ALL: [MpKind; 4] = [MpKind::Hole, MpKind::Slot, MpKind::Trimming, MpKind::Surface];

    pub fn as_str(&self) -> &'static str {
        match self {
            MpKind::Hole => "hole",
            MpKind::Slot => "slot",
            MpKind::Trimming => "trimming",
            MpKind::Surface => "surface",
        }
    }
}

impl std::str::FromStr for MpKind {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hole" => Ok(MpKind::Hole),
            "slot" => Ok(MpKind::Slot),
            "trimming" | "trim" => Ok(MpKind::Trimming),
            "surface" | "surface_point" => Ok(MpKind::Surface),
            other => Err(PlanError::parse("measurement point kind", other)),
        }
    }
}

impl std::fmt::Display for MpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A key feature whose dimension is verified against a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPoint {
    pub id: String,
    pub position: Vec3,
    /// Unit surface normal.
    pub normal: Vec3,
    pub kind: MpKind,
    /// Full tolerance band T in mm (a `±t` tolerance gives `T = 2t`).
    pub tolerance: f64,
    pub critical: bool,
}

impl MeasurementPoint {
    /// Validates the tolerance and normalizes the supplied normal.
    pub fn new(
        id: impl Into<String>,
        position: Vec3,
        normal: Vec3,
        kind: MpKind,
        tolerance: f64,
        critical: bool,
    ) -> Result<Self> {
        let id = id.into();
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(PlanError::InvalidMeasurementPoint {
                id,
                reason: format!("tolerance must be positive, got {tolerance}"),
            });
        }
        let len = normal.norm();
        if !(len > 1e-12 && len.is_finite()) {
            return Err(PlanError::InvalidMeasurementPoint {
                id,
                reason: "normal has zero length".into(),
            });
        }
        Ok(MeasurementPoint {
            id,
            position,
            normal: normal / len,
            kind,
            tolerance,
            critical,
        })
    }
}

/// Checks that measurement point ids are unique.
pub fn check_unique_ids(mps: &[MeasurementPoint]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for mp in mps {
        if !seen.insert(mp.id.as_str()) {
            return Err(PlanError::InvalidMeasurementPoint {
                id: mp.id.clone(),
                reason: "duplicate id".into(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> TriangleMesh {
        let v: Vec<Vec3> = (0..8)
            .map(|i| {
                Vec3::new(
                    (i & 1) as f64,
                    ((i >> 1) & 1) as f64,
                    ((i >> 2) & 1) as f64,
                )
            })
            .collect();
        let t = vec![
            [0, 2, 1],
            [1, 2, 3], // z = 0
            [4, 5, 6],
            [5, 7, 6], // z = 1
            [0, 1, 4],
            [1, 5, 4], // y = 0
            [2, 6, 3],
            [3, 6, 7], // y = 1
            [0, 4, 2],
            [2, 4, 6], // x = 0
            [1, 3, 5],
            [3, 7, 5], // x = 1
        ];
        TriangleMesh::new(v, t).unwrap()
    }

    #[test]
    fn unit_square_normals_point_up() {
        let mesh = TriangleMesh::new(
            vec![
                Vec3::zeros(),
                Vec3::x(),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::y(),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        assert_eq!(mesh.len(), 2);
        for n in mesh.normals() {
            assert_eq!(*n, Vec3::z());
        }
    }

    #[test]
    fn cube_has_six_outward_directions() {
        let mesh = cube();
        assert_eq!(mesh.normals().len(), 12);
        let mut dirs: Vec<[i64; 3]> = mesh
            .normals()
            .iter()
            .map(|n| {
                assert!((n.norm() - 1.0).abs() < 1e-9);
                [n.x.round() as i64, n.y.round() as i64, n.z.round() as i64]
            })
            .collect();
        dirs.sort();
        dirs.dedup();
        assert_eq!(dirs.len(), 6);
        // every face normal points away from the cube center
        let center = Vec3::repeat(0.5);
        for i in 0..mesh.len() {
            let [a, ..] = mesh.triangle(i);
            assert!(mesh.normals()[i].dot(&(a - center)) > 0.0);
        }
    }

    #[test]
    fn zero_area_triangle_is_rejected_with_index() {
        let err = TriangleMesh::new(
            vec![Vec3::zeros(), Vec3::x(), Vec3::new(2.0, 0.0, 0.0), Vec3::y()],
            vec![[0, 1, 3], [0, 1, 2]],
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::DegenerateTriangle { index: 1 }));
    }

    #[test]
    fn out_of_range_and_empty() {
        assert!(matches!(
            TriangleMesh::new(vec![Vec3::zeros()], vec![]),
            Err(PlanError::EmptyMesh)
        ));
        assert!(matches!(
            TriangleMesh::new(vec![Vec3::zeros(), Vec3::x()], vec![[0, 1, 2]]),
            Err(PlanError::IndexOutOfRange { index: 0 })
        ));
    }

    #[test]
    fn measurement_point_validation() {
        let mp = MeasurementPoint::new(
            "h1",
            Vec3::zeros(),
            Vec3::new(0.0, 0.0, 2.0),
            MpKind::Hole,
            1.0,
            true,
        )
        .unwrap();
        assert!((mp.normal.norm() - 1.0).abs() < 1e-12);
        assert!(MeasurementPoint::new("x", Vec3::zeros(), Vec3::z(), MpKind::Hole, 0.0, false)
            .is_err());
        let dup = vec![mp.clone(), mp];
        assert!(check_unique_ids(&dup).is_err());
    }
}
