use std::collections::BTreeMap;

use super::mesh::{MeasurementPoint, TriangleMesh};
use super::primitives::{Cell, Vec3};
use crate::error::{PlanError, Result};

/// Smallest cell edge the subdivision may reach, in mm.
pub const SUBDIVISION_FLOOR: f64 = 0.01;

/// Allowed distance between a measurement point and the surface, as a
/// fraction of its voxel edge.
pub const CHORDAL_FRACTION: f64 = 0.05;

/// Surface cell holding exactly one measurement point.
#[derive(Debug, Clone, PartialEq)]
pub struct Voxel {
    pub id: usize,
    /// Cell center projected onto the nearest triangle.
    pub center: Vec3,
    /// Area-weighted mean of the normals of triangles crossing the cell.
    pub normal: Vec3,
    /// Index of the contained measurement point in the input list.
    pub mp: usize,
    pub edge: f64,
}

/// Partitions the surface around the measurement points into voxels.
///
/// Points sharing a grid cell are separated by octree subdivision of that
/// cell; voxels come back in measurement-point order, so `voxels[i].mp == i`.
pub fn voxelize(
    mesh: &TriangleMesh,
    mps: &[MeasurementPoint],
    edge: f64,
    far_fov_width: f64,
) -> Result<Vec<Voxel>> {
    let limit = 0.5 * far_fov_width;
    if !(edge > 0.0 && edge < limit) {
        return Err(PlanError::EdgeTooLarge { edge, limit });
    }
    let (origin, _) = mesh.bounds();

    let mut buckets: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, mp) in mps.iter().enumerate() {
        let rel = (mp.position - origin) / edge;
        let key = [rel.x.floor() as i64, rel.y.floor() as i64, rel.z.floor() as i64];
        buckets.entry(key).or_default().push(i);
    }

    let mut leaves: Vec<(usize, Cell)> = Vec::with_capacity(mps.len());
    for (key, members) in buckets {
        let cell = Cell {
            min: origin + Vec3::new(key[0] as f64, key[1] as f64, key[2] as f64) * edge,
            edge,
        };
        split(cell, members, mps, &mut leaves)?;
    }
    leaves.sort_by_key(|(mp, _)| *mp);

    leaves
        .into_iter()
        .map(|(mp_index, cell)| build_voxel(mesh, &mps[mp_index], mp_index, cell))
        .collect()
}

fn split(
    cell: Cell,
    members: Vec<usize>,
    mps: &[MeasurementPoint],
    leaves: &mut Vec<(usize, Cell)>,
) -> Result<()> {
    if members.len() == 1 {
        leaves.push((members[0], cell));
        return Ok(());
    }
    let half = 0.5 * cell.edge;
    if half < SUBDIVISION_FLOOR {
        return Err(PlanError::SubdivisionFloor {
            first: mps[members[0]].id.clone(),
            second: mps[members[1]].id.clone(),
        });
    }
    let mid = cell.min + Vec3::repeat(half);
    let children = cell.children();
    let mut groups: [Vec<usize>; 8] = Default::default();
    for m in members {
        let p = mps[m].position;
        let octant = (p.x >= mid.x) as usize | ((p.y >= mid.y) as usize) << 1 | ((p.z >= mid.z) as usize) << 2;
        groups[octant].push(m);
    }
    for (child, group) in children.into_iter().zip(groups) {
        if !group.is_empty() {
            split(child, group, mps, leaves)?;
        }
    }
    Ok(())
}

fn build_voxel(mesh: &TriangleMesh, mp: &MeasurementPoint, mp_index: usize, cell: Cell) -> Result<Voxel> {
    let (on_surface, nearest_tri) = mesh.closest_point(&mp.position);
    let deviation = (on_surface - mp.position).norm();
    let limit = CHORDAL_FRACTION * cell.edge;
    if deviation >= limit {
        return Err(PlanError::OffSurface {
            id: mp.id.clone(),
            deviation,
            limit,
        });
    }

    let (center, _) = mesh.closest_point(&cell.center());

    let (lo, hi) = (cell.min, cell.max());
    let mut weighted = Vec3::zeros();
    for i in 0..mesh.len() {
        let tri = mesh.triangle(i);
        let overlaps = (0..3).all(|k| {
            let tmin = tri[0][k].min(tri[1][k]).min(tri[2][k]);
            let tmax = tri[0][k].max(tri[1][k]).max(tri[2][k]);
            tmax >= lo[k] && tmin <= hi[k]
        });
        if overlaps {
            weighted += mesh.normals()[i] * cell.clipped_triangle_area(tri);
        }
    }
    let normal = if weighted.norm() > 1e-12 {
        weighted.normalize()
    } else {
        mesh.normals()[nearest_tri]
    };

    Ok(Voxel {
        id: mp_index,
        center,
        normal,
        mp: mp_index,
        edge: cell.edge,
    })
}
