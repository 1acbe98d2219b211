//! Part geometry: meshes, measurement points, voxelization and the distance
//! kernels used by the sampler.

mod io;
mod mesh;
mod primitives;
mod voxel;

pub use io::{
    load_measurement_points, load_mesh, parse_measurement_points, parse_obj, parse_stl, write_ascii_stl,
    write_binary_stl, write_measurement_points, write_obj, KindTolerances,
};
pub use mesh::{check_unique_ids, MeasurementPoint, MpKind, TriangleMesh};
pub use primitives::{
    closest_point_on_triangle, frame_from_axis, heron_area, min_distance_point_to_line, triangle_area, Cell,
    OrientedBox, Vec3,
};
pub use voxel::{voxelize, Voxel, CHORDAL_FRACTION, SUBDIVISION_FLOOR};
