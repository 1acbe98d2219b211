//! Splits a random part into one voxel per measurement point.

use scanplan::geometry::{voxelize, KindTolerances};
use scanplan::scenario::random_part;
use scanplan::visibility::SensorModel;

fn main() -> scanplan::Result<()> {
    let part = random_part(3, 40, &KindTolerances::default());
    let far = SensorModel::default().far_width();
    for edge in [60.0, 40.0, 20.0] {
        let voxels = voxelize(&part.mesh, &part.mps, edge, far)?;
        let subdivided = voxels.iter().filter(|v| v.edge < edge).count();
        let offset = voxels
            .iter()
            .map(|v| (v.center - part.mps[v.mp].position).norm())
            .fold(0.0, f64::max);
        println!(
            "edge {edge:>4} mm: {} voxels, {subdivided} subdivided, max center-to-point {offset:.1} mm",
            voxels.len()
        );
    }
    Ok(())
}
