//! Point-to-line distance from side lengths alone, checked against the
//! cross product. The last two points are almost collinear with the line
//! and far from it; the side lengths already carry the rounding there, so
//! the side-length form drifts while the cross product does not.

use scanplan::geometry::{min_distance_point_to_line, Vec3};

fn main() -> scanplan::Result<()> {
    let a = Vec3::new(0.0, 0.0, 0.0);
    let b = Vec3::new(100.0, 0.0, 0.0);
    for p in [Vec3::new(50.0, 30.0, 0.0), Vec3::new(-20.0, 0.0, 40.0), Vec3::new(250.0, 1e-3, 0.0), Vec3::new(1e6, 1e-3, 0.0)] {
        let heron = min_distance_point_to_line(&a, &b, &p)?;
        let cross = (b - a).cross(&(p - a)).norm() / (b - a).norm();
        println!("{p:?}: {heron:.9} vs {cross:.9}");
    }
    Ok(())
}
