//! Small geometric kernels shared by voxelization, visibility and sampling.

use nalgebra::Vector3;

use crate::error::{PlanError, Result};

pub type Vec3 = Vector3<f64>;

/// Perpendicular distance from `p` to the infinite line through `a` and `b`.
///
/// Computed from the three side lengths with Heron's formula: semi-perimeter
/// `s`, area `S`, and `2S / |ab|`. The product under the root is evaluated in
/// Kahan's ordering (sides sorted, parenthesized differences) so needle-shaped
/// triangles keep full precision.
pub fn min_distance_point_to_line(a: &Vec3, b: &Vec3, p: &Vec3) -> Result<f64> {
    let d1 = (a - b).norm();
    if d1 == 0.0 {
        return Err(PlanError::DegenerateLine);
    }
    let d2 = (a - p).norm();
    let d3 = (b - p).norm();
    Ok(2.0 * heron_area(d1, d2, d3) / d1)
}

/// Triangle area from side lengths.
pub fn heron_area(d1: f64, d2: f64, d3: f64) -> f64 {
    let mut sides = [d1, d2, d3];
    sides.sort_by(|x, y| y.total_cmp(x));
    let [x, y, z] = sides;
    // 16 S^2 = 2s (2s - 2x)(2s - 2y)(2s - 2z), with each factor kept free of cancellation
    let product = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    0.25 * product.max(0.0).sqrt()
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Axis-aligned box given by its minimum corner and edge length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub min: Vec3,
    pub edge: f64,
}

impl Cell {
    pub fn center(&self) -> Vec3 {
        self.min + Vec3::repeat(0.5 * self.edge)
    }

    pub fn max(&self) -> Vec3 {
        self.min + Vec3::repeat(self.edge)
    }

    /// Half-open containment `[min, max)` on every axis.
    pub fn contains(&self, p: &Vec3) -> bool {
        let max = self.max();
        (0..3).all(|k| p[k] >= self.min[k] && p[k] < max[k])
    }

    /// The eight octants, in z-major then y then x order.
    pub fn children(&self) -> [Cell; 8] {
        let h = 0.5 * self.edge;
        let mut out = [*self; 8];
        for (i, child) in out.iter_mut().enumerate() {
            let offset = Vec3::new(
                if i & 1 != 0 { h } else { 0.0 },
                if i & 2 != 0 { h } else { 0.0 },
                if i & 4 != 0 { h } else { 0.0 },
            );
            *child = Cell {
                min: self.min + offset,
                edge: h,
            };
        }
        out
    }

    /// Area of the part of triangle `tri` that lies inside the (closed) cell.
    pub fn clipped_triangle_area(&self, tri: [&Vec3; 3]) -> f64 {
        let mut poly: Vec<Vec3> = tri.iter().map(|v| **v).collect();
        let max = self.max();
        for axis in 0..3 {
            poly = clip_polygon(&poly, axis, self.min[axis], true);
            if poly.is_empty() {
                return 0.0;
            }
            poly = clip_polygon(&poly, axis, max[axis], false);
            if poly.is_empty() {
                return 0.0;
            }
        }
        polygon_area(&poly)
    }
}

// Sutherland-Hodgman against one axis-aligned plane; keeps `coord >= bound`
// when `keep_above`, else `coord <= bound`.
fn clip_polygon(poly: &[Vec3], axis: usize, bound: f64, keep_above: bool) -> Vec<Vec3> {
    let inside = |v: &Vec3| {
        if keep_above {
            v[axis] >= bound
        } else {
            v[axis] <= bound
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for (i, cur) in poly.iter().enumerate() {
        let prev = &poly[(i + poly.len() - 1) % poly.len()];
        let (cur_in, prev_in) = (inside(cur), inside(prev));
        if cur_in != prev_in {
            let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
            let mut x = prev + (cur - prev) * t;
            x[axis] = bound;
            out.push(x);
        }
        if cur_in {
            out.push(*cur);
        }
    }
    out
}

fn polygon_area(poly: &[Vec3]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = Vec3::zeros();
    for i in 1..poly.len() - 1 {
        acc += (poly[i] - poly[0]).cross(&(poly[i + 1] - poly[0]));
    }
    0.5 * acc.norm()
}

/// Oriented box used for the sensor body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Vec3,
    /// Orthonormal local axes.
    pub axes: [Vec3; 3],
    pub half_extents: Vec3,
}

// Slack on separating-axis comparisons so that exact face contact reads as
// separated.
const CONTACT_EPS: f64 = 1e-9;

impl OrientedBox {
    /// World-space AABB as (min, max).
    pub fn aabb(&self) -> (Vec3, Vec3) {
        let mut r = Vec3::zeros();
        for k in 0..3 {
            r[k] = (0..3)
                .map(|i| (self.axes[i][k] * self.half_extents[i]).abs())
                .sum();
        }
        (self.center - r, self.center + r)
    }

    pub fn inflated(&self, margin: f64) -> OrientedBox {
        OrientedBox {
            half_extents: self.half_extents.add_scalar(margin),
            ..*self
        }
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        let d = p - self.center;
        (0..3).all(|i| d.dot(&self.axes[i]).abs() < self.half_extents[i] - CONTACT_EPS)
    }

    /// Separating-axis overlap test against a triangle.
    ///
    /// Touching (zero-depth contact) counts as disjoint.
    pub fn intersects_triangle(&self, tri: [&Vec3; 3]) -> bool {
        // Work in box coordinates so the box axes are the unit basis.
        let local: [Vec3; 3] = tri.map(|v| {
            let d = v - self.center;
            Vec3::new(d.dot(&self.axes[0]), d.dot(&self.axes[1]), d.dot(&self.axes[2]))
        });
        let h = self.half_extents;
        let separated_on = |axis: &Vec3| -> bool {
            let len = axis.norm();
            if len < 1e-12 {
                return false;
            }
            let p = local.map(|v| v.dot(axis));
            let tmin = p[0].min(p[1]).min(p[2]);
            let tmax = p[0].max(p[1]).max(p[2]);
            let r = h.x * axis.x.abs() + h.y * axis.y.abs() + h.z * axis.z.abs();
            let slack = CONTACT_EPS * len;
            tmin >= r - slack || tmax <= -r + slack
        };

        let unit = [Vec3::x(), Vec3::y(), Vec3::z()];
        if unit.iter().any(&separated_on) {
            return false;
        }
        let edges = [
            local[1] - local[0],
            local[2] - local[1],
            local[0] - local[2],
        ];
        let normal = edges[0].cross(&edges[1]);
        if separated_on(&normal) {
            return false;
        }
        for u in &unit {
            for e in &edges {
                if separated_on(&u.cross(e)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Right-handed orthonormal frame whose third axis is `axis`.
///
/// The first axis is the world axis least aligned with `axis`, projected out
/// and normalized, so the frame is a deterministic function of `axis`.
pub fn frame_from_axis(axis: &Vec3) -> [Vec3; 3] {
    let z = axis.normalize();
    let a = z.map(f64::abs);
    let reference = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let x = (reference - z * z.dot(&reference)).normalize();
    let y = z.cross(&x);
    [x, y, z]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heron_distance_examples() {
        let d = min_distance_point_to_line(
            &Vec3::zeros(),
            &Vec3::new(4.0, 0.0, 0.0),
            &Vec3::new(2.0, 3.0, 0.0),
        )
        .unwrap();
        assert!((d - 3.0).abs() < 1e-12);

        let on = min_distance_point_to_line(
            &Vec3::zeros(),
            &Vec3::new(4.0, 0.0, 0.0),
            &Vec3::new(7.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(on, 0.0);

        let unit = min_distance_point_to_line(&Vec3::zeros(), &Vec3::x(), &Vec3::y()).unwrap();
        assert!((unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_line_points_are_rejected() {
        let a = Vec3::new(1.0, 2.0, 3.0);
        assert!(matches!(
            min_distance_point_to_line(&a, &a, &Vec3::zeros()),
            Err(PlanError::DegenerateLine)
        ));
    }

    #[test]
    fn closest_point_regions() {
        let a = Vec3::zeros();
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(0.0, 1.0, 0.0);
        let inside = closest_point_on_triangle(&Vec3::new(0.2, 0.2, 5.0), &a, &b, &c);
        assert!((inside - Vec3::new(0.2, 0.2, 0.0)).norm() < 1e-12);
        let vertex = closest_point_on_triangle(&Vec3::new(-1.0, -1.0, 0.0), &a, &b, &c);
        assert_eq!(vertex, a);
        let edge = closest_point_on_triangle(&Vec3::new(1.0, 1.0, 0.0), &a, &b, &c);
        assert!((edge - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn clipped_area_of_triangle_half_inside() {
        let cell = Cell {
            min: Vec3::new(0.0, 0.0, -1.0),
            edge: 2.0,
        };
        // Right triangle with legs 4, a quarter of its 2x2 corner square lies inside.
        let a = Vec3::zeros();
        let b = Vec3::new(4.0, 0.0, 0.0);
        let c = Vec3::new(0.0, 4.0, 0.0);
        let area = cell.clipped_triangle_area([&a, &b, &c]);
        assert!((area - 4.0).abs() < 1e-12, "{area}");
    }

    #[test]
    fn box_triangle_contact_is_not_overlap() {
        let bx = OrientedBox {
            center: Vec3::new(0.0, 0.0, 1.0),
            axes: [Vec3::x(), Vec3::y(), Vec3::z()],
            half_extents: Vec3::new(1.0, 1.0, 1.0),
        };
        let a = Vec3::new(-5.0, -5.0, 0.0);
        let b = Vec3::new(5.0, -5.0, 0.0);
        let c = Vec3::new(0.0, 5.0, 0.0);
        assert!(!bx.intersects_triangle([&a, &b, &c]));
        let lowered = OrientedBox {
            center: Vec3::new(0.0, 0.0, 0.9),
            ..bx
        };
        assert!(lowered.intersects_triangle([&a, &b, &c]));
    }

    #[test]
    fn rotated_box_clear_of_slanted_triangle() {
        // Box rotated 45 degrees about z; triangle slides past a vertical edge.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bx = OrientedBox {
            center: Vec3::zeros(),
            axes: [Vec3::new(s, s, 0.0), Vec3::new(-s, s, 0.0), Vec3::z()],
            half_extents: Vec3::new(1.0, 1.0, 1.0),
        };
        let a = Vec3::new(1.5, 0.0, -3.0);
        let b = Vec3::new(0.0, 1.5, -3.0);
        let c = Vec3::new(0.75, 0.75, 3.0);
        // Box face along (1,1)/sqrt2 sits at x + y = sqrt2 < 1.5.
        assert!(!bx.intersects_triangle([&a, &b, &c]));
    }

    #[test]
    fn frame_is_orthonormal() {
        for axis in [Vec3::z(), -Vec3::z(), Vec3::new(1.0, 2.0, -3.0)] {
            let [x, y, z] = frame_from_axis(&axis);
            assert!((x.norm() - 1.0).abs() < 1e-12);
            assert!(x.dot(&y).abs() < 1e-12 && x.dot(&z).abs() < 1e-12);
            assert!((x.cross(&y) - z).norm() < 1e-12);
        }
    }
}
