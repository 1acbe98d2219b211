//! Synthetic parts for demos and tests: a flat plate with a grid of
//! points, random smooth height fields, and a plate with a few
//! tight-tolerance holes that need near-normal incidence.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{PlanError, Result};
use crate::geometry::{
    write_binary_stl, write_measurement_points, KindTolerances, MeasurementPoint, MpKind, TriangleMesh, Vec3,
};

/// A part, its measurement points and any obstacles.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub mesh: TriangleMesh,
    pub mps: Vec<MeasurementPoint>,
    pub obstacles: Vec<TriangleMesh>,
}

impl Scenario {
    /// Writes `part.stl`, `points.csv`, any `obstacle_<i>.stl` and a
    /// `config.toml` built from `base` into `dir`; returns the config path.
    pub fn write(&self, dir: impl AsRef<Path>, base: &Config) -> Result<PathBuf> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| PlanError::io(dir, e))?;
        write_binary_stl(&self.mesh, dir.join("part.stl"))?;
        write_measurement_points(&self.mps, dir.join("points.csv"))?;
        let mut cfg = base.clone();
        cfg.input.mesh = Some("part.stl".into());
        cfg.input.points = Some("points.csv".into());
        cfg.input.obstacles.clear();
        for (i, o) in self.obstacles.iter().enumerate() {
            let name = format!("obstacle_{i}.stl");
            write_binary_stl(o, dir.join(&name))?;
            cfg.input.obstacles.push(name.into());
        }
        cfg.output.dir = "out".into();
        let path = dir.join("config.toml");
        fs::write(&path, cfg.to_toml()).map_err(|e| PlanError::io(&path, e))?;
        Ok(path)
    }
}

/// Regular grid mesh over `[0, size]^2` with heights from `z`.
pub fn height_field(size: f64, cells: usize, z: impl Fn(f64, f64) -> f64) -> TriangleMesh {
    let n = cells + 1;
    let h = size / cells as f64;
    let vertices = (0..n * n)
        .map(|k| {
            let (x, y) = ((k % n) as f64 * h, (k / n) as f64 * h);
            Vec3::new(x, y, z(x, y))
        })
        .collect();
    let mut triangles = Vec::with_capacity(2 * cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            let a = j * n + i;
            triangles.push([a, a + 1, a + n + 1]);
            triangles.push([a, a + n + 1, a + n]);
        }
    }
    TriangleMesh::new(vertices, triangles).expect("height field is well formed")
}

fn mp(id: String, p: Vec3, n: Vec3, kind: MpKind, half_width: f64) -> MeasurementPoint {
    MeasurementPoint::new(id, p, n, kind, 2.0 * half_width, kind != MpKind::Surface).expect("valid point")
}

/// Square plate with one surface point at the center of every `pitch` cell,
/// so each point coincides with its voxel center when the voxel edge equals
/// `pitch`.
pub fn flat_plate(size: f64, pitch: f64, tolerances: &KindTolerances) -> Scenario {
    let mesh = height_field(size, 1, |_, _| 0.0);
    let k = (size / pitch).round() as usize;
    let mut mps = Vec::new();
    for j in 0..k {
        for i in 0..k {
            let p = Vec3::new((i as f64 + 0.5) * pitch, (j as f64 + 0.5) * pitch, 0.0);
            mps.push(mp(format!("s{j}_{i}"), p, Vec3::z(), MpKind::Surface, tolerances.surface));
        }
    }
    Scenario {
        name: "flat-plate".into(),
        mesh,
        mps,
        obstacles: Vec::new(),
    }
}

/// Smooth random height field with `n_mps` points of random kinds placed on
/// random triangles. Same seed, same part.
pub fn random_part(seed: u64, n_mps: usize, tolerances: &KindTolerances) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 300.0;
    let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.0..size),
                rng.gen_range(0.0..size),
                rng.gen_range(-25.0..25.0),
                rng.gen_range(60.0..120.0),
            )
        })
        .collect();
    let mesh = height_field(size, 12, |x, y| {
        bumps
            .iter()
            .map(|&(cx, cy, a, r)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (r * r)).exp())
            .sum()
    });
    let mut mps = Vec::with_capacity(n_mps);
    for i in 0..n_mps {
        let t = rng.gen_range(0..mesh.len());
        let [a, b, c] = mesh.triangle(t);
        let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
        if u + v > 1.0 {
            (u, v) = (1.0 - u, 1.0 - v);
        }
        let p = a + (b - a) * u + (c - a) * v;
        let kind = MpKind::ALL[rng.gen_range(0..4)];
        mps.push(mp(format!("{}{i}", kind.as_str()), p, mesh.normals()[t], kind, tolerances.half_width(kind)));
    }
    Scenario {
        name: format!("random-{seed}"),
        mesh,
        mps,
        obstacles: Vec::new(),
    }
}

/// Flat plate of surface points where the points listed in `tight` (grid
/// indices) become holes with tolerance `±tight_half_width`. With a tight
/// enough tolerance only poses almost straight above those holes may
/// measure them.
pub fn tight_tolerance_plate(size: f64, pitch: f64, tight: &[usize], tight_half_width: f64) -> Scenario {
    let mut s = flat_plate(size, pitch, &KindTolerances::default());
    for &i in tight {
        let old = &s.mps[i];
        s.mps[i] = mp(format!("h{i}"), old.position, old.normal, MpKind::Hole, tight_half_width);
    }
    s.name = "tight-tolerance".into();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::geometry::{load_measurement_points, load_mesh};

    #[test]
    fn random_parts_are_reproducible_and_on_surface() {
        let tol = KindTolerances::default();
        let a = random_part(4, 12, &tol);
        let b = random_part(4, 12, &tol);
        assert_eq!(a.mps, b.mps);
        assert_ne!(a.mps, random_part(5, 12, &tol).mps);
        for p in &a.mps {
            let (q, _) = a.mesh.closest_point(&p.position);
            assert!((q - p.position).norm() < 1e-9);
        }
    }

    #[test]
    fn plate_points_sit_on_cell_centers() {
        let s = flat_plate(120.0, 40.0, &KindTolerances::default());
        assert_eq!(s.mps.len(), 9);
        assert_eq!(s.mps[4].position, Vec3::new(60.0, 60.0, 0.0));
        let t = tight_tolerance_plate(120.0, 40.0, &[4], 0.36);
        assert_eq!(t.mps[4].kind, MpKind::Hole);
        assert!((t.mps[4].tolerance - 0.72).abs() < 1e-12);
    }

    #[test]
    fn written_scenario_loads_back() {
        let dir = tempfile::tempdir().unwrap();
        let s = flat_plate(80.0, 40.0, &KindTolerances::default());
        let path = s.write(dir.path(), &Config::default()).unwrap();
        let cfg = Config::load(&path, &[]).unwrap();
        cfg.validate().unwrap();
        let mesh = load_mesh(cfg.input.mesh.unwrap()).unwrap();
        assert_eq!(mesh.len(), 2);
        let mps = load_measurement_points(cfg.input.points.unwrap(), &cfg.tolerances).unwrap();
        assert_eq!(mps.len(), 4);
        for (a, b) in mps.iter().zip(&s.mps) {
            assert_eq!(a.id, b.id);
            assert!((a.tolerance - b.tolerance).abs() < 1e-12);
        }
    }
}
