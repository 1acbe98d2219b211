//! Mesh (STL, OBJ) and measurement-point file readers and writers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::mesh::{MeasurementPoint, MpKind, TriangleMesh};
use super::primitives::Vec3;
use crate::error::{PlanError, Result};

/// Loads an STL (ASCII or binary) or OBJ file, chosen by extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let bytes = fs::read(path).map_err(|e| PlanError::io(path, e))?;
    let (vertices, triangles) = match ext.as_deref() {
        Some("stl") => parse_stl(&bytes)?,
        Some("obj") => parse_obj(&String::from_utf8_lossy(&bytes))?,
        _ => return Err(PlanError::UnsupportedFormat(path.to_path_buf())),
    };
    TriangleMesh::new(vertices, triangles)
}

pub fn parse_stl(bytes: &[u8]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    if is_binary_stl(bytes) {
        parse_binary_stl(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| PlanError::parse("stl", e))?;
        parse_ascii_stl(text)
    }
}

// A binary file's size is fully determined by its facet count; ASCII files
// that happen to start with "solid" will not match it.
fn is_binary_stl(bytes: &[u8]) -> bool {
    if bytes.len() < 84 {
        return false;
    }
    let count = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    bytes.len() == 84 + 50 * count
}

fn parse_binary_stl(bytes: &[u8]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let count = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    let mut welder = Welder::default();
    let mut triangles = Vec::with_capacity(count);
    for facet in bytes[84..].chunks_exact(50) {
        let read = |offset: usize| {
            f32::from_le_bytes([
                facet[offset],
                facet[offset + 1],
                facet[offset + 2],
                facet[offset + 3],
            ]) as f64
        };
        let mut tri = [0usize; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let base = 12 + 12 * k;
            *slot = welder.index(Vec3::new(read(base), read(base + 4), read(base + 8)));
        }
        triangles.push(tri);
    }
    Ok((welder.vertices, triangles))
}

fn parse_ascii_stl(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut welder = Welder::default();
    let mut triangles = Vec::new();
    let mut pending: Vec<usize> = Vec::with_capacity(3);
    for (lineno, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("vertex") => {
                let v = parse_vec3(&mut tokens)
                    .ok_or_else(|| PlanError::parse("stl", format!("bad vertex on line {}", lineno + 1)))?;
                pending.push(welder.index(v));
            }
            Some("endfacet") => {
                if pending.len() != 3 {
                    return Err(PlanError::parse(
                        "stl",
                        format!("facet ending on line {} has {} vertices", lineno + 1, pending.len()),
                    ));
                }
                triangles.push([pending[0], pending[1], pending[2]]);
                pending.clear();
            }
            _ => {}
        }
    }
    if triangles.is_empty() {
        return Err(PlanError::parse("stl", "no facets found"));
    }
    Ok((welder.vertices, triangles))
}

pub fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let v = parse_vec3(&mut tokens)
                    .ok_or_else(|| PlanError::parse("obj", format!("bad vertex on line {}", lineno + 1)))?;
                vertices.push(v);
            }
            Some("f") => {
                let mut face = Vec::new();
                for token in tokens {
                    let raw = token.split('/').next().unwrap_or("");
                    let idx: i64 = raw.parse().map_err(|_| {
                        PlanError::parse("obj", format!("bad face index {token:?} on line {}", lineno + 1))
                    })?;
                    let resolved = match idx {
                        i if i > 0 => (i - 1) as usize,
                        i if i < 0 && (-i) as usize <= vertices.len() => vertices.len() - (-i) as usize,
                        _ => {
                            return Err(PlanError::parse(
                                "obj",
                                format!("face index {idx} out of range on line {}", lineno + 1),
                            ))
                        }
                    };
                    face.push(resolved);
                }
                if face.len() < 3 {
                    return Err(PlanError::parse("obj", format!("face with fewer than 3 vertices on line {}", lineno + 1)));
                }
                for k in 1..face.len() - 1 {
                    triangles.push([face[0], face[k], face[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

fn parse_vec3<'a>(tokens: &mut impl Iterator<Item = &'a str>) -> Option<Vec3> {
    let x = tokens.next()?.parse().ok()?;
    let y = tokens.next()?.parse().ok()?;
    let z = tokens.next()?.parse().ok()?;
    Some(Vec3::new(x, y, z))
}

#[derive(Default)]
struct Welder {
    vertices: Vec<Vec3>,
    lookup: HashMap<[u64; 3], usize>,
}

impl Welder {
    fn index(&mut self, v: Vec3) -> usize {
        let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
        *self.lookup.entry(key).or_insert_with(|| {
            self.vertices.push(v);
            self.vertices.len() - 1
        })
    }
}

pub fn write_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    fs::write(path.as_ref(), out).map_err(|e| PlanError::io(path.as_ref(), e))
}

pub fn write_ascii_stl(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("solid part\n");
    for (i, n) in mesh.normals().iter().enumerate() {
        let _ = writeln!(out, "  facet normal {} {} {}\n    outer loop", n.x, n.y, n.z);
        for v in mesh.triangle(i) {
            let _ = writeln!(out, "      vertex {} {} {}", v.x, v.y, v.z);
        }
        out.push_str("    endloop\n  endfacet\n");
    }
    out.push_str("endsolid part\n");
    fs::write(path.as_ref(), out).map_err(|e| PlanError::io(path.as_ref(), e))
}

pub fn write_binary_stl(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = vec![0u8; 80];
    out.extend_from_slice(&(mesh.len() as u32).to_le_bytes());
    for (i, n) in mesh.normals().iter().enumerate() {
        for v in std::iter::once(n).chain(mesh.triangle(i)) {
            for c in v.iter() {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&[0, 0]);
    }
    fs::write(path.as_ref(), out).map_err(|e| PlanError::io(path.as_ref(), e))
}

/// Symmetric `±` tolerance per feature kind, used when a record leaves its
/// tolerance blank.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KindTolerances {
    pub hole: f64,
    pub slot: f64,
    pub trimming: f64,
    pub surface: f64,
}

impl Default for KindTolerances {
    fn default() -> Self {
        KindTolerances {
            hole: 0.5,
            slot: 0.5,
            trimming: 0.7,
            surface: 1.0,
        }
    }
}

impl KindTolerances {
    pub fn half_width(&self, kind: MpKind) -> f64 {
        match kind {
            MpKind::Hole => self.hole,
            MpKind::Slot => self.slot,
            MpKind::Trimming => self.trimming,
            MpKind::Surface => self.surface,
        }
    }
}

/// Parses the measurement point list.
///
/// One comma-separated record per line:
/// `id, x, y, z, nx, ny, nz, kind, tolerance_mm, critical`.
/// `tolerance_mm` is the symmetric `±` half-width; `-` or an empty field
/// takes the kind default. `critical` is `true`/`false` (or `1`/`0`).
/// Blank lines, `#` comments and a header line starting with `id` are skipped.
pub fn parse_measurement_points(text: &str, defaults: &KindTolerances) -> Result<Vec<MeasurementPoint>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields[0].eq_ignore_ascii_case("id") {
            continue;
        }
        let err = |msg: String| PlanError::parse("measurement points", format!("line {}: {msg}", lineno + 1));
        if fields.len() != 10 {
            return Err(err(format!("expected 10 fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| err(format!("field {} is not a number: {:?}", i + 1, fields[i])))
        };
        let kind: MpKind = fields[7].parse().map_err(|_| err(format!("unknown kind {:?}", fields[7])))?;
        let half_width = match fields[8] {
            "" | "-" => defaults.half_width(kind),
            _ => num(8)?,
        };
        let critical = match fields[9].to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(err(format!("critical flag {other:?}"))),
        };
        out.push(MeasurementPoint::new(
            fields[0],
            Vec3::new(num(1)?, num(2)?, num(3)?),
            Vec3::new(num(4)?, num(5)?, num(6)?),
            kind,
            2.0 * half_width,
            critical,
        )?);
    }
    super::mesh::check_unique_ids(&out)?;
    Ok(out)
}

pub fn load_measurement_points(path: impl AsRef<Path>, defaults: &KindTolerances) -> Result<Vec<MeasurementPoint>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| PlanError::io(path, e))?;
    parse_measurement_points(&text, defaults)
}

pub fn write_measurement_points(mps: &[MeasurementPoint], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("id,x,y,z,nx,ny,nz,kind,tolerance_mm,critical\n");
    for mp in mps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            mp.id,
            mp.position.x,
            mp.position.y,
            mp.position.z,
            mp.normal.x,
            mp.normal.y,
            mp.normal.z,
            mp.kind,
            mp.tolerance / 2.0,
            mp.critical
        );
    }
    fs::write(path.as_ref(), out).map_err(|e| PlanError::io(path.as_ref(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE_STL: &str = "solid sq
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 0 0
      vertex 1 1 0
    endloop
  endfacet
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 1 0
      vertex 0 1 0
    endloop
  endfacet
endsolid sq
";

    #[test]
    fn ascii_stl_welds_shared_vertices() {
        let (v, t) = parse_stl(SQUARE_STL.as_bytes()).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn stl_roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let (v, t) = parse_stl(SQUARE_STL.as_bytes()).unwrap();
        let mesh = TriangleMesh::new(v, t).unwrap();
        for (name, binary) in [("a.stl", false), ("b.stl", true)] {
            let path = dir.path().join(name);
            if binary {
                write_binary_stl(&mesh, &path).unwrap();
            } else {
                write_ascii_stl(&mesh, &path).unwrap();
            }
            let back = load_mesh(&path).unwrap();
            assert_eq!(back.len(), 2);
            assert_eq!(back.vertices().len(), 4);
            assert!(back.normals().iter().all(|n| *n == Vec3::z()));
        }
    }

    #[test]
    fn obj_quads_are_fan_triangulated() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1/1 2/2/1 3/3/1 4/4/1\n";
        let (v, t) = parse_obj(text).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(t, vec![[0, 1, 2], [0, 2, 3]]);
        let neg = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(neg.1, vec![[0, 1, 2]]);
    }

    #[test]
    fn obj_with_zero_area_face_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.obj");
        std::fs::write(&path, "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n").unwrap();
        assert!(matches!(
            load_mesh(&path),
            Err(PlanError::DegenerateTriangle { index: 0 })
        ));
    }

    #[test]
    fn unknown_extension() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("part.ply");
        std::fs::write(&path, "ply").unwrap();
        assert!(matches!(load_mesh(&path), Err(PlanError::UnsupportedFormat(_))));
    }

    #[test]
    fn measurement_points_parse_defaults_and_errors() {
        let text = "id,x,y,z,nx,ny,nz,kind,tolerance_mm,critical\n\
                    h1, 0, 0, 0, 0, 0, 1, hole, -, true\n\
                    s1, 1, 0, 0, 0, 0, 1, surface, 0.25, false # inline comment\n";
        let mps = parse_measurement_points(text, &KindTolerances::default()).unwrap();
        assert_eq!(mps.len(), 2);
        assert_eq!(mps[0].tolerance, 1.0);
        assert_eq!(mps[1].tolerance, 0.5);
        assert!(mps[0].critical && !mps[1].critical);

        let bad = "h1, 0, 0, 0, 0, 0, 1, bolt, -, true\n";
        assert!(parse_measurement_points(bad, &KindTolerances::default()).is_err());
        let dup = "a,0,0,0,0,0,1,hole,-,1\na,1,0,0,0,0,1,hole,-,1\n";
        assert!(parse_measurement_points(dup, &KindTolerances::default()).is_err());
    }
}
