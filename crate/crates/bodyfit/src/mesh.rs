//! Triangle mesh container and Wavefront-style text I/O.
//!
//! Meshes are millimeter-scale and Z-up: X runs left/right, Y front/back,
//! Z is body height. Files honor only `v` and `f` records; everything else is
//! ignored. Face indices are 1-based on disk, 0-based in memory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// The nine body part categories that carry matching weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BodyPart {
    Head,
    Chest,
    Waist,
    Hip,
    Leg,
    Foot,
    Arm,
    Elbow,
    Hand,
}

impl BodyPart {
    pub const ALL: [BodyPart; 9] = [
        BodyPart::Head,
        BodyPart::Chest,
        BodyPart::Waist,
        BodyPart::Hip,
        BodyPart::Leg,
        BodyPart::Foot,
        BodyPart::Arm,
        BodyPart::Elbow,
        BodyPart::Hand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BodyPart::Head => "head",
            BodyPart::Chest => "chest",
            BodyPart::Waist => "waist",
            BodyPart::Hip => "hip",
            BodyPart::Leg => "leg",
            BodyPart::Foot => "foot",
            BodyPart::Arm => "arm",
            BodyPart::Elbow => "elbow",
            BodyPart::Hand => "hand",
        }
    }

    pub fn from_name(name: &str) -> Option<BodyPart> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Position within [`BodyPart::ALL`], usable as an array index.
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[usize; 3]>,
    /// Per-vertex body part, when the mesh comes from a segmented template.
    pub part_labels: Option<Vec<BodyPart>>,
}

impl Mesh {
    /// Builds a mesh and checks its invariants: every face index in range,
    /// no face touching the same vertex twice, labels (if any) one per vertex.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        faces: Vec<[usize; 3]>,
        part_labels: Option<Vec<BodyPart>>,
    ) -> Result<Self> {
        let n = vertices.len();
        for (i, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(format!(
                    "face {i} references vertex {bad} but the mesh has {n} vertices"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::invalid(format!(
                    "face {i} references the same vertex twice"
                )));
            }
        }
        if let Some(labels) = &part_labels {
            if labels.len() != n {
                return Err(Error::invalid(format!(
                    "{} part labels for {} vertices",
                    labels.len(),
                    n
                )));
            }
        }
        Ok(Mesh {
            vertices,
            faces,
            part_labels,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn bounds(&self) -> Result<(Point3<f64>, Point3<f64>)> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Ok((lo, hi))
    }

    /// Vertical extent of the bounding box (Z is up).
    pub fn height(&self) -> Result<f64> {
        let (lo, hi) = self.bounds()?;
        Ok(hi.z - lo.z)
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            faces: self.faces.clone(),
            part_labels: self.part_labels.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Mesh {
        Mesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| Point3::from(v.coords * factor))
                .collect(),
            faces: self.faces.clone(),
            part_labels: self.part_labels.clone(),
        }
    }
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    // Faces keep their source line so range errors can point at it.
    let mut faces: Vec<(usize, [usize; 3])> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<&str> = tokens.collect();
                if coords.len() != 3 {
                    return Err(Error::parse(
                        line_no,
                        format!("vertex record needs 3 coordinates, found {}", coords.len()),
                    ));
                }
                let mut p = [0.0; 3];
                for (k, c) in coords.iter().enumerate() {
                    p[k] = c.parse::<f64>().map_err(|_| {
                        Error::parse(line_no, format!("bad coordinate {c:?}"))
                    })?;
                }
                vertices.push(Point3::new(p[0], p[1], p[2]));
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    return Err(Error::parse(
                        line_no,
                        format!("only triangles are supported, face has {} vertices", refs.len()),
                    ));
                }
                let mut f = [0usize; 3];
                for (k, r) in refs.iter().enumerate() {
                    // `3/5/7` style references use the leading vertex index.
                    let first = r.split('/').next().unwrap_or("");
                    let one_based: usize = first.parse().map_err(|_| {
                        Error::parse(line_no, format!("bad face index {r:?}"))
                    })?;
                    if one_based == 0 {
                        return Err(Error::parse(line_no, "face indices are 1-based"));
                    }
                    f[k] = one_based - 1;
                }
                faces.push((line_no, f));
            }
            _ => {} // other records ignored
        }
    }

    let n = vertices.len();
    for &(line_no, f) in &faces {
        if let Some(&bad) = f.iter().find(|&&v| v >= n) {
            return Err(Error::parse(
                line_no,
                format!("face index {} out of range (mesh has {} vertices)", bad + 1, n),
            ));
        }
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return Err(Error::parse(line_no, "face references the same vertex twice"));
        }
    }

    Mesh::new(vertices, faces.into_iter().map(|(_, f)| f).collect(), None)
}

pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        // `{}` prints the shortest representation that round-trips exactly.
        writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    parse_mesh(&fs::read_to_string(path)?)
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_mesh(mesh))?;
    Ok(())
}
