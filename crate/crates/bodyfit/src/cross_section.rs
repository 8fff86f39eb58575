//! Planar cross-sections of triangle meshes.
//!
//! A slice intersects every triangle with the plane, computes one exact
//! intersection point per crossed mesh edge, and chains the per-triangle
//! segments into closed loops by walking edge adjacency. Keying points by the
//! mesh edge they lie on (rather than by coordinates) makes the chaining exact:
//! the two triangles sharing an edge agree on the intersection bit-for-bit.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn normal(self) -> Vector3<f64> {
        match self {
            Axis::X => Vector3::x(),
            Axis::Y => Vector3::y(),
            Axis::Z => Vector3::z(),
        }
    }
}

/// Closed intersection loops of a mesh with the plane `normal . p = offset`.
#[derive(Debug, Clone)]
pub struct CrossSection {
    pub normal: Vector3<f64>,
    pub offset: f64,
    /// Each loop is an ordered polyline; the last point connects back to the
    /// first. Open chains (from non-manifold regions) are dropped.
    pub loops: Vec<Vec<Point3<f64>>>,
}

impl CrossSection {
    pub fn perimeters(&self) -> Vec<f64> {
        self.loops.iter().map(|l| perimeter(l)).collect()
    }
}

fn perimeter(points: &[Point3<f64>]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        total += (points[j] - points[i]).norm();
    }
    total
}

type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Slices `mesh` with the plane `coordinate[axis] == offset`.
pub fn plane_cross_section(mesh: &Mesh, axis: Axis, offset: f64) -> Result<CrossSection> {
    oblique_cross_section(mesh, axis.normal(), offset)
}

/// Slices `mesh` with the plane `normal . p == offset` for any nonzero
/// normal (normalized internally).
///
/// A plane that misses the mesh yields an empty section. Vertices exactly on
/// the plane count as lying on the positive side, so a slice through a vertex
/// ring still produces well-formed loops.
pub fn oblique_cross_section(
    mesh: &Mesh,
    normal: Vector3<f64>,
    offset: f64,
) -> Result<CrossSection> {
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let len = normal.norm();
    if !(len > 0.0) || !len.is_finite() {
        return Err(Error::invalid("slice plane normal must be nonzero"));
    }
    let n = normal / len;
    let offset = offset / len;
    let dist = |v: &Point3<f64>| n.dot(&v.coords) - offset;
    let side: Vec<bool> = mesh.vertices.iter().map(|v| dist(v) >= 0.0).collect();

    // One intersection point per crossed mesh edge, computed once.
    let mut cut_points: HashMap<EdgeKey, Point3<f64>> = HashMap::new();
    let mut cut = |a: usize, b: usize, mesh: &Mesh| -> EdgeKey {
        let key = edge_key(a, b);
        cut_points.entry(key).or_insert_with(|| {
            let (lo, hi) = key;
            let da = dist(&mesh.vertices[lo]);
            let db = dist(&mesh.vertices[hi]);
            let t = da / (da - db);
            let mut p = mesh.vertices[lo] + t * (mesh.vertices[hi] - mesh.vertices[lo]);
            p -= n * dist(&p); // pin onto the plane exactly
            p
        });
        key
    };

    // Each crossed triangle contributes one segment joining two edge keys.
    let mut adjacency: HashMap<EdgeKey, Vec<EdgeKey>> = HashMap::new();
    for f in &mesh.faces {
        let mut crossed: Vec<EdgeKey> = Vec::with_capacity(2);
        for e in 0..3 {
            let (a, b) = (f[e], f[(e + 1) % 3]);
            if side[a] != side[b] {
                crossed.push(cut(a, b, mesh));
            }
        }
        if crossed.len() == 2 {
            adjacency.entry(crossed[0]).or_default().push(crossed[1]);
            adjacency.entry(crossed[1]).or_default().push(crossed[0]);
        }
    }

    // Walk the adjacency graph; every node of a closed manifold slice has
    // degree 2, so the components are disjoint cycles.
    let mut visited: HashMap<EdgeKey, bool> = HashMap::new();
    let mut loops = Vec::new();
    let mut keys: Vec<EdgeKey> = adjacency.keys().copied().collect();
    keys.sort_unstable(); // deterministic loop order
    for start in keys {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut closed = false;
        loop {
            let cur = *chain.last().unwrap();
            let neighbors = &adjacency[&cur];
            if neighbors.len() != 2 {
                break; // open or non-manifold chain; dropped below
            }
            let prev = if chain.len() >= 2 {
                Some(chain[chain.len() - 2])
            } else {
                None
            };
            let next = if Some(neighbors[0]) == prev {
                neighbors[1]
            } else {
                neighbors[0]
            };
            if next == start {
                closed = true;
                break;
            }
            if visited.get(&next).copied().unwrap_or(false) {
                break; // re-entering a consumed chain; not a simple cycle
            }
            visited.insert(next, true);
            chain.push(next);
        }
        if closed && chain.len() >= 3 {
            loops.push(chain.iter().map(|key| cut_points[key]).collect());
        }
    }

    Ok(CrossSection {
        normal: n,
        offset,
        loops,
    })
}
