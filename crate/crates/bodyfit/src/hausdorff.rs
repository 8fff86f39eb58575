//! Symmetric Hausdorff distance between meshes, over vertex-to-surface
//! distances. Brute force across faces is adequate at the mesh sizes this
//! crate works with; the vertex loop runs in parallel.

use nalgebra::Point3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

fn point_segment_distance(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

/// Distance from a point to a solid triangle (closest-point region tests).
pub fn point_triangle_distance(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (p - a).norm();
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (p - b).norm();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (p - (a + t * ab)).norm();
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (p - c).norm();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (p - (a + t * ac)).norm();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + t * (c - b))).norm();
    }

    let denom = va + vb + vc;
    if denom > 0.0 {
        let v = vb / denom;
        let w = vc / denom;
        let dist = (p - (a + v * ab + w * ac)).norm();
        if dist.is_finite() {
            return dist;
        }
    }
    // Degenerate (zero-area) triangle: fall back to its edges.
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, a, c))
}

fn check(mesh: &Mesh) -> Result<()> {
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if mesh.faces.is_empty() {
        return Err(Error::invalid("mesh has no faces"));
    }
    Ok(())
}

/// Distance from each vertex of `from` to the surface of `to`.
pub fn vertex_surface_distances(from: &Mesh, to: &Mesh) -> Result<Vec<f64>> {
    check(from)?;
    check(to)?;
    Ok(from
        .vertices
        .par_iter()
        .map(|p| {
            to.faces
                .iter()
                .map(|f| {
                    point_triangle_distance(
                        p,
                        &to.vertices[f[0]],
                        &to.vertices[f[1]],
                        &to.vertices[f[2]],
                    )
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

fn directed(from: &Mesh, to: &Mesh) -> Result<f64> {
    Ok(vertex_surface_distances(from, to)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance: the larger of the two directed distances.
pub fn hausdorff_distance(a: &Mesh, b: &Mesh) -> Result<f64> {
    Ok(directed(a, b)?.max(directed(b, a)?))
}
