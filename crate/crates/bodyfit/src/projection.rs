//! Orthographic projection of meshes into the two working views.
//!
//! A view is given by three rotation angles in degrees. The vertex is rotated
//! by `Rz * Ry * Rx` and the third component is dropped; there is no
//! perspective division and no translation. With Z-up meshes the front view
//! (90, 0, 0) keeps (x, -z) and the side view (90, 90, 0) keeps (y, -z), so
//! projected coordinates are already image-style y-down and both views share
//! their vertical coordinate exactly.

use nalgebra::{Matrix3, Point2};

use crate::error::{Error, Result};
use crate::mesh::{BodyPart, Mesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewSpec {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl ViewSpec {
    pub const fn new(dx: f64, dy: f64, dz: f64) -> Self {
        ViewSpec { dx, dy, dz }
    }

    pub const fn front() -> Self {
        ViewSpec::new(90.0, 0.0, 0.0)
    }

    pub const fn side() -> Self {
        ViewSpec::new(90.0, 90.0, 0.0)
    }
}

pub fn rotation_x(degrees: f64) -> Matrix3<f64> {
    let (s, c) = degrees.to_radians().sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rotation_y(degrees: f64) -> Matrix3<f64> {
    let (s, c) = degrees.to_radians().sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rotation_z(degrees: f64) -> Matrix3<f64> {
    let (s, c) = degrees.to_radians().sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// The three per-axis matrices for a view, in (x, y, z) order.
pub fn rotation_matrices(view: ViewSpec) -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    (
        rotation_x(view.dx),
        rotation_y(view.dy),
        rotation_z(view.dz),
    )
}

/// Combined view rotation: x first, then y, then z.
pub fn view_rotation(view: ViewSpec) -> Matrix3<f64> {
    let (rx, ry, rz) = rotation_matrices(view);
    rz * ry * rx
}

/// A mesh flattened into one view: one 2D point per vertex, labels carried
/// through from the mesh segmentation.
#[derive(Debug, Clone)]
pub struct ProjectedView {
    pub points: Vec<Point2<f64>>,
    pub labels: Option<Vec<BodyPart>>,
}

pub fn project(mesh: &Mesh, view: ViewSpec) -> Result<ProjectedView> {
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let r = view_rotation(view);
    let points = mesh
        .vertices
        .iter()
        .map(|v| {
            let q = r * v.coords;
            Point2::new(q.x, q.y)
        })
        .collect();
    Ok(ProjectedView {
        points,
        labels: mesh.part_labels.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::uv_sphere;
    use nalgebra::Point3;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn max_abs_diff(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).abs().max()
    }

    #[test]
    fn zero_view_gives_identities() {
        let (rx, ry, rz) = rotation_matrices(ViewSpec::new(0.0, 0.0, 0.0));
        let id = Matrix3::identity();
        assert_eq!(rx, id);
        assert_eq!(ry, id);
        assert_eq!(rz, id);
    }

    #[test]
    fn quarter_turn_about_z() {
        let rz = rotation_z(90.0);
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!(max_abs_diff(&rz, &expected) < 1e-12);
    }

    #[test]
    fn y_rotations_compose_additively() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let a = rng.random_range(-720.0..720.0);
            let b = rng.random_range(-720.0..720.0);
            let lhs = rotation_y(a) * rotation_y(b);
            let rhs = rotation_y(a + b);
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12, "a={a} b={b}");
        }
    }

    #[test]
    fn origin_projects_to_origin_in_any_view() {
        let m = Mesh::new(vec![Point3::origin()], vec![], None).unwrap();
        for view in [
            ViewSpec::front(),
            ViewSpec::side(),
            ViewSpec::new(17.0, -33.0, 120.0),
        ] {
            let p = project(&m, view).unwrap();
            assert_eq!(p.points[0], Point2::origin());
        }
    }

    #[test]
    fn identity_view_drops_the_third_component() {
        let m = Mesh::new(vec![Point3::new(1.0, 2.0, 3.0)], vec![], None).unwrap();
        let p = project(&m, ViewSpec::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(p.points[0], Point2::new(1.0, 2.0));
    }

    #[test]
    fn front_keeps_x_and_negated_height() {
        let m = Mesh::new(vec![Point3::new(1.0, 2.0, 3.0)], vec![], None).unwrap();
        let p = project(&m, ViewSpec::front()).unwrap();
        assert!((p.points[0].x - 1.0).abs() < 1e-12);
        assert!((p.points[0].y - -3.0).abs() < 1e-12);
    }

    #[test]
    fn front_and_side_share_vertical_coordinates() {
        let sphere = uv_sphere(1.0, 9, 11).translated(nalgebra::Vector3::new(0.3, -0.2, 0.8));
        let front = project(&sphere, ViewSpec::front()).unwrap();
        let side = project(&sphere, ViewSpec::side()).unwrap();
        for (f, s) in front.points.iter().zip(&side.points) {
            assert!((f.y - s.y).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_is_linear_in_scale() {
        let sphere = uv_sphere(1.0, 6, 8);
        let view = ViewSpec::new(40.0, 25.0, -10.0);
        let p1 = project(&sphere, view).unwrap();
        let p2 = project(&sphere.scaled(3.5), view).unwrap();
        for (a, b) in p1.points.iter().zip(&p2.points) {
            assert!((b.coords - a.coords * 3.5).norm() < 1e-9);
        }
    }

    #[test]
    fn empty_mesh_is_rejected() {
        let empty = Mesh::new(Vec::new(), Vec::new(), None).unwrap();
        assert!(project(&empty, ViewSpec::front()).is_err());
    }
}
