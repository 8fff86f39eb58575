//! Simple closed test meshes: cube, UV sphere, capped cylinder. All Z-up.

use nalgebra::Point3;
use std::f64::consts::TAU;

use crate::mesh::Mesh;

/// Axis-aligned unit cube spanning [0,1]^3.
pub fn unit_cube() -> Mesh {
    let vertices = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(1.0, 0.0, 1.0),
        Point3::new(1.0, 1.0, 1.0),
        Point3::new(0.0, 1.0, 1.0),
    ];
    let faces = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [2, 3, 7],
        [2, 7, 6],
        [3, 0, 4],
        [3, 4, 7],
        [1, 2, 6],
        [1, 6, 5],
    ];
    Mesh::new(vertices, faces, None).unwrap()
}

/// UV sphere centered at the origin. `stacks` >= 2, `slices` >= 3.
pub fn uv_sphere(radius: f64, stacks: usize, slices: usize) -> Mesh {
    assert!(stacks >= 2 && slices >= 3);
    let mut vertices = vec![Point3::new(0.0, 0.0, radius)];
    for i in 1..stacks {
        let polar = std::f64::consts::PI * i as f64 / stacks as f64;
        let (sp, cp) = polar.sin_cos();
        for j in 0..slices {
            let az = TAU * j as f64 / slices as f64;
            let (sa, ca) = az.sin_cos();
            vertices.push(Point3::new(radius * sp * ca, radius * sp * sa, radius * cp));
        }
    }
    vertices.push(Point3::new(0.0, 0.0, -radius));
    let bottom = vertices.len() - 1;

    let ring = |i: usize, j: usize| 1 + (i - 1) * slices + (j % slices);
    let mut faces = Vec::new();
    for j in 0..slices {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            let a = ring(i, j);
            let b = ring(i, j + 1);
            let c = ring(i + 1, j + 1);
            let d = ring(i + 1, j);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    for j in 0..slices {
        faces.push([bottom, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    Mesh::new(vertices, faces, None).unwrap()
}

/// Closed cylinder along Z from z=0 to z=height. `slices` >= 3, `stacks` >= 1.
pub fn cylinder(radius: f64, height: f64, slices: usize, stacks: usize) -> Mesh {
    assert!(slices >= 3 && stacks >= 1);
    let mut vertices = Vec::new();
    for i in 0..=stacks {
        let z = height * i as f64 / stacks as f64;
        for j in 0..slices {
            let az = TAU * j as f64 / slices as f64;
            let (sa, ca) = az.sin_cos();
            vertices.push(Point3::new(radius * ca, radius * sa, z));
        }
    }
    let bottom_center = vertices.len();
    vertices.push(Point3::new(0.0, 0.0, 0.0));
    let top_center = vertices.len();
    vertices.push(Point3::new(0.0, 0.0, height));

    let ring = |i: usize, j: usize| i * slices + (j % slices);
    let mut faces = Vec::new();
    for i in 0..stacks {
        for j in 0..slices {
            let a = ring(i, j);
            let b = ring(i, j + 1);
            let c = ring(i + 1, j + 1);
            let d = ring(i + 1, j);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    for j in 0..slices {
        faces.push([bottom_center, ring(0, j + 1), ring(0, j)]);
        faces.push([top_center, ring(stacks, j), ring(stacks, j + 1)]);
    }
    Mesh::new(vertices, faces, None).unwrap()
}
