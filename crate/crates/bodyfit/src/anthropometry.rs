//! The sixteen anthropometric measurements and their error statistics.
//!
//! Measures are landmark-driven and fall into three kinds: circumferences
//! (cross-section perimeter through a landmark, sliced perpendicular to the
//! body axis), lengths (Euclidean distance between two landmarks), and the
//! overall height (vertex extent along the body axis). The body axis runs
//! from the crotch landmark to the top of the head, which makes every
//! measure invariant under rigid motion of the mesh. Raw values are
//! millimetres; comparisons typically rescale both meshes to a common
//! stature first.

use nalgebra::{Point3, Vector3};

use crate::cross_section::oblique_cross_section;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub const MEASUREMENT_COUNT: usize = 16;

/// The seven measures reported in the condensed error table: neck, torso
/// length, chest, waist, pelvis, thigh, shoulder breadth.
pub const KEY_SUBSET: [usize; 7] = [1, 2, 3, 4, 5, 11, 15];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Perimeter of the cross-section through this landmark.
    Circumference(&'static str),
    /// Euclidean distance between two landmarks.
    Length(&'static str, &'static str),
    /// Vertex extent along the body axis.
    AxisHeight,
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureDef {
    pub letter: char,
    pub name: &'static str,
    pub kind: MeasureKind,
}

use MeasureKind::{AxisHeight, Circumference, Length};

pub const MEASUREMENT_SPEC: [MeasureDef; MEASUREMENT_COUNT] = [
    MeasureDef { letter: 'A', name: "head circumference", kind: Circumference("head") },
    MeasureDef { letter: 'B', name: "neck circumference", kind: Circumference("neck") },
    MeasureDef { letter: 'C', name: "torso length", kind: Length("sternum_top", "crotch") },
    MeasureDef { letter: 'D', name: "chest circumference", kind: Circumference("chest") },
    MeasureDef { letter: 'E', name: "waist circumference", kind: Circumference("waist") },
    MeasureDef { letter: 'F', name: "pelvis circumference", kind: Circumference("pelvis") },
    MeasureDef { letter: 'G', name: "wrist circumference", kind: Circumference("l_wrist") },
    MeasureDef { letter: 'H', name: "bicep circumference", kind: Circumference("l_bicep") },
    MeasureDef { letter: 'I', name: "forearm circumference", kind: Circumference("l_forearm") },
    MeasureDef { letter: 'J', name: "arm length", kind: Length("l_acromion", "l_wrist") },
    MeasureDef { letter: 'K', name: "leg length", kind: Length("crotch", "l_ankle") },
    MeasureDef { letter: 'L', name: "thigh circumference", kind: Circumference("l_thigh") },
    MeasureDef { letter: 'M', name: "calf circumference", kind: Circumference("l_calf") },
    MeasureDef { letter: 'N', name: "ankle circumference", kind: Circumference("l_ankle") },
    MeasureDef { letter: 'O', name: "overall height", kind: AxisHeight },
    MeasureDef { letter: 'P', name: "shoulder breadth", kind: Length("l_acromion", "r_acromion") },
];

fn lookup(landmarks: &[(String, usize)], name: &str) -> Result<usize> {
    landmarks
        .iter()
        .find(|(n, _)| n == name)
        .map(|&(_, i)| i)
        .ok_or_else(|| Error::invalid(format!("landmark {name} is missing")))
}

fn landmark_point(mesh: &Mesh, landmarks: &[(String, usize)], name: &str) -> Result<Point3<f64>> {
    let idx = lookup(landmarks, name)?;
    mesh.vertices
        .get(idx)
        .copied()
        .ok_or_else(|| Error::invalid(format!("landmark {name} index {idx} out of range")))
}

/// Crotch-to-crown direction; the frame-independent vertical.
pub fn body_axis(mesh: &Mesh, landmarks: &[(String, usize)]) -> Result<Vector3<f64>> {
    let top = landmark_point(mesh, landmarks, "head_top")?;
    let bottom = landmark_point(mesh, landmarks, "crotch")?;
    let axis = top - bottom;
    let len = axis.norm();
    if !(len > 0.0) {
        return Err(Error::invalid("degenerate body axis"));
    }
    Ok(axis / len)
}

/// Perimeter of the mesh cross-section through `site` perpendicular to
/// `axis`. When the plane cuts several loops (torso plus arms, both legs),
/// the loop passing nearest the site wins; the plane runs through the
/// landmark vertex, so the loop around its own body part touches the site
/// and beats any limb the plane happens to cross elsewhere.
pub fn circumference_at(mesh: &Mesh, axis: Vector3<f64>, site: Point3<f64>) -> Result<f64> {
    let section = oblique_cross_section(mesh, axis, axis.dot(&site.coords))?;
    let mut best: Option<(f64, f64)> = None; // (distance to site, perimeter)
    for lp in &section.loops {
        let d = lp
            .iter()
            .map(|p| (p - site).norm())
            .fold(f64::INFINITY, f64::min);
        let perimeter: f64 = (0..lp.len())
            .map(|i| (lp[(i + 1) % lp.len()] - lp[i]).norm())
            .sum();
        if best.is_none() || d < best.unwrap().0 {
            best = Some((d, perimeter));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::invalid("slice plane misses the mesh"))
}

fn axis_extent(mesh: &Mesh, axis: Vector3<f64>) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in &mesh.vertices {
        let t = axis.dot(&v.coords);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    hi - lo
}

/// All sixteen measurements in millimetres, in spec order A through P.
pub fn measure(mesh: &Mesh, landmarks: &[(String, usize)]) -> Result<[f64; MEASUREMENT_COUNT]> {
    let axis = body_axis(mesh, landmarks)?;
    let mut out = [0.0; MEASUREMENT_COUNT];
    for (slot, def) in out.iter_mut().zip(MEASUREMENT_SPEC.iter()) {
        *slot = match def.kind {
            Circumference(site) => {
                let p = landmark_point(mesh, landmarks, site)?;
                circumference_at(mesh, axis, p)?
            }
            Length(a, b) => {
                let pa = landmark_point(mesh, landmarks, a)?;
                let pb = landmark_point(mesh, landmarks, b)?;
                (pa - pb).norm()
            }
            AxisHeight => axis_extent(mesh, axis),
        };
    }
    Ok(out)
}

/// Measurements rescaled as if the body stood `target_height` tall, so two
/// meshes compare at a common stature.
pub fn measure_at_height(
    mesh: &Mesh,
    landmarks: &[(String, usize)],
    target_height: f64,
) -> Result<[f64; MEASUREMENT_COUNT]> {
    let mut values = measure(mesh, landmarks)?;
    let height = values[14]; // measure O
    if !(height > 0.0) {
        return Err(Error::invalid("mesh has no height to normalize by"));
    }
    let s = target_height / height;
    for v in &mut values {
        *v *= s;
    }
    Ok(values)
}

/// Per-measure absolute-error statistics over a batch of subjects.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub subjects: usize,
    /// Mean absolute error per measure, millimetres.
    pub mean: [f64; MEASUREMENT_COUNT],
    /// Population standard deviation of the absolute errors.
    pub std: [f64; MEASUREMENT_COUNT],
    /// Aggregates over `KEY_SUBSET`: mean of the subset's means and stds.
    pub key_mean: f64,
    pub key_std: f64,
}

pub fn error_stats(
    ground_truth: &[[f64; MEASUREMENT_COUNT]],
    estimated: &[[f64; MEASUREMENT_COUNT]],
) -> Result<ErrorStats> {
    if ground_truth.len() != estimated.len() {
        return Err(Error::invalid(format!(
            "{} ground-truth records vs {} estimates",
            ground_truth.len(),
            estimated.len()
        )));
    }
    let n = ground_truth.len();
    if n == 0 {
        return Err(Error::invalid("error statistics need at least one subject"));
    }
    let mut mean = [0.0; MEASUREMENT_COUNT];
    let mut std = [0.0; MEASUREMENT_COUNT];
    for m in 0..MEASUREMENT_COUNT {
        let errs: Vec<f64> = ground_truth
            .iter()
            .zip(estimated)
            .map(|(g, e)| (g[m] - e[m]).abs())
            .collect();
        let mu = errs.iter().sum::<f64>() / n as f64;
        let var = errs.iter().map(|e| (e - mu).powi(2)).sum::<f64>() / n as f64;
        mean[m] = mu;
        std[m] = var.sqrt();
    }
    let (key_mean, key_std) = key_aggregate(&mean, &std);
    Ok(ErrorStats {
        subjects: n,
        mean,
        std,
        key_mean,
        key_std,
    })
}

/// Condensed-table aggregation: averages the per-measure means and standard
/// deviations over the seven-measure key subset.
pub fn key_aggregate(
    mean: &[f64; MEASUREMENT_COUNT],
    std: &[f64; MEASUREMENT_COUNT],
) -> (f64, f64) {
    let k = KEY_SUBSET.len() as f64;
    let m = KEY_SUBSET.iter().map(|&i| mean[i]).sum::<f64>() / k;
    let s = KEY_SUBSET.iter().map(|&i| std[i]).sum::<f64>() / k;
    (m, s)
}
