//! 2D rigid alignment of a subject boundary onto a projected-model boundary.
//!
//! The subject boundary is the unknown; the projected boundary carries part
//! labels from mesh segmentation. Alignment is plain ICP: nearest-neighbor
//! correspondences through a k-d index on the target, then the closed-form
//! least-squares rotation and translation for those pairs, repeated until the
//! energy stops improving. Matching afterwards pairs every subject point with
//! its closest model point and transfers the model point's label.

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::{Error, Result};
use crate::kdtree::KdTree2;
use crate::mesh::BodyPart;

pub const ICP_MAX_ITERS: usize = 50;
pub const ICP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform2D {
    pub rotation: Matrix2<f64>,
    pub translation: Vector2<f64>,
}

impl RigidTransform2D {
    pub fn identity() -> Self {
        RigidTransform2D {
            rotation: Matrix2::identity(),
            translation: Vector2::zeros(),
        }
    }

    pub fn from_angle(radians: f64) -> Self {
        let (s, c) = radians.sin_cos();
        RigidTransform2D {
            rotation: Matrix2::new(c, -s, s, c),
            translation: Vector2::zeros(),
        }
    }

    pub fn apply(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::from(self.rotation * p.coords + self.translation)
    }

    pub fn apply_all(&self, points: &[Point2<f64>]) -> Vec<Point2<f64>> {
        points.iter().map(|&p| self.apply(p)).collect()
    }

    /// Rotation angle in radians, in (-pi, pi].
    pub fn angle(&self) -> f64 {
        self.rotation[(1, 0)].atan2(self.rotation[(0, 0)])
    }

    /// Largest deviation from orthonormality: max of |R'R - I| entries and
    /// |det R - 1|.
    pub fn rigidity_error(&self) -> f64 {
        let gram = self.rotation.transpose() * self.rotation;
        let ortho = (gram - Matrix2::identity()).abs().max();
        ortho.max((self.rotation.determinant() - 1.0).abs())
    }
}

/// Centers a boundary on its centroid and scales its vertical extent to one.
/// Both boundaries must pass through this before registration so that the
/// rigid transform has no scale left to explain.
pub fn normalize_boundary(points: &[Point2<f64>]) -> Result<Vec<Point2<f64>>> {
    if points.len() < 2 {
        return Err(Error::invalid("boundary needs at least 2 points"));
    }
    let mut centroid = Vector2::zeros();
    for p in points {
        centroid += p.coords;
    }
    centroid /= points.len() as f64;
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let extent = max_y - min_y;
    if extent <= 0.0 {
        return Err(Error::invalid("boundary has zero vertical extent"));
    }
    Ok(points
        .iter()
        .map(|p| Point2::from((p.coords - centroid) / extent))
        .collect())
}

#[derive(Debug, Clone)]
pub struct Registration {
    pub transform: RigidTransform2D,
    /// Matching energy (sum of squared pair distances) at the final transform.
    pub residual: f64,
    /// Energy before each applied update; non-increasing.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn correspond(moved: &[Point2<f64>], target: &KdTree2) -> (Vec<usize>, f64) {
    let mut indices = Vec::with_capacity(moved.len());
    let mut energy = 0.0;
    for &p in moved {
        let (i, d2) = target.nearest(p);
        indices.push(i);
        energy += d2;
    }
    (indices, energy)
}

/// Least-squares rotation and translation mapping `source` onto the paired
/// `target` points.
fn procrustes(
    source: &[Point2<f64>],
    target: &[Point2<f64>],
    pairs: &[usize],
) -> RigidTransform2D {
    let n = source.len() as f64;
    let mut src_mean = Vector2::zeros();
    let mut tgt_mean = Vector2::zeros();
    for (i, p) in source.iter().enumerate() {
        src_mean += p.coords;
        tgt_mean += target[pairs[i]].coords;
    }
    src_mean /= n;
    tgt_mean /= n;
    let mut m = Matrix2::zeros();
    for (i, p) in source.iter().enumerate() {
        let q = target[pairs[i]].coords - tgt_mean;
        let s = p.coords - src_mean;
        m += q * s.transpose();
    }
    let angle = (m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)]);
    let mut t = RigidTransform2D::from_angle(angle);
    t.translation = tgt_mean - t.rotation * src_mean;
    t
}

/// Aligns `source` to `target` by ICP and returns the accumulated transform.
/// Running out of iterations is not an error; `converged` reports whether the
/// energy improvement fell below `tol` first.
pub fn rigid_register(
    source: &[Point2<f64>],
    target: &[Point2<f64>],
    max_iters: usize,
    tol: f64,
) -> Result<Registration> {
    if source.len() < 3 || target.len() < 3 {
        return Err(Error::invalid("registration needs at least 3 points per boundary"));
    }
    let kd = KdTree2::new(target)?;
    // Start from centroid alignment: the first correspondence set is garbage
    // when the boundaries barely overlap, and normalized boundaries are
    // centered anyway, so this costs nothing in the pipeline.
    let centroid = |pts: &[Point2<f64>]| {
        pts.iter().map(|p| p.coords).sum::<Vector2<f64>>() / pts.len() as f64
    };
    let shift = centroid(target) - centroid(source);
    let mut total = RigidTransform2D::identity();
    total.translation = shift;
    let mut moved: Vec<Point2<f64>> = source.iter().map(|p| p + shift).collect();
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut residual;
    loop {
        let (pairs, energy) = correspond(&moved, &kd);
        residual = energy;
        if let Some(&prev) = history.last() {
            if prev - energy < tol {
                converged = true;
                break;
            }
        }
        if history.len() >= max_iters {
            break;
        }
        history.push(energy);
        let step = procrustes(&moved, target, &pairs);
        for p in &mut moved {
            *p = step.apply(*p);
        }
        total.translation = step.rotation * total.translation + step.translation;
        total.rotation = step.rotation * total.rotation;
    }
    Ok(Registration {
        iterations: history.len(),
        transform: total,
        residual,
        history,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub subject: usize,
    pub model: usize,
    pub distance: f64,
    pub label: BodyPart,
}

#[derive(Debug, Clone)]
pub struct CorrespondenceSet {
    pub pairs: Vec<Correspondence>,
    /// Sum of squared pair distances.
    pub residual: f64,
}

/// Pairs every subject point with its nearest model point. The model carries
/// the authoritative segmentation, so each pair takes the model point's label.
pub fn pairwise_match(
    subject: &[Point2<f64>],
    model: &[Point2<f64>],
    model_labels: &[BodyPart],
) -> Result<CorrespondenceSet> {
    if subject.is_empty() || model.is_empty() {
        return Err(Error::invalid("cannot match an empty boundary"));
    }
    if model_labels.len() != model.len() {
        return Err(Error::invalid(format!(
            "{} labels for {} model points",
            model_labels.len(),
            model.len()
        )));
    }
    let kd = KdTree2::new(model)?;
    let mut pairs = Vec::with_capacity(subject.len());
    let mut residual = 0.0;
    for (i, &p) in subject.iter().enumerate() {
        let (j, d2) = kd.nearest(p);
        residual += d2;
        pairs.push(Correspondence {
            subject: i,
            model: j,
            distance: d2.sqrt(),
            label: model_labels[j],
        });
    }
    Ok(CorrespondenceSet { pairs, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremePair {
    pub top_gap: f64,
    pub bottom_gap: f64,
}

/// Fraction of the vertical extent treated as "at" an extreme row when the
/// representative extreme points are formed.
pub const EXTREME_BAND: f64 = 0.02;

/// Representative top and bottom points: centroids of the boundary points
/// lying within a thin horizontal band at the contour's extremes (image
/// convention, top has the smallest y). A single argmin pixel flips between
/// far-apart candidates whenever the extremal row is flat (a body standing
/// on two feet has two of them), so the band average is what stays put when
/// the same contour is rasterized at a different resolution.
fn band_extremes(points: &[Point2<f64>]) -> (Point2<f64>, Point2<f64>) {
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let band = EXTREME_BAND * (max_y - min_y);
    let centroid = |keep: &dyn Fn(f64) -> bool| {
        let mut acc = Vector2::zeros();
        let mut n = 0.0;
        for p in points {
            if keep(p.y) {
                acc += p.coords;
                n += 1.0;
            }
        }
        Point2::from(acc / n)
    };
    (
        centroid(&|y| y <= min_y + band),
        centroid(&|y| y >= max_y - band),
    )
}

/// Distances between the top points and between the bottom points of the two
/// boundaries. These anchor overall height during cost evaluation.
pub fn extreme_points(subject: &[Point2<f64>], model: &[Point2<f64>]) -> Result<ExtremePair> {
    if subject.is_empty() || model.is_empty() {
        return Err(Error::invalid("extreme points of an empty boundary"));
    }
    let (sub_top, sub_bottom) = band_extremes(subject);
    let (mod_top, mod_bottom) = band_extremes(model);
    Ok(ExtremePair {
        top_gap: (sub_top - mod_top).norm(),
        bottom_gap: (sub_bottom - mod_bottom).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Smooth star-like closed curve with no rotational symmetry.
    fn star_curve(n: usize) -> Vec<Point2<f64>> {
        (0..n)
            .map(|k| {
                let phi = k as f64 / n as f64 * std::f64::consts::TAU;
                let r = 1.0 + 0.15 * phi.cos() + 0.22 * (3.0 * phi).cos() + 0.1 * (5.0 * phi).sin();
                Point2::new(r * phi.cos(), r * phi.sin())
            })
            .collect()
    }

    /// Tall eccentric ellipse, the aspect ratio of a height-normalized body
    /// silhouette. Nearest-point ICP recovers transforms of such contours
    /// exactly; near-circular contours stall in shifted-correspondence
    /// equilibria instead.
    fn tall_ellipse(n: usize, a: f64, b: f64) -> Vec<Point2<f64>> {
        (0..n)
            .map(|k| {
                let phi = k as f64 / n as f64 * std::f64::consts::TAU;
                Point2::new(b * phi.sin(), a * phi.cos())
            })
            .collect()
    }

    #[test]
    fn normalize_is_idempotent() {
        let pts = star_curve(64);
        let once = normalize_boundary(&pts).unwrap();
        let twice = normalize_boundary(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn normalize_cancels_similarity() {
        let pts = star_curve(64);
        let moved: Vec<Point2<f64>> = pts
            .iter()
            .map(|p| Point2::new(p.x * 7.0 + 3.0, p.y * 7.0 - 11.0))
            .collect();
        let a = normalize_boundary(&pts).unwrap();
        let b = normalize_boundary(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn normalize_rejects_flat_input() {
        let flat = vec![Point2::new(0.0, 1.0), Point2::new(5.0, 1.0)];
        assert!(normalize_boundary(&flat).is_err());
        assert!(normalize_boundary(&[Point2::origin()]).is_err());
    }

    #[test]
    fn registering_a_boundary_to_itself_is_identity() {
        let pts = star_curve(100);
        let reg = rigid_register(&pts, &pts, ICP_MAX_ITERS, ICP_TOL).unwrap();
        assert_eq!(reg.residual, 0.0);
        assert!(reg.converged);
        assert!(reg.transform.angle().abs() < 1e-12);
        assert!(reg.transform.translation.norm() < 1e-12);
    }

    #[test]
    fn known_rigid_motion_is_recovered() {
        let target = tall_ellipse(256, 1.5, 0.6);
        let applied = RigidTransform2D {
            rotation: RigidTransform2D::from_angle(20f64.to_radians()).rotation,
            translation: Vector2::new(0.1, -0.05),
        };
        let source = applied.apply_all(&target);
        let reg = rigid_register(&source, &target, ICP_MAX_ITERS, ICP_TOL).unwrap();
        // The recovered transform undoes the applied one.
        assert!(
            (reg.transform.angle() + 20f64.to_radians()).abs() < 1e-9,
            "angle {}",
            reg.transform.angle().to_degrees()
        );
        let aligned = reg.transform.apply_all(&source);
        let e: f64 = aligned
            .iter()
            .zip(&target)
            .map(|(a, b)| (a - b).norm_squared())
            .sum();
        assert!(e < 1e-10, "post-alignment energy {e}");
        assert!(reg.transform.rigidity_error() < 1e-10);
    }

    #[test]
    fn recovery_holds_across_the_randomized_family() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..40 {
            let a = rng.random_range(1.35..1.65);
            let b = a / rng.random_range(2.1..3.0);
            let target = tall_ellipse(rng.random_range(100..400), a, b);
            let applied = RigidTransform2D {
                rotation: RigidTransform2D::from_angle(rng.random_range(-0.78..0.78)).rotation,
                translation: Vector2::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
            };
            let source = applied.apply_all(&target);
            let reg = rigid_register(&source, &target, ICP_MAX_ITERS, ICP_TOL).unwrap();
            let e: f64 = reg
                .transform
                .apply_all(&source)
                .iter()
                .zip(&target)
                .map(|(p, q)| (p - q).norm_squared())
                .sum();
            assert!(e < 1e-10, "energy {e}");
        }
    }

    #[test]
    fn icp_energy_history_never_increases() {
        let target = star_curve(180);
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..25 {
            let t = RigidTransform2D {
                rotation: RigidTransform2D::from_angle(rng.random_range(-0.6..0.6)).rotation,
                translation: Vector2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)),
            };
            let source = t.apply_all(&target);
            let reg = rigid_register(&source, &target, ICP_MAX_ITERS, ICP_TOL).unwrap();
            for w in reg.history.windows(2) {
                assert!(w[1] <= w[0], "energy went up: {:?}", w);
            }
        }
    }

    #[test]
    fn noisy_registration_stays_near_identity() {
        let target = star_curve(300);
        let mut rng = StdRng::seed_from_u64(29);
        let sigma = 0.002;
        let source: Vec<Point2<f64>> = target
            .iter()
            .map(|p| {
                Point2::new(
                    p.x + rng.random_range(-sigma..sigma),
                    p.y + rng.random_range(-sigma..sigma),
                )
            })
            .collect();
        let reg = rigid_register(&source, &target, ICP_MAX_ITERS, ICP_TOL).unwrap();
        assert!(reg.transform.angle().to_degrees().abs() < 1.0);
        let per_point = reg.residual / source.len() as f64;
        assert!(per_point < (3.0 * sigma).powi(2), "per-point energy {per_point}");
    }

    #[test]
    fn too_few_points_is_an_error() {
        let two = vec![Point2::origin(), Point2::new(1.0, 1.0)];
        let many = star_curve(10);
        assert!(rigid_register(&two, &many, 10, 1e-8).is_err());
        assert!(rigid_register(&many, &two, 10, 1e-8).is_err());
    }

    #[test]
    fn matching_identical_boundaries_copies_labels() {
        let pts = star_curve(40);
        let labels: Vec<BodyPart> = (0..40)
            .map(|i| BodyPart::ALL[i % BodyPart::ALL.len()])
            .collect();
        let m = pairwise_match(&pts, &pts, &labels).unwrap();
        assert_eq!(m.residual, 0.0);
        for (i, pair) in m.pairs.iter().enumerate() {
            assert_eq!(pair.subject, i);
            assert_eq!(pair.model, i);
            assert_eq!(pair.distance, 0.0);
            assert_eq!(pair.label, labels[i]);
        }
    }

    #[test]
    fn shifted_vertical_line_matches_at_constant_distance() {
        let model: Vec<Point2<f64>> = (0..30).map(|k| Point2::new(0.0, k as f64 * 0.1)).collect();
        let labels = vec![BodyPart::Chest; 30];
        let delta = 0.25;
        let subject: Vec<Point2<f64>> = model.iter().map(|p| Point2::new(p.x + delta, p.y)).collect();
        let m = pairwise_match(&subject, &model, &labels).unwrap();
        for pair in &m.pairs {
            assert_eq!(pair.distance, delta);
        }
        assert!((m.residual - 30.0 * delta * delta).abs() < 1e-12 * 30.0);
    }

    #[test]
    fn labels_transfer_from_the_nearest_side() {
        // Model: left column is arm, right column is chest.
        let mut model = Vec::new();
        let mut labels = Vec::new();
        for k in 0..20 {
            model.push(Point2::new(-1.0, k as f64 * 0.1));
            labels.push(BodyPart::Arm);
            model.push(Point2::new(1.0, k as f64 * 0.1));
            labels.push(BodyPart::Chest);
        }
        let subject = vec![Point2::new(-0.8, 0.71), Point2::new(0.9, 1.13)];
        let m = pairwise_match(&subject, &model, &labels).unwrap();
        assert_eq!(m.pairs[0].label, BodyPart::Arm);
        assert_eq!(m.pairs[1].label, BodyPart::Chest);
    }

    #[test]
    fn matching_residual_agrees_with_all_pairs_scan() {
        let mut rng = StdRng::seed_from_u64(31);
        let model: Vec<Point2<f64>> = (0..500)
            .map(|_| Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let subject: Vec<Point2<f64>> = (0..400)
            .map(|_| Point2::new(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5)))
            .collect();
        let labels = vec![BodyPart::Leg; model.len()];
        let m = pairwise_match(&subject, &model, &labels).unwrap();
        let mut brute = 0.0;
        for (i, &p) in subject.iter().enumerate() {
            let (j, d2) = crate::kdtree::nearest_brute(&model, p);
            assert_eq!(m.pairs[i].model, j);
            brute += d2;
        }
        assert!((m.residual - brute).abs() <= 1e-9 * brute.max(1.0));
    }

    #[test]
    fn matching_distances_are_rigid_invariant() {
        let model = star_curve(120);
        let labels = vec![BodyPart::Waist; 120];
        let subject: Vec<Point2<f64>> = star_curve(90)
            .iter()
            .map(|p| Point2::new(p.x * 0.97 + 0.03, p.y * 0.97))
            .collect();
        let base = pairwise_match(&subject, &model, &labels).unwrap();
        let t = RigidTransform2D {
            rotation: RigidTransform2D::from_angle(0.83).rotation,
            translation: Vector2::new(4.0, -2.5),
        };
        let moved = pairwise_match(&t.apply_all(&subject), &t.apply_all(&model), &labels).unwrap();
        for (a, b) in base.pairs.iter().zip(&moved.pairs) {
            assert!((a.distance - b.distance).abs() < 1e-9);
        }
    }

    #[test]
    fn extreme_gaps_measure_vertical_offsets() {
        let a = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 3.0),
            Point2::new(1.0, 3.0),
        ];
        // Same base (largest y), shorter on top.
        let b = vec![
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 3.0),
            Point2::new(1.0, 3.0),
        ];
        let same = extreme_points(&a, &a).unwrap();
        assert_eq!(same.top_gap, 0.0);
        assert_eq!(same.bottom_gap, 0.0);
        let gaps = extreme_points(&a, &b).unwrap();
        assert_eq!(gaps.bottom_gap, 0.0);
        assert_eq!(gaps.top_gap, 1.0);
        // Pure vertical shift moves both gaps equally.
        let shifted: Vec<Point2<f64>> = a.iter().map(|p| Point2::new(p.x, p.y - 2.0)).collect();
        let both = extreme_points(&a, &shifted).unwrap();
        assert_eq!(both.top_gap, 2.0);
        assert_eq!(both.bottom_gap, 2.0);
    }

    #[test]
    fn flat_bottoms_resolve_to_band_centroids() {
        // Two feet on one baseline. A sub-band jitter on the right foot must
        // not swing the bottom representative from one foot to the other.
        let feet = |jitter: f64| {
            vec![
                Point2::new(3.0, 0.0),
                Point2::new(4.0, 0.0),
                Point2::new(0.0, 4.0),
                Point2::new(1.0, 4.0),
                Point2::new(6.0, 4.0 + jitter),
                Point2::new(7.0, 4.0 + jitter),
            ]
        };
        let gaps = extreme_points(&feet(0.0), &feet(0.01)).unwrap();
        assert!(gaps.bottom_gap < 0.01, "bottom gap {}", gaps.bottom_gap);
        assert!(gaps.top_gap < 1e-9);
        // Both feet average: the representative sits between them.
        let (_, bottom) = band_extremes(&feet(0.0));
        assert_eq!(bottom, Point2::new(3.5, 4.0));
    }
}
