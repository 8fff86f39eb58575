//! Procedural training corpus and PCA model construction.
//!
//! The generator lofts a humanoid out of five tube columns: torso plus head,
//! two arms, two legs with feet. Every instance shares one topology; a
//! `Proportions` draw moves stations and radii smoothly, so principal
//! component analysis over a few hundred instances yields clean deformation
//! modes. Stature is sampled with by far the largest variance, which pins the
//! first mode to overall height. Units are millimetres, Z is up, the soles
//! sit exactly at z = 0, and +Y is the facing direction.

use nalgebra::{DMatrix, DVector, Point3};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mesh::BodyPart;
use crate::model::{Joint, StatModel, POSE_GENES, SHAPE_GENES};

pub const REFERENCE_HEIGHT_MM: f64 = 1700.0;
pub const TRAINING_INSTANCES: usize = 240;
pub const MIN_VERTEX_BUDGET: usize = 500;
pub const DEFAULT_VERTEX_BUDGET: usize = 1200;

/// Torso profile control points: height fraction, half width, half depth.
const TORSO_PROFILE: &[(f64, f64, f64)] = &[
    (0.470, 95.0, 80.0),  // crotch
    (0.520, 168.0, 118.0), // hip
    (0.600, 134.0, 94.0), // waist
    (0.665, 150.0, 102.0),
    (0.720, 163.0, 109.0), // chest
    (0.775, 182.0, 100.0),
    (0.800, 186.0, 96.0), // acromion level
    (0.815, 120.0, 70.0),
    (0.825, 54.0, 54.0), // neck base
    (0.865, 50.0, 52.0), // neck top
    (0.885, 66.0, 78.0),
    (0.935, 76.0, 94.0), // head at its widest
    (0.975, 60.0, 74.0),
    (1.000, 24.0, 30.0),
];

/// Arm radius control points along the arm axis parameter.
const ARM_PROFILE: &[(f64, f64)] = &[
    (0.02, 46.0),
    (0.12, 36.0),
    (0.40, 31.0),
    (0.45, 29.0), // elbow
    (0.60, 27.0),
    (0.82, 19.0), // wrist
];

/// Leg profile control points: height fraction, half width, half depth.
const LEG_PROFILE: &[(f64, f64, f64)] = &[
    (0.570, 90.0, 95.0),
    (0.450, 81.0, 86.0),
    (0.350, 70.0, 72.0),
    (0.285, 59.0, 61.0), // knee
    (0.220, 57.0, 63.0), // calf
    (0.120, 42.0, 44.0),
    (0.055, 39.0, 41.0), // ankle
];

const ARM_TILT_DEG: f64 = 8.0;
const ARM_LENGTH_FRAC: f64 = 0.47;
const ARM_PIVOT_FRAC: f64 = 0.80;
const LEG_OFFSET_X: f64 = 95.0;

/// One sampled body: global factors plus a small jitter per ring station.
struct Proportions {
    height: f64,
    crotch_frac: f64,
    torso_girth: f64,
    hip_s: f64,
    waist_s: f64,
    chest_s: f64,
    shoulder_s: f64,
    neck_s: f64,
    head_s: f64,
    arm_r: f64,
    arm_len: f64,
    leg_r: f64,
    foot_len: f64,
    jitter: Vec<f64>,
}

impl Proportions {
    fn neutral(jitter_count: usize) -> Self {
        Proportions {
            height: REFERENCE_HEIGHT_MM,
            crotch_frac: 0.47,
            torso_girth: 1.0,
            hip_s: 1.0,
            waist_s: 1.0,
            chest_s: 1.0,
            shoulder_s: 1.0,
            neck_s: 1.0,
            head_s: 1.0,
            arm_r: 1.0,
            arm_len: 1.0,
            leg_r: 1.0,
            foot_len: 1.0,
            jitter: vec![1.0; jitter_count],
        }
    }

    fn sample(rng: &mut ChaCha12Rng, jitter_count: usize) -> Self {
        // Stature gets an outsized spread on purpose; see the module docs.
        let mut draw = |mean: f64, sd: f64| {
            let v: f64 = Normal::new(mean, sd).unwrap().sample(rng);
            v.clamp(mean - 3.0 * sd, mean + 3.0 * sd)
        };
        let height = draw(REFERENCE_HEIGHT_MM, 95.0);
        let crotch_frac = draw(0.47, 0.010);
        let torso_girth = draw(1.0, 0.050);
        let hip_s = draw(1.0, 0.055);
        let waist_s = draw(1.0, 0.070);
        let chest_s = draw(1.0, 0.055);
        let shoulder_s = draw(1.0, 0.040);
        let neck_s = draw(1.0, 0.040);
        let head_s = draw(1.0, 0.030);
        let arm_r = draw(1.0, 0.070);
        let arm_len = draw(1.0, 0.030);
        let leg_r = draw(1.0, 0.060);
        let foot_len = draw(1.0, 0.045);
        let jitter = (0..jitter_count).map(|_| draw(1.0, 0.012)).collect();
        Proportions {
            height,
            crotch_frac,
            torso_girth,
            hip_s,
            waist_s,
            chest_s,
            shoulder_s,
            neck_s,
            head_s,
            arm_r,
            arm_len,
            leg_r,
            foot_len,
            jitter,
        }
    }

    /// Smoothly blended girth multiplier along the torso, interpolating
    /// between region factors so adjacent rings never jump.
    fn torso_mult(&self, frac: f64) -> f64 {
        let centers = [
            (0.520, self.hip_s),
            (0.615, self.waist_s),
            (0.730, self.chest_s),
            (0.800, self.shoulder_s),
            (0.855, self.neck_s),
            (0.940, self.head_s),
        ];
        let blended = if frac <= centers[0].0 {
            centers[0].1
        } else if frac >= centers[centers.len() - 1].0 {
            centers[centers.len() - 1].1
        } else {
            let mut v = centers[0].1;
            for w in centers.windows(2) {
                let ((f0, m0), (f1, m1)) = (w[0], w[1]);
                if frac >= f0 && frac <= f1 {
                    let t = (frac - f0) / (f1 - f0);
                    v = m0 + (m1 - m0) * t;
                    break;
                }
            }
            v
        };
        blended * self.torso_girth
    }
}

/// Piecewise-linear lookup in a (station, half width, half depth) table.
/// Tables may run low-to-high or high-to-low; out-of-range queries clamp.
fn interp2(profile: &[(f64, f64, f64)], at: f64) -> (f64, f64) {
    for w in profile.windows(2) {
        let ((f0, a0, b0), (f1, a1, b1)) = (w[0], w[1]);
        if (at - f0) * (at - f1) <= 0.0 {
            let t = (at - f0) / (f1 - f0);
            return (a0 + (a1 - a0) * t, b0 + (b1 - b0) * t);
        }
    }
    let (ff, fa, fb) = profile[0];
    let (lf, la, lb) = profile[profile.len() - 1];
    let below_first = if ff < lf { at < ff } else { at > ff };
    if below_first {
        (fa, fb)
    } else {
        (la, lb)
    }
}

fn interp1(profile: &[(f64, f64)], at: f64) -> f64 {
    if at <= profile[0].0 {
        return profile[0].1;
    }
    for w in profile.windows(2) {
        let ((f0, r0), (f1, r1)) = (w[0], w[1]);
        if at >= f0 && at <= f1 {
            let t = (at - f0) / (f1 - f0);
            return r0 + (r1 - r0) * t;
        }
    }
    profile[profile.len() - 1].1
}

/// Fixed station plan derived from the vertex budget. Station positions and
/// counts never depend on a `Proportions` draw, so all instances share one
/// vertex ordering.
struct Layout {
    ring_n: usize,
    torso_fracs: Vec<f64>,
    arm_ts: Vec<f64>,
    /// Height fractions for the leg part of each leg column.
    leg_fracs: Vec<f64>,
    /// Foot stations: height fraction, forward offset, half width, half depth.
    foot_stations: Vec<(f64, f64, f64, f64)>,
}

impl Layout {
    fn new(vertex_budget: usize) -> Result<Layout> {
        if vertex_budget < MIN_VERTEX_BUDGET {
            return Err(Error::invalid(format!(
                "vertex budget {vertex_budget} cannot cover nine labeled parts; need at least {MIN_VERTEX_BUDGET}"
            )));
        }
        let scale = (vertex_budget as f64 / DEFAULT_VERTEX_BUDGET as f64)
            .sqrt()
            .clamp(0.55, 1.8);
        let count = |base: f64, min: usize| ((base * scale).round() as usize).max(min);

        // Torso: dense trunk, explicit shoulder and neck stations, head run.
        let trunk_n = count(14.0, 9);
        let head_n = count(6.0, 4);
        let mut torso_fracs: Vec<f64> = (0..trunk_n)
            .map(|i| 0.47 + (0.800 - 0.47) * i as f64 / (trunk_n - 1) as f64)
            .collect();
        torso_fracs.extend([0.815, 0.825, 0.865]);
        torso_fracs.extend(
            (0..head_n).map(|i| 0.885 + (1.0 - 0.885) * i as f64 / (head_n - 1) as f64),
        );

        let arm_n = count(8.0, 6);
        let mut arm_ts: Vec<f64> = (0..arm_n)
            .map(|i| 0.02 + (0.82 - 0.02) * i as f64 / (arm_n - 1) as f64)
            .collect();
        arm_ts.extend([0.87, 0.94, 1.0]); // hand

        let leg_n = count(9.0, 7);
        let leg_fracs: Vec<f64> = (0..leg_n)
            .map(|i| 0.570 - (0.570 - 0.055) * i as f64 / (leg_n - 1) as f64)
            .collect();
        let foot_stations = vec![
            (0.040, 38.0, 44.0, 92.0),
            (0.022, 66.0, 46.0, 118.0),
            (0.008, 76.0, 43.0, 124.0),
        ];

        let total_rings = torso_fracs.len()
            + 2 * arm_ts.len()
            + 2 * (leg_fracs.len() + foot_stations.len());
        let caps = 10;
        let mut ring_n = (vertex_budget - caps) / total_rings;
        ring_n -= ring_n % 4;
        if ring_n < 8 {
            return Err(Error::invalid(format!(
                "vertex budget {vertex_budget} leaves under 8 vertices per ring"
            )));
        }
        ring_n = ring_n.min(48);
        Ok(Layout {
            ring_n,
            torso_fracs,
            arm_ts,
            leg_fracs,
            foot_stations,
        })
    }

    fn jitter_count(&self) -> usize {
        self.torso_fracs.len()
            + 2 * self.arm_ts.len()
            + 2 * (self.leg_fracs.len() + self.foot_stations.len())
    }
}

/// Vertex/face soup plus the ring bookkeeping landmark and joint placement
/// need afterwards.
struct Geometry {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    labels: Vec<BodyPart>,
    /// Ring start index per torso station.
    torso_rings: Vec<usize>,
    /// Ring start index per arm station, left then right.
    arm_rings: [Vec<usize>; 2],
    /// Ring start index per leg station (legs then feet), left then right.
    leg_rings: [Vec<usize>; 2],
    crotch_cap: usize,
    head_cap: usize,
}

struct TubeBuilder {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    labels: Vec<BodyPart>,
    ring_n: usize,
}

impl TubeBuilder {
    fn add_ring(&mut self, center: Point3<f64>, hx: f64, hy: f64, label: BodyPart) -> usize {
        let start = self.vertices.len();
        for k in 0..self.ring_n {
            let phi = std::f64::consts::TAU * k as f64 / self.ring_n as f64;
            self.vertices.push(Point3::new(
                center.x + hx * phi.cos(),
                center.y + hy * phi.sin(),
                center.z,
            ));
            self.labels.push(label);
        }
        start
    }

    fn bridge(&mut self, r0: usize, r1: usize) {
        for k in 0..self.ring_n {
            let k1 = (k + 1) % self.ring_n;
            self.faces.push([r0 + k, r0 + k1, r1 + k]);
            self.faces.push([r0 + k1, r1 + k1, r1 + k]);
        }
    }

    fn cap(&mut self, ring: usize, apex: Point3<f64>, label: BodyPart) -> usize {
        let c = self.vertices.len();
        self.vertices.push(apex);
        self.labels.push(label);
        for k in 0..self.ring_n {
            let k1 = (k + 1) % self.ring_n;
            self.faces.push([ring + k, ring + k1, c]);
        }
        c
    }
}

fn torso_label(frac: f64) -> BodyPart {
    if frac < 0.57 {
        BodyPart::Hip
    } else if frac < 0.665 {
        BodyPart::Waist
    } else if frac < 0.825 {
        BodyPart::Chest
    } else {
        BodyPart::Head
    }
}

fn arm_label(t: f64) -> BodyPart {
    if t < 0.44 {
        BodyPart::Arm
    } else if t < 0.84 {
        BodyPart::Elbow
    } else {
        BodyPart::Hand
    }
}

fn build_geometry(layout: &Layout, props: &Proportions) -> Geometry {
    let mut b = TubeBuilder {
        vertices: Vec::new(),
        faces: Vec::new(),
        labels: Vec::new(),
        ring_n: layout.ring_n,
    };
    let scale = props.height / REFERENCE_HEIGHT_MM;
    let mut jit = props.jitter.iter().copied();
    let mut jnext = || jit.next().unwrap_or(1.0);

    // Torso and head. Station 0 sits at the sampled crotch height; the rest
    // of the plan is absolute height fractions.
    let mut torso_rings = Vec::with_capacity(layout.torso_fracs.len());
    let mut prev = None;
    for (i, &plan_frac) in layout.torso_fracs.iter().enumerate() {
        let frac = if i == 0 { props.crotch_frac } else { plan_frac };
        let (a, bb) = interp2(TORSO_PROFILE, plan_frac);
        let m = props.torso_mult(plan_frac) * jnext();
        let center = Point3::new(0.0, 0.0, frac * REFERENCE_HEIGHT_MM);
        let ring = b.add_ring(center, a * m, bb * m, torso_label(plan_frac));
        if let Some(p) = prev {
            b.bridge(p, ring);
        }
        prev = Some(ring);
        torso_rings.push(ring);
    }
    let crotch_cap = b.cap(
        torso_rings[0],
        Point3::new(0.0, 0.0, props.crotch_frac * REFERENCE_HEIGHT_MM),
        BodyPart::Hip,
    );
    let head_cap = b.cap(
        *torso_rings.last().unwrap(),
        Point3::new(0.0, 0.0, REFERENCE_HEIGHT_MM),
        BodyPart::Head,
    );

    // Arms. Near-vertical tubes hanging from the shoulder pivots, tilted a
    // little outward; the hand is a flattened continuation.
    let tilt = ARM_TILT_DEG.to_radians();
    let arm_len = ARM_LENGTH_FRAC * REFERENCE_HEIGHT_MM * props.arm_len;
    let mut arm_rings: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (s, side) in [1.0f64, -1.0].iter().enumerate() {
        let pivot = Point3::new(
            side * 186.0 * props.shoulder_s,
            0.0,
            ARM_PIVOT_FRAC * REFERENCE_HEIGHT_MM,
        );
        let dir = nalgebra::Vector3::new(side * tilt.sin(), 0.0, -tilt.cos());
        let mut prev = None;
        for &t in &layout.arm_ts {
            let center = pivot + dir * (t * arm_len);
            let label = arm_label(t);
            let (hx, hy) = if label == BodyPart::Hand {
                let w = interp1(&[(0.84, 26.0), (0.94, 24.0), (1.0, 12.0)], t);
                (w, w * 0.52)
            } else {
                let r = interp1(ARM_PROFILE, t) * props.arm_r;
                (r, r)
            };
            let j = jnext();
            let ring = b.add_ring(center, hx * j, hy * j, label);
            if let Some(p) = prev {
                b.bridge(p, ring);
            }
            prev = Some(ring);
            arm_rings[s].push(ring);
        }
        b.cap(arm_rings[s][0], pivot, BodyPart::Arm);
        let tip = pivot + dir * (1.02 * arm_len);
        b.cap(*arm_rings[s].last().unwrap(), tip, BodyPart::Hand);
    }

    // Legs and feet. The soles close at exactly z = 0.
    let mut leg_rings: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (s, side) in [1.0f64, -1.0].iter().enumerate() {
        let x = side * LEG_OFFSET_X;
        let leg_top = props.crotch_frac + 0.05;
        let mut prev = None;
        for &plan_frac in &layout.leg_fracs {
            // Stations stretch with the sampled crotch height.
            let frac = plan_frac * leg_top / 0.570;
            let (hx, hy) = interp2(LEG_PROFILE, plan_frac);
            let j = jnext();
            let center = Point3::new(x, 0.0, frac * REFERENCE_HEIGHT_MM);
            let ring = b.add_ring(
                center,
                hx * props.leg_r * j,
                hy * props.leg_r * j,
                BodyPart::Leg,
            );
            if let Some(p) = prev {
                b.bridge(p, ring);
            }
            prev = Some(ring);
            leg_rings[s].push(ring);
        }
        for &(frac, fwd, hx, hy) in &layout.foot_stations {
            let j = jnext();
            let center = Point3::new(x, fwd * props.foot_len, frac * REFERENCE_HEIGHT_MM);
            let ring = b.add_ring(center, hx * j, hy * props.foot_len * j, BodyPart::Foot);
            b.bridge(prev.unwrap(), ring);
            prev = Some(ring);
            leg_rings[s].push(ring);
        }
        b.cap(
            leg_rings[s][0],
            Point3::new(x, 0.0, leg_top * REFERENCE_HEIGHT_MM),
            BodyPart::Leg,
        );
        b.cap(
            *leg_rings[s].last().unwrap(),
            Point3::new(x, 76.0 * props.foot_len, 0.0),
            BodyPart::Foot,
        );
    }

    // Global stature scaling last, so z = 0 stays put.
    if scale != 1.0 {
        for v in &mut b.vertices {
            v.coords *= scale;
        }
    }

    Geometry {
        vertices: b.vertices,
        faces: b.faces,
        labels: b.labels,
        torso_rings,
        arm_rings,
        leg_rings,
        crotch_cap,
        head_cap,
    }
}

fn flat(vertices: &[Point3<f64>]) -> DVector<f64> {
    let mut out = DVector::zeros(3 * vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        out[3 * i] = v.x;
        out[3 * i + 1] = v.y;
        out[3 * i + 2] = v.z;
    }
    out
}

fn vertex_at(flat: &DVector<f64>, i: usize) -> Point3<f64> {
    Point3::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2])
}

fn ring_centroid(mean: &DVector<f64>, start: usize, n: usize) -> Point3<f64> {
    let mut c = nalgebra::Vector3::zeros();
    for i in start..start + n {
        c += vertex_at(mean, i).coords;
    }
    Point3::from(c / n as f64)
}

fn nearest_station(fracs: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (i, &f) in fracs.iter().enumerate() {
        if (f - target).abs() < (fracs[best] - target).abs() {
            best = i;
        }
    }
    best
}

/// Builds the full statistical model: geometry plan, training corpus, PCA,
/// skeleton, skinning, and landmarks. Deterministic per seed.
pub fn build_synthetic_model(seed: u64, vertex_budget: usize) -> Result<StatModel> {
    let layout = Layout::new(vertex_budget)?;
    let jitter_count = layout.jitter_count();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // Training corpus.
    let template = build_geometry(&layout, &Proportions::neutral(jitter_count));
    let n = template.vertices.len();
    let m = TRAINING_INSTANCES;
    let mut data = DMatrix::zeros(3 * n, m);
    for c in 0..m {
        let props = Proportions::sample(&mut rng, jitter_count);
        let geo = build_geometry(&layout, &props);
        data.set_column(c, &flat(&geo.vertices));
    }
    let mut mean = DVector::zeros(3 * n);
    for col in data.column_iter() {
        mean += col;
    }
    mean /= m as f64;
    for mut col in data.column_iter_mut() {
        col -= &mean;
    }

    // PCA through the Gram matrix; instances are far fewer than coordinates.
    let gram = data.tr_mul(&data);
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut basis = DMatrix::zeros(3 * n, SHAPE_GENES);
    let mut eigenvalues = DVector::zeros(SHAPE_GENES);
    for k in 0..SHAPE_GENES {
        let gamma = eig.eigenvalues[order[k]];
        if gamma <= 1e-9 {
            return Err(Error::invalid(format!(
                "training corpus is rank deficient at mode {k}"
            )));
        }
        let dir = &data * eig.eigenvectors.column(order[k]);
        let norm = dir.norm();
        basis.set_column(k, &(dir / norm));
        eigenvalues[k] = gamma / (m - 1) as f64;
    }

    // Skeleton from mean-mesh ring centroids. Parents precede children; the
    // limb roots are the posable joints. Left is +X; signs are chosen so a
    // positive pose angle moves either limb away from the midline.
    let rn = layout.ring_n;
    let elbow_station = nearest_station(&layout.arm_ts, 0.45);
    let wrist_station = nearest_station(&layout.arm_ts, 0.82);
    let knee_station = nearest_station(&layout.leg_fracs, 0.285);
    let ankle_station = layout.leg_fracs.len() - 1;
    let torso_ring = |target: f64| {
        let i = nearest_station(&layout.torso_fracs, target);
        template.torso_rings[i]
    };
    let joint = |name: &str, parent: Option<usize>, start: usize| Joint {
        name: name.into(),
        parent,
        position: ring_centroid(&mean, start, rn),
        sign: if name.starts_with('l') { -1.0 } else { 1.0 },
    };
    let joints = vec![
        joint("pelvis", None, torso_ring(0.52)),
        joint("neck", Some(0), torso_ring(0.825)),
        joint("head", Some(1), torso_ring(0.865)),
        joint("l_humerus", Some(1), template.arm_rings[0][0]),
        joint("r_humerus", Some(1), template.arm_rings[1][0]),
        joint("l_elbow", Some(3), template.arm_rings[0][elbow_station]),
        joint("r_elbow", Some(4), template.arm_rings[1][elbow_station]),
        joint("l_hand", Some(5), template.arm_rings[0][wrist_station]),
        joint("r_hand", Some(6), template.arm_rings[1][wrist_station]),
        joint("l_hip", Some(0), template.leg_rings[0][0]),
        joint("r_hip", Some(0), template.leg_rings[1][0]),
        joint("l_knee", Some(9), template.leg_rings[0][knee_station]),
        joint("r_knee", Some(10), template.leg_rings[1][knee_station]),
        joint("l_foot", Some(11), template.leg_rings[0][ankle_station]),
        joint("r_foot", Some(12), template.leg_rings[1][ankle_station]),
    ];
    let posable = vec![9, 10, 3, 4]; // l_hip, r_hip, l_humerus, r_humerus
    assert_eq!(posable.len(), POSE_GENES);

    // Skinning: each vertex splits between its two nearest side-compatible
    // joints, sharply weighted so limb interiors are effectively rigid.
    let mut weights = DMatrix::zeros(n, joints.len());
    for i in 0..n {
        let v = vertex_at(&mean, i);
        let mut near: Vec<(f64, usize)> = joints
            .iter()
            .enumerate()
            .filter(|(_, j)| match j.name.as_bytes()[0] {
                b'l' => v.x > -15.0,
                b'r' => v.x < 15.0,
                _ => true,
            })
            .map(|(idx, j)| ((v - j.position).norm(), idx))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d0, j0) = near[0];
        let (d1, j1) = near[1];
        if d0 < 1e-6 {
            weights[(i, j0)] = 1.0;
        } else {
            let a = d0.powi(-4);
            let bb = d1.powi(-4);
            weights[(i, j0)] = a / (a + bb);
            weights[(i, j1)] = bb / (a + bb);
        }
    }

    // Measurement sites, as template vertex indices. Ring vertex 0 faces +X,
    // a quarter turn faces +Y (the front). Torso sites use the front vertex
    // so a slice that also cuts the arms still resolves to the torso loop;
    // limb sites stay at the outboard vertex for the same reason.
    let front = rn / 4;
    let lm = |name: &str, idx: usize| (name.to_string(), idx);
    let landmarks = vec![
        lm("head_top", template.head_cap),
        lm("head", torso_ring(0.935) + front),
        lm("neck", torso_ring(0.865) + front),
        lm("sternum_top", torso_ring(0.825) + front),
        lm("crotch", template.crotch_cap),
        lm("chest", torso_ring(0.72) + front),
        lm("waist", torso_ring(0.615) + front),
        lm("pelvis", torso_ring(0.52) + front),
        lm("l_acromion", torso_ring(0.80)),
        lm("r_acromion", torso_ring(0.80) + rn / 2),
        lm("l_bicep", template.arm_rings[0][nearest_station(&layout.arm_ts, 0.25)]),
        lm("l_forearm", template.arm_rings[0][nearest_station(&layout.arm_ts, 0.62)]),
        lm("l_wrist", template.arm_rings[0][wrist_station]),
        lm("r_wrist", template.arm_rings[1][wrist_station]),
        lm("l_thigh", template.leg_rings[0][nearest_station(&layout.leg_fracs, 0.46)]),
        lm("l_calf", template.leg_rings[0][nearest_station(&layout.leg_fracs, 0.22)]),
        lm("l_ankle", template.leg_rings[0][ankle_station]),
        lm("r_ankle", template.leg_rings[1][ankle_station]),
    ];

    let model = StatModel {
        mean,
        basis,
        eigenvalues,
        faces: template.faces,
        labels: template.labels,
        joints,
        weights,
        posable,
        landmarks,
    };
    model.validate()?;
    Ok(model)
}

/// One lazily built default model shared by the whole test binary; building
/// it repeatedly per test module would dominate the suite's runtime.
#[cfg(test)]
pub(crate) fn test_model() -> &'static StatModel {
    use std::sync::OnceLock;
    static MODEL: OnceLock<StatModel> = OnceLock::new();
    MODEL.get_or_init(|| build_synthetic_model(7, DEFAULT_VERTEX_BUDGET).unwrap())
}
