//! Exact 2D nearest-neighbor queries.
//!
//! Correspondence search during registration runs thousands of queries per
//! iteration, so a k-d tree replaces the linear scan. The tree is built to be
//! bit-for-bit interchangeable with [`nearest_brute`]: ties on distance go to
//! the smaller point index, and the far half of a split is explored whenever
//! the splitting plane is not strictly farther than the current best, so
//! equidistant candidates are never pruned away.

use nalgebra::Point2;

use crate::error::{Error, Result};

struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

pub struct KdTree2 {
    points: Vec<Point2<f64>>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree2 {
    pub fn new(points: &[Point2<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot index an empty point set"));
        }
        let mut tree = KdTree2 {
            points: points.to_vec(),
            nodes: Vec::with_capacity(points.len()),
            root: None,
        };
        let mut order: Vec<usize> = (0..points.len()).collect();
        tree.root = tree.build(&mut order, 0);
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build(&mut self, order: &mut [usize], depth: usize) -> Option<usize> {
        if order.is_empty() {
            return None;
        }
        let axis = depth % 2;
        let mid = order.len() / 2;
        // Deterministic split: coordinate, then index.
        order.select_nth_unstable_by(mid, |&a, &b| {
            self.points[a][axis]
                .total_cmp(&self.points[b][axis])
                .then(a.cmp(&b))
        });
        let point = order[mid];
        let id = self.nodes.len();
        self.nodes.push(Node {
            point,
            axis,
            left: None,
            right: None,
        });
        let (lo, rest) = order.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build(lo, depth + 1);
        let right = self.build(hi, depth + 1);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        Some(id)
    }

    /// Index of the nearest point and the squared distance to it. Among
    /// equidistant points the smallest index wins, matching [`nearest_brute`].
    pub fn nearest(&self, query: Point2<f64>) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(self.root, query, &mut best);
        best
    }

    fn search(&self, node: Option<usize>, query: Point2<f64>, best: &mut (usize, f64)) {
        let Some(id) = node else { return };
        let n = &self.nodes[id];
        let p = self.points[n.point];
        let d2 = (p - query).norm_squared();
        if d2 < best.1 || (d2 == best.1 && n.point < best.0) {
            *best = (n.point, d2);
        }
        let delta = query[n.axis] - p[n.axis];
        let (near, far) = if delta < 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.search(near, query, best);
        // Non-strict: a plane exactly at the best distance can still hide an
        // equidistant point with a smaller index.
        if delta * delta <= best.1 {
            self.search(far, query, best);
        }
    }
}

/// Linear-scan reference: first index attaining the minimum squared distance.
pub fn nearest_brute(points: &[Point2<f64>], query: Point2<f64>) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d2 = (p - query).norm_squared();
        if d2 < best.1 {
            best = (i, d2);
        }
    }
    best
}
