//! Outer boundary tracing of binary silhouettes.
//!
//! The tracer walks the outer contour of the largest foreground component by
//! scanning the 8-neighborhood of the current pixel clockwise, starting just
//! past the last background pixel seen. Termination does not rely on
//! revisiting the start pixel: the walk is a deterministic map on
//! (pixel, backtrack-direction) states, so it must eventually repeat a state,
//! and the pixels between the first and second visit of that state form the
//! closed contour. This also handles shapes (single pixels, one-pixel spurs,
//! diagonal bridges) where naive stop conditions stall or loop forever.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::raster::{fill_holes, largest_component, BinaryImage};

/// Clockwise 8-neighborhood ring starting at north, in image coordinates
/// (y grows downward).
const RING: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

fn direction_index(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    RING.iter().position(|&r| r == d).expect("not a neighbor")
}

/// An ordered closed contour. Consecutive entries are 8-adjacent and the last
/// entry is 8-adjacent to the first. Pixels on one-pixel-wide spurs appear
/// once per pass, so the path may repeat pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub path: Vec<(usize, usize)>,
    /// Number of walk steps the tracer spent, for budget checks.
    pub steps: usize,
}

impl Boundary {
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    /// Distinct pixels in first-visit order.
    pub fn unique_pixels(&self) -> Vec<(usize, usize)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &p in &self.path {
            if seen.insert(p) {
                out.push(p);
            }
        }
        out
    }

    pub fn pixel_set(&self) -> BTreeSet<(usize, usize)> {
        self.path.iter().copied().collect()
    }
}

/// Upper bound on tracer steps for a w by h image: each of the up to w*h
/// boundary pixels pairs with at most 8 backtrack directions, and one extra
/// ring of slack covers the state that closes the cycle.
pub fn step_budget(width: usize, height: usize) -> usize {
    8 * width * height + 8
}

/// Traces the outer boundary of the largest foreground component.
pub fn trace_boundary(img: &BinaryImage) -> Result<Boundary> {
    let component = largest_component(img);
    let start = component
        .foreground_pixels()
        .first()
        .copied()
        .ok_or(Error::EmptySilhouette)?;
    // Row-major scan order makes this the topmost, then leftmost pixel, so
    // its west neighbor is guaranteed background.
    let start = (start.0 as i64, start.1 as i64);

    let mut pos = start;
    let mut backtrack = 6; // west
    let mut trace: Vec<(i64, i64)> = Vec::new();
    let mut seen: HashMap<((i64, i64), usize), usize> = HashMap::new();
    let budget = step_budget(component.width(), component.height());

    for step in 0..=budget {
        if let Some(&first) = seen.get(&(pos, backtrack)) {
            let path = trace[first..]
                .iter()
                .map(|&(x, y)| (x as usize, y as usize))
                .collect();
            return Ok(Boundary { path, steps: step });
        }
        seen.insert((pos, backtrack), trace.len());
        trace.push(pos);

        let mut next = None;
        let mut last_bg_dir = backtrack;
        for k in 1..=8 {
            let d = (backtrack + k) % 8;
            let q = (pos.0 + RING[d].0, pos.1 + RING[d].1);
            if component.get(q.0, q.1) {
                next = Some((q, last_bg_dir));
                break;
            }
            last_bg_dir = d;
        }
        match next {
            None => {
                // Isolated pixel: its boundary is itself.
                return Ok(Boundary {
                    path: vec![(pos.0 as usize, pos.1 as usize)],
                    steps: step + 1,
                });
            }
            Some((q, bg_dir)) => {
                let bg = (pos.0 + RING[bg_dir].0, pos.1 + RING[bg_dir].1);
                backtrack = direction_index(q, bg);
                pos = q;
            }
        }
    }
    Err(Error::invalid(
        "boundary trace exceeded its step budget; mask is inconsistent",
    ))
}

/// Reference predicate for the traced set, computed without walking: the
/// pixels of the hole-filled largest component that touch exterior background
/// through an edge (4-neighborhood; outside the image counts as background).
/// Interior pixels that meet the outside only at a corner are not part of the
/// traced contour, and pixels bordering enclosed holes are reached by hole
/// filling, not by the outer walk.
pub fn outer_boundary_pixels(img: &BinaryImage) -> BTreeSet<(usize, usize)> {
    let component = largest_component(img);
    let filled = fill_holes(&component);
    let mut out = BTreeSet::new();
    for (x, y) in component.foreground_pixels() {
        let exposed = [(0i64, -1i64), (1, 0), (0, 1), (-1, 0)]
            .iter()
            .any(|&(dx, dy)| !filled.get(x as i64 + dx, y as i64 + dy));
        if exposed {
            out.insert((x, y));
        }
    }
    out
}
