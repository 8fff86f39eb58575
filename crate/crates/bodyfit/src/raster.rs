//! Binary masks, silhouette rasterization, and background subtraction.
//!
//! Projected meshes are scaled to fit the target image with a uniform margin,
//! then filled triangle by triangle with an inclusive edge-function test at
//! pixel centers. Input photographs become masks by thresholding the color
//! distance to a known background and keeping the largest connected component.

use image::RgbImage;
use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};

/// Fraction of each image dimension left blank around a fitted silhouette.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Smallest accepted value for the short side of a render target.
pub const MIN_RESOLUTION: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Foreground test; anything outside the image is background.
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        assert!(x < self.width && y < self.height, "pixel out of range");
        self.bits[y * self.width + x] = value;
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Foreground pixels in row-major scan order.
    pub fn foreground_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.bits[y * self.width + x] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Vertical extent of the foreground: highest and lowest occupied rows.
    pub fn row_span(&self) -> Option<(usize, usize)> {
        let mut lo = None;
        let mut hi = None;
        for y in 0..self.height {
            if (0..self.width).any(|x| self.bits[y * self.width + x]) {
                lo.get_or_insert(y);
                hi = Some(y);
            }
        }
        Some((lo?, hi?))
    }

    pub fn to_gray_image(&self) -> image::GrayImage {
        let mut img = image::GrayImage::new(self.width as u32, self.height as u32);
        for (x, y, p) in img.enumerate_pixels_mut() {
            *p = image::Luma([if self.get(x as i64, y as i64) { 255 } else { 0 }]);
        }
        img
    }

    pub fn from_gray_image(img: &image::GrayImage) -> Self {
        let (w, h) = img.dimensions();
        let mut out = BinaryImage::new(w as usize, h as usize);
        for (x, y, p) in img.enumerate_pixels() {
            if p.0[0] > 127 {
                out.set(x as usize, y as usize, true);
            }
        }
        out
    }
}

/// Similarity transform from projected coordinates to pixel coordinates:
/// `pixel = point * scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTransform {
    pub scale: f64,
    pub offset: Vector2<f64>,
}

impl FitTransform {
    pub fn apply(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::from(p.coords * self.scale + self.offset)
    }

    pub fn invert(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::from((p.coords - self.offset) / self.scale)
    }
}

/// Uniform scale and centering that places the bounding box of `points`
/// inside a `width` by `height` image with `margin` left free on every side.
pub fn fit_transform(
    points: &[Point2<f64>],
    width: usize,
    height: usize,
    margin: f64,
) -> Result<FitTransform> {
    if points.is_empty() {
        return Err(Error::invalid("cannot fit an empty point set"));
    }
    if !(0.0..0.5).contains(&margin) {
        return Err(Error::invalid(format!("margin {margin} outside [0, 0.5)")));
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let bw = hi.x - lo.x;
    let bh = hi.y - lo.y;
    if bw <= 0.0 && bh <= 0.0 {
        return Err(Error::invalid("projected extent is a single point"));
    }
    let avail_w = width as f64 * (1.0 - 2.0 * margin);
    let avail_h = height as f64 * (1.0 - 2.0 * margin);
    let mut scale = f64::INFINITY;
    if bw > 0.0 {
        scale = scale.min(avail_w / bw);
    }
    if bh > 0.0 {
        scale = scale.min(avail_h / bh);
    }
    let center = Point2::new((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0);
    let image_center = Vector2::new(width as f64 / 2.0, height as f64 / 2.0);
    Ok(FitTransform {
        scale,
        offset: image_center - center.coords * scale,
    })
}

fn edge(p: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Fills the triangles of a projected mesh into a binary image, returning the
/// mask together with the transform that was used, so pixel coordinates can be
/// mapped back to projected coordinates. A pixel is foreground when its center
/// lies inside or exactly on the edge of some triangle.
pub fn rasterize(
    points: &[Point2<f64>],
    faces: &[[usize; 3]],
    width: usize,
    height: usize,
    margin: f64,
) -> Result<(BinaryImage, FitTransform)> {
    if width.min(height) < MIN_RESOLUTION {
        return Err(Error::invalid(format!(
            "render target {width}x{height} is below the {MIN_RESOLUTION} pixel minimum"
        )));
    }
    let fit = fit_transform(points, width, height, margin)?;
    let mut img = BinaryImage::new(width, height);
    let mapped: Vec<Point2<f64>> = points.iter().map(|&p| fit.apply(p)).collect();
    for f in faces {
        let (a, b, c) = (mapped[f[0]], mapped[f[1]], mapped[f[2]]);
        let area2 = edge(c, a, b);
        if area2 == 0.0 {
            continue; // degenerate in this view, contributes no area
        }
        let orient = area2.signum();
        let min_x = a.x.min(b.x).min(c.x);
        let max_x = a.x.max(b.x).max(c.x);
        let min_y = a.y.min(b.y).min(c.y);
        let max_y = a.y.max(b.y).max(c.y);
        let x0 = ((min_x - 0.5).floor().max(0.0)) as usize;
        let y0 = ((min_y - 0.5).floor().max(0.0)) as usize;
        let x1 = ((max_x - 0.5).ceil().min(width as f64 - 1.0)).max(0.0) as usize;
        let y1 = ((max_y - 0.5).ceil().min(height as f64 - 1.0)).max(0.0) as usize;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let p = Point2::new(x as f64 + 0.5, y as f64 + 0.5);
                if orient * edge(p, a, b) >= 0.0
                    && orient * edge(p, b, c) >= 0.0
                    && orient * edge(p, c, a) >= 0.0
                {
                    img.set(x, y, true);
                }
            }
        }
    }
    Ok((img, fit))
}

const NEIGHBORS8: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Keeps only the largest 8-connected foreground component. Ties go to the
/// component encountered first in row-major order.
pub fn largest_component(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let mut best: Vec<(usize, usize)> = Vec::new();
    let mut visited = vec![false; w * h];
    for sy in 0..h {
        for sx in 0..w {
            if !img.get(sx as i64, sy as i64) || visited[sy * w + sx] {
                continue;
            }
            let mut component = vec![(sx, sy)];
            visited[sy * w + sx] = true;
            let mut head = 0;
            while head < component.len() {
                let (x, y) = component[head];
                head += 1;
                for (dx, dy) in NEIGHBORS8 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if img.get(nx, ny) && !visited[ny as usize * w + nx as usize] {
                        visited[ny as usize * w + nx as usize] = true;
                        component.push((nx as usize, ny as usize));
                    }
                }
            }
            if component.len() > best.len() {
                best = component;
            }
        }
    }
    let mut out = BinaryImage::new(w, h);
    for (x, y) in best {
        out.set(x, y, true);
    }
    out
}

/// Fills enclosed background regions: background is flooded 4-connected from
/// the image border, and anything it cannot reach becomes foreground.
pub fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    if w == 0 || h == 0 {
        return img.clone();
    }
    let mut outside = vec![false; w * h];
    let mut queue: Vec<(usize, usize)> = Vec::new();
    let push = |x: usize, y: usize, outside: &mut Vec<bool>, queue: &mut Vec<(usize, usize)>| {
        if !img.get(x as i64, y as i64) && !outside[y * w + x] {
            outside[y * w + x] = true;
            queue.push((x, y));
        }
    };
    for x in 0..w {
        push(x, 0, &mut outside, &mut queue);
        push(x, h - 1, &mut outside, &mut queue);
    }
    for y in 0..h {
        push(0, y, &mut outside, &mut queue);
        push(w - 1, y, &mut outside, &mut queue);
    }
    let mut head = 0;
    while head < queue.len() {
        let (x, y) = queue[head];
        head += 1;
        for (dx, dy) in [(0, -1), (1, 0), (0, 1), (-1, 0)] {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            push(nx as usize, ny as usize, &mut outside, &mut queue);
        }
    }
    let mut out = BinaryImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if !outside[y * w + x] {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Background subtraction: pixels whose normalized color distance from
/// `background` exceeds `threshold` become foreground, then only the largest
/// connected component is kept. `threshold` is a fraction of the maximum
/// possible RGB distance and must lie in (0, 1].
pub fn extract_silhouette(
    image: &RgbImage,
    background: image::Rgb<u8>,
    threshold: f64,
) -> Result<BinaryImage> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} outside (0, 1]"
        )));
    }
    let (w, h) = image.dimensions();
    let mut mask = BinaryImage::new(w as usize, h as usize);
    let max_distance = 255.0 * 3f64.sqrt();
    for (x, y, p) in image.enumerate_pixels() {
        let mut d2 = 0.0;
        for k in 0..3 {
            let diff = p.0[k] as f64 - background.0[k] as f64;
            d2 += diff * diff;
        }
        if d2.sqrt() / max_distance > threshold {
            mask.set(x as usize, y as usize, true);
        }
    }
    if mask.foreground_count() == 0 {
        return Err(Error::EmptySilhouette);
    }
    Ok(largest_component(&mask))
}
