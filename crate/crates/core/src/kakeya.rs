//! Raster geometry: oriented rectangles, their length translates, pixel
//! measures of unions, Perron-tree families and a sampled directional
//! maximal operator.
//!
//! Angles are measured from the `Oy` axis; the long axis of a rectangle with
//! angle `ω` is `(sin ω, cos ω)`. Pixels are counted by their centres. Pixel
//! `(i, j)` of a grid covers `[x_min + i/res, x_min + (i+1)/res]` and the
//! matching `y` band, with `j = 0` the bottom row.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default sprouting ratio of [`perron_tree`]; each bisection stage shrinks
/// the common triangle of a pair to this fraction of its base.
pub const SPROUT_RATIO: f64 = 0.8;

/// Sub-pixel anchor positions per axis used by [`discrete_max_op`].
pub const ANCHOR_OFFSETS: usize = 4;

/// Thinnest rectangle side, in pixels, the maximal operator accepts.
pub const MIN_KERNEL_WIDTH_PX: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum KakeyaError {
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("rectangle {index} escapes the grid bounding box")]
    EscapesGrid { index: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("the original family has zero measure")]
    ZeroMeasure,
    #[error("a Perron tree needs 2^J directions, got {0}")]
    NotPowerOfTwo(usize),
    #[error("directions {0} and {1} coincide")]
    DuplicateDirection(usize, usize),
    #[error("direction {0} is outside [0, pi/2)")]
    DirectionOutOfRange(usize),
    #[error("empty direction set")]
    EmptyDirections,
    #[error("invalid scale bounds: {0}")]
    ScaleBounds(String),
    #[error("mask and field shapes differ")]
    ShapeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedRectangle {
    pub center: (f64, f64),
    pub length: f64,
    pub width: f64,
    pub omega: f64,
}

impl OrientedRectangle {
    pub fn new(center: (f64, f64), length: f64, width: f64, omega: f64) -> Result<Self, KakeyaError> {
        let r = Self { center, length, width, omega };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), KakeyaError> {
        let finite = [self.center.0, self.center.1, self.length, self.width, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(KakeyaError::InvalidRectangle("non-finite field".into()));
        }
        if !(self.width > 0.0 && self.length >= self.width) {
            return Err(KakeyaError::InvalidRectangle(format!(
                "need length >= width > 0, got {} x {}",
                self.length, self.width
            )));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.omega) {
            return Err(KakeyaError::InvalidRectangle(format!("omega {} not in [0, pi/2]", self.omega)));
        }
        Ok(())
    }

    /// Unit vector of the long side.
    pub fn axis(&self) -> (f64, f64) {
        let (s, c) = self.omega.sin_cos();
        (s, c)
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        let (s, c) = self.axis();
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        let (cx, cy) = self.center;
        let mut out = [(0.0, 0.0); 4];
        for (n, (a, b)) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].into_iter().enumerate() {
            // long axis (s, c), short axis (c, -s)
            out[n] = (cx + a * hl * s + b * hw * c, cy + a * hl * c - b * hw * s);
        }
        out
    }

    /// Centre-point test.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let (s, c) = self.axis();
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        (dx * s + dy * c).abs() <= self.length / 2.0 && (dx * c - dy * s).abs() <= self.width / 2.0
    }
}

/// The same rectangle moved by its own length along its long side.
pub fn translate_along_length(r: &OrientedRectangle) -> OrientedRectangle {
    let (s, c) = r.axis();
    OrientedRectangle {
        center: (r.center.0 + r.length * s, r.center.1 + r.length * c),
        ..*r
    }
}

/// Range of `dx` with `|dx·s + dy·c| <= h1` and `|dx·c − dy·s| <= h2`.
fn row_span(dy: f64, h1: f64, h2: f64, s: f64, c: f64) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (coef, offset, half) in [(s, dy * c, h1), (c, -dy * s, h2)] {
        if coef.abs() < 1e-15 {
            if offset.abs() > half {
                return None;
            }
            continue;
        }
        let (a, b) = ((-half - offset) / coef, (half - offset) / coef);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub cols: usize,
    pub rows: usize,
    pub resolution: f64,
    mask: Vec<bool>,
}

impl RasterGrid {
    /// Empty grid covering at least `[x_min, x_max] × [y_min, y_max]`.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64, resolution: f64) -> Result<Self, KakeyaError> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(KakeyaError::InvalidGrid(format!("resolution {resolution}")));
        }
        if !(x_max > x_min && y_max > y_min) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(KakeyaError::InvalidGrid("empty bounding box".into()));
        }
        let cols = ((x_max - x_min) * resolution).ceil() as usize;
        let rows = ((y_max - y_min) * resolution).ceil() as usize;
        Ok(Self { x_min, y_min, cols, rows, resolution, mask: vec![false; cols * rows] })
    }

    /// Grid around every rectangle of `families`, padded by `margin`.
    pub fn covering(families: &[&[OrientedRectangle]], margin: f64, resolution: f64) -> Result<Self, KakeyaError> {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in families.iter().flat_map(|f| f.iter()).flat_map(|r| r.corners()) {
            b = [b[0].min(p.0), b[1].min(p.1), b[2].max(p.0), b[3].max(p.1)];
        }
        Self::new(b[0] - margin, b[1] - margin, b[2] + margin, b[3] + margin, resolution)
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.cols as f64 / self.resolution
    }

    pub fn y_max(&self) -> f64 {
        self.y_min + self.rows as f64 / self.resolution
    }

    /// Copy of the geometry with an empty mask.
    pub fn cleared(&self) -> Self {
        Self { mask: vec![false; self.mask.len()], ..self.clone() }
    }

    /// Same geometry, every pixel set.
    pub fn filled(&self) -> Self {
        Self { mask: vec![true; self.mask.len()], ..self.clone() }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.mask[row * self.cols + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.mask[row * self.cols + col] = value;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 / (self.resolution * self.resolution)
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.x_min + (col as f64 + 0.5) / self.resolution,
            self.y_min + (row as f64 + 0.5) / self.resolution,
        )
    }

    fn check_inside(&self, index: usize, r: &OrientedRectangle) -> Result<(), KakeyaError> {
        r.validate()?;
        let (x1, y1) = (self.x_max(), self.y_max());
        let eps = 1e-9;
        for (x, y) in r.corners() {
            if x < self.x_min - eps || x > x1 + eps || y < self.y_min - eps || y > y1 + eps {
                return Err(KakeyaError::EscapesGrid { index });
            }
        }
        Ok(())
    }

    /// Set every pixel whose centre lies in one of `rects`.
    pub fn paint(&mut self, rects: &[OrientedRectangle]) -> Result<(), KakeyaError> {
        for (i, r) in rects.iter().enumerate() {
            self.check_inside(i, r)?;
        }
        let (x_min, y_min, res, cols) = (self.x_min, self.y_min, self.resolution, self.cols);
        self.mask.par_chunks_mut(cols).enumerate().for_each(|(j, row)| {
            let y = y_min + (j as f64 + 0.5) / res;
            for r in rects {
                let (s, c) = r.axis();
                let Some((lo, hi)) = row_span(y - r.center.1, r.length / 2.0, r.width / 2.0, s, c) else {
                    continue;
                };
                let first = ((r.center.0 + lo - x_min) * res - 0.5).ceil().max(0.0);
                let last = ((r.center.0 + hi - x_min) * res - 0.5).floor().min(cols as f64 - 1.0);
                if first <= last {
                    row[first as usize..=last as usize].fill(true);
                }
            }
        });
        Ok(())
    }

    /// Binary PGM (P5), top row first; set pixels are white.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        for j in (0..self.rows).rev() {
            out.extend(self.mask[j * self.cols..(j + 1) * self.cols].iter().map(|&b| if b { 255 } else { 0 }));
        }
        out
    }
}

/// Pixel-counted area of the union of `rects` on the geometry of `grid`.
pub fn union_measure(rects: &[OrientedRectangle], grid: &RasterGrid) -> Result<f64, KakeyaError> {
    let mut g = grid.cleared();
    g.paint(rects)?;
    Ok(g.area())
}

/// `|∪ TR_i| / |∪ R_i|`.
pub fn blow_ratio(rects: &[OrientedRectangle], grid: &RasterGrid) -> Result<f64, KakeyaError> {
    let original = union_measure(rects, grid)?;
    if original == 0.0 {
        return Err(KakeyaError::ZeroMeasure);
    }
    let moved: Vec<_> = rects.iter().map(translate_along_length).collect();
    Ok(union_measure(&moved, grid)? / original)
}

/// Perron tree with the default [`SPROUT_RATIO`].
pub fn perron_tree(directions: &[f64], length: f64, aspect: f64) -> Result<Vec<OrientedRectangle>, KakeyaError> {
    perron_tree_with(directions, length, aspect, SPROUT_RATIO)
}

/// One rectangle per direction laid out by recursive bisection and overlap.
///
/// The directions cut a triangle with apex `(0, length)` and base on `y = 0`
/// into elementary triangles, one per direction; the boundary between two
/// neighbours is the mid-angle. Going up the binary tree, the right group of
/// every pair is slid left until the two groups' reduced triangles touch and
/// then further by `(1 − ratio)` of their combined base, so the pair's union
/// becomes a `ratio`-scaled triangle plus two sprouts. Each rectangle has
/// size `length × length/aspect`, its short side centred on the base of its
/// shifted elementary triangle.
pub fn perron_tree_with(
    directions: &[f64],
    length: f64,
    aspect: f64,
    ratio: f64,
) -> Result<Vec<OrientedRectangle>, KakeyaError> {
    let n = directions.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(KakeyaError::NotPowerOfTwo(n));
    }
    if let Some(i) = directions.iter().position(|w| !(0.0..FRAC_PI_2).contains(w)) {
        return Err(KakeyaError::DirectionOutOfRange(i));
    }
    if !(length > 0.0 && length.is_finite() && aspect >= 1.0 && aspect.is_finite()) {
        return Err(KakeyaError::InvalidRectangle(format!("length {length}, aspect {aspect}")));
    }
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(KakeyaError::InvalidRectangle(format!("sprout ratio {ratio}")));
    }
    // left to right on the base means decreasing angle
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| directions[b].total_cmp(&directions[a]));
    for w in order.windows(2) {
        if directions[w[0]] == directions[w[1]] {
            return Err(KakeyaError::DuplicateDirection(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let angles: Vec<f64> = order.iter().map(|&i| directions[i]).collect();
    // boundary angles, descending like `angles`
    let mut bounds = Vec::with_capacity(n + 1);
    if n == 1 {
        bounds.extend([angles[0], angles[0]]);
    } else {
        bounds.push((angles[0] + (angles[0] - angles[1]) / 2.0).min(FRAC_PI_2 * (1.0 - 1e-9)));
        bounds.extend(angles.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        bounds.push((angles[n - 1] - (angles[n - 2] - angles[n - 1]) / 2.0).max(0.0));
    }
    let lo: Vec<f64> = (0..n).map(|p| -length * bounds[p].tan()).collect();
    let hi: Vec<f64> = (0..n).map(|p| -length * bounds[p + 1].tan()).collect();

    let mut shift = vec![0.0; n];
    // (first, end, base_lo, base_hi) of each group's reduced triangle
    let mut groups: Vec<(usize, usize, f64, f64)> = (0..n).map(|p| (p, p + 1, lo[p], hi[p])).collect();
    while groups.len() > 1 {
        groups = groups
            .chunks(2)
            .map(|pair| {
                let (a, b) = (pair[0], pair[1]);
                let slide = (b.2 - a.3) + (1.0 - ratio) * ((a.3 - a.2) + (b.3 - b.2));
                for s in &mut shift[b.0..b.1] {
                    *s -= slide;
                }
                let right = b.3 - slide;
                (a.0, b.1, a.2, a.2 + ratio * (right - a.2))
            })
            .collect();
    }

    let width = length / aspect;
    let mut out = vec![None; n];
    for p in 0..n {
        let omega = angles[p];
        let (s, c) = omega.sin_cos();
        let base = (lo[p] + hi[p]) / 2.0 + shift[p];
        out[order[p]] = Some(OrientedRectangle::new(
            (base + s * length / 2.0, c * length / 2.0),
            length,
            width,
            omega,
        )?);
    }
    Ok(out.into_iter().map(|r| r.expect("every slot filled")).collect())
}

/// `n` angles equally spread over `(0, spread)`: `spread·(i + 1/2)/n`.
pub fn spread_directions(n: usize, spread: f64) -> Vec<f64> {
    (0..n).map(|i| spread * (i as f64 + 0.5) / n as f64).collect()
}

/// Rectangle scales sampled by [`discrete_max_op`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleBounds {
    pub min_length: f64,
    pub max_length: f64,
    /// `length / width` values.
    pub aspects: Vec<f64>,
}

impl ScaleBounds {
    /// `min_length · 2^k` up to `max_length`.
    pub fn lengths(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut l = self.min_length;
        while l <= self.max_length * (1.0 + 1e-12) {
            out.push(l);
            l *= 2.0;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxField {
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
    pub lengths: Vec<f64>,
    pub aspects: Vec<f64>,
}

impl MaxField {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Fraction of set pixels of `region` where the field is at least `level`.
    pub fn fraction_at_least(&self, region: &RasterGrid, level: f64) -> Result<f64, KakeyaError> {
        if region.cols != self.cols || region.rows != self.rows {
            return Err(KakeyaError::ShapeMismatch);
        }
        let (mut inside, mut hits) = (0usize, 0usize);
        for (&m, &v) in region.mask().iter().zip(&self.values) {
            if m {
                inside += 1;
                hits += usize::from(v >= level);
            }
        }
        Ok(if inside == 0 { 1.0 } else { hits as f64 / inside as f64 })
    }

    /// Binary PGM (P5), top row first, `value · 255` rounded.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        for j in (0..self.rows).rev() {
            out.extend(
                self.values[j * self.cols..(j + 1) * self.cols]
                    .iter()
                    .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
            );
        }
        out
    }
}

/// Rasterised rectangle as row runs `(dy, dx_lo, dx_hi)`, in pixel offsets
/// from the anchor pixel.
#[derive(Debug)]
struct Kernel {
    runs: Vec<(i64, i64, i64)>,
}

impl Kernel {
    /// Rectangle of `length × width` pixels at angle `omega`, centred at
    /// `(ox, oy)` inside the anchor pixel `[0, 1]²`.
    fn new(length: f64, width: f64, omega: f64, ox: f64, oy: f64) -> Self {
        let (s, c) = omega.sin_cos();
        let (hl, hw) = (length / 2.0, width / 2.0);
        let reach = (hl * c.abs() + hw * s.abs()).ceil() as i64 + 1;
        let mut runs = Vec::new();
        for dy in -reach..=reach {
            let y = dy as f64 + 0.5 - oy;
            if let Some((lo, hi)) = row_span(y, hl, hw, s, c) {
                let first = (lo + ox - 0.5).ceil() as i64;
                let last = (hi + ox - 0.5).floor() as i64;
                if first <= last {
                    runs.push((dy, first, last));
                }
            }
        }
        Self { runs }
    }
}

/// Per-row sparse table for range maxima.
struct RowMax {
    levels: Vec<Vec<f64>>,
}

impl RowMax {
    fn new(row: &[f64]) -> Self {
        let mut levels = vec![row.to_vec()];
        let mut w = 1;
        while 2 * w <= row.len() {
            let prev = levels.last().expect("nonempty");
            let next: Vec<f64> = (0..=row.len() - 2 * w).map(|i| prev[i].max(prev[i + w])).collect();
            levels.push(next);
            w *= 2;
        }
        Self { levels }
    }

    /// Maximum over `lo..=hi`.
    fn max(&self, lo: usize, hi: usize) -> f64 {
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        self.levels[k][lo].max(self.levels[k][hi + 1 - (1 << k)])
    }
}

/// Sampled `M_Ω 1_E`: for every pixel, the largest mean of the mask over a
/// fixed family of rectangles whose rasterisation contains the pixel.
///
/// The family is: every angle of `directions`; lengths
/// [`ScaleBounds::lengths`]; every aspect of the bounds; centres at
/// `pixel + (a, b)/4 + 1/8` for `a, b ∈ 0..4`, over every pixel of the grid.
/// Means count only the in-grid part of a rectangle, so the field of the
/// all-ones mask is exactly 1.
pub fn discrete_max_op(mask: &RasterGrid, directions: &[f64], scales: &ScaleBounds) -> Result<MaxField, KakeyaError> {
    if directions.is_empty() {
        return Err(KakeyaError::EmptyDirections);
    }
    if directions.iter().any(|w| !w.is_finite()) {
        return Err(KakeyaError::InvalidRectangle("non-finite direction".into()));
    }
    let res = mask.resolution;
    let lengths = scales.lengths();
    if lengths.is_empty() || scales.min_length.is_nan() || scales.min_length <= 0.0 || scales.aspects.is_empty() {
        return Err(KakeyaError::ScaleBounds("no sampled scale".into()));
    }
    let span = mask.cols.max(mask.rows) as f64;
    for &a in &scales.aspects {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(KakeyaError::ScaleBounds(format!("aspect {a}")));
        }
        if scales.min_length * res / a < MIN_KERNEL_WIDTH_PX {
            return Err(KakeyaError::ScaleBounds(format!(
                "width {} px is below {MIN_KERNEL_WIDTH_PX} px",
                scales.min_length * res / a
            )));
        }
    }
    if scales.max_length * res > 2.0 * span {
        return Err(KakeyaError::ScaleBounds("longest rectangle exceeds the grid".into()));
    }

    let (cols, rows) = (mask.cols, mask.rows);
    // prefix[j][i] = number of set pixels in row j before column i
    let prefix: Vec<Vec<u32>> = (0..rows)
        .into_par_iter()
        .map(|j| {
            let mut p = Vec::with_capacity(cols + 1);
            p.push(0u32);
            for i in 0..cols {
                p.push(p[i] + u32::from(mask.get(i, j)));
            }
            p
        })
        .collect();

    let mut field = vec![0.0f64; cols * rows];
    for &omega in directions {
        for &len in &lengths {
            for &aspect in &scales.aspects {
                for a in 0..ANCHOR_OFFSETS {
                    for b in 0..ANCHOR_OFFSETS {
                        let step = 1.0 / ANCHOR_OFFSETS as f64;
                        let kernel = Kernel::new(
                            len * res,
                            len * res / aspect,
                            omega,
                            (a as f64 + 0.5) * step,
                            (b as f64 + 0.5) * step,
                        );
                        accumulate(&kernel, &prefix, cols, rows, &mut field);
                    }
                }
            }
        }
    }
    Ok(MaxField { cols, rows, values: field, lengths, aspects: scales.aspects.clone() })
}

fn clip(lo: i64, hi: i64, n: usize) -> Option<(usize, usize)> {
    let lo = lo.max(0);
    let hi = hi.min(n as i64 - 1);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

/// Mean of the mask under the kernel at every anchor, then the largest mean
/// among anchors whose kernel covers each pixel, folded into `field`.
fn accumulate(kernel: &Kernel, prefix: &[Vec<u32>], cols: usize, rows: usize, field: &mut [f64]) {
    let means: Vec<RowMax> = (0..rows)
        .into_par_iter()
        .map(|j| {
            let row: Vec<f64> = (0..cols)
                .map(|i| {
                    let (mut sum, mut count) = (0u64, 0u64);
                    for &(dy, lo, hi) in &kernel.runs {
                        let y = j as i64 + dy;
                        if y < 0 || y >= rows as i64 {
                            continue;
                        }
                        if let Some((a, b)) = clip(i as i64 + lo, i as i64 + hi, cols) {
                            let p = &prefix[y as usize];
                            sum += u64::from(p[b + 1] - p[a]);
                            count += (b - a + 1) as u64;
                        }
                    }
                    if count == 0 { f64::NEG_INFINITY } else { sum as f64 / count as f64 }
                })
                .collect();
            RowMax::new(&row)
        })
        .collect();
    field.par_chunks_mut(cols).enumerate().for_each(|(j, out)| {
        for &(dy, lo, hi) in &kernel.runs {
            // anchors p with p + (dy, dx) = pixel
            let y = j as i64 - dy;
            if y < 0 || y >= rows as i64 {
                continue;
            }
            let table = &means[y as usize];
            for (i, v) in out.iter_mut().enumerate() {
                if let Some((a, b)) = clip(i as i64 - hi, i as i64 - lo, cols) {
                    let m = table.max(a, b);
                    if m > *v {
                        *v = m;
                    }
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn rect(cx: f64, cy: f64, l: f64, w: f64, omega: f64) -> OrientedRectangle {
        OrientedRectangle::new((cx, cy), l, w, omega).unwrap()
    }

    #[test]
    fn translation_examples() {
        assert_eq!(translate_along_length(&rect(0.0, 0.0, 4.0, 1.0, 0.0)).center, (0.0, 4.0));
        let t = translate_along_length(&rect(0.0, 0.0, 4.0, 1.0, FRAC_PI_2)).center;
        assert!((t.0 - 4.0).abs() < 1e-12 && t.1.abs() < 1e-12);
        let t = translate_along_length(&rect(0.0, 0.0, 2.0, 0.5, FRAC_PI_4)).center;
        assert!((t.0 - SQRT_2).abs() < 1e-12 && (t.1 - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn rectangle_invariants_are_enforced() {
        assert!(OrientedRectangle::new((0.0, 0.0), 1.0, 2.0, 0.0).is_err());
        assert!(OrientedRectangle::new((0.0, 0.0), 1.0, 0.0, 0.0).is_err());
        assert!(OrientedRectangle::new((0.0, 0.0), 1.0, 1.0, 2.0).is_err());
        assert!(OrientedRectangle::new((0.0, f64::NAN), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn union_measure_examples() {
        let res = 64.0;
        let grid = RasterGrid::new(-2.0, -2.0, 4.0, 2.0, res).unwrap();
        let unit = rect(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!((union_measure(&[unit], &grid).unwrap() - 1.0).abs() <= 2.0 / res);
        let other = rect(2.5, 0.0, 1.0, 1.0, 0.0);
        assert!((union_measure(&[unit, other], &grid).unwrap() - 2.0).abs() <= 4.0 / res);
        let thin = rect(0.3, 0.1, 2.0, 0.5, 0.7);
        assert_eq!(union_measure(&[thin, thin], &grid).unwrap(), union_measure(&[thin], &grid).unwrap());
    }

    #[test]
    fn escaping_rectangle_is_rejected() {
        let grid = RasterGrid::new(0.0, 0.0, 1.0, 1.0, 64.0).unwrap();
        let r = rect(0.9, 0.5, 0.5, 0.1, FRAC_PI_2);
        assert_eq!(union_measure(&[r], &grid), Err(KakeyaError::EscapesGrid { index: 0 }));
    }

    #[test]
    fn blow_ratio_trivial_cases() {
        let single = [rect(0.0, 0.0, 1.0, 0.2, 0.4)];
        let moved: Vec<_> = single.iter().map(translate_along_length).collect();
        let grid = RasterGrid::covering(&[&single, &moved], 0.1, 128.0).unwrap();
        assert!((blow_ratio(&single, &grid).unwrap() - 1.0).abs() < 0.02);

        let parallel: Vec<_> = (0..4).map(|i| rect(i as f64, 0.0, 1.0, 0.25, 0.0)).collect();
        let moved: Vec<_> = parallel.iter().map(translate_along_length).collect();
        let grid = RasterGrid::covering(&[&parallel, &moved], 0.1, 128.0).unwrap();
        assert!((blow_ratio(&parallel, &grid).unwrap() - 1.0).abs() < 0.02);

        let empty = RasterGrid::new(0.0, 0.0, 1.0, 1.0, 8.0).unwrap();
        assert_eq!(blow_ratio(&[], &empty), Err(KakeyaError::ZeroMeasure));
    }

    #[test]
    fn single_direction_tree_is_one_rectangle() {
        let t = perron_tree(&[0.3], 1.0, 4.0).unwrap();
        assert_eq!(t.len(), 1);
        let grid = RasterGrid::covering(&[&t], 0.1, 256.0).unwrap();
        assert!((union_measure(&t, &grid).unwrap() - 0.25).abs() < 0.01);
    }

    fn tree_measures(j: u32, res: f64) -> (f64, f64) {
        let n = 1usize << j;
        let t = perron_tree(&spread_directions(n, FRAC_PI_4), 1.0, (2 * n) as f64).unwrap();
        let moved: Vec<_> = t.iter().map(translate_along_length).collect();
        let grid = RasterGrid::covering(&[&t, &moved], 0.05, res).unwrap();
        (union_measure(&t, &grid).unwrap(), blow_ratio(&t, &grid).unwrap())
    }

    #[test]
    fn deeper_tree_has_smaller_union() {
        let (a2, _) = tree_measures(2, 96.0);
        let (a3, r3) = tree_measures(3, 96.0);
        assert!(a3 < a2, "{a3} >= {a2}");
        assert!(r3 > 1.0);
    }

    #[test]
    fn tree_rejects_bad_directions() {
        assert_eq!(perron_tree(&[0.1, 0.2, 0.3], 1.0, 4.0), Err(KakeyaError::NotPowerOfTwo(3)));
        assert_eq!(perron_tree(&[0.1, 0.1], 1.0, 4.0), Err(KakeyaError::DuplicateDirection(0, 1)));
        assert_eq!(perron_tree(&[0.1, FRAC_PI_2], 1.0, 4.0), Err(KakeyaError::DirectionOutOfRange(1)));
        assert!(perron_tree(&[], 1.0, 4.0).is_err());
    }

    #[test]
    fn tree_is_independent_of_input_order() {
        let d = spread_directions(8, 0.9);
        let mut rev = d.clone();
        rev.reverse();
        let a = perron_tree(&d, 1.0, 16.0).unwrap();
        let mut b = perron_tree(&rev, 1.0, 16.0).unwrap();
        b.reverse();
        assert_eq!(a, b);
    }

    fn small_grid() -> RasterGrid {
        RasterGrid::new(0.0, 0.0, 1.0, 0.75, 32.0).unwrap()
    }

    fn scales() -> ScaleBounds {
        ScaleBounds { min_length: 0.25, max_length: 0.5, aspects: vec![2.0, 4.0] }
    }

    #[test]
    fn constant_masks_give_constant_fields() {
        let g = small_grid();
        let ones = discrete_max_op(&g.filled(), &[0.0, 0.7], &scales()).unwrap();
        assert!(ones.values.iter().all(|&v| v == 1.0));
        let zeros = discrete_max_op(&g, &[0.0, 0.7], &scales()).unwrap();
        assert!(zeros.values.iter().all(|&v| v == 0.0));
        assert_eq!(ones.lengths, vec![0.25, 0.5]);
    }

    #[test]
    fn field_grows_with_directions_and_mask() {
        let mut small = small_grid();
        small.paint(&[rect(0.4, 0.4, 0.5, 0.1, 0.3)]).unwrap();
        let mut big = small.clone();
        big.paint(&[rect(0.7, 0.3, 0.4, 0.1, 1.2)]).unwrap();
        let f1 = discrete_max_op(&small, &[0.3], &scales()).unwrap();
        let f2 = discrete_max_op(&small, &[0.3, 1.2], &scales()).unwrap();
        let f3 = discrete_max_op(&big, &[0.3, 1.2], &scales()).unwrap();
        for k in 0..f1.values.len() {
            assert!(f1.values[k] <= f2.values[k]);
            assert!(f2.values[k] <= f3.values[k]);
            assert!((0.0..=1.0).contains(&f3.values[k]));
        }
        assert!(f1.values.iter().any(|&v| v > 0.9));
    }

    #[test]
    fn maximal_operator_errors() {
        let g = small_grid();
        assert_eq!(discrete_max_op(&g, &[], &scales()), Err(KakeyaError::EmptyDirections));
        let thin = ScaleBounds { min_length: 0.25, max_length: 0.25, aspects: vec![8.0] };
        assert!(matches!(discrete_max_op(&g, &[0.1], &thin), Err(KakeyaError::ScaleBounds(_))));
        let huge = ScaleBounds { min_length: 4.0, max_length: 4.0, aspects: vec![1.0] };
        assert!(matches!(discrete_max_op(&g, &[0.1], &huge), Err(KakeyaError::ScaleBounds(_))));
    }

    #[test]
    fn sparse_table_matches_scan() {
        let row: Vec<f64> = (0..37).map(|i| ((i * 7919) % 23) as f64).collect();
        let t = RowMax::new(&row);
        for lo in 0..row.len() {
            for hi in lo..row.len() {
                let want = row[lo..=hi].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(t.max(lo, hi), want);
            }
        }
    }

    #[test]
    fn pgm_layout() {
        let mut g = RasterGrid::new(0.0, 0.0, 3.0, 2.0, 1.0).unwrap();
        g.set(0, 0, true);
        let pgm = g.to_pgm();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        // bottom-left pixel is the first byte of the last row
        assert_eq!(&pgm[header.len()..], &[0, 0, 0, 255, 0, 0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn translation_preserves_shape(cx in -5.0f64..5.0, cy in -5.0f64..5.0, l in 0.1f64..3.0,
                                       f in 0.05f64..1.0, w in 0.0f64..FRAC_PI_2) {
            let r = rect(cx, cy, l, l * f, w);
            let t = translate_along_length(&r);
            prop_assert_eq!((t.length, t.width, t.omega), (r.length, r.width, r.omega));
            let d = ((t.center.0 - cx).powi(2) + (t.center.1 - cy).powi(2)).sqrt();
            prop_assert!((d - l).abs() < 1e-12);
        }

        #[test]
        fn blow_ratio_survives_rigid_motion(dx in -3.0f64..3.0, dy in -3.0f64..3.0, turn in -0.2f64..0.2) {
            let dirs: Vec<f64> = spread_directions(4, 1.0).iter().map(|w| w + 0.3).collect();
            let base = perron_tree(&dirs, 1.0, 8.0).unwrap();
            let (s, c) = turn.sin_cos();
            let moved: Vec<_> = base.iter().map(|r| {
                let (x, y) = r.center;
                // rotation by `turn` changes the angle from Oy by `turn`
                rect(x * c + y * s + dx, -x * s + y * c + dy, r.length, r.width, r.omega + turn)
            }).collect();
            let res = 128.0;
            let ratio = |fam: &[OrientedRectangle]| {
                let tr: Vec<_> = fam.iter().map(translate_along_length).collect();
                let g = RasterGrid::covering(&[fam, &tr], 0.05, res).unwrap();
                blow_ratio(fam, &g).unwrap()
            };
            let (a, b) = (ratio(&base), ratio(&moved));
            prop_assert!((a - b).abs() / a <= 3.0 / res, "{} vs {}", a, b);
        }
    }
}
