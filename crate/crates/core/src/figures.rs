//! Static SVG renderings. Output depends only on the inputs; coordinates are
//! printed with a fixed number of decimals so reruns are byte-identical.

use std::fmt::Write;

use crate::kakeya::{MaxField, OrientedRectangle, RasterGrid};
use crate::witnesses::normalized_subinterval;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

fn open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Affine map from a data box onto the canvas, `y` pointing up.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(x0: f64, y0: f64, x1: f64, y1: f64) -> (Self, f64, f64) {
        let scale = (SIZE - 2.0 * PAD) / (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        let width = (x1 - x0) * scale + 2.0 * PAD;
        let height = (y1 - y0) * scale + 2.0 * PAD;
        (Self { x0, y0, scale, height }, width, height)
    }

    fn x(&self, x: f64) -> f64 {
        PAD + (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        self.height - PAD - (y - self.y0) * self.scale
    }
}

/// Directions as points `(sin θ, cos θ)` on the unit circle, with rays from
/// the origin.
pub fn direction_scatter(angles: &[f64]) -> String {
    let (f, w, h) = Frame::fit(-1.05, -1.05, 1.05, 1.05);
    let mut s = open(w, h);
    let _ = writeln!(
        s,
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#bbb\"/>",
        f.x(0.0),
        f.y(0.0),
        f.scale
    );
    for &t in angles {
        let (px, py) = (t.sin(), t.cos());
        let _ = writeln!(
            s,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#9ab\" stroke-width=\"0.5\"/>",
            f.x(0.0),
            f.y(0.0),
            f.x(px),
            f.y(py)
        );
        let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"#135\"/>", f.x(px), f.y(py));
    }
    s.push_str("</svg>\n");
    s
}

/// The normalised dyadic interval `[1, 2]` cut into `2^order` subintervals.
/// Subintervals holding a point of `filling` are shaded; `witness` points
/// are drawn above the axis, `filling` points on it.
pub fn dyadic_filling(order: u32, filling: &[f64], witness: &[f64]) -> String {
    let m = 1u64 << order;
    let (f, w, _) = Frame::fit(1.0, 0.0, 2.0, 0.25);
    let height = 0.25 * f.scale + 2.0 * PAD;
    let f = Frame { height, ..f };
    let mut s = open(w, height);
    for l in 1..=m {
        let (lo, hi) = normalized_subinterval(l, m);
        let filled = filling.iter().any(|&x| x > lo && x <= hi);
        let fill = match (filled, l % 2 == 0) {
            (true, true) => "#8ac",
            (true, false) => "#cde",
            (false, _) => "#fff",
        };
        let _ = writeln!(
            s,
            "<rect class=\"subinterval\" x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{fill}\" stroke=\"#333\" stroke-width=\"0.5\"/>",
            f.x(lo),
            f.y(0.1),
            (hi - lo) * f.scale,
            0.1 * f.scale
        );
    }
    for &x in filling {
        let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2.5\" fill=\"#333\"/>", f.x(x), f.y(0.05));
    }
    for &x in witness {
        let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#c30\"/>", f.x(x), f.y(0.17));
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(families: &[&[OrientedRectangle]]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in families.iter().flat_map(|f| f.iter()).flat_map(|r| r.corners()) {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    if !b.0.is_finite() {
        return (0.0, 0.0, 1.0, 1.0);
    }
    b
}

fn polygon(s: &mut String, f: &Frame, r: &OrientedRectangle, class: &str, style: &str) {
    let pts: Vec<String> = r.corners().iter().map(|&(x, y)| format!("{:.3},{:.3}", f.x(x), f.y(y))).collect();
    let _ = writeln!(s, "<polygon class=\"{class}\" points=\"{}\" {style}/>", pts.join(" "));
}

/// A rectangle family (filled) and its translates (outlined).
pub fn rectangle_overlay(original: &[OrientedRectangle], translated: &[OrientedRectangle]) -> String {
    let (x0, y0, x1, y1) = bounds(&[original, translated]);
    let (f, w, h) = Frame::fit(x0, y0, x1, y1);
    let mut s = open(w, h);
    for r in original {
        polygon(&mut s, &f, r, "original", "fill=\"#37a\" fill-opacity=\"0.35\" stroke=\"#137\" stroke-width=\"0.5\"");
    }
    for r in translated {
        polygon(&mut s, &f, r, "translated", "fill=\"none\" stroke=\"#c30\" stroke-width=\"0.7\"");
    }
    s.push_str("</svg>\n");
    s
}

/// Pixels with `field >= level` (as horizontal runs) under rectangle outlines.
pub fn level_set_overlay(field: &MaxField, grid: &RasterGrid, level: f64, outlines: &[OrientedRectangle]) -> String {
    let (f, w, h) = Frame::fit(grid.x_min, grid.y_min, grid.x_max(), grid.y_max());
    let mut s = open(w, h);
    let px = f.scale / grid.resolution;
    for j in 0..field.rows {
        let mut i = 0;
        while i < field.cols {
            if field.get(i, j) < level {
                i += 1;
                continue;
            }
            let start = i;
            while i < field.cols && field.get(i, j) >= level {
                i += 1;
            }
            let (x, y) = (grid.x_min + start as f64 / grid.resolution, grid.y_min + (j + 1) as f64 / grid.resolution);
            let _ = writeln!(
                s,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"#fd8\"/>",
                f.x(x),
                f.y(y),
                (i - start) as f64 * px,
                px
            );
        }
    }
    for r in outlines {
        polygon(&mut s, &f, r, "outline", "fill=\"none\" stroke=\"#333\" stroke-width=\"0.5\"");
    }
    s.push_str("</svg>\n");
    s
}

/// One row per multiplier `a`: the points `k·a`, `k = 1..=2^order`, on a
/// `log2` axis. Disjoint rows show non-overlapping homogeneous sets.
pub fn schedule_figure(order: u32, multipliers: &[u64]) -> String {
    let m = 1u64 << order;
    let logs: Vec<f64> = multipliers
        .iter()
        .flat_map(|&a| [(a as f64).log2(), (a as f64 * m as f64).log2()])
        .collect();
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi.max(lo + 1.0)) } else { (0.0, 1.0) };
    let rows = multipliers.len().max(1) as f64;
    let (f, w, _) = Frame::fit(lo, 0.0, hi, 0.0);
    let row_h = 18.0;
    let height = rows * row_h + 2.0 * PAD;
    let mut s = open(w, height);
    for (i, &a) in multipliers.iter().enumerate() {
        let y = PAD + (i as f64 + 0.5) * row_h;
        let _ = writeln!(
            s,
            "<line x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\" stroke=\"#ccc\"/>",
            f.x(lo),
            f.x(hi)
        );
        for k in 1..=m {
            let v = (k as f64 * a as f64).log2();
            let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{y:.3}\" r=\"2.5\" fill=\"#135\"/>", f.x(v));
        }
    }
    s.push_str("</svg>\n");
    s
}
