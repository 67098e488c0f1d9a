//! Sliding-line encoding of a polygon and decoding back to boundary points.
//!
//! `n` horizontal lines are placed at `y_min + (y_max - y_min) * k / (n + 1)`
//! for `k = 1..=n`. They slide vertically, so only the x-coordinates of
//! their boundary intersections are free (`x_v`). Likewise `n` vertical
//! lines at equidistant x positions contribute the y-coordinates `y_h`.
//! Each line keeps its smallest and largest intersection, interleaved as
//! `(line 1 min, line 1 max, line 2 min, ...)`.
//!
//! A flat parameter vector is laid out as
//! `[x_min, y_min, x_max, y_max, x_v[0..2n], y_h[0..2n]]`.

use crate::error::{Error, Result};
use crate::geom::{polygon_bbox, AxisRect, Point, Polygon};

pub const DEFAULT_LINES: usize = 7;

/// Parameter count of a target with `n` lines per direction.
pub const fn param_count(n: usize) -> usize {
    4 + 4 * n
}

/// Which way the lines move across the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlideDirection {
    /// Horizontal lines stepping down the rectangle; positions are y values.
    Vertical,
    /// Vertical lines stepping across the rectangle; positions are x values.
    Horizontal,
}

/// Orientation of a text region, or of a pair of point chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextAxis {
    /// Top and bottom chains, x-sorted.
    Horizontal,
    /// Left and right chains, y-sorted.
    Vertical,
}

pub fn sliding_positions(rect: &AxisRect, n: usize, dir: SlideDirection) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one sliding line".into(),
        ));
    }
    let rect = AxisRect::new(rect.x_min, rect.y_min, rect.x_max, rect.y_max)?;
    let (lo, hi) = match dir {
        SlideDirection::Vertical => (rect.y_min, rect.y_max),
        SlideDirection::Horizontal => (rect.x_min, rect.x_max),
    };
    let denom = (n + 1) as f64;
    Ok((1..=n)
        .map(|k| lo + (hi - lo) * (k as f64) / denom)
        .collect())
}

/// The 4 + 4n parameter sliding-line code of one region.
#[derive(Debug, Clone, PartialEq)]
pub struct SlprTarget {
    pub rect: AxisRect,
    /// x-coordinates on the horizontal (vertically sliding) lines.
    pub x_v: Vec<f64>,
    /// y-coordinates on the vertical (horizontally sliding) lines.
    pub y_h: Vec<f64>,
    n: usize,
}

impl SlprTarget {
    pub fn new(rect: AxisRect, x_v: Vec<f64>, y_h: Vec<f64>) -> Result<Self> {
        if x_v.len() < 2 || !x_v.len().is_multiple_of(2) {
            return Err(Error::SizeMismatch {
                expected: 2 * (x_v.len() / 2).max(1),
                actual: x_v.len(),
            });
        }
        if y_h.len() != x_v.len() {
            return Err(Error::SizeMismatch {
                expected: x_v.len(),
                actual: y_h.len(),
            });
        }
        if let Some(v) = x_v.iter().chain(&y_h).find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate {v}")));
        }
        let n = x_v.len() / 2;
        Ok(Self { rect, x_v, y_h, n })
    }

    /// Builds a target from the flat `[rect, x_v, y_h]` layout.
    pub fn from_params(params: &[f64]) -> Result<Self> {
        if params.len() < param_count(1) || !(params.len() - 4).is_multiple_of(4) {
            let n = params.len().saturating_sub(4) / 4;
            return Err(Error::SizeMismatch {
                expected: param_count(n.max(1)),
                actual: params.len(),
            });
        }
        let n = (params.len() - 4) / 4;
        let rect = AxisRect::new(params[0], params[1], params[2], params[3])?;
        let x_v = params[4..4 + 2 * n].to_vec();
        let y_h = params[4 + 2 * n..].to_vec();
        Self::new(rect, x_v, y_h)
    }

    pub fn to_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(param_count(self.n));
        out.extend([
            self.rect.x_min,
            self.rect.y_min,
            self.rect.x_max,
            self.rect.y_max,
        ]);
        out.extend(&self.x_v);
        out.extend(&self.y_h);
        out
    }

    /// Sliding lines per direction.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Target whose every intersection sits on the rectangle border.
    pub fn filled(rect: AxisRect, n: usize) -> Result<Self> {
        let x_v = (0..n).flat_map(|_| [rect.x_min, rect.x_max]).collect();
        let y_h = (0..n).flat_map(|_| [rect.y_min, rect.y_max]).collect();
        Self::new(rect, x_v, y_h)
    }
}

/// Intersections of the horizontal line `y = c` with the closed boundary.
/// Edges lying on the line contribute both endpoints.
fn crossings_at(p: &Polygon, c: f64, out: &mut Vec<f64>) {
    out.clear();
    for (a, b) in p.edges() {
        if a.y == c && b.y == c {
            out.push(a.x);
            out.push(b.x);
        } else if a.y != b.y && (a.y - c) * (b.y - c) <= 0.0 {
            let t = (c - a.y) / (b.y - a.y);
            out.push(a.x + t * (b.x - a.x));
        }
    }
}

fn line_extent(p: &Polygon, c: f64, lo: f64, hi: f64, buf: &mut Vec<f64>) -> Result<(f64, f64)> {
    crossings_at(p, c, buf);
    if buf.is_empty() {
        return Err(Error::EncodingFailure { position: c });
    }
    let (mn, mx) = buf
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    Ok((mn.clamp(lo, hi), mx.clamp(lo, hi)))
}

/// Encodes `p` with `n` sliding lines in each direction.
pub fn encode(p: &Polygon, n: usize) -> Result<SlprTarget> {
    let rect = polygon_bbox(p)?;
    let ys = sliding_positions(&rect, n, SlideDirection::Vertical)?;
    let xs = sliding_positions(&rect, n, SlideDirection::Horizontal)?;
    let mut buf = Vec::new();

    let mut x_v = Vec::with_capacity(2 * n);
    for &y in &ys {
        let (a, b) = line_extent(p, y, rect.x_min, rect.x_max, &mut buf)?;
        x_v.extend([a, b]);
    }

    // Vertical lines: reuse the horizontal routine on the transposed polygon.
    let transposed = Polygon::new(p.vertices().iter().map(|v| v.transposed()).collect())?;
    let mut y_h = Vec::with_capacity(2 * n);
    for &x in &xs {
        let (a, b) = line_extent(&transposed, x, rect.y_min, rect.y_max, &mut buf)?;
        y_h.extend([a, b]);
    }
    SlprTarget::new(rect, x_v, y_h)
}

/// Two ordered point chains decoded from one family of sliding lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PointChains {
    pub axis: TextAxis,
    /// Left chain (vertical axis) or top chain (horizontal axis).
    pub first: Vec<Point>,
    /// Right chain (vertical axis) or bottom chain (horizontal axis).
    pub second: Vec<Point>,
}

impl PointChains {
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.first.iter().chain(&self.second).copied()
    }
}

/// Recovers the boundary points of a target.
///
/// Returns `(left/right chains, top/bottom chains)`: the first from the
/// horizontal lines (`x_v`), the second from the vertical lines (`y_h`).
/// Free coordinates are clamped into the rectangle and each pair is put in
/// (min, max) order.
pub fn decode(t: &SlprTarget) -> (PointChains, PointChains) {
    let r = &t.rect;
    let n = t.n();
    // Positions cannot fail: the rect and n were validated on construction.
    let ys = sliding_positions(r, n, SlideDirection::Vertical).expect("valid target");
    let xs = sliding_positions(r, n, SlideDirection::Horizontal).expect("valid target");

    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (k, &y) in ys.iter().enumerate() {
        let a = t.x_v[2 * k].clamp(r.x_min, r.x_max);
        let b = t.x_v[2 * k + 1].clamp(r.x_min, r.x_max);
        left.push(Point::new(a.min(b), y));
        right.push(Point::new(a.max(b), y));
    }

    let mut top = Vec::with_capacity(n);
    let mut bottom = Vec::with_capacity(n);
    for (k, &x) in xs.iter().enumerate() {
        let a = t.y_h[2 * k].clamp(r.y_min, r.y_max);
        let b = t.y_h[2 * k + 1].clamp(r.y_min, r.y_max);
        top.push(Point::new(x, a.min(b)));
        bottom.push(Point::new(x, a.max(b)));
    }

    (
        PointChains {
            axis: TextAxis::Vertical,
            first: left,
            second: right,
        },
        PointChains {
            axis: TextAxis::Horizontal,
            first: top,
            second: bottom,
        },
    )
}
