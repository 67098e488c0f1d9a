//! Polygon restoration from a (possibly noisy) sliding-line target.
//!
//! - PLS uses only the two chains along the long side of the rectangle and
//!   extends the end segments of each chain to the rectangle's short sides.
//! - BHVP fits a quadrilateral through all decoded points.

use crate::codec::{decode, SlprTarget, TextAxis};
use crate::error::{Error, Result};
use crate::geom::{cross, AxisRect, Point, Polygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestoreMethod {
    #[default]
    Pls,
    Bhvp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestoreConfig {
    pub method: RestoreMethod,
    /// Aspect threshold `k` shared with the CTW loss; must lie in `(0, 1]`.
    pub aspect_threshold: f64,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        Self {
            method: RestoreMethod::Pls,
            aspect_threshold: 0.8,
        }
    }
}

impl RestoreConfig {
    pub fn new(method: RestoreMethod, aspect_threshold: f64) -> Result<Self> {
        if !(aspect_threshold > 0.0 && aspect_threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "aspect threshold {aspect_threshold} outside (0, 1]"
            )));
        }
        Ok(Self {
            method,
            aspect_threshold,
        })
    }
}

pub fn restore(t: &SlprTarget, cfg: &RestoreConfig) -> Result<Polygon> {
    match cfg.method {
        RestoreMethod::Pls => restore_pls(t, cfg),
        RestoreMethod::Bhvp => restore_bhvp(t),
    }
}

/// Orientation used by PLS: horizontal unless the rectangle is taller than wide.
pub fn text_axis(rect: &AxisRect) -> TextAxis {
    if rect.height() <= rect.width() {
        TextAxis::Horizontal
    } else {
        TextAxis::Vertical
    }
}

/// Value at `u` of the line through `p` and `q` (as `v` over `u`).
fn extrapolate(p: Point, q: Point, u: f64) -> f64 {
    if q.x == p.x {
        return p.y;
    }
    p.y + (q.y - p.y) * (u - p.x) / (q.x - p.x)
}

/// End points of a chain extended to `u_lo` and `u_hi`, in `(u, v)` space
/// where `u` is the sliding coordinate.
fn chain_ends(chain: &[Point], u_lo: f64, u_hi: f64) -> (f64, f64) {
    let n = chain.len();
    if n == 1 {
        return (chain[0].y, chain[0].y);
    }
    (
        extrapolate(chain[0], chain[1], u_lo),
        extrapolate(chain[n - 2], chain[n - 1], u_hi),
    )
}

/// PLS restoration.
///
/// Output: near extension of the first chain, the first chain, far
/// extension, far extension of the second chain, the second chain reversed,
/// near extension. That is `2n + 4` vertices, minus any consecutive
/// duplicates (pointed ends such as a diamond's corners collapse to one).
pub fn restore_pls(t: &SlprTarget, _cfg: &RestoreConfig) -> Result<Polygon> {
    let rect = t.rect;
    let axis = text_axis(&rect);
    let (lr, tb) = decode(t);

    // Work in (u, v) coordinates: u along the text, v across it.
    let (first, second, u_lo, u_hi, v_lo, v_hi) = match axis {
        TextAxis::Horizontal => (
            tb.first, tb.second, rect.x_min, rect.x_max, rect.y_min, rect.y_max,
        ),
        TextAxis::Vertical => (
            lr.first.iter().map(|p| p.transposed()).collect(),
            lr.second.iter().map(|p| p.transposed()).collect(),
            rect.y_min,
            rect.y_max,
            rect.x_min,
            rect.x_max,
        ),
    };

    let (mut a_lo, mut a_hi) = chain_ends(&first, u_lo, u_hi);
    let (mut b_lo, mut b_hi) = chain_ends(&second, u_lo, u_hi);
    a_lo = a_lo.clamp(v_lo, v_hi);
    a_hi = a_hi.clamp(v_lo, v_hi);
    b_lo = b_lo.clamp(v_lo, v_hi);
    b_hi = b_hi.clamp(v_lo, v_hi);
    // Extrapolated ends may cross even though every chain pair is ordered.
    if a_lo > b_lo {
        let m = 0.5 * (a_lo + b_lo);
        a_lo = m;
        b_lo = m;
    }
    if a_hi > b_hi {
        let m = 0.5 * (a_hi + b_hi);
        a_hi = m;
        b_hi = m;
    }

    let n = first.len();
    let mut uv = Vec::with_capacity(2 * n + 4);
    uv.push(Point::new(u_lo, a_lo));
    uv.extend(first.iter().copied());
    uv.push(Point::new(u_hi, a_hi));
    uv.push(Point::new(u_hi, b_hi));
    uv.extend(second.iter().rev().copied());
    uv.push(Point::new(u_lo, b_lo));

    let mut vertices: Vec<Point> = match axis {
        TextAxis::Horizontal => uv,
        TextAxis::Vertical => uv.into_iter().map(|p| p.transposed()).collect(),
    };
    vertices.dedup();
    while vertices.len() > 1 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    Polygon::new(vertices).map_err(|_| Error::DegenerateRestoration)
}

/// A fitted line `normal · p = offset` with unit normal.
#[derive(Debug, Clone, Copy)]
struct Line {
    normal: Point,
    offset: f64,
}

/// Running sums for O(1) scatter of any contiguous run of points.
struct PrefixSums {
    s: Vec<[f64; 5]>,
}

impl PrefixSums {
    fn new(points: &[Point], origin: Point) -> Self {
        let mut s = Vec::with_capacity(points.len() + 1);
        let mut acc = [0.0; 5];
        s.push(acc);
        for p in points {
            let (x, y) = (p.x - origin.x, p.y - origin.y);
            acc[0] += x;
            acc[1] += y;
            acc[2] += x * x;
            acc[3] += x * y;
            acc[4] += y * y;
            s.push(acc);
        }
        Self { s }
    }

    /// Smallest scatter eigenvalue (sum of squared orthogonal residuals)
    /// of points `[i, j)`.
    fn residual(&self, i: usize, j: usize) -> f64 {
        let k = (j - i) as f64;
        let d: [f64; 5] = std::array::from_fn(|c| self.s[j][c] - self.s[i][c]);
        let sxx = d[2] - d[0] * d[0] / k;
        let sxy = d[3] - d[0] * d[1] / k;
        let syy = d[4] - d[1] * d[1] / k;
        scatter_min_eigen(sxx, sxy, syy).max(0.0)
    }

    /// TLS line through points `[i, j)`, in the local frame.
    fn line(&self, i: usize, j: usize) -> Option<Line> {
        let k = (j - i) as f64;
        let d: [f64; 5] = std::array::from_fn(|c| self.s[j][c] - self.s[i][c]);
        let (mx, my) = (d[0] / k, d[1] / k);
        let sxx = d[2] - d[0] * mx;
        let sxy = d[3] - d[0] * my;
        let syy = d[4] - d[1] * my;
        if sxx + syy <= 0.0 {
            return None;
        }
        let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let normal = Point::new(-theta.sin(), theta.cos());
        Some(Line {
            normal,
            offset: normal.x * mx + normal.y * my,
        })
    }

    /// Convex quadrilateral from the runs between consecutive `cuts`, in
    /// the local frame.
    fn quad(&self, cuts: [usize; 5]) -> Option<[Point; 4]> {
        let mut lines = [Line {
            normal: Point::default(),
            offset: 0.0,
        }; 4];
        for s in 0..4 {
            lines[s] = self.line(cuts[s], cuts[s + 1])?;
        }
        let mut corners = [Point::default(); 4];
        for s in 0..4 {
            corners[s] = intersect(&lines[s], &lines[(s + 1) % 4]).ok()?;
        }
        let turns: [f64; 4] =
            std::array::from_fn(|i| cross(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]));
        let convex = turns.iter().all(|&t| t > 0.0) || turns.iter().all(|&t| t < 0.0);
        (convex && corners.iter().all(|c| c.is_finite())).then_some(corners)
    }
}

fn scatter_min_eigen(sxx: f64, sxy: f64, syy: f64) -> f64 {
    let mean = 0.5 * (sxx + syy);
    let dev = (0.5 * (sxx - syy)).hypot(sxy);
    mean - dev
}

fn intersect(a: &Line, b: &Line) -> Result<Point> {
    let det = a.normal.x * b.normal.y - a.normal.y * b.normal.x;
    if det.abs() < 1e-12 {
        return Err(Error::FitFailure("adjacent sides are parallel".into()));
    }
    Ok(Point::new(
        (a.offset * b.normal.y - b.offset * a.normal.y) / det,
        (a.normal.x * b.offset - b.normal.x * a.offset) / det,
    ))
}

/// Fits a quadrilateral through points sampled on its boundary, given the
/// axis-aligned rectangle the quadrilateral should span.
///
/// Points are put in boundary order by angle about their centroid and the
/// cyclic sequence is split into four contiguous runs of at least two
/// points each. A TLS line is fitted per run and adjacent lines are
/// intersected for the corners. Among the splits giving a convex
/// quadrilateral, the winner minimises the total squared orthogonal
/// residual plus the squared distance between the quadrilateral's bounding
/// box sides and `bounds`.
///
/// Corners are returned clockwise in image coordinates (positive shoelace
/// sum with y pointing down), starting from the one nearest
/// `(bounds.x_min, bounds.y_min)`.
pub fn fit_quadrilateral(points: &[Point], bounds: &AxisRect) -> Result<[Point; 4]> {
    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !pts.iter().any(|q| q.distance(*p) <= 1e-9) {
            pts.push(*p);
        }
    }
    let m = pts.len();
    if m < 8 {
        return Err(Error::FitFailure(format!(
            "{m} distinct points, need at least 8"
        )));
    }
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / m as f64;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / m as f64;
    let centroid = Point::new(cx, cy);
    pts.sort_by(|a, b| {
        let ta = (a.y - cy).atan2(a.x - cx);
        let tb = (b.y - cy).atan2(b.x - cx);
        ta.total_cmp(&tb)
    });

    let doubled: Vec<Point> = pts.iter().chain(&pts).copied().collect();
    let sums = PrefixSums::new(&doubled, centroid);
    let local = [
        bounds.x_min - cx,
        bounds.y_min - cy,
        bounds.x_max - cx,
        bounds.y_max - cy,
    ];

    // Cuts c0 < c1 < c2 < c3 < c0 + m, every run at least two points.
    let mut best: Option<(f64, [Point; 4])> = None;
    for c0 in 0..m {
        for c1 in c0 + 2..c0 + m {
            let r0 = sums.residual(c0, c1);
            if best.is_some_and(|(b, _)| r0 >= b) {
                continue;
            }
            for c2 in c1 + 2..c0 + m {
                let r1 = r0 + sums.residual(c1, c2);
                if best.is_some_and(|(b, _)| r1 >= b) {
                    continue;
                }
                for c3 in c2 + 2..=c0 + m - 2 {
                    let r = r1 + sums.residual(c2, c3) + sums.residual(c3, c0 + m);
                    if best.is_some_and(|(b, _)| r >= b) {
                        continue;
                    }
                    let Some(corners) = sums.quad([c0, c1, c2, c3, c0 + m]) else {
                        continue;
                    };
                    let score = r + bbox_misfit(&corners, &local);
                    if best.is_none_or(|(b, _)| score < b) {
                        best = Some((score, corners));
                    }
                }
            }
        }
    }
    let (_, mut corners) =
        best.ok_or_else(|| Error::FitFailure("no split yields a convex quadrilateral".into()))?;
    for c in corners.iter_mut() {
        *c = Point::new(c.x + cx, c.y + cy);
    }

    let shoelace: f64 = (0..4)
        .map(|i| cross(Point::default(), corners[i], corners[(i + 1) % 4]))
        .sum();
    if shoelace < 0.0 {
        corners.reverse();
    }
    let anchor = Point::new(bounds.x_min, bounds.y_min);
    let start = (0..4)
        .min_by(|&a, &b| {
            corners[a]
                .distance(anchor)
                .total_cmp(&corners[b].distance(anchor))
        })
        .unwrap_or(0);
    corners.rotate_left(start);
    Ok(corners)
}

/// Sum of squared differences between the bounding box of `q` and `rect`
/// (both as `[x_min, y_min, x_max, y_max]`).
fn bbox_misfit(q: &[Point; 4], rect: &[f64; 4]) -> f64 {
    let fold =
        |f: fn(f64, f64) -> f64, init: f64, get: fn(&Point) -> f64| q.iter().map(get).fold(init, f);
    let bb = [
        fold(f64::min, f64::INFINITY, |p| p.x),
        fold(f64::min, f64::INFINITY, |p| p.y),
        fold(f64::max, f64::NEG_INFINITY, |p| p.x),
        fold(f64::max, f64::NEG_INFINITY, |p| p.y),
    ];
    bb.iter().zip(rect).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// BHVP restoration: a quadrilateral through all decoded points.
///
/// Falls back to the target's rectangle when the fit fails or yields an
/// invalid quadrilateral, so a single bad region never aborts a batch.
pub fn restore_bhvp(t: &SlprTarget) -> Result<Polygon> {
    let (lr, tb) = decode(t);
    let points: Vec<Point> = lr.points().chain(tb.points()).collect();
    let fitted = fit_quadrilateral(&points, &t.rect)
        .and_then(|c| Polygon::new(c.to_vec()))
        .and_then(|p| p.validate().map(|_| p));
    Ok(fitted.unwrap_or_else(|_| t.rect.to_polygon()))
}
