//! Polygon and rectangle primitives.
//!
//! Coordinates are pixels in image convention (x to the right, y down).
//! Polygons are stored in whatever orientation they were given; all area
//! and overlap routines are orientation independent.
//!
//! Polygon overlap is computed by ear-clipping both operands into triangles
//! and summing pairwise convex clips. Convex pairs skip the triangulation.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Areas at or below this many square pixels count as degenerate.
pub const AREA_EPS: f64 = 1e-9;

/// Widths / heights at or below this many pixels count as degenerate.
pub const LENGTH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn distance(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    /// Swaps the two coordinates.
    #[inline]
    pub fn transposed(self) -> Point {
        Point::new(self.y, self.x)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// z-component of `(b - a) x (c - a)`.
#[inline]
pub(crate) fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Axis-aligned rectangle with `x_min < x_max` and `y_min < y_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl AxisRect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidRect {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Whether `p` lies inside the rectangle grown by `tol` on every side.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.x_min - tol
            && p.x <= self.x_max + tol
            && p.y >= self.y_min - tol
            && p.y <= self.y_max + tol
    }

    /// Corners in order (x_min, y_min), (x_max, y_min), (x_max, y_max), (x_min, y_max).
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        ]
    }

    pub fn to_polygon(&self) -> Polygon {
        Polygon {
            vertices: self.corners().to_vec(),
        }
    }

    pub fn overlaps(&self, other: &AxisRect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }
}

/// A closed vertex chain with at least three vertices, finite coordinates,
/// no repeated consecutive vertex and area above [`AREA_EPS`].
///
/// Simplicity is not checked on construction; see [`Polygon::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!(
                "non-finite vertex ({}, {})",
                p.x, p.y
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::DegeneratePolygon(format!(
                    "repeated consecutive vertex at index {i}"
                )));
            }
        }
        let area = signed_area(&vertices).abs();
        if area <= AREA_EPS {
            return Err(Error::DegeneratePolygon(format!("area {area:e}")));
        }
        Ok(Self { vertices })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    #[inline]
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates the closed boundary as `(start, end)` edge pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace sum / 2. Positive when the vertex order turns from +x toward +y.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Tight bounds of the vertices, without the degeneracy check of [`polygon_bbox`].
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        )
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }

    /// Scales about the origin. `s` must be positive.
    pub fn scaled(&self, s: f64) -> Polygon {
        assert!(s > 0.0 && s.is_finite(), "scale must be positive");
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point::new(p.x * s, p.y * s))
                .collect(),
        }
    }

    pub fn is_convex(&self) -> bool {
        is_convex(&self.vertices)
    }

    /// Checks that no two non-adjacent edges touch or cross. O(n²).
    pub fn validate(&self) -> Result<()> {
        let v = &self.vertices;
        let n = v.len();
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                // Adjacent edges share a vertex by construction.
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = (v[j], v[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        // Adjacent edges folding back onto each other.
        for i in 0..n {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            if cross(a, b, c) == 0.0 {
                let d1 = b - a;
                let d2 = c - b;
                if d1.x * d2.x + d1.y * d2.y < 0.0 {
                    return Err(Error::InvalidPolygon(format!(
                        "edge folds back at vertex {i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    // Shift to the first vertex to limit cancellation on large coordinates.
    let o = v[0];
    let mut acc = 0.0;
    for i in 1..n - 1 {
        acc += cross(o, v[i], v[i + 1]);
    }
    0.5 * acc
}

fn is_convex(v: &[Point]) -> bool {
    let n = v.len();
    let mut sign = 0.0f64;
    for i in 0..n {
        let c = cross(v[i], v[(i + 1) % n], v[(i + 2) % n]);
        if c == 0.0 {
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    sign != 0.0
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

pub fn polygon_area(p: &Polygon) -> f64 {
    p.area()
}

/// Smallest axis-aligned rectangle containing every vertex of `p`.
pub fn polygon_bbox(p: &Polygon) -> Result<AxisRect> {
    let (x0, y0, x1, y1) = p.bounds();
    if x1 - x0 < LENGTH_EPS || y1 - y0 < LENGTH_EPS {
        return Err(Error::DegeneratePolygon(format!(
            "bounding box {}x{}",
            x1 - x0,
            y1 - y0
        )));
    }
    AxisRect::new(x0, y0, x1, y1)
}

/// Area of `a ∩ b`. Disjoint operands give 0. Symmetric bit-for-bit.
pub fn polygon_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    // Canonical operand order makes the result independent of argument order.
    let (a, b) = if compare_vertices(a.vertices(), b.vertices()) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };

    let (ax0, ay0, ax1, ay1) = a.bounds();
    let (bx0, by0, bx1, by1) = b.bounds();
    if ax1 <= bx0 || bx1 <= ax0 || ay1 <= by0 || by1 <= ay0 {
        return 0.0;
    }

    let pieces_a = convex_pieces(a.vertices());
    let pieces_b = convex_pieces(b.vertices());
    let mut total = 0.0;
    for pa in &pieces_a {
        for pb in &pieces_b {
            if !pa.bounds_overlap(pb) {
                continue;
            }
            total += convex_intersection_area(&pa.vertices, &pb.vertices);
        }
    }
    total.max(0.0)
}

/// `|a ∩ b| / |a ∪ b|`, clamped into `[0, 1]`.
pub fn polygon_iou(a: &Polygon, b: &Polygon) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

pub fn rect_iou(a: &AxisRect, b: &AxisRect) -> f64 {
    let w = a.x_max.min(b.x_max) - a.x_min.max(b.x_min);
    let h = a.y_max.min(b.y_max) - a.y_min.max(b.y_min);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

fn compare_vertices(a: &[Point], b: &[Point]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        let o = p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Counter-clockwise (positive signed area) convex piece with cached bounds.
struct ConvexPiece {
    vertices: Vec<Point>,
    bounds: (f64, f64, f64, f64),
}

impl ConvexPiece {
    fn new(vertices: Vec<Point>) -> Self {
        let bounds = vertices.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        );
        Self { vertices, bounds }
    }

    fn bounds_overlap(&self, o: &ConvexPiece) -> bool {
        let (ax0, ay0, ax1, ay1) = self.bounds;
        let (bx0, by0, bx1, by1) = o.bounds;
        ax0 < bx1 && bx0 < ax1 && ay0 < by1 && by0 < ay1
    }
}

fn counter_clockwise(v: &[Point]) -> Vec<Point> {
    let mut out = v.to_vec();
    if signed_area(&out) < 0.0 {
        out.reverse();
    }
    out
}

fn convex_pieces(v: &[Point]) -> Vec<ConvexPiece> {
    let ccw = counter_clockwise(v);
    if is_convex(&ccw) {
        return vec![ConvexPiece::new(ccw)];
    }
    triangulate(&ccw)
        .into_iter()
        .map(|t| ConvexPiece::new(t.to_vec()))
        .collect()
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
///
/// Collinear vertices are dropped without emitting a triangle. If no ear is
/// found in a full sweep (numerical trouble on nearly degenerate input) the
/// most convex vertex is clipped so the loop always terminates.
pub(crate) fn triangulate(v: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut tris = Vec::with_capacity(v.len().saturating_sub(2));

    // Scale-aware collinearity tolerance.
    let extent = v
        .iter()
        .fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
        .max(1.0);
    let flat = 1e-14 * extent * extent;

    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (v[ia], v[ib], v[ic]);
            let turn = cross(a, b, c);
            if turn.abs() <= flat {
                idx.remove(i);
                clipped = true;
                break;
            }
            if turn < 0.0 {
                continue;
            }
            if best.is_none_or(|(_, t)| turn > t) {
                best = Some((i, turn));
            }
            let blocked = idx.iter().any(|&k| {
                if k == ia || k == ib || k == ic {
                    return false;
                }
                let p = v[k];
                p != a && p != b && p != c && point_in_triangle(p, a, b, c)
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            match best {
                Some((i, _)) => {
                    let m = idx.len();
                    tris.push([v[idx[(i + m - 1) % m]], v[idx[i]], v[idx[(i + 1) % m]]]);
                    idx.remove(i);
                }
                None => break,
            }
        }
    }
    if idx.len() == 3 {
        let (a, b, c) = (v[idx[0]], v[idx[1]], v[idx[2]]);
        if cross(a, b, c) > 0.0 {
            tris.push([a, b, c]);
        }
    }
    tris
}

/// Sutherland–Hodgman clip of one convex CCW polygon by another, returning
/// the area of the overlap.
fn convex_intersection_area(subject: &[Point], clip: &[Point]) -> f64 {
    let mut output: Vec<Point> = subject.to_vec();
    let mut input: Vec<Point> = Vec::with_capacity(subject.len() + clip.len());
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            return 0.0;
        }
        let (ca, cb) = (clip[i], clip[(i + 1) % n]);
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cur_in = cross(ca, cb, cur) >= 0.0;
            let prev_in = cross(ca, cb, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, ca, cb));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, ca, cb));
            }
        }
    }
    if output.len() < 3 {
        return 0.0;
    }
    signed_area(&output).max(0.0)
}

/// Intersection of segment `p-q` with the infinite line through `a-b`.
fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let denom = dp - dq;
    if denom == 0.0 {
        return p;
    }
    let t = dp / denom;
    Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}
