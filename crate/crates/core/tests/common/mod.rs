//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls the library's geometry beyond constructing polygons.

#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use slpr_core::dataio::AnnotationRecord;
use slpr_core::{Detection, Point, Polygon};

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > p.1) != (yj > p.1) && p.0 < xi + (p.1 - yi) * (xj - xi) / (yj - yi) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub fn coords(p: &Polygon) -> Vec<(f64, f64)> {
    p.vertices().iter().map(|v| (v.x, v.y)).collect()
}

fn bbox(c: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    c.iter().fold(
        (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ),
        |b, &(x, y)| (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y)),
    )
}

/// IoU estimated from `samples` uniform points in the union bounding box.
pub fn monte_carlo_iou<R: Rng>(a: &Polygon, b: &Polygon, samples: usize, rng: &mut R) -> f64 {
    let (ca, cb) = (coords(a), coords(b));
    let (ba, bb) = (bbox(&ca), bbox(&cb));
    let (x0, y0, x1, y1) = (
        ba.0.min(bb.0),
        ba.1.min(bb.1),
        ba.2.max(bb.2),
        ba.3.max(bb.3),
    );
    let (mut inter, mut union) = (0usize, 0usize);
    for _ in 0..samples {
        let p = (rng.random_range(x0..x1), rng.random_range(y0..y1));
        let (ia, ib) = (point_in_polygon(p, &ca), point_in_polygon(p, &cb));
        inter += usize::from(ia && ib);
        union += usize::from(ia || ib);
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Shoelace area, written out independently of the library.
pub fn shoelace(c: &[(f64, f64)]) -> f64 {
    let n = c.len();
    0.5 * (0..n)
        .map(|i| c[i].0 * c[(i + 1) % n].1 - c[(i + 1) % n].0 * c[i].1)
        .sum::<f64>()
        .abs()
}

/// Distance from `p` to the nearest point of the closed boundary of `c`.
pub fn distance_to_boundary(p: (f64, f64), c: &[(f64, f64)]) -> f64 {
    let n = c.len();
    (0..n)
        .map(|i| {
            let (a, b) = (c[i], c[(i + 1) % n]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len2 = dx * dx + dy * dy;
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
            };
            (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Star-shaped polygon: `k` vertices at increasing angles with random radii.
pub fn random_star<R: Rng>(
    rng: &mut R,
    center: (f64, f64),
    k: usize,
    r_lo: f64,
    r_hi: f64,
) -> Polygon {
    let pts: Vec<Point> = (0..k)
        .map(|i| {
            let a = TAU * (i as f64 + rng.random_range(0.1..0.9)) / k as f64;
            let r = rng.random_range(r_lo..r_hi);
            Point::new(center.0 + r * a.cos(), center.1 + r * a.sin())
        })
        .collect();
    Polygon::new(pts).expect("star polygon is valid")
}

fn interior_angles(c: &[(f64, f64); 4]) -> [f64; 4] {
    std::array::from_fn(|i| {
        let p = c[(i + 3) % 4];
        let q = c[i];
        let r = c[(i + 1) % 4];
        let (ux, uy) = (p.0 - q.0, p.1 - q.1);
        let (vx, vy) = (r.0 - q.0, r.1 - q.1);
        ((ux * vx + uy * vy) / (ux.hypot(uy) * vx.hypot(vy)))
            .acos()
            .to_degrees()
    })
}

/// Convex quadrilateral with every interior angle in `[60, 120]` degrees.
pub fn random_convex_quad<R: Rng>(rng: &mut R) -> Polygon {
    loop {
        let cx = rng.random_range(100.0..900.0);
        let cy = rng.random_range(100.0..900.0);
        let base = rng.random_range(0.0..TAU);
        let c: [(f64, f64); 4] = std::array::from_fn(|i| {
            let a = base + TAU * i as f64 / 4.0 + rng.random_range(-0.35..0.35);
            let r = rng.random_range(40.0..120.0);
            (cx + r * a.cos(), cy + r * a.sin())
        });
        let angles = interior_angles(&c);
        let sum: f64 = angles.iter().sum();
        // A sum of 360 rules out reflex corners, which acos cannot report.
        if (sum - 360.0).abs() < 1e-6 && angles.iter().all(|a| (60.0..=120.0).contains(a)) {
            return Polygon::from_coords(&c).expect("quad is valid");
        }
    }
}

/// Definitional greedy suppression: repeatedly take the best remaining
/// detection and discard everything overlapping it by more than `thr`.
pub fn reference_greedy<F>(dets: &[Detection], thr: f64, overlap: F) -> Vec<u64>
where
    F: Fn(&Detection, &Detection) -> f64,
{
    let mut remaining: Vec<&Detection> = dets.iter().collect();
    let mut kept = Vec::new();
    while !remaining.is_empty() {
        let mut best = 0;
        for (i, d) in remaining.iter().enumerate() {
            let b = remaining[best];
            if d.score > b.score || (d.score == b.score && d.id < b.id) {
                best = i;
            }
        }
        let top = remaining.remove(best);
        kept.push(top.id);
        remaining.retain(|d| overlap(top, d) <= thr);
    }
    kept
}

/// Rectangle IoU from corner coordinates, written out directly.
pub fn reference_rect_iou(a: &Detection, b: &Detection) -> f64 {
    let (a, b) = (&a.rect, &b.rect);
    let w = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let h = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = w * h;
    let union = (a.x_max - a.x_min) * (a.y_max - a.y_min)
        + (b.x_max - b.x_min) * (b.y_max - b.y_min)
        - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Central-difference derivative.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Integer convex quadrilateral with a random label.
pub fn icdar_record<R: Rng>(rng: &mut R) -> AnnotationRecord {
    loop {
        let (x, y) = (
            rng.random_range(0..1000) as f64,
            rng.random_range(0..1000) as f64,
        );
        let d = |rng: &mut R| rng.random_range(0..8) as f64;
        let w = rng.random_range(10..200) as f64;
        let h = rng.random_range(10..80) as f64;
        let pts = vec![
            Point::new(x + d(rng), y + d(rng)),
            Point::new(x + w - d(rng), y + d(rng)),
            Point::new(x + w - d(rng), y + h - d(rng)),
            Point::new(x + d(rng), y + h - d(rng)),
        ];
        let Ok(polygon) = Polygon::new(pts) else {
            continue;
        };
        let (dont_care, transcription) = match rng.random_range(0..4) {
            0 => (true, Some("###".to_string())),
            1 => (false, None),
            2 => (false, Some("a,b".to_string())),
            _ => (false, Some(format!("word{}", rng.random_range(0..100)))),
        };
        return AnnotationRecord {
            polygon,
            dont_care,
            transcription,
        };
    }
}

/// Integer 14-vertex curved band: a top chain left to right and a bottom
/// chain right to left.
pub fn ctw_record<R: Rng>(rng: &mut R) -> AnnotationRecord {
    let (x0, y0) = (
        rng.random_range(0..800) as f64,
        rng.random_range(0..800) as f64,
    );
    let mut xs = Vec::with_capacity(7);
    let mut x = x0;
    for _ in 0..7 {
        xs.push(x);
        x += rng.random_range(3..30) as f64;
    }
    let mut pts: Vec<Point> = xs
        .iter()
        .map(|&x| Point::new(x, y0 + rng.random_range(0..10) as f64))
        .collect();
    pts.extend(
        xs.iter()
            .rev()
            .map(|&x| Point::new(x, y0 + rng.random_range(20..40) as f64)),
    );
    AnnotationRecord {
        polygon: Polygon::new(pts).unwrap(),
        dont_care: false,
        transcription: None,
    }
}
