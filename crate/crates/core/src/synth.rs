//! Seeded synthetic text-region shapes with analytic sliding-line oracles.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`; the stream is specified and portable, so a given
//! seed yields the same shapes on every platform.
//!
//! Shapes:
//!
//! - `rect`: axis-aligned `length x height` rectangle centred at `(cx, cy)`.
//! - `rotated_quad`: the same rectangle with its top edge shifted by
//!   `skew * height` (a parallelogram), each corner jittered by up to
//!   `jitter * min(length, height)` per axis, then rotated by `angle`
//!   degrees about the centre.
//! - `sine_band`: the region `|y - c(x)| <= height / 2` for
//!   `c(x) = cy + A sin(2 pi (x - x0) / T + phase)` over a span of `length`,
//!   sampled with `samples` points per side (transposed when `vertical`).
//!
//! For a sine band the polygon deviates from the smooth boundary by at most
//! `A (2 pi / T)^2 dx^2 / 8` vertically, with `dx = length / (samples - 1)`.
//! A horizontal line's crossing of a sampled edge stays within the same
//! sample interval as the smooth crossing, so along the line the error is
//! bounded by `dx`. See [`sampling_tolerance`].

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::SlideDirection;
use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};

pub const DEFAULT_SAMPLES: usize = 128;
pub const MIN_SAMPLES: usize = 50;
const MAX_JITTER: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Rect,
    RotatedQuad,
    SineBand,
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Rect => "rect",
            ShapeKind::RotatedQuad => "rotated_quad",
            ShapeKind::SineBand => "sine_band",
        }
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" => Ok(ShapeKind::Rect),
            "rotated_quad" => Ok(ShapeKind::RotatedQuad),
            "sine_band" => Ok(ShapeKind::SineBand),
            other => Err(Error::InvalidSpec(format!("unknown shape kind {other:?}"))),
        }
    }
}

/// Complete, deterministic description of one synthetic shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub seed: u64,
    pub cx: f64,
    pub cy: f64,
    pub length: f64,
    pub height: f64,
    /// Rotation in degrees (rotated_quad).
    pub angle: f64,
    /// Top-edge shift as a fraction of height (rotated_quad).
    pub skew: f64,
    /// Corner jitter as a fraction of the shorter side (rotated_quad).
    pub jitter: f64,
    pub amplitude: f64,
    pub period: f64,
    pub phase: f64,
    pub samples: usize,
    pub vertical: bool,
}

impl ShapeSpec {
    /// Shape with every parameter at its neutral default.
    pub fn new(kind: ShapeKind, cx: f64, cy: f64, length: f64, height: f64) -> Self {
        Self {
            kind,
            seed: 0,
            cx,
            cy,
            length,
            height,
            angle: 0.0,
            skew: 0.0,
            jitter: 0.0,
            amplitude: 0.0,
            period: length,
            phase: 0.0,
            samples: DEFAULT_SAMPLES,
            vertical: false,
        }
    }

    /// Draws a pixel-scale shape of `kind` from `seed`.
    ///
    /// Ranges: centre in `[200, 800]^2`; rect and quad length in
    /// `[60, 300]` with aspect in `[1, 6]`; quad angle in `[0, 360)`, skew in
    /// `[-0.5, 0.5]`, jitter in `[0, 0.08]`; band length in `[150, 400]`,
    /// height in `[20, 60]`, amplitude in `[0, 0.3] * height`, period in
    /// `[1, 2] * length`, phase in `[0, 2 pi)`, vertical with probability 1/4.
    pub fn random(kind: ShapeKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cx = rng.random_range(200.0..800.0);
        let cy = rng.random_range(200.0..800.0);
        let mut s = match kind {
            ShapeKind::Rect | ShapeKind::RotatedQuad => {
                let length = rng.random_range(60.0..300.0);
                let aspect = rng.random_range(1.0..6.0);
                Self::new(kind, cx, cy, length, length / aspect)
            }
            ShapeKind::SineBand => {
                let length = rng.random_range(150.0..400.0);
                let height = rng.random_range(20.0..60.0);
                let mut s = Self::new(kind, cx, cy, length, height);
                s.amplitude = rng.random_range(0.0..0.3) * height;
                s.period = rng.random_range(1.0..2.0) * length;
                s.phase = rng.random_range(0.0..TAU);
                s.vertical = rng.random_bool(0.25);
                s
            }
        };
        if kind == ShapeKind::RotatedQuad {
            s.angle = rng.random_range(0.0..360.0);
            s.skew = rng.random_range(-0.5..0.5);
            s.jitter = rng.random_range(0.0..0.08);
        }
        s.seed = seed;
        s
    }

    fn validate(&self) -> Result<()> {
        let reals = [
            self.cx,
            self.cy,
            self.length,
            self.height,
            self.angle,
            self.skew,
            self.jitter,
            self.amplitude,
            self.period,
            self.phase,
        ];
        if reals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if self.length <= 0.0 || self.height <= 0.0 {
            return Err(Error::InvalidSpec(
                "length and height must be positive".into(),
            ));
        }
        if !(0.0..=MAX_JITTER).contains(&self.jitter) {
            return Err(Error::InvalidSpec(format!(
                "jitter must lie in [0, {MAX_JITTER}]"
            )));
        }
        if self.kind == ShapeKind::SineBand {
            if self.amplitude < 0.0 || self.period <= 0.0 {
                return Err(Error::InvalidSpec(
                    "amplitude must be >= 0 and period > 0".into(),
                ));
            }
            if self.samples < MIN_SAMPLES {
                return Err(Error::InvalidSpec(format!(
                    "sine band needs at least {MIN_SAMPLES} samples"
                )));
            }
        }
        Ok(())
    }

    /// Parses a `key=value` record. Keys absent from `line` take the value
    /// drawn by [`ShapeSpec::random`] for the record's kind and `seed`.
    pub fn parse_with_seed(line: &str, seed: u64) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|tok| {
                tok.split_once('=')
                    .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got {tok:?}")))
            })
            .collect::<Result<_>>()?;
        let kind: ShapeKind = pairs
            .iter()
            .find(|(k, _)| *k == "kind")
            .ok_or_else(|| Error::InvalidSpec("missing kind".into()))?
            .1
            .parse()?;
        let real = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("bad number {v:?}")))
        };
        let seed = match pairs.iter().find(|(k, _)| *k == "seed") {
            Some((_, v)) => v
                .parse::<u64>()
                .map_err(|_| Error::InvalidSpec(format!("bad seed {v:?}")))?,
            None => seed,
        };
        let mut s = Self::random(kind, seed);
        for (k, v) in pairs {
            match k {
                "kind" | "seed" => {}
                "cx" => s.cx = real(v)?,
                "cy" => s.cy = real(v)?,
                "length" => s.length = real(v)?,
                "height" => s.height = real(v)?,
                "angle" => s.angle = real(v)?,
                "skew" => s.skew = real(v)?,
                "jitter" => s.jitter = real(v)?,
                "amplitude" => s.amplitude = real(v)?,
                "period" => s.period = real(v)?,
                "phase" => s.phase = real(v)?,
                "samples" => {
                    s.samples = v
                        .parse()
                        .map_err(|_| Error::InvalidSpec(format!("bad samples {v:?}")))?
                }
                "vertical" => {
                    s.vertical = match v {
                        "1" | "true" => true,
                        "0" | "false" => false,
                        _ => return Err(Error::InvalidSpec(format!("bad vertical flag {v:?}"))),
                    }
                }
                other => return Err(Error::InvalidSpec(format!("unknown key {other:?}"))),
            }
        }
        s.validate()?;
        Ok(s)
    }
}

impl FromStr for ShapeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_seed(s, 0)
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} seed={} cx={} cy={} length={} height={} angle={} skew={} jitter={} amplitude={} period={} phase={} samples={} vertical={}",
            self.kind.name(),
            self.seed,
            self.cx,
            self.cy,
            self.length,
            self.height,
            self.angle,
            self.skew,
            self.jitter,
            self.amplitude,
            self.period,
            self.phase,
            self.samples,
            u8::from(self.vertical)
        )
    }
}

/// Corners of a rect or rotated quad in order top-left, top-right,
/// bottom-right, bottom-left (before rotation).
fn quad_corners(spec: &ShapeSpec) -> [Point; 4] {
    let (hl, hh) = (0.5 * spec.length, 0.5 * spec.height);
    let shift = 0.5 * spec.skew * spec.height;
    let mut local = [
        (-hl + shift, -hh),
        (hl + shift, -hh),
        (hl - shift, hh),
        (-hl - shift, hh),
    ];
    if spec.kind == ShapeKind::RotatedQuad && spec.jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let amp = spec.jitter * spec.length.min(spec.height);
        for c in local.iter_mut() {
            c.0 += rng.random_range(-amp..=amp);
            c.1 += rng.random_range(-amp..=amp);
        }
    }
    let (s, c) = if spec.kind == ShapeKind::RotatedQuad {
        spec.angle.to_radians().sin_cos()
    } else {
        (0.0, 1.0)
    };
    local.map(|(x, y)| Point::new(spec.cx + x * c - y * s, spec.cy + x * s + y * c))
}

fn band_origin(spec: &ShapeSpec) -> f64 {
    let along = if spec.vertical { spec.cy } else { spec.cx };
    along - 0.5 * spec.length
}

/// Band centre line at `u` (along-text coordinate).
fn band_centre(spec: &ShapeSpec, u: f64) -> f64 {
    let across = if spec.vertical { spec.cx } else { spec.cy };
    across + spec.amplitude * (TAU * (u - band_origin(spec)) / spec.period + spec.phase).sin()
}

pub fn generate(spec: &ShapeSpec) -> Result<Polygon> {
    spec.validate()?;
    match spec.kind {
        ShapeKind::Rect | ShapeKind::RotatedQuad => {
            let p = Polygon::new(quad_corners(spec).to_vec())
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            p.validate()
                .map_err(|e| Error::InvalidSpec(e.to_string()))?;
            Ok(p)
        }
        ShapeKind::SineBand => {
            let m = spec.samples;
            let u0 = band_origin(spec);
            let du = spec.length / (m - 1) as f64;
            let half = 0.5 * spec.height;
            let us: Vec<f64> = (0..m)
                .map(|i| {
                    if i == m - 1 {
                        u0 + spec.length
                    } else {
                        u0 + du * i as f64
                    }
                })
                .collect();
            let mut uv: Vec<Point> = us
                .iter()
                .map(|&u| Point::new(u, band_centre(spec, u) - half))
                .collect();
            uv.extend(
                us.iter()
                    .rev()
                    .map(|&u| Point::new(u, band_centre(spec, u) + half)),
            );
            let vertices = if spec.vertical {
                uv.into_iter().map(|p| p.transposed()).collect()
            } else {
                uv
            };
            Polygon::new(vertices).map_err(|e| Error::InvalidSpec(e.to_string()))
        }
    }
}

/// A sliding line: a horizontal line at `y = position` for
/// [`SlideDirection::Vertical`], a vertical line at `x = position` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingLine {
    pub direction: SlideDirection,
    pub position: f64,
}

/// Extreme boundary coordinates along `line`, computed from the shape's
/// definition rather than its polygon.
pub fn oracle_intersections(spec: &ShapeSpec, line: SlidingLine) -> Result<(f64, f64)> {
    spec.validate()?;
    match spec.kind {
        ShapeKind::Rect | ShapeKind::RotatedQuad => convex_chord(&quad_corners(spec), line),
        ShapeKind::SineBand => band_chord(spec, line),
    }
}

/// Chord of a convex polygon via its half-plane description.
fn convex_chord(corners: &[Point; 4], line: SlidingLine) -> Result<(f64, f64)> {
    // Work in (u, v) with the line at v = position and u free.
    let pts: Vec<Point> = match line.direction {
        SlideDirection::Vertical => corners.to_vec(),
        SlideDirection::Horizontal => corners.iter().map(|p| p.transposed()).collect(),
    };
    let area2: f64 = (0..4)
        .map(|i| pts[i].x * pts[(i + 1) % 4].y - pts[(i + 1) % 4].x * pts[i].y)
        .sum();
    let orient = area2.signum();
    let c = line.position;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..4 {
        let (a, b) = (pts[i], pts[(i + 1) % 4]);
        // Inside: orient * cross(b - a, p - a) >= 0 with p = (u, c), i.e.
        // coef * u + rest >= 0.
        let coef = -orient * (b.y - a.y);
        let rest = orient * ((b.x - a.x) * (c - a.y) + (b.y - a.y) * a.x);
        if coef == 0.0 {
            if rest < 0.0 {
                return Err(Error::NoIntersection);
            }
        } else if coef > 0.0 {
            lo = lo.max(-rest / coef);
        } else {
            hi = hi.min(-rest / coef);
        }
    }
    if lo.partial_cmp(&hi) == Some(std::cmp::Ordering::Greater)
        || !lo.is_finite()
        || !hi.is_finite()
    {
        return Err(Error::NoIntersection);
    }
    Ok((lo, hi))
}

fn band_chord(spec: &ShapeSpec, line: SlidingLine) -> Result<(f64, f64)> {
    let half = 0.5 * spec.height;
    // Along-text lines are horizontal for a horizontal band, vertical otherwise.
    let across_line = match line.direction {
        SlideDirection::Horizontal => !spec.vertical,
        SlideDirection::Vertical => spec.vertical,
    };
    let u0 = band_origin(spec);
    let u1 = u0 + spec.length;
    if across_line {
        let u = line.position;
        if !(u0..=u1).contains(&u) {
            return Err(Error::NoIntersection);
        }
        let c = band_centre(spec, u);
        return Ok((c - half, c + half));
    }
    // Line at constant across-coordinate v: find where |v - c(u)| <= half.
    let v = line.position;
    let outside = |u: f64| (v - band_centre(spec, u)).abs() - half;
    const GRID: usize = 20_000;
    let step = (u1 - u0) / GRID as f64;
    let refine = |mut inside: f64, mut out: f64| {
        while (inside - out).abs() > 1e-12 * (1.0 + inside.abs()) {
            let mid = 0.5 * (inside + out);
            if outside(mid) <= 0.0 {
                inside = mid;
            } else {
                out = mid;
            }
        }
        inside
    };
    let lo = if outside(u0) <= 0.0 {
        u0
    } else {
        let mut found = None;
        for i in 1..=GRID {
            let u = u0 + step * i as f64;
            if outside(u) <= 0.0 {
                found = Some(refine(u, u - step));
                break;
            }
        }
        found.ok_or(Error::NoIntersection)?
    };
    let hi = if outside(u1) <= 0.0 {
        u1
    } else {
        let mut found = None;
        for i in 1..=GRID {
            let u = u1 - step * i as f64;
            if outside(u) <= 0.0 {
                found = Some(refine(u, u + step));
                break;
            }
        }
        found.ok_or(Error::NoIntersection)?
    };
    Ok((lo, hi))
}

/// Worst-case distance between the polygon encoding and the oracle along a
/// line of the given direction.
pub fn sampling_tolerance(spec: &ShapeSpec, direction: SlideDirection) -> f64 {
    if spec.kind != ShapeKind::SineBand {
        return 0.0;
    }
    let du = spec.length / (spec.samples - 1) as f64;
    let across_line = match direction {
        SlideDirection::Horizontal => !spec.vertical,
        SlideDirection::Vertical => spec.vertical,
    };
    if across_line {
        let curvature = spec.amplitude * (TAU / spec.period).powi(2);
        curvature * du * du / 8.0
    } else {
        du
    }
}
