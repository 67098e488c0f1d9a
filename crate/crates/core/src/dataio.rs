//! Annotation and detection text formats.
//!
//! ICDAR2015: `x1,y1,x2,y2,x3,y3,x4,y4,transcription`. A transcription of
//! `###` marks a don't-care region. Detection lines carry a score in place
//! of the transcription.
//!
//! CTW1500: 32 comma-separated integers, `x_min,y_min,x_max,y_max` followed
//! by 14 `(dx, dy)` offsets from `(x_min, y_min)`.
//!
//! JSON lines: one object per region,
//! `{"id":..,"score":..,"points":[[x,y],..],"dont_care":..,"transcription":..}`
//! with every key but `points` optional. Coordinates are kept at full
//! precision; the two benchmark formats round to integer pixels.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};
use crate::suppress::Detection;

pub const DONT_CARE: &str = "###";
pub const CTW_VERTICES: usize = 14;
pub const ICDAR_VERTICES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Icdar15,
    Ctw1500,
    PolygonJson,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "icdar15" | "icdar2015" => Ok(Format::Icdar15),
            "ctw1500" | "ctw" => Ok(Format::Ctw1500),
            "polygon_json" | "json" => Ok(Format::PolygonJson),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub polygon: Polygon,
    pub dont_care: bool,
    pub transcription: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRegion {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
    points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dont_care: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transcription: Option<String>,
}

fn clean_line(line: &str) -> &str {
    line.strip_prefix('\u{feff}')
        .unwrap_or(line)
        .trim_end_matches(['\r', '\n'])
}

fn parse_number(field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number: {field:?}")));
    }
    Ok(v)
}

fn points_from(values: &[f64]) -> Vec<Point> {
    values
        .chunks_exact(2)
        .map(|c| Point::new(c[0], c[1]))
        .collect()
}

fn round_px(v: f64) -> i64 {
    v.round() as i64
}

/// Parses one ICDAR2015 ground-truth line.
pub fn parse_icdar15(line: &str) -> Result<AnnotationRecord> {
    let line = clean_line(line);
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() < 8 {
        return Err(Error::Parse(format!(
            "icdar15 line has {} fields, need at least 8",
            fields.len()
        )));
    }
    let coords = fields[..8]
        .iter()
        .map(|f| parse_number(f))
        .collect::<Result<Vec<f64>>>()?;
    let transcription = (fields.len() > 8).then(|| fields[8..].join(","));
    let dont_care = transcription.as_deref() == Some(DONT_CARE);
    let polygon = Polygon::new(points_from(&coords))?;
    Ok(AnnotationRecord {
        polygon,
        dont_care,
        transcription,
    })
}

/// Parses one CTW1500 line.
pub fn parse_ctw1500(line: &str) -> Result<AnnotationRecord> {
    let line = clean_line(line);
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 + 2 * CTW_VERTICES {
        return Err(Error::Parse(format!(
            "ctw1500 line has {} fields, need 32",
            fields.len()
        )));
    }
    let values = fields
        .iter()
        .map(|f| parse_number(f))
        .collect::<Result<Vec<f64>>>()?;
    let (x0, y0) = (values[0], values[1]);
    let vertices = values[4..]
        .chunks_exact(2)
        .map(|c| Point::new(x0 + c[0], y0 + c[1]))
        .collect();
    let polygon = Polygon::new(vertices)?;
    Ok(AnnotationRecord {
        polygon,
        dont_care: false,
        transcription: None,
    })
}

fn parse_json_region(line: &str) -> Result<JsonRegion> {
    serde_json::from_str(clean_line(line)).map_err(|e| Error::Parse(format!("json region: {e}")))
}

pub fn parse_json_annotation(line: &str) -> Result<AnnotationRecord> {
    let r = parse_json_region(line)?;
    let polygon = Polygon::new(r.points.iter().map(|p| Point::new(p[0], p[1])).collect())?;
    let dont_care = r.dont_care.unwrap_or(false) || r.transcription.as_deref() == Some(DONT_CARE);
    Ok(AnnotationRecord {
        polygon,
        dont_care,
        transcription: r.transcription,
    })
}

pub fn parse_annotation(line: &str, format: Format) -> Result<AnnotationRecord> {
    match format {
        Format::Icdar15 => parse_icdar15(line),
        Format::Ctw1500 => parse_ctw1500(line),
        Format::PolygonJson => parse_json_annotation(line),
    }
}

fn is_blank(line: &str) -> bool {
    clean_line(line).trim().is_empty()
}

/// Parses every non-blank line of an annotation file.
pub fn read_annotations(text: &str, format: Format) -> Result<Vec<AnnotationRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !is_blank(l))
        .map(|(i, l)| {
            parse_annotation(l, format).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

fn check_vertices(p: &Polygon, expected: usize, format: &str) -> Result<()> {
    if p.len() != expected {
        return Err(Error::Format(format!(
            "{format} needs {expected} vertices, polygon has {}",
            p.len()
        )));
    }
    Ok(())
}

fn push_icdar_coords(out: &mut String, p: &Polygon) {
    for (i, v) in p.vertices().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{},{}", round_px(v.x), round_px(v.y));
    }
}

fn push_ctw_fields(out: &mut String, p: &Polygon) {
    let xs: Vec<i64> = p.vertices().iter().map(|v| round_px(v.x)).collect();
    let ys: Vec<i64> = p.vertices().iter().map(|v| round_px(v.y)).collect();
    let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let _ = write!(out, "{x0},{y0},{x1},{y1}");
    for (x, y) in xs.iter().zip(&ys) {
        let _ = write!(out, ",{},{}", x - x0, y - y0);
    }
}

/// One ICDAR2015 ground-truth line, without the trailing newline.
pub fn format_icdar15(rec: &AnnotationRecord) -> Result<String> {
    check_vertices(&rec.polygon, ICDAR_VERTICES, "icdar15")?;
    let mut out = String::new();
    push_icdar_coords(&mut out, &rec.polygon);
    let text = match (&rec.transcription, rec.dont_care) {
        (_, true) => Some(DONT_CARE),
        (Some(t), false) => Some(t.as_str()),
        (None, false) => None,
    };
    if let Some(t) = text {
        if t.contains(['\n', '\r']) {
            return Err(Error::Format("transcription contains a line break".into()));
        }
        out.push(',');
        out.push_str(t);
    }
    Ok(out)
}

/// One CTW1500 line, without the trailing newline.
pub fn format_ctw1500(rec: &AnnotationRecord) -> Result<String> {
    check_vertices(&rec.polygon, CTW_VERTICES, "ctw1500")?;
    let mut out = String::new();
    push_ctw_fields(&mut out, &rec.polygon);
    Ok(out)
}

pub fn format_json_annotation(rec: &AnnotationRecord) -> String {
    let region = JsonRegion {
        id: None,
        score: None,
        points: rec.polygon.vertices().iter().map(|p| [p.x, p.y]).collect(),
        dont_care: rec.dont_care.then_some(true),
        transcription: rec.transcription.clone(),
    };
    serde_json::to_string(&region).expect("region serializes")
}

pub fn format_annotation(rec: &AnnotationRecord, format: Format) -> Result<String> {
    match format {
        Format::Icdar15 => format_icdar15(rec),
        Format::Ctw1500 => format_ctw1500(rec),
        Format::PolygonJson => Ok(format_json_annotation(rec)),
    }
}

/// Writes detections one per line, LF-terminated.
///
/// `icdar15` lines are 8 integers and the score; `ctw1500` lines are the 32
/// integers of the annotation grammar (scores are not representable);
/// `polygon_json` keeps id, score and full-precision coordinates.
pub fn write_detections(dets: &[Detection], format: Format) -> Result<String> {
    let mut out = String::new();
    for d in dets {
        match format {
            Format::Icdar15 => {
                check_vertices(&d.polygon, ICDAR_VERTICES, "icdar15")?;
                push_icdar_coords(&mut out, &d.polygon);
                let _ = write!(out, ",{}", d.score);
            }
            Format::Ctw1500 => {
                check_vertices(&d.polygon, CTW_VERTICES, "ctw1500")?;
                push_ctw_fields(&mut out, &d.polygon);
            }
            Format::PolygonJson => {
                let region = JsonRegion {
                    id: Some(d.id),
                    score: Some(d.score),
                    points: d.polygon.vertices().iter().map(|p| [p.x, p.y]).collect(),
                    dont_care: None,
                    transcription: None,
                };
                out.push_str(&serde_json::to_string(&region).expect("region serializes"));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses one detection line, guessing the format from its shape.
///
/// A line starting with `{` is JSON; 8 or 9 comma fields are ICDAR2015
/// (a non-numeric ninth field is a transcription and the score defaults to
/// 1); 32 or 33 fields are CTW1500 with an optional trailing score.
pub fn parse_detection(line: &str, default_id: u64) -> Result<Detection> {
    let line = clean_line(line).trim();
    if line.starts_with('{') {
        let r = parse_json_region(line)?;
        let polygon = Polygon::new(r.points.iter().map(|p| Point::new(p[0], p[1])).collect())?;
        return Detection::new(polygon, r.score.unwrap_or(1.0), r.id.unwrap_or(default_id));
    }
    let fields: Vec<&str> = line.split(',').collect();
    match fields.len() {
        8 | 9 => {
            let coords = fields[..8]
                .iter()
                .map(|f| parse_number(f))
                .collect::<Result<Vec<f64>>>()?;
            let score = fields
                .get(8)
                .and_then(|f| parse_number(f).ok())
                .unwrap_or(1.0);
            Detection::new(Polygon::new(points_from(&coords))?, score, default_id)
        }
        32 | 33 => {
            let rec = parse_ctw1500(&fields[..32].join(","))?;
            let score = match fields.get(32) {
                Some(f) => parse_number(f)?,
                None => 1.0,
            };
            Detection::new(rec.polygon, score, default_id)
        }
        n => Err(Error::Parse(format!(
            "unrecognised detection line with {n} fields"
        ))),
    }
}

/// Parses a detection file; ids default to the zero-based line index among
/// non-blank lines.
pub fn read_detections(text: &str) -> Result<Vec<Detection>> {
    text.lines()
        .filter(|l| !is_blank(l))
        .enumerate()
        .map(|(i, l)| {
            parse_detection(l, i as u64)
                .map_err(|e| Error::Parse(format!("detection {}: {e}", i + 1)))
        })
        .collect()
}

/// Points at uniform arc-length spacing along an open polyline, both ends
/// included.
fn resample_chain(chain: &[Point], count: usize) -> Vec<Point> {
    let mut cum = Vec::with_capacity(chain.len());
    cum.push(0.0);
    for w in chain.windows(2) {
        cum.push(cum.last().unwrap() + w[0].distance(w[1]));
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let s = total * k as f64 / (count - 1) as f64;
        while seg + 2 < chain.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 {
            ((s - cum[seg]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (chain[seg], chain[seg + 1]);
        out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    // Exact end points regardless of accumulated rounding.
    out[0] = chain[0];
    out[count - 1] = chain[chain.len() - 1];
    out
}

/// Resamples a two-chain polygon (first half of the vertices one long side,
/// second half the other, as produced by PLS or by the sine-band and quad
/// generators) to the 14 vertices of the CTW1500 grammar, 7 per side.
pub fn resample_to_ctw(p: &Polygon) -> Result<Polygon> {
    let v = p.vertices();
    if !v.len().is_multiple_of(2) {
        return Err(Error::Format(format!(
            "cannot split {} vertices into two chains",
            v.len()
        )));
    }
    let half = v.len() / 2;
    let per_side = CTW_VERTICES / 2;
    let mut out = resample_chain(&v[..half], per_side);
    out.extend(resample_chain(&v[half..], per_side));
    Polygon::new(out)
}
