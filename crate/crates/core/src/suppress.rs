//! Greedy non-maximum suppression over scored detections.
//!
//! [`nms`] measures overlap with the axis-aligned rectangles, [`pnms`] with
//! the polygons. Candidates are visited by descending score, ties broken by
//! ascending id; a candidate is dropped when its IoU with an already kept
//! detection is strictly greater than the threshold.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{polygon_bbox, polygon_iou, rect_iou, AxisRect, Polygon};

/// Below this many pending candidates the overlap pass stays sequential.
const PAR_MIN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub polygon: Polygon,
    pub rect: AxisRect,
    pub score: f64,
    pub id: u64,
}

impl Detection {
    /// Detection whose rectangle is the polygon's bounding box.
    pub fn new(polygon: Polygon, score: f64, id: u64) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "score {score} is not finite"
            )));
        }
        let rect = polygon_bbox(&polygon)?;
        Ok(Self {
            polygon,
            rect,
            score,
            id,
        })
    }
}

/// Canonical visiting order: score descending, then id ascending.
pub fn score_order(a: &Detection, b: &Detection) -> Ordering {
    b.score.total_cmp(&a.score).then(a.id.cmp(&b.id))
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "IoU threshold {t} outside (0, 1)"
        )))
    }
}

fn greedy<F>(dets: &[Detection], threshold: f64, overlap: F) -> Result<Vec<Detection>>
where
    F: Fn(&Detection, &Detection) -> f64 + Sync,
{
    check_threshold(threshold)?;
    let mut order: Vec<&Detection> = dets.iter().collect();
    order.sort_by(|a, b| score_order(a, b));

    let mut suppressed = vec![false; order.len()];
    let mut kept = Vec::new();
    for i in 0..order.len() {
        if suppressed[i] {
            continue;
        }
        let top = order[i];
        kept.push(top.clone());
        let rest = i + 1..order.len();
        let hit = |j: usize| !suppressed[j] && overlap(top, order[j]) > threshold;
        let flags: Vec<bool> = if rest.len() >= PAR_MIN {
            rest.clone().into_par_iter().map(hit).collect()
        } else {
            rest.clone().map(hit).collect()
        };
        for (j, f) in rest.zip(flags) {
            suppressed[j] |= f;
        }
    }
    Ok(kept)
}

/// Rectangle NMS.
pub fn nms(dets: &[Detection], iou_threshold: f64) -> Result<Vec<Detection>> {
    greedy(dets, iou_threshold, |a, b| rect_iou(&a.rect, &b.rect))
}

/// Polygon NMS.
pub fn pnms(dets: &[Detection], iou_threshold: f64) -> Result<Vec<Detection>> {
    greedy(dets, iou_threshold, |a, b| {
        polygon_iou(&a.polygon, &b.polygon)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn det(coords: &[(f64, f64)], score: f64, id: u64) -> Detection {
        Detection::new(Polygon::from_coords(coords).unwrap(), score, id).unwrap()
    }

    fn ids(d: &[Detection]) -> Vec<u64> {
        d.iter().map(|d| d.id).collect()
    }

    /// 10 x 1 band centred at (5, 5), rotated by `deg`.
    fn band(deg: f64, score: f64, id: u64) -> Detection {
        let (s, c) = deg.to_radians().sin_cos();
        let pts: Vec<Point> = [(-5.0, -0.5), (5.0, -0.5), (5.0, 0.5), (-5.0, 0.5)]
            .iter()
            .map(|&(x, y)| Point::new(5.0 + x * c - y * s, 5.0 + x * s + y * c))
            .collect();
        Detection::new(Polygon::new(pts).unwrap(), score, id).unwrap()
    }

    #[test]
    fn single_and_empty() {
        let d = det(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], 0.5, 1);
        assert_eq!(nms(std::slice::from_ref(&d), 0.5).unwrap(), vec![d.clone()]);
        assert!(nms(&[], 0.3).unwrap().is_empty());
        assert!(pnms(&[], 0.3).unwrap().is_empty());
    }

    #[test]
    fn identical_rects_keep_the_best() {
        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        let dets = vec![det(&sq, 0.8, 1), det(&sq, 0.9, 2)];
        assert_eq!(ids(&nms(&dets, 0.5).unwrap()), vec![2]);
        assert_eq!(ids(&pnms(&dets, 0.5).unwrap()), vec![2]);
    }

    #[test]
    fn crossing_bands_differ_between_modes() {
        let dets = vec![band(45.0, 0.9, 1), band(-45.0, 0.8, 2)];
        let p_iou = polygon_iou(&dets[0].polygon, &dets[1].polygon);
        assert!((p_iou - 1.0 / 19.0).abs() < 1e-9);
        assert!(rect_iou(&dets[0].rect, &dets[1].rect) > 0.99);
        assert_eq!(ids(&pnms(&dets, 0.3).unwrap()), vec![1, 2]);
        assert_eq!(ids(&nms(&dets, 0.3).unwrap()), vec![1]);
    }

    #[test]
    fn ties_break_by_id() {
        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        let dets = vec![det(&sq, 0.7, 9), det(&sq, 0.7, 3)];
        assert_eq!(ids(&nms(&dets, 0.5).unwrap()), vec![3]);
    }

    #[test]
    fn threshold_is_strict() {
        let a = det(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)], 0.9, 1);
        let b = det(&[(1.0, 0.0), (3.0, 0.0), (3.0, 2.0), (1.0, 2.0)], 0.8, 2);
        // IoU is exactly 1/3.
        assert_eq!(nms(&[a.clone(), b.clone()], 1.0 / 3.0).unwrap().len(), 2);
        assert_eq!(nms(&[a, b], 0.3).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_threshold() {
        assert!(nms(&[], 0.0).is_err());
        assert!(pnms(&[], 1.0).is_err());
    }
}
