//! ICDAR-style detection evaluation.
//!
//! Per image, detections overlapping a don't-care region by more than the
//! IoU threshold are discarded. The rest are visited by descending score
//! (ties by id) and each claims the unmatched ground truth it overlaps most,
//! provided that IoU exceeds the threshold. Corpus precision and recall are
//! ratios of the summed counts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{polygon_iou, Polygon};
use crate::suppress::{score_order, Detection};

pub const DEFAULT_IOU: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub polygon: Polygon,
    pub dont_care: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Match {
    pub det_id: u64,
    pub gt_index: usize,
    pub iou: f64,
}

/// Counts and matches of one image.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ImageStats {
    pub matched: usize,
    /// Detections that survived don't-care filtering.
    pub counted_dets: usize,
    /// Ground truths not marked don't-care.
    pub valid_gts: usize,
    pub matches: Vec<Match>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchRecord {
    /// Position of the image in the aggregated sequence.
    pub image: usize,
    pub det_id: u64,
    pub gt_index: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub hmean: f64,
    pub matched: usize,
    pub valid_gts: usize,
    pub counted_dets: usize,
    pub matches: Vec<MatchRecord>,
}

/// `2PR / (P + R)`, or 0 when both are 0.
pub fn hmean(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn match_image(
    dets: &[Detection],
    gts: &[GroundTruth],
    iou_threshold: f64,
) -> Result<ImageStats> {
    if !(iou_threshold > 0.0 && iou_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "IoU threshold {iou_threshold} outside (0, 1)"
        )));
    }
    let mut order: Vec<&Detection> = dets
        .iter()
        .filter(|d| {
            !gts.iter()
                .any(|g| g.dont_care && polygon_iou(&d.polygon, &g.polygon) > iou_threshold)
        })
        .collect();
    order.sort_by(|a, b| score_order(a, b));

    let valid: Vec<usize> = (0..gts.len()).filter(|&i| !gts[i].dont_care).collect();
    let mut taken = vec![false; gts.len()];
    let mut matches = Vec::new();
    for d in &order {
        let mut best: Option<(usize, f64)> = None;
        for &gi in &valid {
            if taken[gi] {
                continue;
            }
            let iou = polygon_iou(&d.polygon, &gts[gi].polygon);
            if iou > iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        if let Some((gi, iou)) = best {
            taken[gi] = true;
            matches.push(Match {
                det_id: d.id,
                gt_index: gi,
                iou,
            });
        }
    }
    Ok(ImageStats {
        matched: matches.len(),
        counted_dets: order.len(),
        valid_gts: valid.len(),
        matches,
    })
}

/// Sums per-image counts into corpus precision / recall / Hmean.
pub fn aggregate(images: &[ImageStats]) -> EvalReport {
    let matched: usize = images.iter().map(|s| s.matched).sum();
    let counted_dets: usize = images.iter().map(|s| s.counted_dets).sum();
    let valid_gts: usize = images.iter().map(|s| s.valid_gts).sum();
    let precision = ratio(matched, counted_dets);
    let recall = ratio(matched, valid_gts);
    let matches = images
        .iter()
        .enumerate()
        .flat_map(|(image, s)| {
            s.matches.iter().map(move |m| MatchRecord {
                image,
                det_id: m.det_id,
                gt_index: m.gt_index,
                iou: m.iou,
            })
        })
        .collect();
    EvalReport {
        precision,
        recall,
        hmean: hmean(precision, recall),
        matched,
        valid_gts,
        counted_dets,
        matches,
    }
}

impl EvalReport {
    /// Human-readable summary, one `key: value` per line, rates to 3 decimals.
    pub fn to_text(&self) -> String {
        format!(
            "precision: {:.3}\nrecall: {:.3}\nhmean: {:.3}\nmatched: {}\nground_truths: {}\ndetections: {}\n",
            self.precision, self.recall, self.hmean, self.matched, self.valid_gts, self.counted_dets
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
