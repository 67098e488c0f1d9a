//! Smooth-L1 regression losses over sliding-line coordinates.
//!
//! Losses work on raw pixel coordinates. The detector-level weights
//! `lambda_r`, `lambda_b` and `lambda_s` are carried in [`LossConfig`] for
//! callers that assemble the full multi-task objective; only the sliding-line
//! term is computed here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{SlprTarget, DEFAULT_LINES};
use crate::error::{Error, Result};
use crate::geom::AxisRect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub lambda_r: f64,
    pub lambda_b: f64,
    pub lambda_s: f64,
    /// Weight of the vertical-line term in the CTW variant.
    pub lambda_hw: f64,
    /// Aspect threshold of the CTW indicators, in `(0, 1]`.
    pub k: f64,
    pub n: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            lambda_r: 1.0,
            lambda_b: 1.0,
            lambda_s: 1.0,
            lambda_hw: 4.0,
            k: 0.8,
            n: DEFAULT_LINES,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let weights = [self.lambda_r, self.lambda_b, self.lambda_s, self.lambda_hw];
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument(
                "loss weights must be positive".into(),
            ));
        }
        if !(self.k > 0.0 && self.k <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "k = {} outside (0, 1]",
                self.k
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(())
    }
}

/// Borrowed regression coordinates of one region.
#[derive(Debug, Clone, Copy)]
pub struct SlprCoords<'a> {
    pub x_v: &'a [f64],
    pub y_h: &'a [f64],
}

impl<'a> From<&'a SlprTarget> for SlprCoords<'a> {
    fn from(t: &'a SlprTarget) -> Self {
        Self {
            x_v: &t.x_v,
            y_h: &t.y_h,
        }
    }
}

/// Gradient with respect to the predicted coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SlprGrad {
    pub x_v: Vec<f64>,
    pub y_h: Vec<f64>,
}

#[inline]
pub fn smooth_l1(z: f64, z_star: f64) -> f64 {
    let d = (z - z_star).abs();
    if d < 1.0 {
        0.5 * d * d
    } else {
        d - 0.5
    }
}

/// d/dz of [`smooth_l1`]: `z - z_star` clipped to `[-1, 1]`.
#[inline]
pub fn smooth_l1_grad(z: f64, z_star: f64) -> f64 {
    (z - z_star).clamp(-1.0, 1.0)
}

fn check_sizes(pred: &SlprCoords<'_>, gt: &SlprCoords<'_>, n: usize) -> Result<()> {
    for len in [pred.x_v.len(), pred.y_h.len(), gt.x_v.len(), gt.y_h.len()] {
        if len != 2 * n {
            return Err(Error::SizeMismatch {
                expected: 2 * n,
                actual: len,
            });
        }
    }
    Ok(())
}

fn term(pred: &[f64], gt: &[f64]) -> f64 {
    pred.iter().zip(gt).map(|(&p, &g)| smooth_l1(g, p)).sum()
}

fn term_grad(pred: &[f64], gt: &[f64], scale: f64) -> Vec<f64> {
    pred.iter()
        .zip(gt)
        .map(|(&p, &g)| scale * smooth_l1_grad(p, g))
        .collect()
}

/// Sliding-line loss: mean smooth-L1 over all `4n` coordinates.
pub fn slpr_loss(pred: SlprCoords<'_>, gt: SlprCoords<'_>, cfg: &LossConfig) -> Result<f64> {
    check_sizes(&pred, &gt, cfg.n)?;
    let norm = 1.0 / (4 * cfg.n) as f64;
    Ok(norm * (term(pred.x_v, gt.x_v) + term(pred.y_h, gt.y_h)))
}

pub fn slpr_loss_grad(
    pred: SlprCoords<'_>,
    gt: SlprCoords<'_>,
    cfg: &LossConfig,
) -> Result<SlprGrad> {
    check_sizes(&pred, &gt, cfg.n)?;
    let norm = 1.0 / (4 * cfg.n) as f64;
    Ok(SlprGrad {
        x_v: term_grad(pred.x_v, gt.x_v, norm),
        y_h: term_grad(pred.y_h, gt.y_h, norm),
    })
}

/// Weights `(x_v, y_h)` of the CTW variant for a rectangle.
///
/// The `x_v` term is active when `h / w > k` and carries `lambda_hw`; the
/// `y_h` term is active when `h / w < 1 / k`. Both inequalities are strict,
/// and both terms are active for `k < h / w < 1 / k`.
pub fn ctw_weights(rect: &AxisRect, cfg: &LossConfig) -> Result<(f64, f64)> {
    let rect = AxisRect::new(rect.x_min, rect.y_min, rect.x_max, rect.y_max)?;
    let ratio = rect.height() / rect.width();
    let wx = if ratio > cfg.k { cfg.lambda_hw } else { 0.0 };
    let wy = if ratio < 1.0 / cfg.k { 1.0 } else { 0.0 };
    Ok((wx, wy))
}

pub fn slpr_loss_ctw(
    pred: SlprCoords<'_>,
    gt: SlprCoords<'_>,
    rect: &AxisRect,
    cfg: &LossConfig,
) -> Result<f64> {
    check_sizes(&pred, &gt, cfg.n)?;
    let (wx, wy) = ctw_weights(rect, cfg)?;
    let norm = 1.0 / (4 * cfg.n) as f64;
    Ok(norm * (wx * term(pred.x_v, gt.x_v) + wy * term(pred.y_h, gt.y_h)))
}

pub fn slpr_loss_ctw_grad(
    pred: SlprCoords<'_>,
    gt: SlprCoords<'_>,
    rect: &AxisRect,
    cfg: &LossConfig,
) -> Result<SlprGrad> {
    check_sizes(&pred, &gt, cfg.n)?;
    let (wx, wy) = ctw_weights(rect, cfg)?;
    let norm = 1.0 / (4 * cfg.n) as f64;
    Ok(SlprGrad {
        x_v: term_grad(pred.x_v, gt.x_v, norm * wx),
        y_h: term_grad(pred.y_h, gt.y_h, norm * wy),
    })
}

/// Outcome of [`gradient_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.max_abs_error <= self.tolerance
    }
}

/// Compares the analytic gradients of [`slpr_loss`] and [`slpr_loss_ctw`]
/// against central differences on `samples` random prediction/target pairs.
///
/// Coordinates whose residual lies within `2 * step` of the `|d| = 1` kink
/// are skipped.
pub fn gradient_check(cfg: &LossConfig, samples: usize, seed: u64) -> Result<GradCheckReport> {
    cfg.validate()?;
    const STEP: f64 = 1e-6;
    const TOL: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 2 * cfg.n;
    let mut report = GradCheckReport {
        checked: 0,
        skipped: 0,
        max_abs_error: 0.0,
        tolerance: TOL,
    };

    for s in 0..samples {
        let gt_x: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..100.0)).collect();
        let gt_y: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..100.0)).collect();
        // Prediction as one flat vector: x_v followed by y_h.
        let mut pred: Vec<f64> = gt_x
            .iter()
            .chain(&gt_y)
            .map(|g| g + rng.random_range(-3.0..3.0))
            .collect();
        let aspect = rng.random_range(0.25..4.0);
        let rect = AxisRect::new(0.0, 0.0, 100.0, 100.0 * aspect)?;
        let ctw = s % 2 == 1;
        let gt = SlprCoords {
            x_v: &gt_x,
            y_h: &gt_y,
        };

        let eval = |flat: &[f64]| -> Result<f64> {
            let (x_v, y_h) = flat.split_at(len);
            let p = SlprCoords { x_v, y_h };
            if ctw {
                slpr_loss_ctw(p, gt, &rect, cfg)
            } else {
                slpr_loss(p, gt, cfg)
            }
        };
        let analytic: Vec<f64> = {
            let (x_v, y_h) = pred.split_at(len);
            let p = SlprCoords { x_v, y_h };
            let g = if ctw {
                slpr_loss_ctw_grad(p, gt, &rect, cfg)?
            } else {
                slpr_loss_grad(p, gt, cfg)?
            };
            g.x_v.into_iter().chain(g.y_h).collect()
        };
        let targets: Vec<f64> = gt_x.iter().chain(&gt_y).copied().collect();

        for i in 0..2 * len {
            let value = pred[i];
            if ((value - targets[i]).abs() - 1.0).abs() < 2.0 * STEP {
                report.skipped += 1;
                continue;
            }
            pred[i] = value + STEP;
            let plus = eval(&pred)?;
            pred[i] = value - STEP;
            let minus = eval(&pred)?;
            pred[i] = value;
            let numeric = (plus - minus) / (2.0 * STEP);
            report.max_abs_error = report.max_abs_error.max((numeric - analytic[i]).abs());
            report.checked += 1;
        }
    }
    Ok(report)
}
