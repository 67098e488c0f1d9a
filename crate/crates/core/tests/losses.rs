mod common;

use common::central_diff;
use proptest::prelude::*;
use slpr_core::loss::{
    ctw_weights, gradient_check, slpr_loss, slpr_loss_ctw, slpr_loss_ctw_grad, slpr_loss_grad,
    smooth_l1, smooth_l1_grad, LossConfig, SlprCoords,
};
use slpr_core::AxisRect;

proptest! {
    #[test]
    fn smooth_l1_is_symmetric(a in -50.0..50.0f64, b in -50.0..50.0f64) {
        prop_assert_eq!(smooth_l1(a, b), smooth_l1(b, a));
        prop_assert_eq!(smooth_l1_grad(a, b), -smooth_l1_grad(b, a));
    }

    #[test]
    fn smooth_l1_regimes(d in 0.0..100.0f64) {
        let v = smooth_l1(d, 0.0);
        if d < 1.0 {
            prop_assert!((v - 0.5 * d * d).abs() < 1e-12);
        } else {
            prop_assert!((v - (d - 0.5)).abs() < 1e-12);
        }
        // Never above the absolute error, never below half its square capped.
        prop_assert!(v <= d + 1e-12);
    }

    #[test]
    fn grad_matches_central_difference(z in -20.0..20.0f64, z_star in -20.0..20.0f64) {
        let d = (z - z_star).abs();
        prop_assume!((d - 1.0).abs() > 1e-4);
        let fd = central_diff(|x| smooth_l1(x, z_star), z, 1e-6);
        prop_assert!((fd - smooth_l1_grad(z, z_star)).abs() < 1e-5);
    }

    #[test]
    fn loss_gradient_matches_central_difference(
        gt in proptest::collection::vec(0.0..100.0f64, 28),
        delta in proptest::collection::vec(-3.0..3.0f64, 28),
        coord in 0usize..28,
        aspect in 0.2..5.0f64,
    ) {
        let cfg = LossConfig::default();
        let pred: Vec<f64> = gt.iter().zip(&delta).map(|(g, d)| g + d).collect();
        prop_assume!((delta[coord].abs() - 1.0).abs() > 1e-4);
        let rect = AxisRect::new(0.0, 0.0, 100.0, 100.0 * aspect).unwrap();
        let loss_at = |x: f64, ctw: bool| {
            let mut p = pred.clone();
            p[coord] = x;
            let (px, py) = p.split_at(14);
            let (gx, gy) = gt.split_at(14);
            let (pc, gc) = (SlprCoords { x_v: px, y_h: py }, SlprCoords { x_v: gx, y_h: gy });
            if ctw { slpr_loss_ctw(pc, gc, &rect, &cfg).unwrap() } else { slpr_loss(pc, gc, &cfg).unwrap() }
        };
        let (px, py) = pred.split_at(14);
        let (gx, gy) = gt.split_at(14);
        let (pc, gc) = (SlprCoords { x_v: px, y_h: py }, SlprCoords { x_v: gx, y_h: gy });
        let plain = slpr_loss_grad(pc, gc, &cfg).unwrap();
        let ctw = slpr_loss_ctw_grad(pc, gc, &rect, &cfg).unwrap();
        let pick = |g: &slpr_core::loss::SlprGrad| if coord < 14 { g.x_v[coord] } else { g.y_h[coord - 14] };
        prop_assert!((central_diff(|x| loss_at(x, false), pred[coord], 1e-6) - pick(&plain)).abs() < 1e-5);
        prop_assert!((central_diff(|x| loss_at(x, true), pred[coord], 1e-6) - pick(&ctw)).abs() < 1e-5);
    }
}

#[test]
fn kernel_values() {
    for (d, v) in [(0.0, 0.0), (0.5, 0.125), (1.0, 0.5), (2.0, 1.5)] {
        assert_eq!(smooth_l1(d, 0.0), v);
    }
    assert_eq!(smooth_l1_grad(5.0, 0.0), 1.0);
    assert_eq!(smooth_l1_grad(-5.0, 0.0), -1.0);
}

#[test]
fn uniform_half_residual_loss() {
    let cfg = LossConfig::default();
    let gt = vec![10.0; 14];
    let pred = vec![10.5; 14];
    let c = SlprCoords {
        x_v: &pred,
        y_h: &pred,
    };
    let g = SlprCoords { x_v: &gt, y_h: &gt };
    assert!((slpr_loss(c, g, &cfg).unwrap() - 0.125).abs() < 1e-15);
}

#[test]
fn ctw_indicators() {
    let cfg = LossConfig::default();
    let weights = |h: f64| ctw_weights(&AxisRect::new(0.0, 0.0, 1.0, h).unwrap(), &cfg).unwrap();
    // h/w = 0.5: only the y_h term.
    assert_eq!(weights(0.5), (0.0, 1.0));
    // h/w = 1 lies strictly between k and 1/k: both terms.
    assert_eq!(weights(1.0), (4.0, 1.0));
    // h/w = 2: only the x_v term, weighted by lambda_hw.
    assert_eq!(weights(2.0), (4.0, 0.0));
    // Boundaries are exclusive.
    assert_eq!(weights(0.8), (0.0, 1.0));
    assert_eq!(weights(1.25), (4.0, 0.0));
}

#[test]
fn size_mismatch_is_reported() {
    let cfg = LossConfig::default();
    let short = vec![0.0; 13];
    let ok = vec![0.0; 14];
    let r = slpr_loss(
        SlprCoords {
            x_v: &short,
            y_h: &ok,
        },
        SlprCoords { x_v: &ok, y_h: &ok },
        &cfg,
    );
    assert!(matches!(
        r,
        Err(slpr_core::Error::SizeMismatch {
            expected: 14,
            actual: 13
        })
    ));
}

#[test]
fn builtin_gradient_check_passes() {
    let report = gradient_check(&LossConfig::default(), 200, 5).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.checked > 0);
}
