use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slpr_core::eval::hmean;
use slpr_core::{aggregate, match_image, Detection, GroundTruth, Polygon};

fn square(x: f64, y: f64, s: f64) -> Polygon {
    Polygon::from_coords(&[(x, y), (x + s, y), (x + s, y + s), (x, y + s)]).unwrap()
}

/// Ground truths on a grid plus detections jittered around some of them and
/// a few strays.
fn scene(seed: u64) -> (Vec<Detection>, Vec<GroundTruth>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gts: Vec<GroundTruth> = (0..rng.random_range(0..8))
        .map(|i| GroundTruth {
            polygon: square(100.0 * f64::from(i), 0.0, 50.0),
            dont_care: rng.random_bool(0.2),
        })
        .collect();
    let mut dets = Vec::new();
    for (i, g) in gts.iter().enumerate() {
        for _ in 0..rng.random_range(0..3) {
            let shift = rng.random_range(-30.0..30.0);
            let p = g.polygon.translated(shift, rng.random_range(-10.0..10.0));
            let score = f64::from(rng.random_range(1..10)) / 10.0;
            dets.push(Detection::new(p, score, (dets.len() + 100 * i) as u64).unwrap());
        }
    }
    for _ in 0..rng.random_range(0..3) {
        let p = square(rng.random_range(0.0..800.0), 300.0, 40.0);
        dets.push(Detection::new(p, 0.5, dets.len() as u64 + 10_000).unwrap());
    }
    (dets, gts)
}

proptest! {
    #[test]
    fn matching_is_one_to_one(seed in any::<u64>(), thr in 0.1..0.9f64) {
        let (dets, gts) = scene(seed);
        let s = match_image(&dets, &gts, thr).unwrap();
        let mut det_ids: Vec<u64> = s.matches.iter().map(|m| m.det_id).collect();
        let mut gt_ids: Vec<usize> = s.matches.iter().map(|m| m.gt_index).collect();
        det_ids.sort();
        det_ids.dedup();
        gt_ids.sort();
        gt_ids.dedup();
        prop_assert_eq!(det_ids.len(), s.matches.len());
        prop_assert_eq!(gt_ids.len(), s.matches.len());
        for m in &s.matches {
            prop_assert!(m.iou > thr);
            prop_assert!(!gts[m.gt_index].dont_care);
        }
        prop_assert!(s.matched <= s.counted_dets.min(s.valid_gts));
    }

    #[test]
    fn detection_order_does_not_matter(seed in any::<u64>()) {
        let (dets, gts) = scene(seed);
        let mut shuffled = dets.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert_eq!(match_image(&dets, &gts, 0.5).unwrap(), match_image(&shuffled, &gts, 0.5).unwrap());
    }

    #[test]
    fn a_stray_detection_lowers_precision(seed in any::<u64>()) {
        let (mut dets, gts) = scene(seed);
        let before = aggregate(&[match_image(&dets, &gts, 0.5).unwrap()]);
        dets.push(Detection::new(square(5000.0, 5000.0, 10.0), 1.0, 99_999).unwrap());
        let after = aggregate(&[match_image(&dets, &gts, 0.5).unwrap()]);
        prop_assert_eq!(after.recall, before.recall);
        prop_assert!(after.precision < before.precision || before.precision == 0.0);
    }

    #[test]
    fn ground_truth_against_itself_is_perfect(seed in any::<u64>()) {
        let (_, gts) = scene(seed);
        let dets: Vec<Detection> = gts
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.dont_care)
            .map(|(i, g)| Detection::new(g.polygon.clone(), 1.0, i as u64).unwrap())
            .collect();
        let r = aggregate(&[match_image(&dets, &gts, 0.5).unwrap()]);
        if !dets.is_empty() {
            prop_assert_eq!((r.precision, r.recall, r.hmean), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn hmean_lies_between_min_and_max(p in 0.0..1.0f64, r in 0.0..1.0f64) {
        let h = hmean(p, r);
        prop_assert!(h <= p.max(r) + 1e-12);
        prop_assert!(h >= p.min(r) - 1e-12);
    }
}

#[test]
fn published_table_value() {
    assert_eq!(format!("{:.3}", hmean(0.855, 0.836)), "0.845");
}

#[test]
fn corpus_counts_are_summed_not_averaged() {
    let gts1 = vec![GroundTruth {
        polygon: square(0.0, 0.0, 10.0),
        dont_care: false,
    }];
    let gts2: Vec<GroundTruth> = (0..3)
        .map(|i| GroundTruth {
            polygon: square(20.0 * f64::from(i), 0.0, 10.0),
            dont_care: false,
        })
        .collect();
    let s1 = match_image(
        &[Detection::new(square(0.0, 0.0, 10.0), 1.0, 0).unwrap()],
        &gts1,
        0.5,
    )
    .unwrap();
    let s2 = match_image(&[], &gts2, 0.5).unwrap();
    let r = aggregate(&[s1, s2]);
    assert_eq!(r.recall, 0.25);
    assert_eq!(r.precision, 1.0);
    assert!((r.hmean - 0.4).abs() < 1e-12);
}

#[test]
fn higher_scored_detection_claims_the_ground_truth() {
    let gts = vec![GroundTruth {
        polygon: square(0.0, 0.0, 10.0),
        dont_care: false,
    }];
    let dets = vec![
        Detection::new(square(1.0, 0.0, 10.0), 0.9, 1).unwrap(),
        Detection::new(square(0.0, 0.0, 10.0), 0.5, 2).unwrap(),
    ];
    let s = match_image(&dets, &gts, 0.5).unwrap();
    assert_eq!(s.matches.len(), 1);
    assert_eq!(s.matches[0].det_id, 1);
}
