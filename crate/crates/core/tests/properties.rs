//! Invariants of the metrics, checked on generated inputs.

use std::collections::BTreeMap;

use ospa_pose::assignment::{solve_min_cost, CostMatrix};
use ospa_pose::ospa::loc_breakdown;
use ospa_pose::{
    mean_euclidean, oks, ospa2_pose, ospa_pose, pose_distance, synthetic, KeypointSchema, OksMode,
    Trajectory, Visibility, VisibilityFilter, NUM_KEYPOINTS,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn cost_matrix() -> impl Strategy<Value = CostMatrix> {
    (0usize..8, 0usize..8).prop_flat_map(|(r, c)| {
        prop::collection::vec(0.0f64..10.0, r * c)
            .prop_map(move |data| CostMatrix::new(r, c, data).unwrap())
    })
}

fn schemas() -> impl Strategy<Value = KeypointSchema> {
    prop_oneof![Just(OksMode::PaperMean), Just(OksMode::PerJointAverage)]
        .prop_map(|m| KeypointSchema::default().with_mode(m))
}

fn shifted(tracks: &[Trajectory], by: u64) -> Vec<Trajectory> {
    tracks
        .iter()
        .map(|t| {
            let states: BTreeMap<u64, _> = t
                .states()
                .iter()
                .map(|(f, p)| (f + by, p.clone()))
                .collect();
            Trajectory::new(t.track_id(), states).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oks_is_bounded(seed in any::<u64>(), spread in 0.0f64..500.0, schema in schemas()) {
        let mut rng = synthetic::rng(seed);
        let g = synthetic::random_pose(&mut rng, 100.0, 100.0);
        let p = synthetic::jitter(&mut rng, &g, spread);
        for filter in [VisibilityFilter::All, VisibilityFilter::Only(Visibility::Occluded)] {
            let v = oks(&g, &p, &schema, filter).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let d = pose_distance(&g, &p, &schema, filter).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }
        prop_assert_eq!(oks(&g, &g, &schema, VisibilityFilter::All).unwrap(), 1.0);
    }

    #[test]
    fn oks_does_not_increase_as_error_grows(
        seed in any::<u64>(),
        factor in 1.0f64..5.0,
        schema in schemas(),
    ) {
        let mut rng = synthetic::rng(seed);
        let g = synthetic::random_pose(&mut rng, 100.0, 100.0);
        let p = synthetic::jitter(&mut rng, &g, 10.0);
        let mut q = p.clone();
        for (kq, kg) in q.keypoints.iter_mut().zip(&g.keypoints) {
            kq.x = kg.x + factor * (kq.x - kg.x);
            kq.y = kg.y + factor * (kq.y - kg.y);
        }
        let near = oks(&g, &p, &schema, VisibilityFilter::All).unwrap();
        let far = oks(&g, &q, &schema, VisibilityFilter::All).unwrap();
        prop_assert!(far <= near + 1e-15);
    }

    #[test]
    fn per_level_means_partition_the_overall_mean(seed in any::<u64>()) {
        let mut rng = synthetic::rng(seed);
        let g = synthetic::random_pose(&mut rng, 0.0, 0.0);
        let p = synthetic::jitter(&mut rng, &g, 30.0);
        let weighted: f64 = Visibility::REPORT_ORDER
            .iter()
            .map(|&l| mean_euclidean(&g, &p, VisibilityFilter::Only(l)) * g.count_at(l) as f64)
            .sum();
        let overall = mean_euclidean(&g, &p, VisibilityFilter::All);
        prop_assert!((weighted / NUM_KEYPOINTS as f64 - overall).abs() < 1e-9);
    }

    #[test]
    fn assignment_cost_scales_linearly(m in cost_matrix(), scale in 0.1f64..10.0) {
        let base = solve_min_cost(&m);
        let scaled = CostMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) * scale).unwrap();
        let s = solve_min_cost(&scaled);
        prop_assert!((s.total_cost - scale * base.total_cost).abs() < 1e-9 * (1.0 + s.total_cost));
        prop_assert_eq!(base.len(), m.rows().min(m.cols()));
    }

    #[test]
    fn assignment_cost_ignores_row_and_column_order(m in cost_matrix(), seed in any::<u64>()) {
        let mut rng = synthetic::rng(seed);
        let mut rp: Vec<usize> = (0..m.rows()).collect();
        let mut cp: Vec<usize> = (0..m.cols()).collect();
        rp.shuffle(&mut rng);
        cp.shuffle(&mut rng);
        let permuted = CostMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(rp[r], cp[c])).unwrap();
        let a = solve_min_cost(&m).total_cost;
        let b = solve_min_cost(&permuted).total_cost;
        prop_assert!((a - b).abs() < 1e-9);
        let t = solve_min_cost(&m.transpose()).total_cost;
        prop_assert!((a - t).abs() < 1e-9);
    }

    #[test]
    fn ospa_bounds_decomposition_and_symmetry(
        seed in any::<u64>(),
        ng in 0usize..6,
        np in 0usize..6,
        schema in schemas(),
    ) {
        let mut rng = synthetic::rng(seed);
        let gt = synthetic::random_pose_set(&mut rng, ng);
        let pred = synthetic::random_pose_set(&mut rng, np);
        let r = ospa_pose(&gt, &pred, &schema).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.total));
        prop_assert!((r.loc + r.card - r.total).abs() < 1e-12);
        let n = ng.max(np);
        let expect_card = if n == 0 { 0.0 } else { (n - ng.min(np)) as f64 / n as f64 };
        prop_assert_eq!(r.card, expect_card);
        // All generated boxes share one area, so swapping roles keeps every distance.
        let mut pred_as_gt = pred.clone();
        for (p, g) in pred_as_gt.iter_mut().zip(gt.iter().cycle()) {
            p.bbox = g.bbox;
        }
        if !gt.is_empty() {
            let back = ospa_pose(&pred_as_gt, &gt, &schema).unwrap();
            prop_assert!((back.total - r.total).abs() < 1e-9);
        }
        let itself = ospa_pose(&gt, &gt, &schema).unwrap();
        prop_assert_eq!(itself.total, 0.0);
    }

    #[test]
    fn breakdown_never_exceeds_unit_loc(seed in any::<u64>(), ng in 0usize..6, np in 0usize..6) {
        let schema = KeypointSchema::default();
        let mut rng = synthetic::rng(seed);
        let gt = synthetic::random_pose_set(&mut rng, ng);
        let pred = synthetic::random_pose_set(&mut rng, np);
        let r = ospa_pose(&gt, &pred, &schema).unwrap();
        let b = loc_breakdown(&gt, &pred, &schema, &r).unwrap();
        let mut keypoints = 0;
        for level in Visibility::REPORT_ORDER {
            let l = b.get(level);
            prop_assert!(l.contribution >= 0.0);
            prop_assert!(l.contribution <= r.m as f64 / r.n.max(1) as f64 + 1e-12);
            keypoints += l.gt_keypoints;
        }
        prop_assert_eq!(keypoints, ng * NUM_KEYPOINTS);
    }

    #[test]
    fn ospa2_is_invariant_to_time_shift(
        seed in any::<u64>(),
        shift in 1u64..1000,
        schema in schemas(),
    ) {
        let mut rng = synthetic::rng(seed);
        let gt = synthetic::random_track_set(&mut rng, 4, 8);
        let pred = synthetic::random_track_set(&mut rng, 4, 8);
        let a = ospa2_pose(&gt, &pred, &schema).unwrap();
        let b = ospa2_pose(&shifted(&gt, shift), &shifted(&pred, shift), &schema).unwrap();
        prop_assert!((a.total() - b.total()).abs() < 1e-12);
        for level in Visibility::REPORT_ORDER {
            prop_assert!((a.per_visibility.get(level).total - b.per_visibility.get(level).total).abs() < 1e-12);
        }
    }

    #[test]
    fn ospa2_bounds_and_identity(seed in any::<u64>()) {
        let schema = KeypointSchema::default();
        let mut rng = synthetic::rng(seed);
        let gt = synthetic::random_track_set(&mut rng, 4, 8);
        let pred = synthetic::random_track_set(&mut rng, 4, 8);
        let r = ospa2_pose(&gt, &pred, &schema).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.total()));
        prop_assert!((r.loc() + r.card() - r.total()).abs() < 1e-12);
        prop_assert_eq!(ospa2_pose(&gt, &gt, &schema).unwrap().total(), 0.0);
    }

    #[test]
    fn extra_far_track_only_moves_cardinality(seed in any::<u64>()) {
        let schema = KeypointSchema::default();
        let mut rng = synthetic::rng(seed);
        let gt = synthetic::random_track_set(&mut rng, 3, 6);
        prop_assume!(!gt.is_empty());
        let mut pred = gt.clone();
        let f = rng.gen_range(0..6);
        let far = synthetic::random_pose(&mut rng, 5000.0, 100.0);
        pred.push(Trajectory::new(999, BTreeMap::from([(f, far)])).unwrap());
        let r = ospa2_pose(&gt, &pred, &schema).unwrap();
        prop_assert_eq!(r.loc(), 0.0);
        prop_assert!((r.card() - 1.0 / pred.len() as f64).abs() < 1e-15);
    }
}
