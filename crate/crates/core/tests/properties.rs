use pauc::data::{Algo, Dataset, FprInterval, Positions};
use pauc::mvc::mvc_positions;
use pauc::oracle::naive_struct_surrogate;
use pauc::ordering::{delta_auc, joint_feature_map, OrderingCounts};
use pauc::{
    empirical_auc, empirical_pauc, normalize_zscore, parse_svmlight_str, pauc_risk, roc_curve, train_cccp,
    write_svmlight, TrainConfig,
};
use proptest::prelude::*;

fn scores(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..=max)
}

/// Scores rounded to a coarse grid so that ties actually occur.
fn coarse_scores(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-6i32..6).prop_map(|v| v as f64 * 0.5), 1..=max)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, cols), rows)
}

prop_compose! {
    fn dataset(max_m: usize, max_n: usize, max_dim: usize)
        (m in 1..=max_m, n in 1..=max_n, dim in 1..=max_dim)
        (pos in matrix(m, dim), neg in matrix(n, dim)) -> Dataset {
        Dataset::from_dense(&pos, &neg).unwrap()
    }
}

prop_compose! {
    fn dataset_and_weights(max_m: usize, max_n: usize)
        (d in dataset(max_m, max_n, 3))
        (w in prop::collection::vec(-2.0f64..2.0, d.dim()), d in Just(d)) -> (Dataset, Vec<f64>) {
        (d, w)
    }
}

prop_compose! {
    fn bool_matrix(max_m: usize, max_k: usize)
        (m in 1..=max_m, k in 1..=max_k)
        (pi in prop::collection::vec(prop::collection::vec(any::<bool>(), k), m)) -> Vec<Vec<bool>> {
        pi
    }
}

fn grid_interval(n: usize, lo: usize, hi: usize) -> FprInterval {
    FprInterval::new(lo as f64 / n as f64, hi as f64 / n as f64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pauc_and_risk_sum_to_one(pos in coarse_scores(6), neg in coarse_scores(8), a in 0.0f64..0.5, b in 0.5f64..=1.0) {
        let i = FprInterval::new(a, b).unwrap();
        if i.positions(neg.len()).is_ok() {
            let total = empirical_pauc(&pos, &neg, &i).unwrap() + pauc_risk(&pos, &neg, &i).unwrap();
            prop_assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn metrics_invariant_under_increasing_maps(pos in coarse_scores(6), neg in coarse_scores(8), b in 0.1f64..=1.0, limit in 0.0f64..=1.0) {
        let f = |v: &[f64]| v.iter().map(|x| x.powi(3) + 2.0 * x + 7.0).collect::<Vec<_>>();
        let (p2, n2) = (f(&pos), f(&neg));
        let i = FprInterval::new(0.0, b).unwrap();
        prop_assert_eq!(empirical_auc(&pos, &neg).unwrap(), empirical_auc(&p2, &n2).unwrap());
        prop_assert_eq!(empirical_pauc(&pos, &neg, &i).unwrap(), empirical_pauc(&p2, &n2, &i).unwrap());
        prop_assert_eq!(pauc::tpr_at_fpr(&pos, &neg, limit).unwrap(), pauc::tpr_at_fpr(&p2, &n2, limit).unwrap());
    }

    #[test]
    fn interval_nesting(pos in scores(6), neg in prop::collection::vec(-50.0f64..50.0, 3..=9), cut in 1usize..8) {
        let n = neg.len();
        let split = cut.min(n - 1);
        let whole = empirical_pauc(&pos, &neg, &grid_interval(n, 0, n)).unwrap() * n as f64;
        let head = empirical_pauc(&pos, &neg, &grid_interval(n, 0, split)).unwrap() * split as f64;
        let tail = empirical_pauc(&pos, &neg, &grid_interval(n, split, n)).unwrap() * (n - split) as f64;
        prop_assert!((whole - head - tail).abs() <= 1e-9);
    }

    #[test]
    fn roc_area_matches_auc(pos in scores(8), neg in scores(8)) {
        let mut all: Vec<f64> = pos.iter().chain(&neg).copied().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup();
        prop_assume!(all.len() == pos.len() + neg.len());
        let roc = roc_curve(&pos, &neg).unwrap();
        prop_assert!((roc.area() - empirical_auc(&pos, &neg).unwrap()).abs() <= 1e-12);
        let pts = roc.points();
        prop_assert_eq!(pts[0], (0.0, 0.0));
        prop_assert_eq!(*pts.last().unwrap(), (1.0, 1.0));
        prop_assert!(pts.windows(2).all(|p| p[0].0 <= p[1].0 && p[0].1 <= p[1].1));
    }

    #[test]
    fn count_vectors_balance(pi in bool_matrix(4, 5)) {
        let c = OrderingCounts::from_matrix(&pi).unwrap();
        prop_assert_eq!(c.a_plus().iter().sum::<usize>(), c.a_minus().iter().sum::<usize>());
        let misranked = pi.iter().flatten().filter(|&&b| b).count();
        prop_assert_eq!(c.misranked_pairs(), misranked);
        let expected = misranked as f64 / (c.m() * c.k()) as f64;
        prop_assert!((delta_auc(&c) - expected).abs() <= 1e-15);
    }

    #[test]
    fn feature_map_equals_pairwise_sum((pi, d) in bool_matrix(3, 3).prop_flat_map(|pi| {
        let (m, k) = (pi.len(), pi[0].len());
        (Just(pi), matrix(m, 2).prop_flat_map(move |p| (Just(p), matrix(k, 2))))
    }).prop_map(|(pi, (p, n))| (pi, Dataset::from_dense(&p, &n).unwrap()))) {
        let (m, k) = (pi.len(), pi[0].len());
        let z: Vec<_> = d.negatives().iter().collect();
        let phi = joint_feature_map(d.positives(), &z, &OrderingCounts::from_matrix(&pi).unwrap(), 2).unwrap();
        let mut expect = [0.0; 2];
        for (i, row) in pi.iter().enumerate() {
            for (j, &wrong) in row.iter().enumerate() {
                if !wrong {
                    let (x, y) = (d.positives()[i].to_dense(), d.negatives()[j].to_dense());
                    for t in 0..2 {
                        expect[t] += (x[t] - y[t]) / (m * k) as f64;
                    }
                }
            }
        }
        prop_assert!((phi[0] - expect[0]).abs() <= 1e-12 && (phi[1] - expect[1]).abs() <= 1e-12);
    }

    #[test]
    fn svmlight_round_trip(d in dataset(4, 4, 4)) {
        let back = parse_svmlight_str(&write_svmlight(&d)).unwrap();
        prop_assert_eq!(back.num_positives(), d.num_positives());
        prop_assert_eq!(back.num_negatives(), d.num_negatives());
        for (a, b) in back.positives().iter().chain(back.negatives()).zip(d.positives().iter().chain(d.negatives())) {
            let (mut x, mut y) = (a.to_dense(), b.to_dense());
            x.resize(d.dim(), 0.0);
            y.resize(d.dim(), 0.0);
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn zscore_moments(d in dataset(5, 5, 3)) {
        let (out, stats) = normalize_zscore(&d);
        let rows: Vec<Vec<f64>> = out.positives().iter().chain(out.negatives()).map(|x| x.to_dense()).collect();
        let total = rows.len() as f64;
        for col in 0..d.dim() {
            let mean = rows.iter().map(|r| r[col]).sum::<f64>() / total;
            let var = rows.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / total;
            prop_assert!(mean.abs() <= 1e-9);
            // Constant columns are only centered.
            prop_assert!((var - 1.0).abs() <= 1e-9 || (var <= 1e-18 && stats.stds[col] == 1.0));
        }
    }

    #[test]
    fn scores_are_linear_in_w((d, w1) in dataset_and_weights(4, 4), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let w2: Vec<f64> = w1.iter().rev().copied().collect();
        let mix: Vec<f64> = w1.iter().zip(&w2).map(|(x, y)| a * x + b * y).collect();
        let (p1, n1) = d.scores(&w1);
        let (p2, n2) = d.scores(&w2);
        let (pm, nm) = d.scores(&mix);
        for ((s, t), u) in p1.iter().chain(&n1).zip(p2.iter().chain(&n2)).zip(pm.iter().chain(&nm)) {
            prop_assert!((a * s + b * t - u).abs() <= 1e-9);
        }
    }

    #[test]
    fn most_violated_value_is_nonnegative((d, w) in dataset_and_weights(4, 6), lo in 0usize..6, width in 1usize..6) {
        let n = d.num_negatives();
        let ja = lo.min(n - 1);
        let jb = (ja + width).min(n);
        let h = mvc_positions(&w, &d, Positions::new(ja, jb).unwrap()).unwrap().h;
        prop_assert!(h >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tight_never_exceeds_naive((d, w) in dataset_and_weights(3, 4), lo in 0usize..4, width in 1usize..4) {
        let n = d.num_negatives();
        let ja = lo.min(n - 1);
        let p = Positions::new(ja, (ja + width).min(n)).unwrap();
        let tight = mvc_positions(&w, &d, p).unwrap().h;
        let naive = naive_struct_surrogate(&w, &d, p).unwrap();
        prop_assert!(tight <= naive + 1e-9, "tight {} naive {}", tight, naive);
    }

    #[test]
    fn cccp_trace_is_monotone(d in dataset(5, 8, 3), c in 0.05f64..20.0) {
        let n = d.num_negatives();
        prop_assume!(n >= 3);
        let cfg = TrainConfig::new(Algo::PaucDc, grid_interval(n, 1, n), c);
        let r = train_cccp(&d, &cfg).unwrap();
        prop_assert_eq!(r.objective_trace[0], c);
        prop_assert!(r.objective_trace.windows(2).all(|t| t[1] <= t[0] + 1e-9));
    }
}
