//! Property tests for the measure's invariants, clustering structure, and
//! metric sanity.

use proptest::prelude::*;

use fourtastic::clustering::{agglomerate, cut, ClusterLabels, Linkage};
use fourtastic::dissimilarity::{
    base_dissim, dissim_matrix, tastic_dissim, weighted_euclidean, DissimilarityMatrix, Measure,
    PairAlignment,
};
use fourtastic::evaluation::{accuracy, ari, wcd};
use fourtastic::params::TravelParams;
use fourtastic::series::TimeSeries;

fn series_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (5usize..=24).prop_flat_map(|t| {
        (
            prop::collection::vec(-50.0..50.0f64, t),
            prop::collection::vec(-50.0..50.0f64, t),
        )
    })
}

fn symmetric_tilts() -> impl Strategy<Value = Vec<f64>> {
    (prop::sample::select(vec![0usize, 1, 2]), 0.001..0.3f64, 0.3..0.6f64).prop_map(
        |(halves, e1, e2)| match halves {
            0 => vec![0.0],
            1 => vec![-e1, 0.0, e1],
            _ => vec![-e2, -e1, 0.0, e1, e2],
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shrinkage_self_distance_and_symmetry(
        (xv, yv) in series_pair(),
        l_max in 0usize..=3,
        tilts in symmetric_tilts(),
        alpha in 0.0..=1.0f64,
        penalty in 0.0..=1.0f64,
    ) {
        let params = TravelParams::new(l_max, tilts, penalty, alpha).unwrap();
        let x = TimeSeries::new("x", xv.clone()).unwrap();
        let y = TimeSeries::new("y", yv).unwrap();

        let d = tastic_dissim(&x, &y, &params).unwrap();
        let base = base_dissim(
            x.values(), y.values(), 0, PairAlignment::XBackwardYForward, 0.0, &params,
        ).unwrap();
        prop_assert!(d <= base, "shrinkage: {d} > {base}");

        prop_assert_eq!(tastic_dissim(&x, &x, &params).unwrap(), 0.0);

        let forward = tastic_dissim(&x, &y, &params).unwrap();
        let backward = tastic_dissim(&y, &x, &params).unwrap();
        prop_assert_eq!(forward.to_bits(), backward.to_bits());

        prop_assert!(d >= 0.0);
    }

    #[test]
    fn monotone_in_search_space(
        (xv, yv) in series_pair(),
        l_max in 0usize..=2,
        tilts in symmetric_tilts(),
        alpha in 0.0..=1.0f64,
        extra in 0.31..0.5f64,
    ) {
        let x = TimeSeries::new("x", xv).unwrap();
        let y = TimeSeries::new("y", yv).unwrap();
        let small = TravelParams::new(l_max, tilts.clone(), 0.2, alpha).unwrap();
        let longer = TravelParams::new(l_max + 1, tilts.clone(), 0.2, alpha).unwrap();
        let mut more_tilts = tilts.clone();
        more_tilts.push(extra);
        let wider = TravelParams::new(l_max, more_tilts, 0.2, alpha).unwrap();

        let d_small = tastic_dissim(&x, &y, &small).unwrap();
        prop_assert!(tastic_dissim(&x, &y, &longer).unwrap() <= d_small);
        prop_assert!(tastic_dissim(&x, &y, &wider).unwrap() <= d_small);
    }

    #[test]
    fn alpha_extremes_reduce_to_components(
        (xv, yv) in series_pair(),
    ) {
        let x = TimeSeries::new("x", xv.clone()).unwrap();
        let y = TimeSeries::new("y", yv.clone()).unwrap();
        // alpha = 0 with no travel is exactly the RMS difference.
        let rms_only = TravelParams::new(0, vec![0.0], 0.0, 0.0).unwrap();
        prop_assert_eq!(
            tastic_dissim(&x, &y, &rms_only).unwrap().to_bits(),
            weighted_euclidean(&xv, &yv).unwrap().to_bits()
        );
        // alpha = 1 ignores the Euclidean term: adding a constant level to y
        // leaves the dissimilarity unchanged.
        let corr_only = TravelParams::new(1, vec![-0.05, 0.0, 0.05], 0.3, 1.0).unwrap();
        let shifted: Vec<f64> = yv.iter().map(|v| v + 100.0).collect();
        let y_shifted = TimeSeries::new("ys", shifted).unwrap();
        let a = tastic_dissim(&x, &y, &corr_only).unwrap();
        let b = tastic_dissim(&x, &y_shifted, &corr_only).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn penalty_pulls_correlation_term_toward_one(
        (xv, yv) in series_pair(),
        eps in 0.01..0.4f64,
    ) {
        let grid = [0.0, 0.5, 1.0, 2.0, 5.0];
        // Fixed alignment (l = 0, tilt eps on y), alpha = 1: the candidate is
        // 1 - exp(-C*eps)*corr, monotone in C toward 1.
        let mut prev: Option<f64> = None;
        let corr_sign = {
            let params = TravelParams::new(0, vec![0.0, eps], 0.0, 1.0).unwrap();
            let v = base_dissim(&xv, &yv, 0, PairAlignment::XBackwardYForward, eps, &params).unwrap();
            1.0 - v // equals corr at C = 0
        };
        for c in grid {
            let params = TravelParams::new(0, vec![0.0, eps], c, 1.0).unwrap();
            let v = base_dissim(&xv, &yv, 0, PairAlignment::XBackwardYForward, eps, &params).unwrap();
            if let Some(p) = prev {
                if corr_sign > 0.0 {
                    prop_assert!(v >= p, "positive corr: term must rise with C");
                } else if corr_sign < 0.0 {
                    prop_assert!(v <= p, "negative corr: term must fall with C");
                }
            }
            prop_assert!((v - 1.0).abs() <= 1.0 + 1e-12);
            prev = Some(v);
        }
    }

    #[test]
    fn cuts_partition_and_nest(
        n in 3usize..=10,
        seed in 0u64..500,
    ) {
        let m = random_matrix(seed, n);
        let d = agglomerate(&m, Linkage::Average).unwrap();
        let mut previous: Option<ClusterLabels> = None;
        for k in (1..=n).rev() {
            let labels = cut(&d, k).unwrap();
            prop_assert_eq!(labels.k(), k);
            prop_assert_eq!(labels.n(), n);
            // Finer cuts refine coarser ones: same label at k+1 implies the
            // same label at k.
            if let Some(finer) = &previous {
                for i in 0..n {
                    for j in 0..n {
                        if finer.assignments()[i] == finer.assignments()[j] {
                            prop_assert_eq!(labels.assignments()[i], labels.assignments()[j]);
                        }
                    }
                }
            }
            previous = Some(labels);
        }
    }

    #[test]
    fn matrix_entries_bounded_by_blend_range(
        seed in 0u64..200,
        alpha in 0.0..=1.0f64,
    ) {
        let data = random_series(seed, 6, 10, 0.0, 20.0);
        let params = TravelParams::new(2, vec![-0.05, 0.0, 0.05], 0.5, alpha).unwrap();
        let m = dissim_matrix(&data, &params, Measure::Tastic).unwrap();
        let mut max_rms = 0.0f64;
        for i in 0..data.len() {
            for j in (i + 1)..data.len() {
                max_rms = max_rms.max(
                    weighted_euclidean(data[i].values(), data[j].values()).unwrap(),
                );
            }
        }
        let bound = 2.0 * alpha + (1.0 - alpha) * max_rms;
        for &v in m.entries() {
            prop_assert!(v >= 0.0);
            prop_assert!(v <= bound + 1e-12, "{v} > {bound}");
        }
    }

    #[test]
    fn ari_and_accuracy_label_invariance(
        assignment in prop::collection::vec(1usize..=4, 8..=20),
        perm_seed in 0u64..100,
    ) {
        let pred = ClusterLabels::from_tokens(&assignment).unwrap();
        let truth_tokens: Vec<usize> = assignment.iter().map(|a| (a * 7 + 1) % 3).collect();
        let truth = ClusterLabels::from_tokens(&truth_tokens).unwrap();

        let base_ari = ari(&pred, &truth).unwrap();
        let base_acc = accuracy(&pred, &truth).unwrap();

        let renamed_pred = rename_labels(&pred, perm_seed);
        let renamed_truth = rename_labels(&truth, perm_seed.wrapping_add(1));
        prop_assert_eq!(ari(&renamed_pred, &renamed_truth).unwrap(), base_ari);
        prop_assert_eq!(accuracy(&renamed_pred, &renamed_truth).unwrap(), base_acc);

        prop_assert_eq!(ari(&pred, &pred).unwrap(), 1.0);
        prop_assert_eq!(accuracy(&pred, &pred).unwrap(), 1.0);
        if pred.k() == truth.k() {
            prop_assert_eq!(
                accuracy(&pred, &truth).unwrap(),
                accuracy(&truth, &pred).unwrap()
            );
        }
    }

    #[test]
    fn accuracy_matches_factorial_oracle(
        assignment in prop::collection::vec(1usize..=5, 6..=16),
        truth_tokens in prop::collection::vec(1usize..=5, 6..=16),
    ) {
        let n = assignment.len().min(truth_tokens.len());
        let pred = ClusterLabels::from_tokens(&assignment[..n]).unwrap();
        let truth = ClusterLabels::from_tokens(&truth_tokens[..n]).unwrap();
        let expected = factorial_accuracy(&pred, &truth);
        prop_assert_eq!(accuracy(&pred, &truth).unwrap(), expected);
    }

    #[test]
    fn wcd_is_additive_over_clusters(
        n in 4usize..=12,
        seed in 0u64..200,
        assignment in prop::collection::vec(1usize..=3, 12),
    ) {
        let m = random_matrix(seed, n);
        let labels = ClusterLabels::from_tokens(&assignment[..n]).unwrap();
        let total = wcd(&m, &labels).unwrap();
        let mut per_cluster_sum = 0.0;
        for members in labels.members() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    per_cluster_sum += m.get(i, j);
                }
            }
        }
        prop_assert_eq!(total, per_cluster_sum);
    }

    #[test]
    fn scale_equivariance_power_of_two(
        n in 3usize..=10,
        seed in 0u64..200,
    ) {
        // Scaling by a power of two is exact in floating point, so heights
        // scale bitwise and every cut is unchanged.
        let m = random_matrix(seed, n);
        let scaled = m.scaled(4.0).unwrap();
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let d1 = agglomerate(&m, linkage).unwrap();
            let d2 = agglomerate(&scaled, linkage).unwrap();
            for (a, b) in d1.merges().iter().zip(d2.merges()) {
                prop_assert_eq!((a.a, a.b, a.new_id), (b.a, b.b, b.new_id));
                prop_assert_eq!((a.height * 4.0).to_bits(), b.height.to_bits());
            }
            for k in 1..=n {
                let before = cut(&d1, k).unwrap();
                let after = cut(&d2, k).unwrap();
                prop_assert_eq!(before.assignments(), after.assignments());
            }
        }
    }

    #[test]
    fn permutation_equivariance_via_ari(
        seed in 0u64..100,
    ) {
        let n = 9;
        let data = random_series(seed, n, 8, 0.0, 10.0);
        let params = TravelParams::preset(0.7).unwrap();
        let m = dissim_matrix(&data, &params, Measure::Tastic).unwrap();
        let labels = cut(&agglomerate(&m, Linkage::Average).unwrap(), 3).unwrap();

        // Rotate the dataset and cluster again.
        let rot = 4usize;
        let mut permuted: Vec<TimeSeries> = Vec::with_capacity(n);
        for i in 0..n {
            permuted.push(data[(i + rot) % n].clone());
        }
        let m2 = dissim_matrix(&permuted, &params, Measure::Tastic).unwrap();
        let labels2 = cut(&agglomerate(&m2, Linkage::Average).unwrap(), 3).unwrap();

        // Map the permuted labels back to the original order and compare.
        let mut unrotated = vec![0usize; n];
        for i in 0..n {
            unrotated[(i + rot) % n] = labels2.assignments()[i];
        }
        let unrotated = ClusterLabels::from_tokens(&unrotated).unwrap();
        prop_assert_eq!(ari(&labels, &unrotated).unwrap(), 1.0);
    }
}

fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ((*state >> 11) as f64) / (1u64 << 53) as f64
}

fn random_matrix(seed: u64, n: usize) -> DissimilarityMatrix {
    let mut state = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(1);
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.05 + lcg(&mut state);
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    DissimilarityMatrix::from_entries(n, e, "random".into()).unwrap()
}

fn random_series(seed: u64, n: usize, t: usize, lo: f64, hi: f64) -> Vec<TimeSeries> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
    (0..n)
        .map(|i| {
            let v: Vec<f64> = (0..t).map(|_| lo + (hi - lo) * lcg(&mut state)).collect();
            TimeSeries::new(format!("s{i}"), v).unwrap()
        })
        .collect()
}

fn rename_labels(labels: &ClusterLabels, seed: u64) -> ClusterLabels {
    let k = labels.k();
    let mut perm: Vec<usize> = (1..=k).collect();
    let mut state = seed.wrapping_add(11);
    for i in (1..k).rev() {
        let j = (lcg(&mut state) * (i + 1) as f64) as usize;
        perm.swap(i, j.min(i));
    }
    let renamed: Vec<usize> = labels.assignments().iter().map(|&a| perm[a - 1]).collect();
    ClusterLabels::from_tokens(&renamed).unwrap()
}

/// Exhaustive maximum over all injective mappings of predicted labels to
/// truth labels (k <= 5 keeps the factorial small).
fn factorial_accuracy(pred: &ClusterLabels, truth: &ClusterLabels) -> f64 {
    let k = pred.k();
    let kk = truth.k();
    let mut counts = vec![vec![0usize; kk]; k];
    for (&p, &t) in pred.assignments().iter().zip(truth.assignments()) {
        counts[p - 1][t - 1] += 1;
    }
    let dim = k.max(kk);
    let mut targets: Vec<usize> = (0..dim).collect();
    let mut best = 0usize;
    permute(&mut targets, 0, &mut |perm| {
        let mut total = 0usize;
        for (i, row) in counts.iter().enumerate() {
            let j = perm[i];
            if j < kk {
                total += row[j];
            }
        }
        best = best.max(total);
    });
    best as f64 / pred.n() as f64
}

fn permute(items: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}
