use driftgate::metrics::{auc, auc_scores, ks_statistic, psi, psi_from_scores, samples, ScoredSample};
use driftgate::Error;
use proptest::prelude::*;

/// Pairwise Mann-Whitney count with half credit for ties.
fn brute_auc(labels: &[u8], scores: &[f64], weights: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i] == 1 && labels[j] == 0 {
                let w = weights[i] * weights[j];
                den += w;
                if scores[i] > scores[j] {
                    num += w;
                } else if scores[i] == scores[j] {
                    num += 0.5 * w;
                }
            }
        }
    }
    num / den
}

fn labelled_scores() -> impl Strategy<Value = (Vec<u8>, Vec<f64>)> {
    (2usize..120).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..=1, n),
            prop::collection::vec((0i32..15).prop_map(|v| v as f64 / 4.0), n),
        )
    })
    .prop_filter("both classes", |(l, _)| l.contains(&0) && l.contains(&1))
}

proptest! {
    #[test]
    fn auc_matches_pairwise_count((labels, scores) in labelled_scores()) {
        let ones = vec![1.0; labels.len()];
        let got = auc_scores(&labels, &scores).unwrap();
        prop_assert!((got - brute_auc(&labels, &scores, &ones)).abs() < 1e-12);
    }

    #[test]
    fn weighted_auc_matches_pairwise_count(
        (labels, scores) in labelled_scores(),
        seed in any::<u64>(),
    ) {
        let weights: Vec<f64> = (0..labels.len()).map(|i| 1.0 + ((seed >> (i % 60)) & 3) as f64).collect();
        let s: Vec<ScoredSample> = labels.iter().zip(&scores).zip(&weights)
            .map(|((&l, &sc), &w)| ScoredSample::weighted(l, sc, w)).collect();
        prop_assert!((auc(&s).unwrap() - brute_auc(&labels, &scores, &weights)).abs() < 1e-12);
    }

    #[test]
    fn negating_scores_mirrors_auc((labels, scores) in labelled_scores()) {
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let a = auc_scores(&labels, &scores).unwrap();
        let b = auc_scores(&labels, &neg).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_is_a_fraction((labels, scores) in labelled_scores()) {
        let ks = ks_statistic(&samples(&labels, &scores)).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks));
    }

    #[test]
    fn psi_of_identical_shares_is_zero(raw in prop::collection::vec(0.01f64..1.0, 2..20)) {
        let total: f64 = raw.iter().sum();
        let shares: Vec<f64> = raw.iter().map(|v| v / total).collect();
        prop_assert_eq!(psi(&shares, &shares).unwrap(), 0.0);
    }
}

#[test]
fn auc_hand_case() {
    assert_eq!(auc_scores(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap(), 0.75);
    assert_eq!(auc_scores(&[0, 1], &[0.3, 0.3]).unwrap(), 0.5);
}

#[test]
fn auc_single_class_is_an_error() {
    assert!(matches!(auc_scores(&[1, 1], &[0.1, 0.2]), Err(Error::DegenerateLabels(_))));
}

#[test]
fn ks_hand_cases() {
    assert_eq!(ks_statistic(&samples(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9])).unwrap(), 1.0);
    assert_eq!(ks_statistic(&samples(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8])).unwrap(), 0.5);
}

#[test]
fn psi_hand_case() {
    let v = psi(&[0.25; 4], &[0.1, 0.2, 0.3, 0.4]).unwrap();
    let oracle: f64 = [0.1f64, 0.2, 0.3, 0.4].iter().map(|a| (a - 0.25) * (a / 0.25).ln()).sum();
    assert!((v - oracle).abs() < 1e-15);
}

#[test]
fn psi_rejects_bad_distributions() {
    assert!(psi(&[0.5, 0.5], &[0.5]).is_err());
    assert!(psi(&[0.5, 0.6], &[0.5, 0.5]).is_err());
    assert!(psi(&[1.5, -0.5], &[0.5, 0.5]).is_err());
}

#[test]
fn psi_from_identical_scores_is_zero() {
    let s: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64).collect();
    assert_eq!(psi_from_scores(&s, &s, 10).unwrap(), 0.0);
}
