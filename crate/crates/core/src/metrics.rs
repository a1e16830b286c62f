//! Ranking and stability metrics: AUC, the Kolmogorov–Smirnov statistic and
//! the population stability index.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Floor applied to PSI bin fractions before taking logs.
pub const PSI_EPSILON: f64 = 1e-6;

/// Bins used when PSI is computed directly from scores.
pub const PSI_DEFAULT_BINS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub label: u8,
    pub score: f64,
    pub weight: f64,
}

impl ScoredSample {
    pub fn new(label: u8, score: f64) -> Self {
        Self {
            label,
            score,
            weight: 1.0,
        }
    }

    pub fn weighted(label: u8, score: f64, weight: f64) -> Self {
        Self { label, score, weight }
    }
}

/// Pairs labels with scores at unit weight.
pub fn samples(labels: &[u8], scores: &[f64]) -> Vec<ScoredSample> {
    assert_eq!(labels.len(), scores.len(), "labels and scores must align");
    labels
        .iter()
        .zip(scores)
        .map(|(&l, &s)| ScoredSample::new(l, s))
        .collect()
}

fn validate(samples: &[ScoredSample]) -> Result<(f64, f64)> {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for s in samples {
        if !s.score.is_finite() {
            return Err(Error::Contract(format!("non-finite score {}", s.score)));
        }
        if !(s.weight.is_finite() && s.weight >= 0.0) {
            return Err(Error::Contract(format!("invalid weight {}", s.weight)));
        }
        match s.label {
            0 => neg += s.weight,
            1 => pos += s.weight,
            other => return Err(Error::Contract(format!("label {other} is not 0 or 1"))),
        }
    }
    if pos <= 0.0 || neg <= 0.0 {
        return Err(Error::DegenerateLabels(
            "both classes must be present with positive weight".into(),
        ));
    }
    Ok((pos, neg))
}

/// Sorted copy plus the boundaries of each run of tied scores.
fn tie_groups(samples: &[ScoredSample]) -> (Vec<ScoredSample>, Vec<(usize, usize)>) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    let mut groups = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end].score == sorted[start].score {
            end += 1;
        }
        groups.push((start, end));
        start = end;
    }
    (sorted, groups)
}

/// Probability that a random positive outranks a random negative, ties counting 1/2.
/// Weights multiply pair counts.
pub fn auc(samples: &[ScoredSample]) -> Result<f64> {
    let (pos_total, neg_total) = validate(samples)?;
    let (sorted, groups) = tie_groups(samples);
    let mut neg_below = 0.0;
    let mut numerator = 0.0;
    for (start, end) in groups {
        let (mut pos, mut neg) = (0.0, 0.0);
        for s in &sorted[start..end] {
            if s.label == 1 {
                pos += s.weight;
            } else {
                neg += s.weight;
            }
        }
        numerator += pos * (neg_below + 0.5 * neg);
        neg_below += neg;
    }
    Ok(numerator / (pos_total * neg_total))
}

/// Unit-weight AUC over parallel label/score slices.
pub fn auc_scores(labels: &[u8], scores: &[f64]) -> Result<f64> {
    auc(&samples(labels, scores))
}

/// Largest gap between the empirical score CDFs of the two classes.
pub fn ks_statistic(samples: &[ScoredSample]) -> Result<f64> {
    let (pos_total, neg_total) = validate(samples)?;
    let (sorted, groups) = tie_groups(samples);
    let (mut pos_cum, mut neg_cum, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for (start, end) in groups {
        for s in &sorted[start..end] {
            if s.label == 1 {
                pos_cum += s.weight;
            } else {
                neg_cum += s.weight;
            }
        }
        best = best.max((pos_cum / pos_total - neg_cum / neg_total).abs());
    }
    Ok(best.min(1.0))
}

/// Population stability index, `Σ (a − e) · ln(a / e)` with both sides floored at [`PSI_EPSILON`].
pub fn psi(expected: &[f64], actual: &[f64]) -> Result<f64> {
    if expected.len() != actual.len() {
        return Err(Error::Contract(format!(
            "PSI bin count mismatch: {} expected vs {} actual",
            expected.len(),
            actual.len()
        )));
    }
    if expected.is_empty() {
        return Err(Error::Contract("PSI needs at least one bin".into()));
    }
    for (side, h) in [("expected", expected), ("actual", actual)] {
        if h.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::Contract(format!("{side} fractions must be non-negative")));
        }
        let total: f64 = h.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Contract(format!("{side} fractions sum to {total}, not 1")));
        }
    }
    Ok(expected
        .iter()
        .zip(actual)
        .map(|(&e, &a)| {
            let e = e.max(PSI_EPSILON);
            let a = a.max(PSI_EPSILON);
            (a - e) * (a / e).ln()
        })
        .sum())
}

/// PSI of raw score samples, binned at equal-frequency cut points of `expected`.
pub fn psi_from_scores(expected: &[f64], actual: &[f64], bins: usize) -> Result<f64> {
    if expected.is_empty() || actual.is_empty() || bins == 0 {
        return Err(Error::Contract("PSI needs non-empty samples and bins".into()));
    }
    let mut sorted = expected.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cuts: Vec<f64> = (1..bins)
        .map(|b| sorted[(b * sorted.len() / bins).min(sorted.len() - 1)])
        .collect();
    let histogram = |xs: &[f64]| {
        let mut counts = vec![0usize; bins];
        for &x in xs {
            counts[cuts.partition_point(|&c| c <= x)] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / xs.len() as f64)
            .collect::<Vec<_>>()
    };
    psi(&histogram(expected), &histogram(actual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_small_cases() {
        assert_eq!(auc_scores(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap(), 0.75);
        assert_eq!(auc_scores(&[0, 1, 0, 1], &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(auc_scores(&[0, 0, 1, 1], &[0.1, 0.2, 0.3, 0.4]).unwrap(), 1.0);
    }

    #[test]
    fn auc_weights_multiply_pairs() {
        // one positive at weight 3 above one negative, one positive at weight 1 below it
        let s = [
            ScoredSample::weighted(1, 0.9, 3.0),
            ScoredSample::weighted(0, 0.5, 1.0),
            ScoredSample::weighted(1, 0.1, 1.0),
        ];
        assert_eq!(auc(&s).unwrap(), 0.75);
    }

    #[test]
    fn single_class_is_degenerate() {
        assert!(matches!(
            auc_scores(&[1, 1], &[0.1, 0.2]),
            Err(Error::DegenerateLabels(_))
        ));
        assert!(matches!(
            ks_statistic(&samples(&[0], &[0.1])),
            Err(Error::DegenerateLabels(_))
        ));
    }

    #[test]
    fn ks_cases() {
        assert_eq!(ks_statistic(&samples(&[0, 1], &[0.2, 0.8])).unwrap(), 1.0);
        assert_eq!(
            ks_statistic(&samples(&[0, 0, 1, 1], &[0.1, 0.6, 0.4, 0.9])).unwrap(),
            0.5
        );
        assert_eq!(
            ks_statistic(&samples(&[0, 1, 0, 1], &[0.3, 0.3, 0.7, 0.7])).unwrap(),
            0.0
        );
    }

    #[test]
    fn psi_cases() {
        assert_eq!(psi(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]).unwrap(), 0.0);
        let expected = -0.25 * 0.5f64.ln() + 0.25 * 1.5f64.ln();
        let got = psi(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.2747).abs() < 1e-4);
        let floored = psi(&[0.5, 0.5], &[0.0, 1.0]).unwrap();
        assert!(floored.is_finite() && floored > 0.0);
        assert!(matches!(psi(&[1.0], &[0.5, 0.5]), Err(Error::Contract(_))));
    }

    #[test]
    fn psi_is_symmetric() {
        let e = [0.1, 0.2, 0.7];
        let a = [0.4, 0.4, 0.2];
        let (ea, ae) = (psi(&e, &a).unwrap(), psi(&a, &e).unwrap());
        assert!((ea - ae).abs() < 1e-15);
    }

    #[test]
    fn psi_from_scores_identical_samples() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(psi_from_scores(&xs, &xs, PSI_DEFAULT_BINS).unwrap(), 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!(psi_from_scores(&xs, &shifted, PSI_DEFAULT_BINS).unwrap() > 0.1);
    }
}
