use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::adversarial::AdversarialReport;
use crate::cv::stratified_folds;
use crate::dataset::{MonthStamp, TabularDataset};
use crate::{Error, Result};

/// One train/validation split, as sorted row ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train_rows: Vec<u64>,
    pub valid_rows: Vec<u64>,
}

/// Per-fold train/validation row sets plus optional fitting weights. Every
/// strategy produces one of these and [`execute_plan`](super::execute_plan) consumes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingPlan {
    pub folds: Vec<Fold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<u64, f64>>,
    pub strategy_tag: String,
    pub param_tag: String,
}

impl TrainingPlan {
    /// Checks disjointness, non-empty validation, and weight coverage.
    pub fn validate(&self) -> Result<()> {
        if self.folds.is_empty() {
            return Err(Error::Contract("plan has no folds".into()));
        }
        for (i, fold) in self.folds.iter().enumerate() {
            if fold.valid_rows.is_empty() {
                return Err(Error::Contract(format!("fold {i} has no validation rows")));
            }
            if fold.train_rows.is_empty() {
                return Err(Error::Contract(format!("fold {i} has no training rows")));
            }
            let train: HashSet<u64> = fold.train_rows.iter().copied().collect();
            if let Some(id) = fold.valid_rows.iter().find(|id| train.contains(id)) {
                return Err(Error::Contract(format!("fold {i}: row {id} in both train and validation")));
            }
            if let Some(w) = &self.weights {
                if let Some(id) = fold.train_rows.iter().find(|id| !w.contains_key(id)) {
                    return Err(Error::Contract(format!("fold {i}: no weight for training row {id}")));
                }
            }
        }
        Ok(())
    }

    /// Same folds and weights, ignoring tags.
    pub fn same_structure(&self, other: &TrainingPlan) -> bool {
        self.folds == other.folds && self.weights == other.weights
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: TrainingPlan = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }
}

/// Stratified k-fold over the rows at `positions`, with `extra_train` ids added
/// to every fold's training side.
fn kfold(
    train: &TabularDataset,
    positions: &[usize],
    extra_train: &[u64],
    k: usize,
    seed: u64,
) -> Result<Vec<Fold>> {
    let labels = train.require_labels()?;
    let ids: Vec<u64> = positions.iter().map(|&p| train.row_ids()[p]).collect();
    let strata: Vec<u8> = positions.iter().map(|&p| labels[p]).collect();
    let folds = stratified_folds(&ids, &strata, k, seed)?;
    Ok((0..k)
        .map(|f| {
            let mut valid_rows = Vec::new();
            let mut train_rows: Vec<u64> = extra_train.to_vec();
            for (&id, &fold) in ids.iter().zip(&folds) {
                if fold == f {
                    valid_rows.push(id);
                } else {
                    train_rows.push(id);
                }
            }
            valid_rows.sort_unstable();
            train_rows.sort_unstable();
            Fold {
                train_rows,
                valid_rows,
            }
        })
        .collect())
}

/// Stratified k-fold over every row; the all-data benchmark.
pub fn baseline_cv_plan(train: &TabularDataset, k: usize, seed: u64) -> Result<TrainingPlan> {
    if train.is_empty() {
        return Err(Error::EmptyInput("training set is empty".into()));
    }
    let all: Vec<usize> = (0..train.n_rows()).collect();
    Ok(TrainingPlan {
        folds: kfold(train, &all, &[], k, seed)?,
        weights: None,
        strategy_tag: "baseline".into(),
        param_tag: "all".into(),
    })
}

/// Drops rows before `start`, then stratified k-fold over the rest.
pub fn chrono_cv_plan(train: &TabularDataset, start: MonthStamp, k: usize, seed: u64) -> Result<TrainingPlan> {
    let months = train.require_months()?;
    let kept: Vec<usize> = (0..train.n_rows()).filter(|&i| months[i] >= start).collect();
    if kept.is_empty() {
        return Err(Error::EmptySelection(format!("no rows at or after {start}")));
    }
    Ok(TrainingPlan {
        folds: kfold(train, &kept, &[], k, seed)?,
        weights: None,
        strategy_tag: "chrono-cv".into(),
        param_tag: start.compact(),
    })
}

/// Single fold: train on `[range_start, valid_start)`, validate on `[valid_start, end]`.
pub fn chrono_holdout_plan(
    train: &TabularDataset,
    range_start: MonthStamp,
    valid_start: MonthStamp,
) -> Result<TrainingPlan> {
    let months = train.require_months()?;
    let mut train_rows = Vec::new();
    let mut valid_rows = Vec::new();
    for (i, &m) in months.iter().enumerate() {
        let id = train.row_ids()[i];
        if m >= valid_start {
            valid_rows.push(id);
        } else if m >= range_start {
            train_rows.push(id);
        }
    }
    if train_rows.is_empty() {
        return Err(Error::EmptySelection(format!(
            "no training rows in [{range_start}, {valid_start})"
        )));
    }
    if valid_rows.is_empty() {
        return Err(Error::EmptySelection(format!("no validation rows from {valid_start}")));
    }
    train_rows.sort_unstable();
    valid_rows.sort_unstable();
    Ok(TrainingPlan {
        folds: vec![Fold {
            train_rows,
            valid_rows,
        }],
        weights: None,
        strategy_tag: "chrono-holdout".into(),
        param_tag: format!("{}|{}", range_start.compact(), valid_start.compact()),
    })
}

/// `p_test` for every training row, in dataset order.
fn report_probabilities(train: &TabularDataset, report: &AdversarialReport) -> Result<Vec<f64>> {
    let mut missing = Vec::new();
    let probs: Vec<f64> = train
        .row_ids()
        .iter()
        .map(|&id| {
            report.p_test(id).unwrap_or_else(|| {
                missing.push(id);
                f64::NAN
            })
        })
        .collect();
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(10).map(u64::to_string).collect();
        return Err(Error::Contract(format!(
            "adversarial report lacks {} training rows (e.g. {})",
            missing.len(),
            shown.join(", ")
        )));
    }
    Ok(probs)
}

/// Baseline folds, with each row weighted by its out-of-fold `p_test` during fitting.
pub fn weighted_plan(
    train: &TabularDataset,
    report: &AdversarialReport,
    k: usize,
    seed: u64,
) -> Result<TrainingPlan> {
    let probs = report_probabilities(train, report)?;
    let mut plan = baseline_cv_plan(train, k, seed)?;
    plan.weights = Some(train.row_ids().iter().copied().zip(probs).collect());
    plan.strategy_tag = "weighted".into();
    plan.param_tag = "p_test".into();
    Ok(plan)
}

/// Number of rows retained for a keep fraction: `ceil(keep * n)`, with a
/// tolerance so that e.g. `0.15 * 100` keeps 15 rather than 16.
pub fn retained_count(keep_fraction: f64, n: usize) -> usize {
    let exact = keep_fraction * n as f64;
    let rounded = exact.round();
    let m = if (exact - rounded).abs() < 1e-9 { rounded } else { exact.ceil() };
    (m as usize).min(n)
}

/// Splits rows into the `ceil(keep * n)` most test-like positions (by `p_test`
/// descending, ties by row id) and the rest.
fn split_by_rank(
    train: &TabularDataset,
    report: &AdversarialReport,
    keep_fraction: f64,
    k: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::Contract(format!("keep fraction {keep_fraction} outside (0, 1]")));
    }
    let probs = report_probabilities(train, report)?;
    let ids = train.row_ids();
    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(ids[a].cmp(&ids[b])));
    let m = retained_count(keep_fraction, order.len());
    if m < k {
        return Err(Error::Contract(format!(
            "keeping {m} rows leaves fewer than k = {k} for cross-validation"
        )));
    }
    let rest = order.split_off(m);
    order.sort_unstable();
    Ok((order, rest))
}

/// Keeps only the most test-like rows and cross-validates on them.
pub fn filtered_cv_plan(
    train: &TabularDataset,
    report: &AdversarialReport,
    keep_fraction: f64,
    k: usize,
    seed: u64,
) -> Result<TrainingPlan> {
    let (kept, _) = split_by_rank(train, report, keep_fraction, k)?;
    Ok(TrainingPlan {
        folds: kfold(train, &kept, &[], k, seed)?,
        weights: None,
        strategy_tag: "filtered".into(),
        param_tag: format!("{keep_fraction:.2}"),
    })
}

/// Cross-validates on the most test-like rows while adding all other rows to
/// every fold's training side; those rows are never validated on.
pub fn augmented_cv_plan(
    train: &TabularDataset,
    report: &AdversarialReport,
    keep_fraction: f64,
    k: usize,
    seed: u64,
) -> Result<TrainingPlan> {
    let (kept, rest) = split_by_rank(train, report, keep_fraction, k)?;
    let rest_ids: Vec<u64> = rest.iter().map(|&p| train.row_ids()[p]).collect();
    Ok(TrainingPlan {
        folds: kfold(train, &kept, &rest_ids, k, seed)?,
        weights: None,
        strategy_tag: "augmented".into(),
        param_tag: format!("{keep_fraction:.2}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retained_count_edges() {
        assert_eq!(retained_count(1.0, 10), 10);
        assert_eq!(retained_count(0.15, 100), 15);
        assert_eq!(retained_count(0.5, 3), 2);
        assert_eq!(retained_count(0.05, 1), 1);
        assert_eq!(retained_count(0.6, 10), 6);
    }
}
