use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::TrainingPlan;
use crate::dataset::TabularDataset;
use crate::gbdt::{fit, BoostParams, BoostedModel};
use crate::metrics::auc_scores;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    /// Unweighted validation AUC of each fold model at its best iteration.
    pub per_fold_valid_auc: Vec<f64>,
    pub mean_valid_auc: f64,
    /// AUC of the fold-averaged test probabilities.
    pub test_auc: f64,
    pub models: Vec<BoostedModel>,
    pub plan: TrainingPlan,
    /// Fold-averaged test probabilities, in test row order.
    pub test_predictions: Vec<f64>,
}

impl StrategyOutcome {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Fits one early-stopped model per fold and scores `test` with the mean of the
/// fold models' probabilities.
pub fn execute_plan(
    plan: &TrainingPlan,
    train: &TabularDataset,
    test: &TabularDataset,
    params: &BoostParams,
) -> Result<StrategyOutcome> {
    plan.validate()?;
    let test_labels = test.require_labels()?;
    if !train.schema().same_features(test.schema()) {
        return Err(Error::Schema("train and test feature schemas differ".into()));
    }

    let fitted: Vec<Result<(f64, Vec<f64>, BoostedModel)>> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let fold_err = |e: Error| match e {
                Error::DegenerateLabels(m) => Error::Fold { fold: f, message: m },
                other => other.context(format!("fold {f}")),
            };
            let train_ds = train.select_ids(&fold.train_rows).map_err(fold_err)?;
            let valid_ds = train.select_ids(&fold.valid_rows).map_err(fold_err)?.without_weights();
            let weights: Option<Vec<f64>> = plan
                .weights
                .as_ref()
                .map(|w| fold.train_rows.iter().map(|id| w[id]).collect());
            let model = fit(&train_ds, Some(&valid_ds), params, weights.as_deref()).map_err(fold_err)?;
            let valid_auc = auc_scores(valid_ds.require_labels()?, &model.predict_raw(&valid_ds)?).map_err(fold_err)?;
            let test_pred = model.predict_score(test)?;
            Ok((valid_auc, test_pred, model))
        })
        .collect();

    let mut per_fold_valid_auc = Vec::with_capacity(plan.folds.len());
    let mut test_preds = Vec::with_capacity(plan.folds.len());
    let mut models = Vec::with_capacity(plan.folds.len());
    for r in fitted {
        let (auc, pred, model) = r?;
        per_fold_valid_auc.push(auc);
        test_preds.push(pred);
        models.push(model);
    }

    // summing sorted values keeps the mean independent of fold order
    let k = test_preds.len() as f64;
    let mut buf = vec![0.0; test_preds.len()];
    let test_predictions: Vec<f64> = (0..test.n_rows())
        .map(|i| {
            for (b, p) in buf.iter_mut().zip(&test_preds) {
                *b = p[i];
            }
            buf.sort_by(f64::total_cmp);
            buf.iter().sum::<f64>() / k
        })
        .collect();
    let test_auc = auc_scores(test_labels, &test_predictions)?;
    let mean_valid_auc = per_fold_valid_auc.iter().sum::<f64>() / per_fold_valid_auc.len() as f64;

    Ok(StrategyOutcome {
        per_fold_valid_auc,
        mean_valid_auc,
        test_auc,
        models,
        plan: plan.clone(),
        test_predictions,
    })
}
