use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binning::{bin_dataset, category_remap, fit_mappers, BinMapper};
use super::grow::{grow_tree, FeatureKind, FeatureLayout, GradPair, GrowConfig};
use super::params::BoostParams;
use super::sigmoid;
use super::tree::{SplitRule, Tree};
use crate::cv::{keyed_hash, keyed_uniform};
use crate::dataset::{Column, ColumnKind, TabularDataset, UNKNOWN_CATEGORY};
use crate::metrics::auc_scores;
use crate::{Error, Result};

const BAG_STREAM: u64 = 0xBA66;
const COLUMN_STREAM: u64 = 0xC015;

/// A feature as the model saw it during training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFeature {
    pub name: String,
    pub kind: ColumnKind,
    /// Category strings by model id (categorical features only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

/// A trained boosted-tree ensemble for binary classification.
///
/// JSON layout: `features`, `base_score` (log-odds), `best_iteration`,
/// `trees` (each a node list; node 0 is the root; leaf values are already
/// scaled by the learning rate) and the per-round validation AUC history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub features: Vec<ModelFeature>,
    pub base_score: f64,
    pub best_iteration: usize,
    pub trees: Vec<Tree>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub valid_auc_history: Vec<f64>,
}

/// Fits a logistic-loss boosted ensemble.
///
/// `weights` overrides any weights carried by `train`. With a validation set,
/// training stops once validation AUC has not improved for
/// `early_stopping_rounds` rounds and `best_iteration` marks the best round.
pub fn fit(
    train: &TabularDataset,
    valid: Option<&TabularDataset>,
    params: &BoostParams,
    weights: Option<&[f64]>,
) -> Result<BoostedModel> {
    params.validate()?;
    let labels = train.require_labels()?;
    let n = train.n_rows();
    let weights: Vec<f64> = match weights.or(train.weights()) {
        Some(w) => {
            if w.len() != n {
                return Err(Error::Contract(format!("{} weights for {n} training rows", w.len())));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Contract("weights must be finite and non-negative".into()));
            }
            w.to_vec()
        }
        None => vec![1.0; n],
    };
    let total_w: f64 = weights.iter().sum();
    if total_w <= 0.0 {
        return Err(Error::Contract("weights are all zero".into()));
    }
    let pos_w: f64 = labels.iter().zip(&weights).filter(|(l, _)| **l == 1).map(|(_, w)| w).sum();
    if pos_w <= 0.0 || pos_w >= total_w {
        return Err(Error::DegenerateLabels(
            "training labels must contain both classes with positive weight".into(),
        ));
    }
    let base_rate = pos_w / total_w;
    let base_score = (base_rate / (1.0 - base_rate)).ln();

    let names: Vec<String> = train.schema().names().map(str::to_owned).collect();
    let mappers = fit_mappers(train, params.max_bins);
    let binned = bin_dataset(train, &names, &mappers)?;
    let missing_bins: Vec<u16> = mappers.iter().map(BinMapper::missing_bin).collect();
    let kinds: Vec<FeatureKind> = mappers
        .iter()
        .map(|m| match m.kind() {
            ColumnKind::Numeric => FeatureKind::Numeric,
            ColumnKind::Categorical => FeatureKind::Categorical,
        })
        .collect();
    let upper_bounds: Vec<Vec<f64>> = mappers
        .iter()
        .map(|m| match m {
            BinMapper::Numeric { upper_bounds } => upper_bounds.clone(),
            BinMapper::Categorical { .. } => Vec::new(),
        })
        .collect();
    let layout = FeatureLayout::new(&binned.columns, &missing_bins, &kinds, &upper_bounds);

    let valid_data = match valid {
        Some(v) => {
            let vl = v.require_labels()?;
            if !vl.contains(&0) || !vl.contains(&1) {
                return Err(Error::DegenerateLabels(
                    "validation labels must contain both classes".into(),
                ));
            }
            Some((bin_dataset(v, &names, &mappers)?, vl))
        }
        None => None,
    };

    let cfg = GrowConfig {
        num_leaves: params.num_leaves,
        max_depth: params.max_depth,
        min_data_in_leaf: params.min_data_in_leaf,
        min_sum_hessian: params.min_sum_hessian_in_leaf,
        l2: params.l2_reg,
        learning_rate: params.learning_rate,
    };
    let n_features = names.len();
    let n_sampled = ((n_features as f64 * params.colsample_bytree).round() as usize).clamp(1, n_features.max(1));
    let bagging = params.subsample < 1.0 && params.subsample_freq > 0;
    let early_stopping = valid_data.is_some() && params.early_stopping_rounds > 0;

    let mut train_scores = vec![base_score; n];
    let mut valid_scores = valid_data
        .as_ref()
        .map(|(b, _)| vec![base_score; b.n_rows])
        .unwrap_or_default();
    let mut grads = vec![GradPair::default(); n];
    let mut bag: Vec<u32> = (0..n as u32).collect();
    let mut rows: Vec<u32> = Vec::with_capacity(n);
    let mut trees: Vec<Tree> = Vec::new();
    let mut history = Vec::new();
    let mut best = (f64::NEG_INFINITY, 0usize);

    for round in 0..params.num_boost_round {
        if bagging && round % params.subsample_freq == 0 {
            let epoch = (round / params.subsample_freq) as u64;
            bag = train
                .row_ids()
                .iter()
                .enumerate()
                .filter(|(_, id)| keyed_uniform(params.seed, BAG_STREAM ^ (epoch << 16), **id) < params.subsample)
                .map(|(i, _)| i as u32)
                .collect();
        }
        let features: Vec<usize> = if n_sampled < n_features {
            let mut rng = ChaCha8Rng::seed_from_u64(keyed_hash(params.seed, COLUMN_STREAM, round as u64));
            let mut f = rand::seq::index::sample(&mut rng, n_features, n_sampled).into_vec();
            f.sort_unstable();
            f
        } else {
            (0..n_features).collect()
        };

        for &r in &bag {
            let i = r as usize;
            let p = sigmoid(train_scores[i]);
            let w = weights[i];
            grads[i] = GradPair {
                g: w * (p - f64::from(labels[i])),
                h: w * p * (1.0 - p),
            };
        }
        rows.clear();
        rows.extend_from_slice(&bag);
        let Some(tree) = grow_tree(&layout, &grads, &mut rows, &features, &cfg) else {
            break;
        };

        for (i, s) in train_scores.iter_mut().enumerate() {
            *s += tree.leaf_value(tree.leaf_for_bins(&binned.columns, &missing_bins, i));
        }
        trees.push(tree);

        if let Some((vb, vl)) = &valid_data {
            let tree = trees.last().expect("just pushed");
            for (i, s) in valid_scores.iter_mut().enumerate() {
                *s += tree.leaf_value(tree.leaf_for_bins(&vb.columns, &missing_bins, i));
            }
            let auc = auc_scores(vl, &valid_scores)?;
            history.push(auc);
            if auc > best.0 {
                best = (auc, trees.len());
            } else if early_stopping && trees.len() - best.1 >= params.early_stopping_rounds {
                break;
            }
        }
    }

    let best_iteration = if early_stopping { best.1 } else { trees.len() };
    let features = names
        .into_iter()
        .zip(&mappers)
        .map(|(name, m)| ModelFeature {
            name,
            kind: m.kind(),
            categories: match m {
                BinMapper::Categorical { categories } => Some(categories.clone()),
                BinMapper::Numeric { .. } => None,
            },
        })
        .collect();
    Ok(BoostedModel {
        features,
        base_score,
        best_iteration,
        trees,
        valid_auc_history: history,
    })
}

/// Raw feature values aligned to model feature order.
enum FeatureView<'a> {
    Numeric(&'a [Option<f64>]),
    Categorical(Vec<Option<u32>>),
}

impl BoostedModel {
    fn views<'a>(&self, ds: &'a TabularDataset) -> Result<Vec<FeatureView<'a>>> {
        self.features
            .iter()
            .map(|f| {
                let col = ds
                    .column(&f.name)
                    .ok_or_else(|| Error::Schema(format!("feature `{}` missing from dataset", f.name)))?;
                match (col, f.kind) {
                    (Column::Numeric { values }, ColumnKind::Numeric) => Ok(FeatureView::Numeric(values)),
                    (Column::Categorical { codes, dictionary }, ColumnKind::Categorical) => {
                        let remap = category_remap(f.categories.as_deref().unwrap_or_default(), dictionary);
                        Ok(FeatureView::Categorical(
                            codes
                                .iter()
                                .map(|c| match c {
                                    Some(c) if *c != UNKNOWN_CATEGORY => remap.get(*c as usize).copied().flatten(),
                                    _ => None,
                                })
                                .collect(),
                        ))
                    }
                    _ => Err(Error::Schema(format!("feature `{}` has a different kind", f.name))),
                }
            })
            .collect()
    }

    /// Raw log-odds using the first `n_trees` trees.
    pub fn predict_raw_at(&self, ds: &TabularDataset, n_trees: usize) -> Result<Vec<f64>> {
        let views = self.views(ds)?;
        let trees = &self.trees[..n_trees.min(self.trees.len())];
        Ok((0..ds.n_rows())
            .map(|row| {
                let mut s = self.base_score;
                for t in trees {
                    let leaf = t.leaf_by(|f, rule, missing_left| match (&views[f], rule) {
                        (FeatureView::Numeric(v), SplitRule::Threshold { threshold, .. }) => {
                            v[row].map_or(missing_left, |x| x <= *threshold)
                        }
                        (FeatureView::Categorical(c), SplitRule::Categories { left }) => {
                            c[row].map_or(missing_left, |id| left.binary_search(&id).is_ok())
                        }
                        _ => missing_left,
                    });
                    s += t.leaf_value(leaf);
                }
                s
            })
            .collect())
    }

    pub fn predict_raw(&self, ds: &TabularDataset) -> Result<Vec<f64>> {
        self.predict_raw_at(ds, self.best_iteration)
    }

    /// Probability of label 1 per row, from the trees up to `best_iteration`.
    pub fn predict_score(&self, ds: &TabularDataset) -> Result<Vec<f64>> {
        Ok(self.predict_raw(ds)?.into_iter().map(sigmoid).collect())
    }

    pub fn predict_score_at(&self, ds: &TabularDataset, n_trees: usize) -> Result<Vec<f64>> {
        Ok(self.predict_raw_at(ds, n_trees)?.into_iter().map(sigmoid).collect())
    }

    /// Total split gain per feature over the trees used for prediction.
    pub fn feature_importance(&self) -> BTreeMap<String, f64> {
        let mut gains = vec![0.0; self.features.len()];
        for t in &self.trees[..self.best_iteration.min(self.trees.len())] {
            t.add_gains(&mut gains);
        }
        self.features.iter().map(|f| f.name.clone()).zip(gains).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: BoostedModel = serde_json::from_str(text)?;
        if model.best_iteration > model.trees.len() {
            return Err(Error::Contract("best_iteration exceeds tree count".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
