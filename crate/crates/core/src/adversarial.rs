//! Adversarial validation: label rows by origin (train = 0, test = 1),
//! cross-validate an origin classifier, and read the pooled out-of-fold AUC
//! as a shift verdict. The out-of-fold probability of each training row being
//! test-like drives the shift-aware training plans.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cv::{group_by_fold, stratified_folds};
use crate::dataset::TabularDataset;
use crate::gbdt::{fit, BoostParams};
use crate::metrics::auc_scores;
use crate::{Error, Result};

/// AUC at or above which origins count as distinguishable.
pub const DEFAULT_THRESHOLD: f64 = 0.7;
pub const DEFAULT_FOLDS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Shifted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Shifted => "shifted",
        })
    }
}

pub fn verdict(adv_auc: f64, threshold: f64) -> Verdict {
    if adv_auc >= threshold {
        Verdict::Shifted
    } else {
        Verdict::Consistent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Train,
    Test,
}

/// Train and test rows stacked with the origin as the label.
#[derive(Clone, Debug)]
pub struct AdversarialDataset {
    /// Features of both sources; label 0 = train, 1 = test; row ids are positions.
    pub data: TabularDataset,
    pub origin: Vec<Origin>,
    /// Row id each stacked row had in its source dataset.
    pub source_row_ids: Vec<u64>,
}

/// Stacks `train` then `test`, dropping their targets and month stamps.
pub fn build_adversarial_dataset(train: &TabularDataset, test: &TabularDataset) -> Result<AdversarialDataset> {
    if !train.schema().same_features(test.schema()) {
        return Err(Error::Schema("train and test feature schemas differ".into()));
    }
    let n_train = train.n_rows();
    let n_test = test.n_rows();
    let schema = train.schema().without_month()?;
    // stacked ids are positions, so sources with overlapping ids can be combined
    let strip = |ds: &TabularDataset, offset: u64| -> Result<TabularDataset> {
        TabularDataset::new(
            schema.clone(),
            ds.columns().to_vec(),
            None,
            None,
            (offset..offset + ds.n_rows() as u64).collect(),
        )
    };
    let stacked = strip(train, 0)?.concat(&strip(test, n_train as u64)?)?;
    let labels: Vec<u8> = std::iter::repeat_n(0, n_train).chain(std::iter::repeat_n(1, n_test)).collect();
    let data = stacked.with_labels(Some(labels))?;
    let origin = std::iter::repeat_n(Origin::Train, n_train)
        .chain(std::iter::repeat_n(Origin::Test, n_test))
        .collect();
    let source_row_ids = train.row_ids().iter().chain(test.row_ids()).copied().collect();
    Ok(AdversarialDataset {
        data,
        origin,
        source_row_ids,
    })
}

/// Out-of-fold origin probability of one row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowProbability {
    pub row_id: u64,
    pub p_test: f64,
    pub fold: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialReport {
    /// AUC of the pooled out-of-fold predictions against origin.
    pub adv_auc: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub k: usize,
    /// AUC within each held-out fold.
    pub fold_aucs: Vec<f64>,
    /// One entry per training row, sorted by row id.
    #[serde(skip)]
    pub per_row: Vec<RowProbability>,
    /// One entry per test row, sorted by row id.
    #[serde(skip)]
    pub test_rows: Vec<RowProbability>,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    #[serde(flatten)]
    report: AdversarialReport,
    rows_csv: String,
}

#[derive(Serialize, Deserialize)]
struct RowRecord {
    source: Origin,
    row_id: u64,
    p_test: f64,
    fold: usize,
}

impl AdversarialReport {
    /// `p_test` for a training row id.
    pub fn p_test(&self, row_id: u64) -> Option<f64> {
        self.per_row
            .binary_search_by_key(&row_id, |r| r.row_id)
            .ok()
            .map(|i| self.per_row[i].p_test)
    }

    pub fn mean_fold_auc(&self) -> f64 {
        self.fold_aucs.iter().sum::<f64>() / self.fold_aucs.len() as f64
    }

    /// Sidecar path written next to a report JSON.
    pub fn rows_path(json_path: &Path) -> PathBuf {
        json_path.with_extension("rows.csv")
    }

    /// Writes the summary JSON and a `(source, row_id, p_test, fold)` CSV sidecar.
    pub fn save(&self, json_path: &Path) -> Result<PathBuf> {
        let rows_path = Self::rows_path(json_path);
        let file = ReportFile {
            report: self.clone(),
            rows_csv: rows_path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        };
        std::fs::write(json_path, serde_json::to_string_pretty(&file)?).map_err(|e| Error::io(json_path, e))?;
        let mut w = csv::Writer::from_path(&rows_path).map_err(|e| Error::Csv(e).context(rows_path.display().to_string()))?;
        for (source, rows) in [(Origin::Train, &self.per_row), (Origin::Test, &self.test_rows)] {
            for r in rows.iter() {
                w.serialize(RowRecord {
                    source,
                    row_id: r.row_id,
                    p_test: r.p_test,
                    fold: r.fold,
                })?;
            }
        }
        w.flush().map_err(|e| Error::io(&rows_path, e))?;
        Ok(rows_path)
    }

    pub fn load(json_path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(json_path).map_err(|e| Error::io(json_path, e))?;
        let file: ReportFile = serde_json::from_str(&text)?;
        let rows_path = json_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(&file.rows_csv);
        let mut report = file.report;
        let mut rdr = csv::Reader::from_path(&rows_path).map_err(|e| Error::Csv(e).context(rows_path.display().to_string()))?;
        for rec in rdr.deserialize::<RowRecord>() {
            let rec = rec?;
            let row = RowProbability {
                row_id: rec.row_id,
                p_test: rec.p_test,
                fold: rec.fold,
            };
            match rec.source {
                Origin::Train => report.per_row.push(row),
                Origin::Test => report.test_rows.push(row),
            }
        }
        report.per_row.sort_by_key(|r| r.row_id);
        report.test_rows.sort_by_key(|r| r.row_id);
        Ok(report)
    }
}

/// Settings for [`adversarial_validate_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialConfig {
    pub k: usize,
    pub threshold: f64,
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_FOLDS,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Adversarial validation with the default threshold.
pub fn adversarial_validate(
    train: &TabularDataset,
    test: &TabularDataset,
    params: &BoostParams,
    k: usize,
) -> Result<AdversarialReport> {
    adversarial_validate_with(
        train,
        test,
        params,
        &AdversarialConfig {
            k,
            threshold: DEFAULT_THRESHOLD,
        },
    )
}

fn sorted_by_id(ds: &TabularDataset) -> TabularDataset {
    let mut order: Vec<usize> = (0..ds.n_rows()).collect();
    order.sort_by_key(|&i| ds.row_ids()[i]);
    ds.take_rows(&order)
}

/// Stratified k-fold over the stacked data. Each fold's model is fitted on the
/// other folds, early-stopped on the held-out fold, and predicts that fold.
/// Folds are keyed on source row ids and origin, so input row order is irrelevant.
pub fn adversarial_validate_with(
    train: &TabularDataset,
    test: &TabularDataset,
    params: &BoostParams,
    config: &AdversarialConfig,
) -> Result<AdversarialReport> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyInput("adversarial validation needs non-empty train and test".into()));
    }
    if config.k < 2 {
        return Err(Error::Contract(format!("k-fold needs k >= 2, got {}", config.k)));
    }
    if !(0.0..=1.0).contains(&config.threshold) {
        return Err(Error::Contract(format!("threshold {} outside [0, 1]", config.threshold)));
    }
    let train = sorted_by_id(train);
    let test = sorted_by_id(test);
    let adv = build_adversarial_dataset(&train, &test)?;
    let labels = adv.data.require_labels()?.to_vec();
    let folds = stratified_folds(&adv.source_row_ids, &labels, config.k, params.seed)?;
    let members = group_by_fold(&folds, config.k);

    let per_fold: Vec<Result<(Vec<usize>, Vec<f64>)>> = (0..config.k)
        .into_par_iter()
        .map(|f| {
            let held_out = &members[f];
            let fit_rows: Vec<usize> = (0..adv.data.n_rows()).filter(|&i| folds[i] != f).collect();
            let fold_err = |message: String| Error::Fold { fold: f, message };
            for (name, rows) in [("training", &fit_rows), ("held-out", held_out)] {
                let pos = rows.iter().filter(|&&i| labels[i] == 1).count();
                if pos == 0 || pos == rows.len() {
                    return Err(fold_err(format!("{name} rows contain a single origin")));
                }
            }
            let fit_ds = adv.data.take_rows(&fit_rows);
            let held_ds = adv.data.take_rows(held_out);
            let model = fit(&fit_ds, Some(&held_ds), params, None).map_err(|e| fold_err(e.to_string()))?;
            Ok((held_out.clone(), model.predict_score(&held_ds)?))
        })
        .collect();

    let mut oof = vec![f64::NAN; adv.data.n_rows()];
    let mut fold_aucs = Vec::with_capacity(config.k);
    for result in per_fold {
        let (rows, preds) = result?;
        let fold_labels: Vec<u8> = rows.iter().map(|&i| labels[i]).collect();
        fold_aucs.push(auc_scores(&fold_labels, &preds)?);
        for (i, p) in rows.into_iter().zip(preds) {
            oof[i] = p;
        }
    }
    let adv_auc = auc_scores(&labels, &oof)?;

    let mut per_row = Vec::with_capacity(train.n_rows());
    let mut test_rows = Vec::with_capacity(test.n_rows());
    for i in 0..adv.data.n_rows() {
        let row = RowProbability {
            row_id: adv.source_row_ids[i],
            p_test: oof[i],
            fold: folds[i],
        };
        match adv.origin[i] {
            Origin::Train => per_row.push(row),
            Origin::Test => test_rows.push(row),
        }
    }

    Ok(AdversarialReport {
        adv_auc,
        threshold: config.threshold,
        verdict: verdict(adv_auc, config.threshold),
        k: config.k,
        fold_aucs,
        per_row,
        test_rows,
    })
}
