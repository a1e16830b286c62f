//! The five experimental sets run as one grid over a train/test pair.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversarial::{adversarial_validate_with, AdversarialConfig, AdversarialReport, Verdict, DEFAULT_THRESHOLD};
use crate::dataset::{MonthStamp, TabularDataset};
use crate::gbdt::BoostParams;
use crate::strategies::{
    augmented_cv_plan, chrono_cv_plan, chrono_holdout_plan, execute_plan, filtered_cv_plan, weighted_plan,
    TrainingPlan,
};
use crate::{Error, Result};

/// Holdout ranges of Set 2: every split month after `range_start` in `valid_starts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutRange {
    pub range_start: MonthStamp,
    pub valid_starts: Vec<MonthStamp>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub k: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Set 1: chronological CV start months.
    pub set1_starts: Vec<MonthStamp>,
    /// Set 2: chronological holdout combinations.
    pub set2_ranges: Vec<HoldoutRange>,
    /// Set 3: one adversarially weighted run.
    pub set3: bool,
    /// Set 4: keep fractions for adversarial filtering.
    pub set4_keep: Vec<f64>,
    /// Set 5: keep fractions for augmented folds.
    pub set5_keep: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self::standard()
    }
}

/// `1.00, 0.95, ..., 0.05`.
pub fn keep_fraction_ladder() -> Vec<f64> {
    (0..20).map(|i| (100 - 5 * i) as f64 / 100.0).collect()
}

impl GridConfig {
    /// Grid over 18 months from January 2018: 18 + 33 + 1 + 20 + 20 runs.
    pub fn standard() -> Self {
        Self::for_months(MonthStamp::new(2018, 1).expect("valid month"), 18)
    }

    /// The standard grid shape laid over `months` months from `first`: every
    /// month as a Set 1 start, Set 2 ranges starting at month offsets 0, 6
    /// and 12 with every later split month, and the full keep-fraction ladder.
    pub fn for_months(first: MonthStamp, months: usize) -> Self {
        let last = first.plus_months(months as i64 - 1);
        let set2_ranges = [0i64, 6, 12]
            .into_iter()
            .filter(|&o| o + 1 < months as i64)
            .map(|o| {
                let range_start = first.plus_months(o);
                HoldoutRange {
                    range_start,
                    valid_starts: range_start.succ().range_inclusive(last).collect(),
                }
            })
            .collect();
        Self {
            k: 5,
            seed: 42,
            threshold: DEFAULT_THRESHOLD,
            set1_starts: first.range_inclusive(last).collect(),
            set2_ranges,
            set3: true,
            set4_keep: keep_fraction_ladder(),
            set5_keep: keep_fraction_ladder(),
        }
    }

    /// The same grid restricted to the given set ids.
    pub fn only_sets(mut self, sets: &[u8]) -> Self {
        if !sets.contains(&1) {
            self.set1_starts.clear();
        }
        if !sets.contains(&2) {
            self.set2_ranges.clear();
        }
        if !sets.contains(&3) {
            self.set3 = false;
        }
        if !sets.contains(&4) {
            self.set4_keep.clear();
        }
        if !sets.contains(&5) {
            self.set5_keep.clear();
        }
        self
    }

    /// Runs per set, in set order.
    pub fn set_sizes(&self) -> [usize; 5] {
        [
            self.set1_starts.len(),
            self.set2_ranges.iter().map(|r| r.valid_starts.len()).sum(),
            usize::from(self.set3),
            self.set4_keep.len(),
            self.set5_keep.len(),
        ]
    }

    pub fn size(&self) -> usize {
        self.set_sizes().iter().sum()
    }

    fn needs_adversarial(&self) -> bool {
        self.set3 || !self.set4_keep.is_empty() || !self.set5_keep.is_empty()
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Every cell of the grid in set order.
    pub fn cells(&self) -> Vec<GridCell> {
        let mut cells = Vec::with_capacity(self.size());
        cells.extend(self.set1_starts.iter().map(|&s| GridCell::ChronoCv(s)));
        for r in &self.set2_ranges {
            cells.extend(r.valid_starts.iter().map(|&v| GridCell::ChronoHoldout(r.range_start, v)));
        }
        if self.set3 {
            cells.push(GridCell::Weighted);
        }
        cells.extend(self.set4_keep.iter().map(|&q| GridCell::Filtered(q)));
        cells.extend(self.set5_keep.iter().map(|&q| GridCell::Augmented(q)));
        cells
    }
}

/// One experiment of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridCell {
    ChronoCv(MonthStamp),
    ChronoHoldout(MonthStamp, MonthStamp),
    Weighted,
    Filtered(f64),
    Augmented(f64),
}

impl GridCell {
    pub fn set_id(&self) -> u8 {
        match self {
            GridCell::ChronoCv(_) => 1,
            GridCell::ChronoHoldout(..) => 2,
            GridCell::Weighted => 3,
            GridCell::Filtered(_) => 4,
            GridCell::Augmented(_) => 5,
        }
    }

    fn label(&self) -> String {
        match self {
            GridCell::ChronoCv(s) => s.compact(),
            GridCell::ChronoHoldout(a, b) => format!("{}|{}", a.compact(), b.compact()),
            GridCell::Weighted => "p_test".into(),
            GridCell::Filtered(q) | GridCell::Augmented(q) => format!("{q:.2}"),
        }
    }

    pub fn plan(&self, train: &TabularDataset, report: Option<&AdversarialReport>, k: usize, seed: u64) -> Result<TrainingPlan> {
        let report = || report.ok_or_else(|| Error::Contract("adversarial report required".into()));
        match *self {
            GridCell::ChronoCv(s) => chrono_cv_plan(train, s, k, seed),
            GridCell::ChronoHoldout(a, b) => chrono_holdout_plan(train, a, b),
            GridCell::Weighted => weighted_plan(train, report()?, k, seed),
            GridCell::Filtered(q) => filtered_cv_plan(train, report()?, q, k, seed),
            GridCell::Augmented(q) => augmented_cv_plan(train, report()?, q, k, seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub set_id: u8,
    pub strategy_tag: String,
    pub param_tag: String,
    pub mean_valid_auc: f64,
    pub test_auc: f64,
    /// Adversarial AUC behind the plan, for Sets 3 to 5.
    pub adv_auc_used: Option<f64>,
    /// Wall-clock seconds for planning and executing this run.
    pub runtime_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub config: GridConfig,
    pub params: BoostParams,
    pub n_train: usize,
    pub n_test: usize,
    pub adv_auc: Option<f64>,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub metadata: GridMetadata,
}

impl ExperimentReport {
    pub fn set_rows(&self, set_id: u8) -> impl Iterator<Item = &ExperimentRow> {
        self.rows.iter().filter(move |r| r.set_id == set_id)
    }

    /// Highest test AUC in a set; the earliest row wins ties.
    pub fn best_in_set(&self, set_id: u8) -> Option<&ExperimentRow> {
        best(self.set_rows(set_id))
    }

    pub fn best_overall(&self) -> Option<&ExperimentRow> {
        best(self.rows.iter())
    }
}

fn best<'a>(rows: impl Iterator<Item = &'a ExperimentRow>) -> Option<&'a ExperimentRow> {
    rows.fold(None, |acc: Option<&ExperimentRow>, r| match acc {
        Some(b) if b.test_auc >= r.test_auc => Some(b),
        _ => Some(r),
    })
}

/// Runs the grid, computing adversarial validation once when Sets 3 to 5 need it.
pub fn run_grid(
    train: &TabularDataset,
    test: &TabularDataset,
    params: &BoostParams,
    config: &GridConfig,
) -> Result<ExperimentReport> {
    let report = if config.needs_adversarial() {
        let adv = AdversarialConfig {
            k: config.k,
            threshold: config.threshold,
        };
        Some(adversarial_validate_with(train, test, params, &adv).map_err(|e| e.context("adversarial validation"))?)
    } else {
        None
    };
    run_grid_with_report(train, test, params, config, report.as_ref())
}

/// Runs the grid against an existing adversarial report, so any subset of
/// cells reproduces the rows of a full run.
pub fn run_grid_with_report(
    train: &TabularDataset,
    test: &TabularDataset,
    params: &BoostParams,
    config: &GridConfig,
    report: Option<&AdversarialReport>,
) -> Result<ExperimentReport> {
    params.validate()?;
    let rows: Vec<Result<ExperimentRow>> = config
        .cells()
        .into_par_iter()
        .map(|cell| {
            let started = Instant::now();
            let context = |e: Error| e.context(format!("set {}, {}", cell.set_id(), cell.label()));
            let plan = cell.plan(train, report, config.k, config.seed).map_err(context)?;
            let outcome = execute_plan(&plan, train, test, params).map_err(context)?;
            Ok(ExperimentRow {
                set_id: cell.set_id(),
                strategy_tag: plan.strategy_tag,
                param_tag: plan.param_tag,
                mean_valid_auc: outcome.mean_valid_auc,
                test_auc: outcome.test_auc,
                adv_auc_used: (cell.set_id() >= 3).then(|| report.map(|r| r.adv_auc)).flatten(),
                runtime_secs: started.elapsed().as_secs_f64(),
            })
        })
        .collect();
    Ok(ExperimentReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
        metadata: GridMetadata {
            config: config.clone(),
            params: params.clone(),
            n_train: train.n_rows(),
            n_test: test.n_rows(),
            adv_auc: report.map(|r| r.adv_auc),
            verdict: report.map(|r| r.verdict),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_sizes() {
        let g = GridConfig::standard();
        assert_eq!(g.set_sizes(), [18, 33, 1, 20, 20]);
        assert_eq!(g.cells().len(), 92);
    }

    #[test]
    fn ladder_is_exact_hundredths() {
        let l = keep_fraction_ladder();
        assert_eq!(l.first(), Some(&1.0));
        assert_eq!(l.last(), Some(&0.05));
        assert_eq!(format!("{:.2}", l[5]), "0.75");
    }
}
