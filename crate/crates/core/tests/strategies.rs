use std::collections::BTreeSet;

use driftgate::adversarial::{AdversarialReport, RowProbability, Verdict};
use driftgate::dataset::{Column, ColumnSpec, FeatureSchema, MonthStamp, TabularDataset};
use driftgate::gbdt::BoostParams;
use driftgate::strategies::{
    augmented_cv_plan, baseline_cv_plan, chrono_cv_plan, chrono_holdout_plan, execute_plan, filtered_cv_plan,
    retained_count, weighted_plan, Fold, TrainingPlan,
};
use driftgate::Error;
use proptest::prelude::*;

fn month(y: i32, m: u32) -> MonthStamp {
    MonthStamp::new(y, m).unwrap()
}

/// `n` rows, one feature equal to the row index, alternating labels, months cycling over `months`.
fn rows(n: usize, months: usize) -> TabularDataset {
    let schema = FeatureSchema::new(vec![ColumnSpec::numeric("x")], "y", Some("m".into())).unwrap();
    let col = Column::numeric((0..n).map(|i| Some(i as f64)).collect());
    let labels = (0..n).map(|i| (i % 2) as u8).collect();
    let ms = (0..n).map(|i| month(2018, 1).plus_months((i * months / n) as i64)).collect();
    TabularDataset::new(schema, vec![col], Some(labels), Some(ms), (0..n as u64).map(|i| 100 + i).collect()).unwrap()
}

fn report_for(ds: &TabularDataset, p: impl Fn(usize) -> f64) -> AdversarialReport {
    let mut per_row: Vec<RowProbability> = ds
        .row_ids()
        .iter()
        .enumerate()
        .map(|(i, &row_id)| RowProbability {
            row_id,
            p_test: p(i),
            fold: 0,
        })
        .collect();
    per_row.sort_by_key(|r| r.row_id);
    AdversarialReport {
        adv_auc: 0.75,
        threshold: 0.7,
        verdict: Verdict::Shifted,
        k: 5,
        fold_aucs: vec![],
        per_row,
        test_rows: vec![],
    }
}

fn quick() -> BoostParams {
    BoostParams {
        early_stopping_rounds: 10,
        min_data_in_leaf: 2,
        ..BoostParams::default().with_rounds(40)
    }
}

#[test]
fn baseline_partitions_every_row() {
    let ds = rows(10, 1);
    let plan = baseline_cv_plan(&ds, 5, 42).unwrap();
    assert_eq!(plan.folds.len(), 5);
    let mut seen = BTreeSet::new();
    for f in &plan.folds {
        assert_eq!(f.valid_rows.len(), 2);
        assert_eq!(f.train_rows.len(), 8);
        assert!(f.valid_rows.iter().all(|r| seen.insert(*r)));
    }
    assert_eq!(seen, ds.row_ids().iter().copied().collect());
    assert!(plan.weights.is_none());
}

#[test]
fn baseline_rejects_bad_k() {
    let ds = rows(10, 1);
    assert!(matches!(baseline_cv_plan(&ds, 1, 0), Err(Error::Contract(_))));
    assert!(matches!(baseline_cv_plan(&ds, 11, 0), Err(Error::Contract(_))));
}

#[test]
fn plans_are_deterministic_and_seed_dependent() {
    let ds = rows(200, 1);
    assert_eq!(baseline_cv_plan(&ds, 5, 9).unwrap(), baseline_cv_plan(&ds, 5, 9).unwrap());
    assert_ne!(baseline_cv_plan(&ds, 5, 9).unwrap().folds, baseline_cv_plan(&ds, 5, 10).unwrap().folds);
}

#[test]
fn folds_do_not_depend_on_row_order() {
    let ds = rows(50, 1);
    let reversed: Vec<usize> = (0..50).rev().collect();
    let a = baseline_cv_plan(&ds, 5, 3).unwrap();
    let b = baseline_cv_plan(&ds.take_rows(&reversed), 5, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn folds_are_stratified_on_the_label() {
    let ds = rows(100, 1);
    let labels: std::collections::HashMap<u64, u8> =
        ds.row_ids().iter().copied().zip(ds.labels().unwrap().iter().copied()).collect();
    for f in baseline_cv_plan(&ds, 5, 1).unwrap().folds {
        let pos = f.valid_rows.iter().filter(|r| labels[r] == 1).count();
        assert_eq!(pos, 10);
    }
}

#[test]
fn chrono_cv_from_first_month_is_the_baseline() {
    let ds = rows(60, 6);
    let chrono = chrono_cv_plan(&ds, month(2018, 1), 5, 42).unwrap();
    assert!(chrono.same_structure(&baseline_cv_plan(&ds, 5, 42).unwrap()));
    assert_eq!(chrono.param_tag, "2018M1");
}

#[test]
fn chrono_cv_drops_earlier_months() {
    let ds = rows(60, 6);
    let plan = chrono_cv_plan(&ds, month(2018, 4), 5, 42).unwrap();
    let used: BTreeSet<u64> = plan.folds.iter().flat_map(|f| f.valid_rows.clone()).collect();
    let expected: BTreeSet<u64> = (130..160).collect();
    assert_eq!(used, expected);
    assert!(matches!(chrono_cv_plan(&ds, month(2018, 7), 5, 42), Err(Error::EmptySelection(_))));
}

#[test]
fn chrono_holdout_splits_on_the_month() {
    let ds = rows(30, 3);
    let plan = chrono_holdout_plan(&ds, month(2018, 1), month(2018, 3)).unwrap();
    assert_eq!(plan.folds.len(), 1);
    assert_eq!(plan.folds[0].train_rows, (100..120).collect::<Vec<_>>());
    assert_eq!(plan.folds[0].valid_rows, (120..130).collect::<Vec<_>>());
    assert_eq!(plan.param_tag, "2018M1|2018M3");
    assert!(matches!(
        chrono_holdout_plan(&ds, month(2018, 2), month(2018, 2)),
        Err(Error::EmptySelection(_))
    ));
    assert!(matches!(
        chrono_holdout_plan(&ds, month(2018, 1), month(2018, 5)),
        Err(Error::EmptySelection(_))
    ));
}

#[test]
fn weighted_plan_uses_raw_probabilities() {
    let ds = rows(20, 1);
    let report = report_for(&ds, |i| i as f64 / 40.0);
    let plan = weighted_plan(&ds, &report, 5, 42).unwrap();
    assert_eq!(plan.folds, baseline_cv_plan(&ds, 5, 42).unwrap().folds);
    let w = plan.weights.unwrap();
    assert_eq!(w[&103], 3.0 / 40.0);
    assert_eq!(w.len(), 20);
}

#[test]
fn weighted_plan_names_missing_rows() {
    let ds = rows(20, 1);
    let mut report = report_for(&ds, |_| 0.5);
    report.per_row.retain(|r| r.row_id != 107);
    match weighted_plan(&ds, &report, 5, 42) {
        Err(Error::Contract(msg)) => assert!(msg.contains("107"), "{msg}"),
        other => panic!("expected contract error, got {other:?}"),
    }
}

#[test]
fn constant_weights_reproduce_the_baseline() {
    let ds = rows(60, 1);
    let params = BoostParams {
        l2_reg: 0.0,
        min_sum_hessian_in_leaf: 0.0,
        ..quick()
    };
    let weighted = weighted_plan(&ds, &report_for(&ds, |_| 0.5), 3, 1).unwrap();
    let base = baseline_cv_plan(&ds, 3, 1).unwrap();
    let a = execute_plan(&weighted, &ds, &ds, &params).unwrap();
    let b = execute_plan(&base, &ds, &ds, &params).unwrap();
    assert_eq!(a.test_predictions, b.test_predictions);
}

#[test]
fn zero_probability_rows_do_not_move_the_model() {
    let ds = rows(60, 1);
    let report = report_for(&ds, |i| if i == 5 { 0.0 } else { 0.6 });
    let plan = weighted_plan(&ds, &report, 3, 1).unwrap();
    let mut flipped = ds.labels().unwrap().to_vec();
    flipped[5] = 1 - flipped[5];
    let other = ds.clone().with_labels(Some(flipped)).unwrap();
    let a = execute_plan(&plan, &ds, &ds, &quick()).unwrap();
    let b = execute_plan(&plan, &other, &ds, &quick()).unwrap();
    // row 105 changes validation AUC only in the fold that validates on it
    let mut compared = 0;
    for (f, fold) in plan.folds.iter().enumerate() {
        if fold.train_rows.contains(&105) {
            assert_eq!(a.models[f], b.models[f], "fold {f}");
            compared += 1;
        }
    }
    assert_eq!(compared, 2);
}

#[test]
fn filtering_keeps_the_most_test_like_rows() {
    let ds = rows(4, 1);
    let p = [0.9, 0.1, 0.5, 0.7];
    let report = report_for(&ds, |i| p[i]);
    let plan = filtered_cv_plan(&ds, &report, 0.5, 2, 0).unwrap();
    let used: BTreeSet<u64> = plan.folds.iter().flat_map(|f| f.valid_rows.iter().chain(&f.train_rows).copied()).collect();
    assert_eq!(used, BTreeSet::from([100, 103]));
    assert_eq!(plan.param_tag, "0.50");
}

#[test]
fn ties_in_probability_break_by_row_id() {
    let ds = rows(10, 1);
    let report = report_for(&ds, |_| 0.5);
    let plan = filtered_cv_plan(&ds, &report, 0.3, 2, 0).unwrap();
    let used: BTreeSet<u64> = plan.folds.iter().flat_map(|f| f.valid_rows.clone()).collect();
    assert_eq!(used, BTreeSet::from([100, 101, 102]));
}

#[test]
fn keep_everything_is_the_baseline() {
    let ds = rows(37, 1);
    let report = report_for(&ds, |i| (i * 7 % 11) as f64 / 11.0);
    let base = baseline_cv_plan(&ds, 5, 8).unwrap();
    assert!(filtered_cv_plan(&ds, &report, 1.0, 5, 8).unwrap().same_structure(&base));
    assert!(augmented_cv_plan(&ds, &report, 1.0, 5, 8).unwrap().same_structure(&base));
}

#[test]
fn augmented_folds_add_the_rest_to_training() {
    let ds = rows(10, 1);
    let report = report_for(&ds, |i| i as f64 / 10.0);
    let plan = augmented_cv_plan(&ds, &report, 0.6, 3, 0).unwrap();
    let a: BTreeSet<u64> = (104..110).collect();
    let mut valid = BTreeSet::new();
    for f in &plan.folds {
        assert_eq!(f.train_rows.len(), 8);
        assert_eq!(f.valid_rows.len(), 2);
        assert!((100..104).all(|b| f.train_rows.contains(&b)));
        valid.extend(f.valid_rows.iter().copied());
    }
    assert_eq!(valid, a);
}

#[test]
fn too_few_retained_rows_is_a_contract_error() {
    let ds = rows(10, 1);
    let report = report_for(&ds, |_| 0.5);
    assert!(matches!(filtered_cv_plan(&ds, &report, 0.3, 5, 0), Err(Error::Contract(_))));
    assert!(matches!(augmented_cv_plan(&ds, &report, 0.3, 5, 0), Err(Error::Contract(_))));
    assert!(matches!(filtered_cv_plan(&ds, &report, 0.0, 2, 0), Err(Error::Contract(_))));
    assert!(matches!(filtered_cv_plan(&ds, &report, 1.5, 2, 0), Err(Error::Contract(_))));
}

#[test]
fn plan_validation_catches_overlap_and_missing_weights() {
    let overlap = TrainingPlan {
        folds: vec![Fold {
            train_rows: vec![1, 2],
            valid_rows: vec![2, 3],
        }],
        weights: None,
        strategy_tag: "x".into(),
        param_tag: "y".into(),
    };
    assert!(overlap.validate().is_err());
    let unweighted_row = TrainingPlan {
        folds: vec![Fold {
            train_rows: vec![1, 2],
            valid_rows: vec![3],
        }],
        weights: Some([(1, 0.5)].into_iter().collect()),
        ..overlap.clone()
    };
    assert!(unweighted_row.validate().is_err());
    let empty_valid = TrainingPlan {
        folds: vec![Fold {
            train_rows: vec![1],
            valid_rows: vec![],
        }],
        ..overlap
    };
    assert!(empty_valid.validate().is_err());
}

#[test]
fn plan_json_round_trip() {
    let ds = rows(20, 1);
    let plan = weighted_plan(&ds, &report_for(&ds, |i| i as f64 / 20.0), 4, 2).unwrap();
    assert_eq!(TrainingPlan::from_json(&plan.to_json().unwrap()).unwrap(), plan);
}

#[test]
fn separable_single_fold_scores_perfectly() {
    let ds = rows(40, 1);
    let labels: Vec<u8> = (0..40).map(|i| u8::from(i >= 20)).collect();
    let ds = ds.with_labels(Some(labels)).unwrap();
    let plan = TrainingPlan {
        folds: vec![Fold {
            train_rows: (100..140).filter(|r| r % 2 == 0).collect(),
            valid_rows: (100..140).filter(|r| r % 2 == 1).collect(),
        }],
        weights: None,
        strategy_tag: "manual".into(),
        param_tag: "-".into(),
    };
    let out = execute_plan(&plan, &ds, &ds, &quick()).unwrap();
    assert_eq!(out.per_fold_valid_auc, vec![1.0]);
    assert_eq!(out.test_auc, 1.0);
    assert_eq!(out.models.len(), 1);
}

#[test]
fn constant_features_give_chance_auc() {
    let schema = FeatureSchema::new(vec![ColumnSpec::numeric("c")], "y", None).unwrap();
    let ds = TabularDataset::new(
        schema,
        vec![Column::numeric(vec![Some(1.0); 50])],
        Some((0..50).map(|i| (i % 2) as u8).collect()),
        None,
        (0..50).collect(),
    )
    .unwrap();
    let out = execute_plan(&baseline_cv_plan(&ds, 5, 0).unwrap(), &ds, &ds, &quick()).unwrap();
    assert_eq!(out.test_auc, 0.5);
}

#[test]
fn test_predictions_ignore_fold_order() {
    let ds = rows(80, 1);
    let labels: Vec<u8> = (0..80).map(|i| u8::from((i * 13) % 7 < 3)).collect();
    let ds = ds.with_labels(Some(labels)).unwrap();
    let plan = baseline_cv_plan(&ds, 5, 4).unwrap();
    let mut reversed = plan.clone();
    reversed.folds.reverse();
    let a = execute_plan(&plan, &ds, &ds, &quick()).unwrap();
    let b = execute_plan(&reversed, &ds, &ds, &quick()).unwrap();
    assert_eq!(a.test_predictions, b.test_predictions);
    assert_eq!(a.test_auc, b.test_auc);
    let mut fa = a.per_fold_valid_auc.clone();
    fa.reverse();
    assert_eq!(fa, b.per_fold_valid_auc);
}

#[test]
fn single_class_validation_is_a_fold_error() {
    let ds = rows(20, 1);
    let plan = TrainingPlan {
        folds: vec![Fold {
            train_rows: (100..116).collect(),
            valid_rows: vec![117, 119],
        }],
        weights: None,
        strategy_tag: "manual".into(),
        param_tag: "-".into(),
    };
    assert!(matches!(execute_plan(&plan, &ds, &ds, &quick()), Err(Error::Fold { fold: 0, .. })));
}

proptest! {
    #[test]
    fn retained_count_is_a_ceiling(n in 1usize..=100, twentieths in 1usize..=20) {
        let keep = twentieths as f64 / 20.0;
        prop_assert_eq!(retained_count(keep, n), (twentieths * n).div_ceil(20));
    }

    #[test]
    fn retained_count_for_arbitrary_hundredths(n in 1usize..=100, hundredths in 1usize..=100) {
        prop_assert_eq!(retained_count(hundredths as f64 / 100.0, n), (hundredths * n).div_ceil(100));
    }
}
