use driftgate::adversarial::{
    adversarial_validate, adversarial_validate_with, build_adversarial_dataset, AdversarialConfig,
    AdversarialReport, Origin, Verdict,
};
use driftgate::dataset::{Column, ColumnSpec, FeatureSchema, TabularDataset};
use driftgate::gbdt::{fit, BoostParams};
use driftgate::harness::{generate_shifted, ShiftKind, ShiftSpec};
use driftgate::Error;

fn params() -> BoostParams {
    BoostParams {
        early_stopping_rounds: 20,
        ..BoostParams::default().with_rounds(100)
    }
}

fn pair(kind: ShiftKind, magnitude: f64, seed: u64) -> (TabularDataset, TabularDataset) {
    generate_shifted(&ShiftSpec::new(kind, magnitude).with_seed(seed).with_sizes(800, 300)).unwrap()
}

#[test]
fn stacking_labels_rows_by_origin() {
    let (train, test) = pair(ShiftKind::None, 0.0, 1);
    let adv = build_adversarial_dataset(&train, &test).unwrap();
    assert_eq!(adv.data.n_rows(), 1100);
    let labels = adv.data.labels().unwrap();
    assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 300);
    assert!(labels[..800].iter().all(|&l| l == 0));
    assert_eq!(adv.origin[799], Origin::Train);
    assert_eq!(adv.origin[800], Origin::Test);
    assert_eq!(adv.source_row_ids[800], test.row_ids()[0]);
    assert!(adv.data.months().is_none());
    assert_eq!(adv.data.row_ids(), (0..1100).collect::<Vec<u64>>());
}

#[test]
fn mismatched_schemas_are_rejected() {
    let (train, _) = pair(ShiftKind::None, 0.0, 1);
    let schema = FeatureSchema::new(vec![ColumnSpec::numeric("other")], "y", None).unwrap();
    let test = TabularDataset::new(schema, vec![Column::numeric(vec![Some(1.0)])], None, None, vec![0]).unwrap();
    assert!(matches!(build_adversarial_dataset(&train, &test), Err(Error::Schema(_))));
}

#[test]
fn shifted_pair_is_detected_and_null_pair_is_not() {
    let (train, test) = pair(ShiftKind::Covariate, 3.0, 2);
    let shifted = adversarial_validate(&train, &test, &params(), 5).unwrap();
    assert_eq!(shifted.verdict, Verdict::Shifted);
    assert!(shifted.adv_auc > 0.9);

    let (train, test) = pair(ShiftKind::None, 0.0, 2);
    let null = adversarial_validate(&train, &test, &params(), 5).unwrap();
    assert_eq!(null.verdict, Verdict::Consistent);
    assert!((0.4..0.6).contains(&null.adv_auc), "{}", null.adv_auc);
}

#[test]
fn report_covers_every_row_once() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 3);
    let r = adversarial_validate(&train, &test, &params(), 4).unwrap();
    assert_eq!(r.per_row.len(), 800);
    assert_eq!(r.test_rows.len(), 300);
    assert_eq!(r.fold_aucs.len(), 4);
    assert!(r.per_row.windows(2).all(|w| w[0].row_id < w[1].row_id));
    assert!(r.per_row.iter().chain(&r.test_rows).all(|p| (0.0..=1.0).contains(&p.p_test) && p.fold < 4));
    for id in train.row_ids() {
        assert!(r.p_test(*id).is_some());
    }
}

#[test]
fn input_row_order_is_irrelevant() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 4);
    let a = adversarial_validate(&train, &test, &params(), 5).unwrap();
    let rev = |ds: &TabularDataset| ds.take_rows(&(0..ds.n_rows()).rev().collect::<Vec<_>>());
    let b = adversarial_validate(&rev(&train), &rev(&test), &params(), 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_of_fold_probabilities_come_from_models_that_never_saw_the_row() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 5);
    let p = params();
    let report = adversarial_validate(&train, &test, &p, 3).unwrap();
    // inputs are already in row-id order, so stacking them again gives the same positions
    let adv = build_adversarial_dataset(&train, &test).unwrap();
    let folds: Vec<usize> = report.per_row.iter().chain(&report.test_rows).map(|r| r.fold).collect();
    let reported: Vec<f64> = report.per_row.iter().chain(&report.test_rows).map(|r| r.p_test).collect();
    for f in 0..3 {
        let outside: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] != f).collect();
        let inside: Vec<usize> = (0..folds.len()).filter(|&i| folds[i] == f).collect();
        let held = adv.data.take_rows(&inside);
        let model = fit(&adv.data.take_rows(&outside), Some(&held), &p, None).unwrap();
        let preds = model.predict_score(&held).unwrap();
        for (&i, q) in inside.iter().zip(preds) {
            assert_eq!(reported[i], q, "row {i} in fold {f}");
        }
    }
}

#[test]
fn swapping_roles_keeps_the_auc_close() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 6);
    let full = BoostParams {
        subsample: 1.0,
        ..params()
    };
    let a = adversarial_validate(&train, &test, &full, 5).unwrap();
    let b = adversarial_validate(&test, &train, &full, 5).unwrap();
    assert!((a.adv_auc - b.adv_auc).abs() < 0.03, "{} vs {}", a.adv_auc, b.adv_auc);
}

#[test]
fn threshold_drives_the_verdict() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 7);
    let strict = adversarial_validate_with(&train, &test, &params(), &AdversarialConfig { k: 5, threshold: 0.99 }).unwrap();
    let lax = adversarial_validate_with(&train, &test, &params(), &AdversarialConfig { k: 5, threshold: 0.5 }).unwrap();
    assert_eq!(strict.adv_auc, lax.adv_auc);
    assert_eq!(strict.verdict, Verdict::Consistent);
    assert_eq!(lax.verdict, Verdict::Shifted);
}

#[test]
fn degenerate_setups_are_errors() {
    let (train, test) = pair(ShiftKind::None, 0.0, 8);
    assert!(matches!(adversarial_validate(&train, &test, &params(), 1), Err(Error::Contract(_))));
    let tiny = test.take_rows(&[0, 1]);
    assert!(matches!(adversarial_validate(&train, &tiny, &params(), 5), Err(Error::Fold { .. })));
    let empty = test.take_rows(&[]);
    assert!(adversarial_validate(&train, &empty, &params(), 5).is_err());
}

#[test]
fn report_files_round_trip() {
    let (train, test) = pair(ShiftKind::Covariate, 1.0, 9);
    let report = adversarial_validate(&train, &test, &params(), 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("adv.json");
    let rows = report.save(&path).unwrap();
    assert!(rows.exists());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"verdict\""));
    let back = AdversarialReport::load(&path).unwrap();
    assert_eq!(back, report);
}
