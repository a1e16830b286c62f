use serde::{Deserialize, Serialize};

use super::{Column, TabularDataset};

/// Descriptive statistics over the non-missing values of one column.
///
/// Moments and order statistics are `None` when undefined (no values, or a
/// single value for `std`). Quartiles interpolate linearly between order statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub count: usize,
    pub missing: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub q25: Option<f64>,
    pub median: Option<f64>,
    pub q75: Option<f64>,
    pub max: Option<f64>,
}

impl ColumnSummary {
    pub fn of_values(name: impl Into<String>, values: &[Option<f64>]) -> Self {
        let mut present: Vec<f64> = values.iter().flatten().copied().collect();
        present.sort_by(f64::total_cmp);
        let count = present.len();
        let mean = (count > 0).then(|| present.iter().sum::<f64>() / count as f64);
        let std = mean.filter(|_| count > 1).map(|m| {
            let ss: f64 = present.iter().map(|v| (v - m) * (v - m)).sum();
            (ss / (count - 1) as f64).sqrt()
        });
        let q = |p: f64| quantile_sorted(&present, p);
        Self {
            name: name.into(),
            count,
            missing: values.len() - count,
            mean,
            std,
            min: present.first().copied(),
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: present.last().copied(),
        }
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// One summary per numeric column, followed by the label (if any).
pub fn summarize(ds: &TabularDataset) -> Vec<ColumnSummary> {
    let mut out: Vec<ColumnSummary> = ds
        .schema()
        .columns()
        .iter()
        .zip(ds.columns())
        .filter_map(|(spec, col)| match col {
            Column::Numeric { values } => Some(ColumnSummary::of_values(&spec.name, values)),
            Column::Categorical { .. } => None,
        })
        .collect();
    if let Some(labels) = ds.labels() {
        let values: Vec<Option<f64>> = labels.iter().map(|&l| Some(f64::from(l))).collect();
        out.push(ColumnSummary::of_values(ds.schema().label_column(), &values));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column() {
        let s = ColumnSummary::of_values("c", &[Some(5.0), Some(5.0), Some(5.0)]);
        assert_eq!(s.mean, Some(5.0));
        assert_eq!(s.std, Some(0.0));
    }

    #[test]
    fn one_to_four() {
        let s = ColumnSummary::of_values("c", &[Some(1.0), Some(2.0), Some(3.0), Some(4.0), None]);
        assert_eq!(s.count, 4);
        assert_eq!(s.missing, 1);
        assert_eq!(s.mean, Some(2.5));
        // sample variance = (2.25 + 0.25 + 0.25 + 2.25) / 3 = 5/3
        assert!((s.std.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.std.unwrap() - 1.2910).abs() < 1e-4);
        assert_eq!(s.q25, Some(1.75));
        assert_eq!(s.median, Some(2.5));
        assert_eq!(s.q75, Some(3.25));
    }

    #[test]
    fn empty_column_flags_undefined() {
        let s = ColumnSummary::of_values("c", &[None, None]);
        assert_eq!(s.count, 0);
        assert_eq!(s.missing, 2);
        assert!(s.mean.is_none() && s.std.is_none() && s.min.is_none() && s.max.is_none());
        let one = ColumnSummary::of_values("c", &[Some(3.0)]);
        assert_eq!(one.mean, Some(3.0));
        assert!(one.std.is_none());
    }
}
