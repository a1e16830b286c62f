//! Lending Club preprocessing: status encoding, the derived FICO and log-income
//! features, and the fixed 23-feature layout fed to the models.

use super::{Column, ColumnKind, ColumnSpec, FeatureSchema, MonthStamp, TabularDataset};
use crate::{Error, Result};

pub const STATUS_COLUMN: &str = "loan_status";
pub const ISSUE_MONTH_COLUMN: &str = "issue_d";
pub const POSITIVE_STATUS: &str = "Charged Off";
pub const NEGATIVE_STATUS: &str = "Fully Paid";

/// Numeric model features, in output order.
pub const NUMERIC_FEATURES: [&str; 16] = [
    "loan_amnt",
    "term",
    "int_rate",
    "installment",
    "emp_length",
    "dti",
    "earliest_cr_line",
    "open_acc",
    "pub_rec",
    "revol_util",
    "total_acc",
    "mort_acc",
    "pub_rec_bankruptcies",
    "log_annual_inc",
    "fico_score",
    "log_revol_bal",
];

/// Categorical model features, in output order.
pub const CATEGORICAL_FEATURES: [&str; 7] = [
    "sub_grade",
    "home_ownership",
    "verification_status",
    "initial_list_status",
    "purpose",
    "addr_state",
    "application_type",
];

/// Raw columns consumed by [`preprocess_lending_club`], besides the categorical features.
const RAW_NUMERIC: [&str; 15] = [
    "loan_amnt",
    "term",
    "int_rate",
    "installment",
    "emp_length",
    "dti",
    "earliest_cr_line",
    "open_acc",
    "pub_rec",
    "revol_util",
    "total_acc",
    "mort_acc",
    "pub_rec_bankruptcies",
    "annual_inc",
    "revol_bal",
];

/// Schema for a raw export restricted to the 24 feature fields plus `loan_status`,
/// with `issue_d` as the month column.
///
/// Fields that the export writes as text (`term` = " 36 months", `int_rate` =
/// "13.56%", `emp_length`, `earliest_cr_line` = "Aug-2003") are read as
/// categorical and converted by [`preprocess_lending_club`].
pub fn raw_schema() -> FeatureSchema {
    let text = ["term", "int_rate", "revol_util", "emp_length", "earliest_cr_line"];
    let mut columns: Vec<ColumnSpec> = [
        "loan_amnt",
        "term",
        "int_rate",
        "installment",
        "emp_length",
        "annual_inc",
        "dti",
        "earliest_cr_line",
        "fico_range_low",
        "fico_range_high",
        "open_acc",
        "pub_rec",
        "revol_bal",
        "revol_util",
        "total_acc",
        "mort_acc",
        "pub_rec_bankruptcies",
    ]
    .iter()
    .map(|&name| {
        if text.contains(&name) {
            ColumnSpec::categorical(name)
        } else {
            ColumnSpec::numeric(name)
        }
    })
    .collect();
    columns.extend(CATEGORICAL_FEATURES.iter().map(|&c| ColumnSpec::categorical(c)));
    columns.push(ColumnSpec::categorical(STATUS_COLUMN).required());
    FeatureSchema::new(columns, STATUS_COLUMN, Some(ISSUE_MONTH_COLUMN.to_owned()))
        .expect("static schema is valid")
}

/// Keeps `Charged Off` (label 1) and `Fully Paid` (label 0) loans and drops every
/// other status. The status column becomes the label.
pub fn encode_loan_status(ds: &TabularDataset) -> Result<TabularDataset> {
    let schema = ds.schema();
    let status_name = if schema.label_is_raw_column() {
        schema.label_column()
    } else {
        STATUS_COLUMN
    };
    let pos = schema
        .position(status_name)
        .ok_or_else(|| Error::Schema(format!("status column `{status_name}` missing")))?;
    let status = &ds.columns()[pos];
    if status.kind() != ColumnKind::Categorical {
        return Err(Error::Schema(format!("status column `{status_name}` must be categorical")));
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for row in 0..ds.n_rows() {
        let label = match status.category_str(row) {
            Some(POSITIVE_STATUS) => 1,
            Some(NEGATIVE_STATUS) => 0,
            _ => continue,
        };
        rows.push(row);
        labels.push(label);
    }

    let kept = ds.take_rows(&rows);
    let mut specs = schema.columns().to_vec();
    let mut columns = kept.columns().to_vec();
    specs.remove(pos);
    columns.remove(pos);
    let new_schema = FeatureSchema::new(specs, status_name, schema.month_column().map(str::to_owned))?;
    kept.with_columns(new_schema, columns)?.with_labels(Some(labels))
}

/// Derives the 23 model features: employment length as 0..=10, mean FICO score,
/// base-10 log (with +1 offset) of income and revolving balance, and the credit
/// line opening year. Text columns are converted to numbers.
pub fn preprocess_lending_club(ds: &TabularDataset) -> Result<TabularDataset> {
    let schema = ds.schema();
    for name in RAW_NUMERIC
        .iter()
        .chain(&["fico_range_low", "fico_range_high"])
        .chain(&CATEGORICAL_FEATURES)
    {
        if schema.position(name).is_none() {
            return Err(Error::Schema(format!("required column `{name}` missing")));
        }
    }
    let col = |name: &str| ds.column(name).expect("presence checked");

    let mut columns = Vec::with_capacity(23);
    let mut specs = Vec::with_capacity(23);
    for &name in &NUMERIC_FEATURES {
        let values = match name {
            "fico_score" => {
                let low = numeric_values(col("fico_range_low"), "fico_range_low", parse_leading_number)?;
                let high = numeric_values(col("fico_range_high"), "fico_range_high", parse_leading_number)?;
                low.iter()
                    .zip(&high)
                    .map(|(l, h)| match (l, h) {
                        (Some(l), Some(h)) => Some((l + h) / 2.0),
                        _ => None,
                    })
                    .collect()
            }
            "log_annual_inc" => log_offset(&numeric_values(col("annual_inc"), "annual_inc", parse_leading_number)?),
            "log_revol_bal" => log_offset(&numeric_values(col("revol_bal"), "revol_bal", parse_leading_number)?),
            "emp_length" => numeric_values(col(name), name, parse_emp_length)?,
            "earliest_cr_line" => numeric_values(col(name), name, parse_year)?,
            _ => numeric_values(col(name), name, parse_leading_number)?,
        };
        columns.push(Column::numeric(values));
        specs.push(ColumnSpec::numeric(name));
    }
    for &name in &CATEGORICAL_FEATURES {
        let c = col(name);
        if c.kind() != ColumnKind::Categorical {
            return Err(Error::Schema(format!("column `{name}` must be categorical")));
        }
        columns.push(c.clone());
        specs.push(ColumnSpec::categorical(name));
    }

    let new_schema = FeatureSchema::new(
        specs,
        schema.label_column(),
        schema.month_column().map(str::to_owned),
    )?;
    ds.with_columns(new_schema, columns)
}

/// Splits at `first_test_month`: rows strictly before it, and rows at or after it.
pub fn split_by_month(
    ds: &TabularDataset,
    first_test_month: MonthStamp,
) -> Result<(TabularDataset, TabularDataset)> {
    let months = ds.require_months()?;
    Ok((
        ds.filter_rows(|i| months[i] < first_test_month),
        ds.filter_rows(|i| months[i] >= first_test_month),
    ))
}

fn numeric_values(
    col: &Column,
    name: &str,
    parse_text: fn(&str) -> Option<Option<f64>>,
) -> Result<Vec<Option<f64>>> {
    match col {
        Column::Numeric { values } => Ok(values.clone()),
        Column::Categorical { .. } => (0..col.len())
            .map(|row| match col.category_str(row) {
                None => Ok(None),
                Some(s) => parse_text(s).ok_or_else(|| Error::Parse {
                    row: row + 1,
                    column: name.to_owned(),
                    message: format!("cannot interpret `{s}`"),
                }),
            })
            .collect(),
    }
}

fn log_offset(values: &[Option<f64>]) -> Vec<Option<f64>> {
    values
        .iter()
        .map(|v| v.filter(|x| *x > -1.0).map(|x| (x + 1.0).log10()))
        .collect()
}

/// `" 36 months"` → 36, `"13.56%"` → 13.56.
fn parse_leading_number(s: &str) -> Option<Option<f64>> {
    let s = s.trim();
    let end = s
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E'))
        .map_or(s.len(), |(i, _)| i);
    s[..end].parse::<f64>().ok().map(Some)
}

fn parse_emp_length(s: &str) -> Option<Option<f64>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("n/a") {
        return Some(None);
    }
    if s.starts_with('<') {
        return Some(Some(0.0));
    }
    let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
    let years: u32 = digits.parse().ok()?;
    (years <= 10).then_some(Some(f64::from(years)))
}

fn parse_year(s: &str) -> Option<Option<f64>> {
    let s = s.trim();
    if let Ok(m) = s.parse::<MonthStamp>() {
        return Some(Some(f64::from(m.year())));
    }
    s.parse::<f64>().ok().map(Some)
}
