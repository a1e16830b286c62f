use std::io::Read;
use std::path::Path;

use super::{Column, ColumnKind, FeatureSchema, MonthStamp, TabularDataset};
use crate::{Error, Result};

/// Loads a UTF-8, comma-separated CSV with a header row.
///
/// Header order does not matter; every schema column, the label column and the
/// month column (if any) must be present. Empty cells are missing values.
/// Category strings are numbered in first-seen order.
pub fn load_csv(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<TabularDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_csv_reader(file, schema).map_err(|e| match e {
        Error::Csv(inner) if inner.is_io_error() => match inner.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        other => other,
    })
}

pub fn load_csv_reader<R: Read>(reader: R, schema: &FeatureSchema) -> Result<TabularDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyInput("CSV has no header row".into()));
    }
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(format!("column `{name}` missing from CSV header")))
    };

    let feature_idx = schema
        .names()
        .map(find)
        .collect::<Result<Vec<_>>>()?;
    let raw_label = schema.label_is_raw_column();
    let label_idx = if raw_label { None } else { Some(find(schema.label_column())?) };
    let month_idx = schema.month_column().map(find).transpose()?;

    let mut numeric: Vec<Vec<Option<f64>>> = vec![Vec::new(); feature_idx.len()];
    let mut strings: Vec<Vec<Option<String>>> = vec![Vec::new(); feature_idx.len()];
    let mut labels = Vec::new();
    let mut months = Vec::new();

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let data_row = row + 1;
        for (k, (spec, &idx)) in schema.columns().iter().zip(&feature_idx).enumerate() {
            let cell = record.get(idx).unwrap_or("").trim();
            if cell.is_empty() && !spec.missing_allowed {
                return Err(Error::Parse {
                    row: data_row,
                    column: spec.name.clone(),
                    message: "missing value not allowed".into(),
                });
            }
            match spec.kind {
                ColumnKind::Numeric => {
                    let v = if cell.is_empty() {
                        None
                    } else {
                        let v: f64 = cell.parse().map_err(|_| Error::Parse {
                            row: data_row,
                            column: spec.name.clone(),
                            message: format!("`{cell}` is not a number"),
                        })?;
                        if v.is_nan() { None } else { Some(v) }
                    };
                    numeric[k].push(v);
                }
                ColumnKind::Categorical => {
                    strings[k].push((!cell.is_empty()).then(|| cell.to_owned()));
                }
            }
        }
        if let Some(idx) = label_idx {
            let cell = record.get(idx).unwrap_or("").trim();
            labels.push(parse_label(cell).ok_or_else(|| Error::Parse {
                row: data_row,
                column: schema.label_column().to_owned(),
                message: format!("`{cell}` is not a 0/1 label"),
            })?);
        }
        if let Some(idx) = month_idx {
            let cell = record.get(idx).unwrap_or("").trim();
            months.push(cell.parse::<MonthStamp>().map_err(|_| Error::Parse {
                row: data_row,
                column: schema.month_column().unwrap_or_default().to_owned(),
                message: format!("`{cell}` is not a month stamp"),
            })?);
        }
    }

    let n_rows = labels.len().max(months.len()).max(
        numeric.iter().map(Vec::len).chain(strings.iter().map(Vec::len)).max().unwrap_or(0),
    );
    if n_rows == 0 {
        return Err(Error::EmptyInput("CSV has a header but no data rows".into()));
    }

    let columns = schema
        .columns()
        .iter()
        .enumerate()
        .map(|(k, spec)| match spec.kind {
            ColumnKind::Numeric => Column::numeric(std::mem::take(&mut numeric[k])),
            ColumnKind::Categorical => Column::categorical_from_strings(strings[k].iter().map(|s| s.as_deref())),
        })
        .collect();

    TabularDataset::new(
        schema.clone(),
        columns,
        label_idx.map(|_| labels),
        month_idx.map(|_| months),
        (0..n_rows as u64).collect(),
    )
}

fn parse_label(cell: &str) -> Option<u8> {
    match cell {
        "0" | "0.0" | "false" | "False" => Some(0),
        "1" | "1.0" | "true" | "True" => Some(1),
        _ => None,
    }
}

/// Writes the dataset back to CSV (features, then label, then month).
pub fn write_csv(ds: &TabularDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let schema = ds.schema();
    let mut header: Vec<&str> = schema.names().collect();
    let labels = ds.labels();
    if labels.is_some() && !schema.label_is_raw_column() {
        header.push(schema.label_column());
    }
    let months = ds.months().zip(schema.month_column());
    if let Some((_, name)) = months {
        header.push(name);
    }
    w.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for row in 0..ds.n_rows() {
        record.clear();
        for col in ds.columns() {
            record.push(match col {
                Column::Numeric { values } => values[row].map(|v| v.to_string()).unwrap_or_default(),
                Column::Categorical { .. } => col.category_str(row).unwrap_or_default().to_owned(),
            });
        }
        if let (Some(l), false) = (labels, schema.label_is_raw_column()) {
            record.push(l[row].to_string());
        }
        if let Some((m, _)) = months {
            record.push(m[row].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
