use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ColumnKind, FeatureSchema, MonthStamp};
use crate::{Error, Result};

/// Reserved category id for strings absent from the dictionary a column was aligned to.
pub const UNKNOWN_CATEGORY: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Column {
    Numeric { values: Vec<Option<f64>> },
    Categorical {
        codes: Vec<Option<u32>>,
        dictionary: Vec<String>,
    },
}

impl Column {
    pub fn numeric(values: Vec<Option<f64>>) -> Self {
        Column::Numeric { values }
    }

    /// Encodes strings in first-seen order.
    pub fn categorical_from_strings<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = Option<&'a str>>,
    {
        let mut dictionary: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, u32> = HashMap::new();
        let codes = values
            .into_iter()
            .map(|v| {
                v.map(|s| {
                    *lookup.entry(s.to_owned()).or_insert_with(|| {
                        dictionary.push(s.to_owned());
                        (dictionary.len() - 1) as u32
                    })
                })
            })
            .collect();
        Column::Categorical { codes, dictionary }
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Numeric { .. } => ColumnKind::Numeric,
            Column::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Numeric { values } => values.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            Column::Numeric { values } => values[row].is_none(),
            Column::Categorical { codes, .. } => codes[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_missing(i)).count()
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match self {
            Column::Numeric { values } => Some(values),
            Column::Categorical { .. } => None,
        }
    }

    /// The string behind a categorical cell; `None` for missing, unknown, or numeric columns.
    pub fn category_str(&self, row: usize) -> Option<&str> {
        match self {
            Column::Categorical { codes, dictionary } => {
                codes[row].and_then(|c| dictionary.get(c as usize).map(String::as_str))
            }
            Column::Numeric { .. } => None,
        }
    }

    fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric { values } => Column::Numeric {
                values: rows.iter().map(|&r| values[r]).collect(),
            },
            Column::Categorical { codes, dictionary } => Column::Categorical {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                dictionary: dictionary.clone(),
            },
        }
    }
}

/// Column-major table with a schema, optional binary labels, month stamps and weights.
///
/// Every row carries a stable `row_id`; filters, splits and concatenations keep it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataset")]
pub struct TabularDataset {
    schema: FeatureSchema,
    columns: Vec<Column>,
    labels: Option<Vec<u8>>,
    months: Option<Vec<MonthStamp>>,
    weights: Option<Vec<f64>>,
    row_ids: Vec<u64>,
}

#[derive(Deserialize)]
struct RawDataset {
    schema: FeatureSchema,
    columns: Vec<Column>,
    labels: Option<Vec<u8>>,
    months: Option<Vec<MonthStamp>>,
    weights: Option<Vec<f64>>,
    row_ids: Vec<u64>,
}

impl TryFrom<RawDataset> for TabularDataset {
    type Error = Error;

    fn try_from(raw: RawDataset) -> Result<Self> {
        let mut ds = TabularDataset::new(raw.schema, raw.columns, raw.labels, raw.months, raw.row_ids)?;
        if let Some(w) = raw.weights {
            ds = ds.with_weights(w)?;
        }
        Ok(ds)
    }
}

impl TabularDataset {
    pub fn new(
        schema: FeatureSchema,
        columns: Vec<Column>,
        labels: Option<Vec<u8>>,
        months: Option<Vec<MonthStamp>>,
        row_ids: Vec<u64>,
    ) -> Result<Self> {
        let n = row_ids.len();
        if columns.len() != schema.columns().len() {
            return Err(Error::Schema(format!(
                "{} columns given for a schema of {}",
                columns.len(),
                schema.columns().len()
            )));
        }
        for (spec, col) in schema.columns().iter().zip(&columns) {
            if spec.kind != col.kind() {
                return Err(Error::Schema(format!(
                    "column `{}` declared {:?} but holds {:?} data",
                    spec.name,
                    spec.kind,
                    col.kind()
                )));
            }
            if col.len() != n {
                return Err(Error::Contract(format!(
                    "column `{}` has {} values for {} rows",
                    spec.name,
                    col.len(),
                    n
                )));
            }
            if let Column::Categorical { codes, dictionary } = col {
                if let Some(bad) = codes
                    .iter()
                    .flatten()
                    .find(|&&c| c != UNKNOWN_CATEGORY && c as usize >= dictionary.len())
                {
                    return Err(Error::Contract(format!(
                        "column `{}` has category id {bad} outside its dictionary",
                        spec.name
                    )));
                }
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Contract(format!("{} labels for {n} rows", l.len())));
            }
            if let Some(bad) = l.iter().find(|&&v| v > 1) {
                return Err(Error::Contract(format!("label {bad} is not 0 or 1")));
            }
        }
        if let Some(m) = &months {
            if m.len() != n {
                return Err(Error::Contract(format!("{} month stamps for {n} rows", m.len())));
            }
        }
        let mut seen = HashSet::with_capacity(n);
        if let Some(dup) = row_ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::Contract(format!("duplicate row id {dup}")));
        }
        Ok(Self {
            schema,
            columns,
            labels,
            months,
            weights: None,
            row_ids,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n_rows() {
            return Err(Error::Contract(format!(
                "{} weights for {} rows",
                weights.len(),
                self.n_rows()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Contract("weights must be finite and non-negative".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn with_labels(mut self, labels: Option<Vec<u8>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.n_rows() || l.iter().any(|&v| v > 1) {
                return Err(Error::Contract("labels must be 0/1, one per row".into()));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.schema.position(name).map(|i| &self.columns[i])
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn months(&self) -> Option<&[MonthStamp]> {
        self.months.as_deref()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    /// Labels, or a degenerate-label error when absent.
    pub fn require_labels(&self) -> Result<&[u8]> {
        self.labels()
            .ok_or_else(|| Error::Schema("dataset has no labels".into()))
    }

    pub fn require_months(&self) -> Result<&[MonthStamp]> {
        self.months()
            .ok_or_else(|| Error::Schema("dataset has no month column".into()))
    }

    /// Map from row id to position.
    pub fn positions_by_id(&self) -> HashMap<u64, usize> {
        self.row_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }

    /// Rows at the given positions, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> TabularDataset {
        TabularDataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&r| l[r]).collect()),
            months: self.months.as_ref().map(|m| rows.iter().map(|&r| m[r]).collect()),
            weights: self.weights.as_ref().map(|w| rows.iter().map(|&r| w[r]).collect()),
            row_ids: rows.iter().map(|&r| self.row_ids[r]).collect(),
        }
    }

    /// Rows with the given ids, in the given order.
    pub fn select_ids(&self, ids: &[u64]) -> Result<TabularDataset> {
        let index = self.positions_by_id();
        let rows = ids
            .iter()
            .map(|id| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::Contract(format!("row id {id} not in dataset")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.take_rows(&rows))
    }

    pub fn filter_rows(&self, mut keep: impl FnMut(usize) -> bool) -> TabularDataset {
        let rows: Vec<usize> = (0..self.n_rows()).filter(|&i| keep(i)).collect();
        self.take_rows(&rows)
    }

    /// Replaces schema and columns, keeping labels, months, weights and ids.
    pub fn with_columns(&self, schema: FeatureSchema, columns: Vec<Column>) -> Result<TabularDataset> {
        let mut ds = TabularDataset::new(
            schema,
            columns,
            self.labels.clone(),
            self.months.clone(),
            self.row_ids.clone(),
        )?;
        ds.weights = self.weights.clone();
        Ok(ds)
    }

    /// Same rows with a new set of row ids.
    pub fn with_row_ids(mut self, row_ids: Vec<u64>) -> Result<TabularDataset> {
        if row_ids.len() != self.n_rows() {
            return Err(Error::Contract("row id count mismatch".into()));
        }
        let mut seen = HashSet::with_capacity(row_ids.len());
        if let Some(dup) = row_ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::Contract(format!("duplicate row id {dup}")));
        }
        self.row_ids = row_ids;
        Ok(self)
    }

    /// Re-encodes categorical columns against `reference`'s dictionaries.
    /// Strings the reference never saw become [`UNKNOWN_CATEGORY`].
    pub fn align_categories(&self, reference: &TabularDataset) -> Result<TabularDataset> {
        if !self.schema.same_features(&reference.schema) {
            return Err(Error::Schema("cannot align datasets with different features".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&reference.columns)
            .map(|(col, refcol)| match (col, refcol) {
                (
                    Column::Categorical { codes, dictionary },
                    Column::Categorical {
                        dictionary: ref_dict,
                        ..
                    },
                ) => {
                    let remap = remap_table(dictionary, ref_dict);
                    Column::Categorical {
                        codes: codes
                            .iter()
                            .map(|c| c.map(|c| remap_code(&remap, c)))
                            .collect(),
                        dictionary: ref_dict.clone(),
                    }
                }
                _ => col.clone(),
            })
            .collect();
        self.with_columns(self.schema.clone(), columns)
    }

    /// Appends `other`'s rows. Dictionaries are merged by string; row ids must not collide.
    pub fn concat(&self, other: &TabularDataset) -> Result<TabularDataset> {
        if !self.schema.same_features(&other.schema) {
            return Err(Error::Schema("cannot concatenate datasets with different features".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| match (a, b) {
                (Column::Numeric { values: va }, Column::Numeric { values: vb }) => Column::Numeric {
                    values: va.iter().chain(vb).copied().collect(),
                },
                (
                    Column::Categorical {
                        codes: ca,
                        dictionary: da,
                    },
                    Column::Categorical {
                        codes: cb,
                        dictionary: db,
                    },
                ) => {
                    let mut dictionary = da.clone();
                    let mut known: HashMap<&str, u32> = da
                        .iter()
                        .enumerate()
                        .map(|(i, s)| (s.as_str(), i as u32))
                        .collect();
                    let mut remap = Vec::with_capacity(db.len());
                    for s in db {
                        let id = *known.entry(s.as_str()).or_insert_with(|| {
                            dictionary.push(s.clone());
                            (dictionary.len() - 1) as u32
                        });
                        remap.push(id);
                    }
                    let codes = ca
                        .iter()
                        .copied()
                        .chain(cb.iter().map(|c| c.map(|c| remap_code(&remap, c))))
                        .collect();
                    Column::Categorical { codes, dictionary }
                }
                _ => unreachable!("kinds checked by same_features"),
            })
            .collect();
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            (None, None) => None,
            _ => return Err(Error::Schema("one side has labels and the other does not".into())),
        };
        let months = match (&self.months, &other.months) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        let row_ids = self.row_ids.iter().chain(&other.row_ids).copied().collect();
        let mut ds = TabularDataset::new(self.schema.clone(), columns, labels, months, row_ids)?;
        if let (Some(a), Some(b)) = (&self.weights, &other.weights) {
            ds.weights = Some(a.iter().chain(b).copied().collect());
        }
        Ok(ds)
    }

    pub fn to_json_file(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<TabularDataset> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

fn remap_table(from: &[String], to: &[String]) -> Vec<u32> {
    let lookup: HashMap<&str, u32> = to
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();
    from.iter()
        .map(|s| lookup.get(s.as_str()).copied().unwrap_or(UNKNOWN_CATEGORY))
        .collect()
}

fn remap_code(remap: &[u32], code: u32) -> u32 {
    remap.get(code as usize).copied().unwrap_or(UNKNOWN_CATEGORY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnSpec;

    fn toy(ids: Vec<u64>, cats: Vec<Option<&str>>) -> TabularDataset {
        let schema = FeatureSchema::new(
            vec![ColumnSpec::numeric("x"), ColumnSpec::categorical("c")],
            "y",
            None,
        )
        .unwrap();
        let n = ids.len();
        TabularDataset::new(
            schema,
            vec![
                Column::numeric((0..n).map(|i| Some(i as f64)).collect()),
                Column::categorical_from_strings(cats),
            ],
            Some((0..n).map(|i| (i % 2) as u8).collect()),
            None,
            ids,
        )
        .unwrap()
    }

    #[test]
    fn duplicate_ids_rejected() {
        let schema = FeatureSchema::new(vec![], "y", None).unwrap();
        assert!(TabularDataset::new(schema, vec![], None, None, vec![1, 1]).is_err());
    }

    #[test]
    fn align_maps_unseen_to_unknown() {
        let train = toy(vec![0, 1], vec![Some("a"), Some("b")]);
        let test = toy(vec![5, 6, 7], vec![Some("b"), Some("z"), None]);
        let aligned = test.align_categories(&train).unwrap();
        match &aligned.columns()[1] {
            Column::Categorical { codes, dictionary } => {
                assert_eq!(dictionary, &vec!["a".to_string(), "b".to_string()]);
                assert_eq!(codes, &vec![Some(1), Some(UNKNOWN_CATEGORY), None]);
            }
            _ => panic!(),
        }
        assert_eq!(aligned.row_ids(), &[5, 6, 7]);
    }

    #[test]
    fn concat_merges_dictionaries() {
        let a = toy(vec![0, 1], vec![Some("a"), Some("b")]);
        let b = toy(vec![2, 3], vec![Some("c"), Some("a")]);
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.n_rows(), 4);
        let c = &ab.columns()[1];
        let strs: Vec<_> = (0..4).map(|i| c.category_str(i)).collect();
        assert_eq!(strs, vec![Some("a"), Some("b"), Some("c"), Some("a")]);
        assert!(a.concat(&a).is_err(), "colliding ids");
    }

    #[test]
    fn select_ids_preserves_ids_and_order() {
        let a = toy(vec![10, 20, 30], vec![Some("a"), None, Some("b")]);
        let s = a.select_ids(&[30, 10]).unwrap();
        assert_eq!(s.row_ids(), &[30, 10]);
        assert_eq!(s.columns()[0].as_numeric().unwrap(), &[Some(2.0), Some(0.0)]);
        assert!(a.select_ids(&[99]).is_err());
    }

    #[test]
    fn json_round_trip_keeps_missing() {
        let a = toy(vec![0, 1, 2], vec![Some("a"), None, Some("b")]);
        let text = serde_json::to_string(&a).unwrap();
        let back: TabularDataset = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
    }
}
