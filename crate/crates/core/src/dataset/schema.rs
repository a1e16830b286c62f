use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default = "default_true")]
    pub missing_allowed: bool,
}

fn default_true() -> bool {
    true
}

impl ColumnSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
            missing_allowed: true,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
            missing_allowed: true,
        }
    }

    pub fn required(mut self) -> Self {
        self.missing_allowed = false;
        self
    }
}

/// Column layout of a dataset.
///
/// JSON shape:
///
/// ```json
/// {
///   "columns": [
///     {"name": "loan_amnt", "kind": "numeric", "missing_allowed": true},
///     {"name": "purpose", "kind": "categorical"}
///   ],
///   "label_column": "loan_status",
///   "month_column": "issue_d"
/// }
/// ```
///
/// `columns` are the feature columns in model order. The label column is read
/// as `0`/`1` unless it is also listed in `columns`, in which case it is kept as
/// a raw column (see [`encode_loan_status`](super::encode_loan_status)).
/// `month_column` is optional and never a feature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct FeatureSchema {
    columns: Vec<ColumnSpec>,
    label_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    month_column: Option<String>,
}

#[derive(Deserialize)]
struct RawSchema {
    columns: Vec<ColumnSpec>,
    label_column: String,
    #[serde(default)]
    month_column: Option<String>,
}

impl TryFrom<RawSchema> for FeatureSchema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        FeatureSchema::new(raw.columns, raw.label_column, raw.month_column)
    }
}

impl FeatureSchema {
    pub fn new(
        columns: Vec<ColumnSpec>,
        label_column: impl Into<String>,
        month_column: Option<String>,
    ) -> Result<Self> {
        let label_column = label_column.into();
        let mut seen = HashSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::Schema("empty column name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        if label_column.is_empty() {
            return Err(Error::Schema("empty label column name".into()));
        }
        if let Some(m) = &month_column {
            if seen.contains(m.as_str()) {
                return Err(Error::Schema(format!(
                    "month column `{m}` cannot also be a feature"
                )));
            }
            if *m == label_column {
                return Err(Error::Schema(format!(
                    "month column `{m}` cannot be the label column"
                )));
            }
        }
        Ok(Self {
            columns,
            label_column,
            month_column,
        })
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn month_column(&self) -> Option<&str> {
        self.month_column.as_deref()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// True when the label is carried as a raw feature-like column rather than 0/1.
    pub fn label_is_raw_column(&self) -> bool {
        self.position(&self.label_column).is_some()
    }

    /// Same layout with different feature columns.
    pub fn with_columns(&self, columns: Vec<ColumnSpec>) -> Result<Self> {
        Self::new(columns, self.label_column.clone(), self.month_column.clone())
    }

    pub fn with_label_column(&self, label: impl Into<String>) -> Result<Self> {
        Self::new(self.columns.clone(), label, self.month_column.clone())
    }

    pub fn without_month(&self) -> Result<Self> {
        Self::new(self.columns.clone(), self.label_column.clone(), None)
    }

    /// Same feature columns, kinds and names; label and month columns may differ.
    pub fn same_features(&self, other: &FeatureSchema) -> bool {
        self.columns.len() == other.columns.len()
            && self
                .columns
                .iter()
                .zip(&other.columns)
                .all(|(a, b)| a.name == b.name && a.kind == b.kind)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_names() {
        let err = FeatureSchema::new(
            vec![ColumnSpec::numeric("a"), ColumnSpec::numeric("a")],
            "y",
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn json_shape() {
        let json = r#"{"columns":[{"name":"a","kind":"numeric"},{"name":"b","kind":"categorical","missing_allowed":false}],
                      "label_column":"y","month_column":"m"}"#;
        let schema: FeatureSchema = serde_json::from_str(json).unwrap();
        assert_eq!(schema.columns().len(), 2);
        assert!(schema.columns()[0].missing_allowed);
        assert!(!schema.columns()[1].missing_allowed);
        assert_eq!(schema.month_column(), Some("m"));

        let dup = r#"{"columns":[{"name":"a","kind":"numeric"}],"label_column":"y","month_column":"a"}"#;
        assert!(serde_json::from_str::<FeatureSchema>(dup).is_err());
    }
}
