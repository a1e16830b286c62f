//! Maps raw feature values to histogram bins. Every feature has `n_bins` value
//! bins plus one trailing bin for missing values.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, TabularDataset, UNKNOWN_CATEGORY};
use crate::{Error, Result};

/// How one feature's values are bucketed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BinMapper {
    /// Bin `i` holds values `v` with `upper_bounds[i-1] < v <= upper_bounds[i]`;
    /// the last bound is +inf and is not serialized.
    Numeric {
        #[serde(with = "finite_bounds")]
        upper_bounds: Vec<f64>,
    },
    /// Bin `i` is category `categories[i]`.
    Categorical { categories: Vec<String> },
}

mod finite_bounds {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v[..v.len().saturating_sub(1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let mut v = Vec::<f64>::deserialize(d)?;
        v.push(f64::INFINITY);
        Ok(v)
    }
}

impl BinMapper {
    pub fn n_bins(&self) -> usize {
        match self {
            BinMapper::Numeric { upper_bounds } => upper_bounds.len(),
            BinMapper::Categorical { categories } => categories.len(),
        }
    }

    pub fn missing_bin(&self) -> u16 {
        self.n_bins() as u16
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            BinMapper::Numeric { .. } => ColumnKind::Numeric,
            BinMapper::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    /// Numeric mapper from raw values.
    ///
    /// With at most `max_bins` distinct values every value gets its own bin and
    /// boundaries sit at midpoints between neighbours. Otherwise bins are cut at
    /// approximately equal-frequency points, again at midpoints.
    pub fn numeric(values: &[Option<f64>], max_bins: usize) -> Self {
        let mut present: Vec<f64> = values.iter().flatten().copied().collect();
        present.sort_by(f64::total_cmp);
        let mut distinct: Vec<(f64, usize)> = Vec::new();
        for v in present.iter().copied() {
            match distinct.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => distinct.push((v, 1)),
            }
        }
        let mut upper_bounds = Vec::new();
        if distinct.len() <= max_bins {
            for w in distinct.windows(2) {
                upper_bounds.push(midpoint(w[0].0, w[1].0));
            }
        } else {
            let total = present.len() as f64;
            let per_bin = total / max_bins as f64;
            let mut cum = 0usize;
            for (i, w) in distinct.windows(2).enumerate() {
                cum += w[0].1;
                let remaining_values = distinct.len() - i - 1;
                let remaining_bins = max_bins - 1 - upper_bounds.len();
                let target = per_bin * (upper_bounds.len() + 1) as f64;
                if remaining_bins > 0 && (cum as f64 >= target || remaining_values <= remaining_bins) {
                    upper_bounds.push(midpoint(w[0].0, w[1].0));
                }
            }
        }
        upper_bounds.push(f64::INFINITY);
        BinMapper::Numeric { upper_bounds }
    }

    /// Categorical mapper keeping the first `max_bins` dictionary entries;
    /// later ones fall into the missing bin.
    pub fn categorical(dictionary: &[String], max_bins: usize) -> Self {
        BinMapper::Categorical {
            categories: dictionary.iter().take(max_bins).cloned().collect(),
        }
    }

    pub fn bin_value(&self, v: Option<f64>) -> u16 {
        match (self, v) {
            (BinMapper::Numeric { upper_bounds }, Some(v)) => {
                upper_bounds.partition_point(|&ub| ub < v) as u16
            }
            _ => self.missing_bin(),
        }
    }

    /// Bins a column, remapping category ids through the mapper's own dictionary.
    pub fn bin_column(&self, col: &Column, name: &str) -> Result<Vec<u16>> {
        match (self, col) {
            (BinMapper::Numeric { .. }, Column::Numeric { values }) => {
                Ok(values.iter().map(|&v| self.bin_value(v)).collect())
            }
            (BinMapper::Categorical { categories }, Column::Categorical { codes, dictionary }) => {
                let remap = category_remap(categories, dictionary);
                let missing = self.missing_bin();
                Ok(codes
                    .iter()
                    .map(|c| match c {
                        Some(c) if *c != UNKNOWN_CATEGORY => remap
                            .get(*c as usize)
                            .copied()
                            .flatten()
                            .map_or(missing, |b| b as u16),
                        _ => missing,
                    })
                    .collect())
            }
            _ => Err(Error::Schema(format!("feature `{name}` changed kind"))),
        }
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // guard against rounding onto the upper neighbour
    if m >= b { a } else { m }
}

/// For each id of `dictionary`, its index in `model_categories`.
pub(crate) fn category_remap(model_categories: &[String], dictionary: &[String]) -> Vec<Option<u32>> {
    let lookup: HashMap<&str, u32> = model_categories
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();
    dictionary.iter().map(|s| lookup.get(s.as_str()).copied()).collect()
}

/// Column-major bin codes for a set of features.
#[derive(Clone, Debug)]
pub struct BinnedMatrix {
    pub columns: Vec<Vec<u16>>,
    pub n_rows: usize,
}

/// Builds mappers from the training data.
pub fn fit_mappers(ds: &TabularDataset, max_bins: usize) -> Vec<BinMapper> {
    ds.columns()
        .iter()
        .map(|col| match col {
            Column::Numeric { values } => BinMapper::numeric(values, max_bins),
            Column::Categorical { dictionary, .. } => BinMapper::categorical(dictionary, max_bins),
        })
        .collect()
}

/// Bins `ds` with the given mappers, matching features by name.
pub fn bin_dataset(ds: &TabularDataset, names: &[String], mappers: &[BinMapper]) -> Result<BinnedMatrix> {
    let columns = names
        .iter()
        .zip(mappers)
        .map(|(name, mapper)| {
            let col = ds
                .column(name)
                .ok_or_else(|| Error::Schema(format!("feature `{name}` missing from dataset")))?;
            mapper.bin_column(col, name)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinnedMatrix {
        columns,
        n_rows: ds.n_rows(),
    })
}
