use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

const MONTH_ABBREVIATIONS: [&str; 12] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
];

/// A calendar month, ordered by `(year, month)`.
///
/// Parses `2018-01`, `2018M1` / `2018M01` and the Lending Club style `Jan-2018`.
/// Formats as `2018-01`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthStamp {
    year: i32,
    month: u8,
}

impl MonthStamp {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Contract(format!("month {month} outside 1..=12")));
        }
        Ok(Self {
            year,
            month: month as u8,
        })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        u32::from(self.month)
    }

    /// Months since year 0, month 1; differences of this are month distances.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(12) as i32,
            month: (ordinal.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn plus_months(self, n: i64) -> Self {
        Self::from_ordinal(self.ordinal() + n)
    }

    pub fn succ(self) -> Self {
        self.plus_months(1)
    }

    /// `2018M1` style used in reports.
    pub fn compact(self) -> String {
        format!("{}M{}", self.year, self.month)
    }

    /// Inclusive range of months from `self` to `end`.
    pub fn range_inclusive(self, end: MonthStamp) -> impl Iterator<Item = MonthStamp> {
        (self.ordinal()..=end.ordinal()).map(MonthStamp::from_ordinal)
    }
}

impl fmt::Display for MonthStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthStamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Contract(format!("unrecognised month stamp `{s}`"));
        let parse_num = |t: &str| -> Result<i64> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<i64>().map_err(|_| bad())
        };

        if let Some((year, month)) = s.split_once(['M', 'm']) {
            if !year.is_empty() && year.bytes().all(|b| b.is_ascii_digit()) {
                return MonthStamp::new(parse_num(year)? as i32, parse_num(month)? as u32);
            }
        }
        if let Some((left, right)) = s.split_once('-') {
            if left.len() == 4 && left.bytes().all(|b| b.is_ascii_digit()) {
                return MonthStamp::new(parse_num(left)? as i32, parse_num(right)? as u32);
            }
            let lower = left.to_ascii_lowercase();
            if let Some(idx) = MONTH_ABBREVIATIONS.iter().position(|m| *m == lower) {
                return MonthStamp::new(parse_num(right)? as i32, idx as u32 + 1);
            }
        }
        Err(bad())
    }
}

impl Serialize for MonthStamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthStamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
