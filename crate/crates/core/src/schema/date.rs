use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A collection date at year, year-month or full-day precision
/// (`2023`, `2023-04`, `2023-04-12`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CollectionDate {
    pub year: i32,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

impl CollectionDate {
    pub fn year(year: i32) -> Self {
        CollectionDate { year, month: None, day: None }
    }

    pub fn year_month(year: i32, month: u8) -> Self {
        CollectionDate { year, month: Some(month), day: None }
    }
}

impl fmt::Display for CollectionDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
            if let Some(d) = self.day {
                write!(f, "-{d:02}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for CollectionDate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("`{s}` is not YYYY, YYYY-MM or YYYY-MM-DD");
        let parts: Vec<&str> = s.split('-').collect();
        if parts.is_empty() || parts.len() > 3 || parts[0].len() != 4 {
            return Err(bad());
        }
        if parts.iter().skip(1).any(|p| p.len() != 2) {
            return Err(bad());
        }
        let year: i32 = parts[0].parse().map_err(|_| bad())?;
        let month: Option<u8> = parts.get(1).map(|p| p.parse()).transpose().map_err(|_| bad())?;
        let day: Option<u8> = parts.get(2).map(|p| p.parse()).transpose().map_err(|_| bad())?;
        let ok = match (month, day) {
            (None, _) => true,
            (Some(m), None) => (1..=12).contains(&m),
            (Some(m), Some(d)) => NaiveDate::from_ymd_opt(year, m.into(), d.into()).is_some(),
        };
        if !ok {
            return Err(bad());
        }
        Ok(CollectionDate { year, month, day })
    }
}

impl Serialize for CollectionDate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CollectionDate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
