use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::filter::Selection;
use crate::license::UseCategory;
use crate::schema::DatasetRecord;

/// Family assigned to language codes absent from the family table.
pub const UNMAPPED: &str = "unmapped";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Year,
    LanguageFamily,
    TaskCategory,
    SourceDomain,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Year => "year",
            Axis::LanguageFamily => "language-family",
            Axis::TaskCategory => "task-category",
            Axis::SourceDomain => "source-domain",
        }
    }
}

impl FromStr for Axis {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "year" => Ok(Axis::Year),
            "language-family" | "language" | "family" => Ok(Axis::LanguageFamily),
            "task-category" | "task" => Ok(Axis::TaskCategory),
            "source-domain" | "domain" => Ok(Axis::SourceDomain),
            _ => Err(AnalyticsError::UnknownAxis(s.to_string())),
        }
    }
}

/// Language code to family lookup.
#[derive(Debug, Clone, Default)]
pub struct LanguageFamilies {
    map: BTreeMap<String, String>,
}

impl LanguageFamilies {
    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/language_families.csv"))
            .expect("builtin language family table is valid")
    }

    pub fn load(path: &Path) -> Result<Self, AnalyticsError> {
        let text = std::fs::read_to_string(path).map_err(|e| AnalyticsError::Table {
            what: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AnalyticsError> {
        #[derive(Deserialize)]
        struct Row {
            language: String,
            family: String,
        }
        let err = |message: String| AnalyticsError::Table { what: "language families".into(), message };
        let mut map = BTreeMap::new();
        for row in csv::Reader::from_reader(text.as_bytes()).deserialize::<Row>() {
            let row = row.map_err(|e| err(e.to_string()))?;
            let code = row.language.trim().to_ascii_lowercase();
            if map.insert(code.clone(), row.family.trim().to_string()).is_some() {
                return Err(err(format!("duplicate language `{code}`")));
            }
        }
        Ok(LanguageFamilies { map })
    }

    /// Exact code first, then the primary subtag.
    pub fn family_of(&self, code: &str) -> &str {
        let code = code.to_ascii_lowercase();
        if let Some(f) = self.map.get(&code) {
            return f;
        }
        let primary = code.split('-').next().unwrap_or("");
        self.map.get(primary).map(String::as_str).unwrap_or(UNMAPPED)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownBucket {
    pub key: String,
    pub total: usize,
    pub counts: BTreeMap<UseCategory, usize>,
    /// Share of datasets in the bucket that are Non-Commercial or Academic-Only.
    pub restricted_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub axis: Axis,
    /// Sorted by key. A dataset counts once in every bucket it belongs to.
    pub buckets: Vec<BreakdownBucket>,
}

impl Breakdown {
    pub fn bucket(&self, key: &str) -> Option<&BreakdownBucket> {
        self.buckets.iter().find(|b| b.key == key)
    }
}

fn keys(record: &DatasetRecord, axis: Axis, families: &LanguageFamilies) -> BTreeSet<String> {
    match axis {
        Axis::Year => record.year().map(|y| y.to_string()).into_iter().collect(),
        Axis::LanguageFamily => {
            record.languages.iter().map(|l| families.family_of(l).to_string()).collect()
        }
        Axis::TaskCategory => record.task_categories.iter().cloned().collect(),
        Axis::SourceDomain => record.source_domains.iter().cloned().collect(),
    }
}

/// Use-category counts per bucket along `axis`. Datasets without a value on
/// the axis (no year, no languages...) are left out.
pub fn breakdown(selection: &Selection, axis: Axis, families: &LanguageFamilies) -> Breakdown {
    let mut acc: BTreeMap<String, BTreeMap<UseCategory, usize>> = BTreeMap::new();
    for (sr, rights) in selection.records() {
        for key in keys(&sr.record, axis, families) {
            *acc.entry(key).or_default().entry(rights.profile.use_category).or_default() += 1;
        }
    }
    let buckets = acc
        .into_iter()
        .map(|(key, mut counts)| {
            let total: usize = counts.values().sum();
            let restricted: usize =
                counts.iter().filter(|(c, _)| c.is_restricted()).map(|(_, n)| n).sum();
            for c in UseCategory::ALL {
                counts.entry(c).or_insert(0);
            }
            BreakdownBucket { key, total, counts, restricted_share: restricted as f64 / total as f64 }
        })
        .collect();
    Breakdown { axis, buckets }
}
