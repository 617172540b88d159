use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::filter::Selection;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryLanguage {
    pub country: String,
    pub language: String,
    /// Fraction of the country's population speaking the language.
    pub fraction: f64,
}

/// Country to spoken-language fractions. Row order is preserved.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountryLanguageTable {
    rows: Vec<CountryLanguage>,
}

impl CountryLanguageTable {
    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/country_languages.csv"))
            .expect("builtin country/language table is valid")
    }

    pub fn load(path: &Path) -> Result<Self, AnalyticsError> {
        let text = std::fs::read_to_string(path).map_err(|e| AnalyticsError::Table {
            what: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AnalyticsError> {
        let rows = csv::Reader::from_reader(text.as_bytes())
            .deserialize::<CountryLanguage>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AnalyticsError::Table { what: "country languages".into(), message: e.to_string() })?;
        Self::from_rows(rows)
    }

    /// Fractions must lie in [0, 1] and each (country, language) pair may
    /// appear once.
    pub fn from_rows(rows: Vec<CountryLanguage>) -> Result<Self, AnalyticsError> {
        let err = |message: String| AnalyticsError::Table { what: "country languages".into(), message };
        let mut seen = BTreeSet::new();
        let rows: Vec<CountryLanguage> = rows
            .into_iter()
            .map(|r| CountryLanguage {
                country: r.country.trim().to_string(),
                language: r.language.trim().to_ascii_lowercase(),
                fraction: r.fraction,
            })
            .collect();
        for r in &rows {
            if !(0.0..=1.0).contains(&r.fraction) {
                return Err(err(format!("fraction {} for {}/{} outside [0, 1]", r.fraction, r.country, r.language)));
            }
            if !seen.insert((r.country.clone(), r.language.clone())) {
                return Err(err(format!("duplicate pair {}/{}", r.country, r.language)));
            }
        }
        Ok(CountryLanguageTable { rows })
    }

    pub fn rows(&self) -> &[CountryLanguage] {
        &self.rows
    }
}

/// Primary language subtag, lowercased; `en-GB` counts as `en`.
fn primary(code: &str) -> String {
    code.split('-').next().unwrap_or("").to_ascii_lowercase()
}

/// Per-country score `sum over languages of fraction * datasets covering the
/// language`. Countries appear once even when every term is zero.
pub fn representation_scores(
    selection: &Selection,
    table: &CountryLanguageTable,
) -> BTreeMap<String, f64> {
    let mut coverage: HashMap<String, u64> = HashMap::new();
    for (sr, _) in selection.records() {
        let langs: BTreeSet<String> = sr.record.languages.iter().map(|l| primary(l)).collect();
        for l in langs {
            *coverage.entry(l).or_default() += 1;
        }
    }
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for row in &table.rows {
        let n = coverage.get(&primary(&row.language)).copied().unwrap_or(0);
        *scores.entry(row.country.clone()).or_insert(0.0) += row.fraction * n as f64;
    }
    scores
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let t = CountryLanguageTable::builtin();
        assert!(t.rows().iter().any(|r| r.country == "US" && r.language == "en"));
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(CountryLanguageTable::parse("country,language,fraction\nUS,en,1.5\n").is_err());
        assert!(CountryLanguageTable::parse("country,language,fraction\nUS,en,0.5\nUS,en,0.2\n").is_err());
        assert!(CountryLanguageTable::parse("country,language\nUS,en\n").is_err());
    }
}
