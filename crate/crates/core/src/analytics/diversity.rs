use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{differential_entropy, mean_sem, normalized_shannon_entropy, Estimator, MIN_SAMPLES};
use crate::filter::Selection;
use crate::ingest::StoredRecord;
use crate::license::UseCategory;

/// License groups compared in diversity reports; Non-Commercial and
/// Academic-Only are pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UseGroup {
    Commercial,
    Unspecified,
    NcAo,
}

impl From<UseCategory> for UseGroup {
    fn from(c: UseCategory) -> Self {
        match c {
            UseCategory::Commercial => UseGroup::Commercial,
            UseCategory::Unspecified => UseGroup::Unspecified,
            UseCategory::NonCommercial | UseCategory::AcademicOnly => UseGroup::NcAo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feature {
    Tasks,
    Languages,
    Topics,
    Sources,
    InputChars,
    TargetChars,
    SyntheticFraction,
}

impl Feature {
    pub const ALL: [Feature; 7] = [
        Feature::Tasks,
        Feature::Languages,
        Feature::Topics,
        Feature::Sources,
        Feature::InputChars,
        Feature::TargetChars,
        Feature::SyntheticFraction,
    ];

    pub const DISCRETE: [Feature; 4] =
        [Feature::Tasks, Feature::Languages, Feature::Topics, Feature::Sources];

    fn categories(self, r: &StoredRecord) -> Option<BTreeSet<&str>> {
        let r = &r.record;
        let items: Box<dyn Iterator<Item = &String>> = match self {
            Feature::Tasks => Box::new(r.task_categories.iter()),
            Feature::Languages => Box::new(r.languages.iter()),
            Feature::Topics => Box::new(r.text_topics.iter()),
            Feature::Sources => Box::new(r.text_sources.iter()),
            _ => return None,
        };
        Some(items.map(String::as_str).collect())
    }

    fn continuous(self, r: &StoredRecord) -> Option<f64> {
        let m = r.record.text_metrics.as_ref()?;
        match self {
            Feature::InputChars => Some(m.input_chars.mean),
            Feature::TargetChars => Some(m.target_chars.mean),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub samples: usize,
    pub mean: f64,
    /// Standard error of the mean.
    pub sem: f64,
    /// Normalized Shannon entropy for discrete features, differential
    /// entropy (nats) for continuous ones, absent for the synthetic fraction
    /// or when there is too little data.
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDiversity {
    pub datasets: usize,
    pub features: BTreeMap<Feature, FeatureStat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    /// Groups with no datasets are absent.
    pub groups: BTreeMap<UseGroup, GroupDiversity>,
    /// Category universe size per discrete feature, over the whole selection.
    pub universe: BTreeMap<Feature, usize>,
}

impl DiversityReport {
    pub fn stat(&self, group: UseGroup, feature: Feature) -> Option<&FeatureStat> {
        self.groups.get(&group)?.features.get(&feature)
    }
}

/// Per-group feature means and entropies. Entropy normalizers use the
/// category universe of the whole selection so groups are comparable.
pub fn diversity_report(selection: &Selection, estimator: Estimator) -> DiversityReport {
    let mut grouped: BTreeMap<UseGroup, Vec<&StoredRecord>> = BTreeMap::new();
    for (sr, rights) in selection.records() {
        grouped.entry(rights.profile.use_category.into()).or_default().push(sr);
    }
    let mut universe = BTreeMap::new();
    for f in Feature::DISCRETE {
        let all: BTreeSet<&str> = selection
            .records()
            .filter_map(|(sr, _)| f.categories(sr))
            .flatten()
            .collect();
        universe.insert(f, all.len());
    }

    let groups = grouped
        .into_iter()
        .map(|(group, records)| {
            let mut features = BTreeMap::new();
            for f in Feature::ALL {
                let stat = match f {
                    Feature::SyntheticFraction => {
                        let xs: Vec<f64> = records
                            .iter()
                            .map(|r| if r.record.origin.is_synthetic() { 1.0 } else { 0.0 })
                            .collect();
                        let (mean, sem) = mean_sem(&xs);
                        FeatureStat { samples: xs.len(), mean, sem, entropy: None }
                    }
                    Feature::InputChars | Feature::TargetChars => {
                        let xs: Vec<f64> = records.iter().filter_map(|r| f.continuous(r)).collect();
                        let (mean, sem) = mean_sem(&xs);
                        let entropy = (xs.len() >= MIN_SAMPLES)
                            .then(|| differential_entropy(&xs, estimator).ok())
                            .flatten();
                        FeatureStat { samples: xs.len(), mean, sem, entropy }
                    }
                    _ => {
                        let sets: Vec<BTreeSet<&str>> =
                            records.iter().filter_map(|r| f.categories(r)).collect();
                        let sizes: Vec<f64> = sets.iter().map(|s| s.len() as f64).collect();
                        let (mean, sem) = mean_sem(&sizes);
                        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
                        for s in &sets {
                            for c in s {
                                *counts.entry(c).or_default() += 1;
                            }
                        }
                        let counts: Vec<u64> = counts.into_values().collect();
                        let entropy =
                            normalized_shannon_entropy(&counts, universe.get(&f).copied().unwrap_or(0)).ok();
                        FeatureStat { samples: sets.len(), mean, sem, entropy }
                    }
                };
                features.insert(f, stat);
            }
            (group, GroupDiversity { datasets: records.len(), features })
        })
        .collect();
    DiversityReport { groups, universe }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Store;
    use crate::license::{LicenseRegistry, Policy};
    use crate::schema::{DatasetRecord, EvidenceSource, LicenseEvidence, Origin};
    use std::sync::Arc;

    fn rec(i: usize, license: Option<&str>, tasks: &[&str], synthetic: bool) -> DatasetRecord {
        let mut r = DatasetRecord::new(format!("c/{i}"), "x", "c");
        if let Some(l) = license {
            r.licenses.push(LicenseEvidence {
                raw_name: l.into(),
                canonical_id: None,
                url: None,
                evidence_source: EvidenceSource::Paper,
                author_stated: true,
            });
        }
        r.task_categories = tasks.iter().map(|s| s.to_string()).collect();
        if synthetic {
            r.origin = Origin::ModelGenerated;
        }
        r
    }

    fn report(records: Vec<DatasetRecord>) -> DiversityReport {
        let store = Store::from_records(records, Arc::new(LicenseRegistry::builtin()), Policy::default())
            .unwrap();
        diversity_report(&Selection::all(&Arc::new(store)), Estimator::default())
    }

    #[test]
    fn nc_has_twice_the_tasks() {
        let mut rs = Vec::new();
        for i in 0..6 {
            rs.push(rec(i, Some("mit"), &["Translation"], false));
        }
        for i in 6..10 {
            rs.push(rec(i, Some("cc-by-nc-4.0"), &["Translation", "Brainstorming"], true));
        }
        let r = report(rs);
        let c = r.stat(UseGroup::Commercial, Feature::Tasks).unwrap();
        let nc = r.stat(UseGroup::NcAo, Feature::Tasks).unwrap();
        assert_eq!(nc.mean, 2.0 * c.mean);
        assert_eq!(c.sem, 0.0);
        // commercial uses one of two categories, nc spreads evenly over both
        assert_eq!(c.entropy, Some(0.0));
        assert_eq!(nc.entropy, Some(1.0));
        assert_eq!(r.stat(UseGroup::NcAo, Feature::SyntheticFraction).unwrap().mean, 1.0);
        assert!(r.stat(UseGroup::NcAo, Feature::SyntheticFraction).unwrap().entropy.is_none());
        assert_eq!(r.universe[&Feature::Tasks], 2);
    }

    #[test]
    fn single_group() {
        let r = report(vec![rec(0, None, &["Translation"], false)]);
        assert_eq!(r.groups.len(), 1);
        assert!(r.groups.contains_key(&UseGroup::Unspecified));
        assert!(!r.groups.contains_key(&UseGroup::Commercial));
    }

    #[test]
    fn synthetic_sem_is_bernoulli_sem() {
        let mut rs = Vec::new();
        for i in 0..40 {
            rs.push(rec(i, Some("mit"), &[], i % 4 == 0));
        }
        let s = report(rs).stat(UseGroup::Commercial, Feature::SyntheticFraction).unwrap().clone();
        assert_eq!(s.mean, 0.25);
        let expected = (0.25f64 * 0.75 / 39.0).sqrt();
        assert!((s.sem - expected).abs() < 1e-12);
    }
}
