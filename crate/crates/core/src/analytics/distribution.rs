use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::filter::Selection;
use crate::license::UseCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Every applied license instance counts once.
    Licenses,
    /// Every dataset counts once, under its composed use category.
    Datasets,
}

impl FromStr for Denominator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "licenses" => Ok(Denominator::Licenses),
            "datasets" => Ok(Denominator::Datasets),
            other => Err(format!("unknown denominator `{other}` (expected licenses or datasets)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionBucket {
    pub key: String,
    pub count: usize,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub denominator: Denominator,
    pub total: usize,
    /// Sorted by descending count, then key.
    pub buckets: Vec<DistributionBucket>,
}

impl Distribution {
    fn from_counts(denominator: Denominator, counts: BTreeMap<String, usize>) -> Self {
        let total: usize = counts.values().sum();
        let mut buckets: Vec<DistributionBucket> = counts
            .into_iter()
            .map(|(key, count)| DistributionBucket { key, count, share: count as f64 / total as f64 })
            .collect();
        buckets.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
        Distribution { denominator, total, buckets }
    }

    pub fn share_of(&self, key: &str) -> Option<f64> {
        self.buckets.iter().find(|b| b.key == key).map(|b| b.share)
    }
}

/// Key for license instances whose name the registry does not know.
pub const UNRECOGNISED_LICENSE_KEY: &str = "custom";

/// Histogram of canonical license ids (`Licenses`) or of composed use
/// categories (`Datasets`).
pub fn license_distribution(selection: &Selection, denominator: Denominator) -> Distribution {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for (_, rights) in selection.records() {
        match denominator {
            Denominator::Licenses => {
                for a in &rights.applied {
                    let key = a.evidence.canonical_id.as_deref().unwrap_or(UNRECOGNISED_LICENSE_KEY);
                    *counts.entry(key.to_string()).or_default() += 1;
                }
            }
            Denominator::Datasets => {
                *counts.entry(rights.profile.use_category.as_str().to_string()).or_default() += 1;
            }
        }
    }
    Distribution::from_counts(denominator, counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: UseCategory,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub total: usize,
    /// Always four rows, in `UseCategory::ALL` order.
    pub rows: Vec<CategoryCount>,
}

impl CategoryCounts {
    pub fn count(&self, c: UseCategory) -> usize {
        self.rows[c.index()].count
    }

    pub fn percent(&self, c: UseCategory) -> f64 {
        self.rows[c.index()].percent
    }
}

pub fn use_category_counts(selection: &Selection) -> CategoryCounts {
    let mut counts = [0usize; 4];
    for (_, rights) in selection.records() {
        counts[rights.profile.use_category.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    let rows = UseCategory::ALL
        .iter()
        .map(|c| CategoryCount {
            category: *c,
            count: counts[c.index()],
            percent: if total == 0 { 0.0 } else { 100.0 * counts[c.index()] as f64 / total as f64 },
        })
        .collect();
    CategoryCounts { total, rows }
}

/// Attribution and share-alike prevalence over both denominators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionRates {
    pub licenses: usize,
    pub licenses_attribution: f64,
    pub licenses_share_alike: f64,
    /// Datasets with at least one applied license.
    pub datasets: usize,
    pub datasets_attribution: f64,
    pub datasets_share_alike: f64,
}

pub fn restriction_rates(selection: &Selection) -> RestrictionRates {
    let (mut lic, mut lic_attr, mut lic_sa) = (0usize, 0usize, 0usize);
    let (mut ds, mut ds_attr, mut ds_sa) = (0usize, 0usize, 0usize);
    for (_, rights) in selection.records() {
        for a in &rights.applied {
            lic += 1;
            lic_attr += a.profile.attribution_required as usize;
            lic_sa += a.profile.share_alike_required as usize;
        }
        if !rights.applied.is_empty() {
            ds += 1;
            ds_attr += rights.profile.attribution_required as usize;
            ds_sa += rights.profile.share_alike_required as usize;
        }
    }
    let rate = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    RestrictionRates {
        licenses: lic,
        licenses_attribution: rate(lic_attr, lic),
        licenses_share_alike: rate(lic_sa, lic),
        datasets: ds,
        datasets_attribution: rate(ds_attr, ds),
        datasets_share_alike: rate(ds_sa, ds),
    }
}
