//! License, agreement, diversity and representation analytics.
//!
//! Every analysis runs over a [`Selection`](crate::filter::Selection); use
//! [`Selection::all`](crate::filter::Selection::all) for a whole store.

mod agreement;
mod breakdown;
mod distribution;
mod diversity;
mod entropy;
mod representation;

use thiserror::Error;

pub use agreement::{agreement_matrix, error_rates, AgreementMatrix, ErrorRates};
pub use breakdown::{breakdown, Axis, Breakdown, BreakdownBucket, LanguageFamilies, UNMAPPED};
pub use distribution::{
    license_distribution, restriction_rates, use_category_counts, CategoryCount, CategoryCounts,
    Denominator, Distribution, DistributionBucket, RestrictionRates,
};
pub use diversity::{diversity_report, DiversityReport, Feature, FeatureStat, GroupDiversity, UseGroup};
pub use entropy::{
    differential_entropy, normalized_shannon_entropy, Estimator, DISTANCE_FLOOR, MIN_SAMPLES,
};
pub use representation::{representation_scores, CountryLanguage, CountryLanguageTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("entropy of empty counts")]
    EmptyCounts,
    #[error("category universe of size {k} cannot hold {observed} observed categories")]
    InvalidUniverse { k: usize, observed: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("non-finite sample")]
    NonFiniteSample,
    #[error("unknown axis `{0}` (expected year, language-family, task-category or source-domain)")]
    UnknownAxis(String),
    #[error("{what}: {message}")]
    Table { what: String, message: String },
}

/// Mean and standard error of the mean (sample standard deviation / sqrt(n)).
pub(crate) fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
