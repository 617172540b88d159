use serde::{Deserialize, Serialize};

use crate::filter::Selection;
use crate::license::{LicenseRegistry, Policy, UseCategory, CONSERVATIVE_PROFILE};
use crate::schema::Aggregator;

/// Verified category (rows) against the aggregator's own label (columns),
/// both in `UseCategory::ALL` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub aggregator: Aggregator,
    pub cells: [[u64; 4]; 4],
}

impl AgreementMatrix {
    pub fn new(aggregator: Aggregator) -> Self {
        AgreementMatrix { aggregator, cells: [[0; 4]; 4] }
    }

    pub fn cell(&self, verified: UseCategory, labelled: UseCategory) -> u64 {
        self.cells[verified.index()][labelled.index()]
    }

    pub fn row(&self, verified: UseCategory) -> [u64; 4] {
        self.cells[verified.index()]
    }

    /// Column sums.
    pub fn totals(&self) -> [u64; 4] {
        let mut t = [0; 4];
        for row in &self.cells {
            for (i, v) in row.iter().enumerate() {
                t[i] += v;
            }
        }
        t
    }

    /// Records with a link to this aggregator.
    pub fn considered(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }
}

/// Category implied by an aggregator's raw label; absent labels are
/// Unspecified, unknown names get the conservative profile.
pub fn label_category(label: Option<&str>, registry: &LicenseRegistry, policy: &Policy) -> UseCategory {
    let Some(label) = label.filter(|l| !l.trim().is_empty()) else {
        return UseCategory::Unspecified;
    };
    match registry.normalize(label).canonical_id() {
        Some(id) => registry
            .profile_of(id, policy)
            .map(|p| p.use_category)
            .unwrap_or(CONSERVATIVE_PROFILE.use_category),
        None => CONSERVATIVE_PROFILE.use_category,
    }
}

/// Records without a link to `aggregator` are not considered.
pub fn agreement_matrix(selection: &Selection, aggregator: Aggregator) -> AgreementMatrix {
    let registry = selection.store().registry();
    let policy = selection.policy();
    let mut m = AgreementMatrix::new(aggregator);
    for (sr, rights) in selection.records() {
        let r = &sr.record;
        if r.links.for_aggregator(aggregator).is_none() {
            continue;
        }
        let verified = rights.profile.use_category;
        let labelled = label_category(
            r.aggregator_labels.get(&aggregator).map(String::as_str),
            registry,
            policy,
        );
        m.cells[verified.index()][labelled.index()] += 1;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub considered: u64,
    /// Share of records the aggregator leaves Unspecified.
    pub omission_rate: f64,
    /// Share on the diagonal.
    pub exact_match_rate: f64,
    /// Share where the aggregator's category is strictly more permissive
    /// than the verified one, ordering
    /// `Commercial < Unspecified < NonCommercial < AcademicOnly`.
    pub too_permissive_rate: f64,
}

pub fn error_rates(m: &AgreementMatrix) -> ErrorRates {
    let total = m.considered();
    if total == 0 {
        return ErrorRates { considered: 0, omission_rate: 0.0, exact_match_rate: 0.0, too_permissive_rate: 0.0 };
    }
    let mut diag = 0;
    let mut permissive = 0;
    for v in 0..4 {
        for a in 0..4 {
            let n = m.cells[v][a];
            if a == v {
                diag += n;
            } else if a < v {
                permissive += n;
            }
        }
    }
    let omitted = m.totals()[UseCategory::Unspecified.index()];
    let t = total as f64;
    ErrorRates {
        considered: total,
        omission_rate: omitted as f64 / t,
        exact_match_rate: diag as f64 / t,
        too_permissive_rate: permissive as f64 / t,
    }
}
