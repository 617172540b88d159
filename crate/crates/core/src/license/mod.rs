//! License lineage: normalization, rights profiles and strictest-wins composition.

mod categorize;
mod registry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use categorize::{
    categorize_dataset, detect_conflicts, hex_digest, AppliedLicense, Categorization, Conflict, Policy,
    CONSERVATIVE_PROFILE,
};
pub use registry::{normalize_key, LicenseMatch, LicenseRegistry, LicenseRegistryEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LicenseError {
    #[error("unknown license id `{0}`")]
    UnknownId(String),
    #[error("cannot compose an empty lineage")]
    EmptyComposition,
    #[error("unspecified profile passed to compose")]
    UnspecifiedInComposition,
    #[error("registry line {line}: {message}")]
    Registry { line: usize, message: String },
    #[error("duplicate canonical id `{0}` in registry")]
    DuplicateId(String),
    #[error("alias `{alias}` maps to both `{first}` and `{second}`")]
    AliasCollision {
        alias: String,
        first: String,
        second: String,
    },
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
}

/// Permitted-use category. Declaration order is the strictness order
/// `Commercial < Unspecified < NonCommercial < AcademicOnly`; composition
/// never sees `Unspecified`, so among composable values this is
/// `Commercial < NonCommercial < AcademicOnly`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "kebab-case")]
pub enum UseCategory {
    #[default]
    Commercial,
    Unspecified,
    NonCommercial,
    AcademicOnly,
}

impl UseCategory {
    /// Row/column order used by every report.
    pub const ALL: [UseCategory; 4] = [
        UseCategory::Commercial,
        UseCategory::Unspecified,
        UseCategory::NonCommercial,
        UseCategory::AcademicOnly,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UseCategory::Commercial => "commercial",
            UseCategory::Unspecified => "unspecified",
            UseCategory::NonCommercial => "non-commercial",
            UseCategory::AcademicOnly => "academic-only",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            UseCategory::Commercial => "Commercial",
            UseCategory::Unspecified => "Unspecified",
            UseCategory::NonCommercial => "Non-Commercial",
            UseCategory::AcademicOnly => "Academic-Only",
        }
    }

    pub fn is_restricted(self) -> bool {
        matches!(self, UseCategory::NonCommercial | UseCategory::AcademicOnly)
    }
}

impl fmt::Display for UseCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for UseCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "commercial" | "c" => Ok(UseCategory::Commercial),
            "unspecified" | "u" => Ok(UseCategory::Unspecified),
            "noncommercial" | "nc" => Ok(UseCategory::NonCommercial),
            "academiconly" | "ao" => Ok(UseCategory::AcademicOnly),
            _ => Err(format!(
                "unknown use category `{s}` (expected commercial, unspecified, non-commercial or academic-only)"
            )),
        }
    }
}

/// What a license (or a lineage of licenses) permits and requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RightsProfile {
    #[serde(rename = "use")]
    pub use_category: UseCategory,
    pub attribution_required: bool,
    pub share_alike_required: bool,
}

impl RightsProfile {
    /// Identity of [`compose`].
    pub const IDENTITY: RightsProfile = RightsProfile {
        use_category: UseCategory::Commercial,
        attribution_required: false,
        share_alike_required: false,
    };

    /// The profile of a dataset with no license found.
    pub const UNSPECIFIED: RightsProfile = RightsProfile {
        use_category: UseCategory::Unspecified,
        attribution_required: false,
        share_alike_required: false,
    };

    pub const fn new(use_category: UseCategory, attribution: bool, share_alike: bool) -> Self {
        RightsProfile {
            use_category,
            attribution_required: attribution,
            share_alike_required: share_alike,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.use_category != UseCategory::Unspecified
            || (!self.attribution_required && !self.share_alike_required)
    }

    /// Strictest-wins join of two composable profiles.
    pub fn join(self, other: RightsProfile) -> Result<RightsProfile, LicenseError> {
        if self.use_category == UseCategory::Unspecified
            || other.use_category == UseCategory::Unspecified
        {
            return Err(LicenseError::UnspecifiedInComposition);
        }
        Ok(RightsProfile {
            use_category: self.use_category.max(other.use_category),
            attribution_required: self.attribution_required || other.attribution_required,
            share_alike_required: self.share_alike_required || other.share_alike_required,
        })
    }
}

impl fmt::Display for RightsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, attribution={}, share-alike={})",
            self.use_category, self.attribution_required, self.share_alike_required
        )
    }
}

/// Composes a non-empty lineage: strictest use category, OR over the
/// attribution and share-alike flags.
pub fn compose(profiles: &[RightsProfile]) -> Result<RightsProfile, LicenseError> {
    if profiles.is_empty() {
        return Err(LicenseError::EmptyComposition);
    }
    profiles
        .iter()
        .try_fold(RightsProfile::IDENTITY, |acc, p| acc.join(*p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use UseCategory::*;

    const fn p(u: UseCategory, a: bool, s: bool) -> RightsProfile {
        RightsProfile::new(u, a, s)
    }

    #[test]
    fn singleton_is_identity() {
        assert_eq!(compose(&[p(Commercial, true, true)]).unwrap(), p(Commercial, true, true));
    }

    #[test]
    fn by_with_nc_sa() {
        let by = p(Commercial, true, false);
        let nc_sa = p(NonCommercial, true, true);
        assert_eq!(compose(&[by, nc_sa]).unwrap(), p(NonCommercial, true, true));
    }

    #[test]
    fn academic_only_dominates() {
        let got = compose(&[
            p(Commercial, false, false),
            p(AcademicOnly, false, false),
            p(NonCommercial, true, false),
        ])
        .unwrap();
        assert_eq!(got, p(AcademicOnly, true, false));
    }

    #[test]
    fn unspecified_is_a_caller_bug() {
        assert_eq!(
            compose(&[p(Commercial, true, false), RightsProfile::UNSPECIFIED]),
            Err(LicenseError::UnspecifiedInComposition)
        );
        assert_eq!(compose(&[]), Err(LicenseError::EmptyComposition));
    }

    #[test]
    fn category_parsing() {
        assert_eq!("Non-Commercial".parse::<UseCategory>(), Ok(NonCommercial));
        assert_eq!("academic_only".parse::<UseCategory>(), Ok(AcademicOnly));
        assert!("bogus".parse::<UseCategory>().is_err());
        for c in UseCategory::ALL {
            assert_eq!(c.as_str().parse::<UseCategory>(), Ok(c));
        }
    }
}
