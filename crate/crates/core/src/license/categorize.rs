use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{compose, LicenseError, LicenseMatch, LicenseRegistry, RightsProfile, UseCategory};
use crate::schema::{DatasetRecord, EvidenceSource, LicenseEvidence};

/// Profile given to license names the registry does not know.
pub const CONSERVATIVE_PROFILE: RightsProfile =
    RightsProfile::new(UseCategory::NonCommercial, true, false);

/// How evidence is weighed when categorizing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    /// Category applied to provider terms-of-use entries.
    pub openai_terms_as: UseCategory,
    /// Evidence sources treated as authoritative. Sources that can carry an
    /// author statement also need `author_stated`; `github-repo` and
    /// `paperswithcode` evidence counts whenever its source is listed.
    pub accept_evidence: BTreeSet<EvidenceSource>,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            openai_terms_as: UseCategory::NonCommercial,
            accept_evidence: EvidenceSource::ALL
                .into_iter()
                .filter(|s| s.can_be_author_stated())
                .collect(),
        }
    }
}

impl Policy {
    /// Default policy plus licenses found on the code repository.
    pub fn widened() -> Self {
        let mut p = Policy::default();
        p.accept_evidence.insert(EvidenceSource::GithubRepo);
        p
    }

    pub fn validate(&self) -> Result<(), LicenseError> {
        match self.openai_terms_as {
            UseCategory::Commercial | UseCategory::NonCommercial => Ok(()),
            other => Err(LicenseError::InvalidPolicy(format!(
                "openai_terms_as must be commercial or non-commercial, got {}",
                other.as_str()
            ))),
        }
    }

    pub fn accepts(&self, evidence: &LicenseEvidence) -> bool {
        let source = evidence.evidence_source;
        self.accept_evidence.contains(&source)
            && (evidence.author_stated || !source.can_be_author_stated())
    }

    /// Stable hex digest of the policy.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("policy serializes");
        hex_digest(&Sha256::digest(json.as_bytes()))
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedLicense {
    /// The evidence with `canonical_id` filled in when the name resolved.
    pub evidence: LicenseEvidence,
    pub profile: RightsProfile,
    pub needs_review: bool,
    pub is_model_terms: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Categorization {
    pub profile: RightsProfile,
    pub applied: Vec<AppliedLicense>,
    pub needs_review: bool,
}

impl Categorization {
    pub fn uses_model_terms(&self) -> bool {
        self.applied.iter().any(|a| a.is_model_terms)
    }
}

fn resolve(
    evidence: &LicenseEvidence,
    registry: &LicenseRegistry,
    policy: &Policy,
) -> AppliedLicense {
    let matched = match evidence.canonical_id.as_deref() {
        Some(id) if registry.get(id).is_some() => LicenseMatch::Registered(id.to_string()),
        _ => registry.normalize(&evidence.raw_name),
    };
    let mut evidence = evidence.clone();
    match matched.canonical_id() {
        Some(id) => {
            let entry = registry.get(id).expect("normalize returns registered ids");
            evidence.canonical_id = Some(id.to_string());
            if evidence.url.is_none() {
                evidence.url = entry.reference_url.clone();
            }
            AppliedLicense {
                profile: registry.profile_of(id, policy).expect("id is registered"),
                needs_review: entry.needs_review,
                is_model_terms: entry.is_model_terms,
                evidence,
            }
        }
        None => {
            evidence.canonical_id = None;
            AppliedLicense {
                evidence,
                profile: CONSERVATIVE_PROFILE,
                needs_review: true,
                is_model_terms: false,
            }
        }
    }
}

/// Filters a record's license evidence through `policy`, resolves each
/// surviving name and composes them. No surviving evidence means Unspecified.
pub fn categorize_dataset(
    record: &DatasetRecord,
    registry: &LicenseRegistry,
    policy: &Policy,
) -> Categorization {
    let applied: Vec<AppliedLicense> = record
        .licenses
        .iter()
        .filter(|ev| policy.accepts(ev))
        .map(|ev| resolve(ev, registry, policy))
        .collect();
    let profile = if applied.is_empty() {
        RightsProfile::UNSPECIFIED
    } else {
        let profiles: Vec<RightsProfile> = applied.iter().map(|a| a.profile).collect();
        compose(&profiles).expect("registry profiles are composable")
    };
    let needs_review = applied.iter().any(|a| a.needs_review);
    Categorization { profile, applied, needs_review }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Conflict {
    /// Two different share-alike licenses, each demanding derivatives carry it.
    CopyleftClash { first: String, second: String },
}

impl std::fmt::Display for Conflict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Conflict::CopyleftClash { first, second } => {
                write!(f, "copyleft-clash({first}, {second})")
            }
        }
    }
}

/// One conflict per unordered pair of distinct share-alike canonical ids,
/// sorted by id pair.
pub fn detect_conflicts(applied: &[AppliedLicense]) -> Vec<Conflict> {
    let copyleft: BTreeSet<&str> = applied
        .iter()
        .filter(|a| a.profile.share_alike_required)
        .filter_map(|a| a.evidence.canonical_id.as_deref())
        .collect();
    let ids: Vec<&str> = copyleft.into_iter().collect();
    let mut out = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            out.push(Conflict::CopyleftClash { first: a.to_string(), second: b.to_string() });
        }
    }
    out
}
