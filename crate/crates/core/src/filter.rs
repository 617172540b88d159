//! Risk-tolerance filtering over a [`Store`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Store, StoredRecord};
use crate::license::{Categorization, Policy, UseCategory};
use crate::schema::{EvidenceSource, Origin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    pub lo: i32,
    pub hi: i32,
}

impl YearRange {
    pub fn new(lo: i32, hi: i32) -> Result<Self, String> {
        if lo > hi {
            return Err(format!("year range {lo}:{hi} has lo > hi"));
        }
        Ok(YearRange { lo, hi })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.lo..=self.hi).contains(&year)
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl std::str::FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .or_else(|| s.split_once(".."))
            .ok_or_else(|| format!("`{s}` is not LO:HI"))?;
        let lo = lo.trim().parse().map_err(|_| format!("bad year `{lo}`"))?;
        let hi = hi.trim().parse().map_err(|_| format!("bad year `{hi}`"))?;
        YearRange::new(lo, hi)
    }
}

/// A practitioner's risk tolerance. Empty sets and `false` flags are no-ops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterCriteria {
    pub allowed_use: BTreeSet<UseCategory>,
    pub forbid_attribution_burden: bool,
    pub forbid_share_alike: bool,
    pub exclude_model_generated: bool,
    pub exclude_generated_by: BTreeSet<String>,
    pub exclude_creators: BTreeSet<String>,
    pub exclude_source_domains: BTreeSet<String>,
    /// Match-any.
    pub require_languages: BTreeSet<String>,
    /// Match-any.
    pub require_tasks: BTreeSet<String>,
    pub year_range: Option<YearRange>,
    pub evidence_policy: Policy,
}

impl Default for FilterCriteria {
    fn default() -> Self {
        FilterCriteria {
            allowed_use: UseCategory::ALL.into_iter().collect(),
            forbid_attribution_burden: false,
            forbid_share_alike: false,
            exclude_model_generated: false,
            exclude_generated_by: BTreeSet::new(),
            exclude_creators: BTreeSet::new(),
            exclude_source_domains: BTreeSet::new(),
            require_languages: BTreeSet::new(),
            require_tasks: BTreeSet::new(),
            year_range: None,
            evidence_policy: Policy::default(),
        }
    }
}

/// One clause a record failed, with the offending value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum FailedClause {
    UseCategory { actual: UseCategory, allowed: Vec<UseCategory> },
    AttributionBurden,
    ShareAlike,
    ModelGenerated { origin: Origin },
    GeneratedBy { value: String },
    Creator { value: String },
    SourceDomain { value: String },
    Languages { required: Vec<String> },
    Tasks { required: Vec<String> },
    YearRange { year: Option<i32>, range: YearRange },
}

impl fmt::Display for FailedClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailedClause::UseCategory { actual, allowed } => {
                let allowed: Vec<&str> = allowed.iter().map(|c| c.label()).collect();
                write!(f, "use-category({actual} not in {{{}}})", allowed.join(", "))
            }
            FailedClause::AttributionBurden => f.write_str("attribution-required"),
            FailedClause::ShareAlike => f.write_str("share-alike-required"),
            FailedClause::ModelGenerated { origin } => {
                write!(f, "model-generated(origin={})", origin.as_str())
            }
            FailedClause::GeneratedBy { value } => write!(f, "generated-by({value})"),
            FailedClause::Creator { value } => write!(f, "creator({value})"),
            FailedClause::SourceDomain { value } => write!(f, "source-domain({value})"),
            FailedClause::Languages { required } => {
                write!(f, "languages(none of {})", required.join(", "))
            }
            FailedClause::Tasks { required } => write!(f, "tasks(none of {})", required.join(", ")),
            FailedClause::YearRange { year: Some(y), range } => write!(f, "year({y} not in {range})"),
            FailedClause::YearRange { year: None, range } => write!(f, "year(absent, need {range})"),
        }
    }
}

fn contains_ci(set: &BTreeSet<String>, value: &str) -> bool {
    set.iter().any(|s| s.eq_ignore_ascii_case(value))
}

fn explain_with(sr: &StoredRecord, rights: &Categorization, c: &FilterCriteria) -> Vec<FailedClause> {
    let r = &sr.record;
    let profile = rights.profile;
    let mut failed = Vec::new();
    if !c.allowed_use.contains(&profile.use_category) {
        failed.push(FailedClause::UseCategory {
            actual: profile.use_category,
            allowed: c.allowed_use.iter().copied().collect(),
        });
    }
    if c.forbid_attribution_burden && profile.attribution_required {
        failed.push(FailedClause::AttributionBurden);
    }
    if c.forbid_share_alike && profile.share_alike_required {
        failed.push(FailedClause::ShareAlike);
    }
    if c.exclude_model_generated && r.origin.is_synthetic() {
        failed.push(FailedClause::ModelGenerated { origin: r.origin });
    }
    if let Some(g) = &r.generated_by {
        if contains_ci(&c.exclude_generated_by, g) {
            failed.push(FailedClause::GeneratedBy { value: g.clone() });
        }
    }
    if let Some(cr) = r.creators.iter().find(|cr| contains_ci(&c.exclude_creators, cr)) {
        failed.push(FailedClause::Creator { value: cr.clone() });
    }
    if let Some(d) = r.source_domains.iter().find(|d| c.exclude_source_domains.contains(*d)) {
        failed.push(FailedClause::SourceDomain { value: d.clone() });
    }
    if !c.require_languages.is_empty() && r.languages.is_disjoint(&c.require_languages) {
        failed.push(FailedClause::Languages {
            required: c.require_languages.iter().cloned().collect(),
        });
    }
    if !c.require_tasks.is_empty() && !r.task_categories.iter().any(|t| c.require_tasks.contains(t)) {
        failed.push(FailedClause::Tasks { required: c.require_tasks.iter().cloned().collect() });
    }
    if let Some(range) = c.year_range {
        let year = r.year();
        if !year.is_some_and(|y| range.contains(y)) {
            failed.push(FailedClause::YearRange { year, range });
        }
    }
    failed
}

/// Every clause `record` fails under `criteria`; empty means it passes.
pub fn explain(store: &Store, record: &StoredRecord, criteria: &FilterCriteria) -> Vec<FailedClause> {
    let rights = store.rights_under(record, &criteria.evidence_policy);
    explain_with(record, &rights, criteria)
}

#[derive(Debug, Clone)]
struct Included {
    index: usize,
    rights: Categorization,
}

/// The records of a store that passed a filter, plus why the rest did not.
#[derive(Debug, Clone)]
pub struct Selection {
    store: Arc<Store>,
    included: Vec<Included>,
    criteria: Option<FilterCriteria>,
    excluded: BTreeMap<String, Vec<FailedClause>>,
}

impl Selection {
    /// Every record in the store, under the store's own policy.
    pub fn all(store: &Arc<Store>) -> Selection {
        let included = store
            .records()
            .iter()
            .enumerate()
            .map(|(index, sr)| Included { index, rights: sr.rights.clone() })
            .collect();
        Selection { store: Arc::clone(store), included, criteria: None, excluded: BTreeMap::new() }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn criteria(&self) -> Option<&FilterCriteria> {
        self.criteria.as_ref()
    }

    /// Evidence policy the included records were categorized under.
    pub fn policy(&self) -> &Policy {
        self.criteria
            .as_ref()
            .map(|c| &c.evidence_policy)
            .unwrap_or_else(|| self.store.policy())
    }

    pub fn len(&self) -> usize {
        self.included.len()
    }

    pub fn is_empty(&self) -> bool {
        self.included.is_empty()
    }

    pub fn included_ids(&self) -> Vec<&str> {
        self.records().map(|(sr, _)| sr.record.id.as_str()).collect()
    }

    /// Included records in id order, with their categorization under the
    /// selection's evidence policy.
    pub fn records(&self) -> impl Iterator<Item = (&StoredRecord, &Categorization)> {
        self.included
            .iter()
            .map(|inc| (&self.store.records()[inc.index], &inc.rights))
    }

    pub fn excluded(&self) -> &BTreeMap<String, Vec<FailedClause>> {
        &self.excluded
    }
}

/// Keeps the records passing every active clause of `criteria`.
pub fn apply_filter(store: &Arc<Store>, criteria: &FilterCriteria) -> Selection {
    let mut included = Vec::new();
    let mut excluded = BTreeMap::new();
    for (index, sr) in store.records().iter().enumerate() {
        let rights = store.rights_under(sr, &criteria.evidence_policy);
        let failed = explain_with(sr, &rights, criteria);
        if failed.is_empty() {
            included.push(Included { index, rights });
        } else {
            excluded.insert(sr.record.id.clone(), failed);
        }
    }
    Selection {
        store: Arc::clone(store),
        included,
        criteria: Some(criteria.clone()),
        excluded,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid `{param}`: {message}")]
pub struct CriteriaError {
    pub param: String,
    pub message: String,
}

/// Parameter names accepted by [`FilterCriteria::from_pairs`].
pub const CRITERIA_KEYS: [&str; 12] = [
    "allow_use",
    "forbid_attribution_burden",
    "forbid_share_alike",
    "exclude_model_generated",
    "exclude_generated_by",
    "exclude_creators",
    "exclude_source_domains",
    "require_languages",
    "require_tasks",
    "year_range",
    "openai_terms_as",
    "accept_evidence",
];

fn parse_bool(param: &str, v: &str) -> Result<bool, CriteriaError> {
    match v.to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CriteriaError { param: param.into(), message: format!("`{v}` is not a boolean") }),
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl FilterCriteria {
    /// Builds criteria from `key=value` pairs (query parameters, Python
    /// kwargs). `allow_use`, `accept_evidence` and `require_languages` take
    /// comma lists; every set-valued key may repeat. The first occurrence
    /// of `allow_use` / `accept_evidence` replaces the default set.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<FilterCriteria, CriteriaError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut c = FilterCriteria::default();
        let mut seen_allow = false;
        let mut seen_accept = false;
        for (k, v) in pairs {
            let err = |m: String| CriteriaError { param: k.to_string(), message: m };
            match k {
                "allow_use" => {
                    if !seen_allow {
                        c.allowed_use.clear();
                        seen_allow = true;
                    }
                    for item in list(v) {
                        c.allowed_use.insert(item.parse().map_err(err)?);
                    }
                }
                "forbid_attribution_burden" => c.forbid_attribution_burden = parse_bool(k, v)?,
                "forbid_share_alike" => c.forbid_share_alike = parse_bool(k, v)?,
                "exclude_model_generated" => c.exclude_model_generated = parse_bool(k, v)?,
                "exclude_generated_by" => {
                    c.exclude_generated_by.insert(v.to_string());
                }
                "exclude_creators" => {
                    c.exclude_creators.insert(v.to_string());
                }
                "exclude_source_domains" => {
                    c.exclude_source_domains.insert(v.to_string());
                }
                "require_languages" => c.require_languages.extend(list(v).map(str::to_string)),
                "require_tasks" => {
                    c.require_tasks.insert(v.to_string());
                }
                "year_range" => c.year_range = Some(v.parse().map_err(err)?),
                "openai_terms_as" => {
                    c.evidence_policy.openai_terms_as = v.parse().map_err(err)?;
                    c.evidence_policy
                        .validate()
                        .map_err(|e| CriteriaError { param: k.into(), message: e.to_string() })?;
                }
                "accept_evidence" => {
                    if !seen_accept {
                        c.evidence_policy.accept_evidence.clear();
                        seen_accept = true;
                    }
                    for item in list(v) {
                        c.evidence_policy.accept_evidence.insert(item.parse().map_err(err)?);
                    }
                }
                other => {
                    return Err(CriteriaError {
                        param: other.to_string(),
                        message: "unknown criteria parameter".into(),
                    })
                }
            }
        }
        Ok(c)
    }

    /// Inverse of [`FilterCriteria::from_pairs`]; defaults are omitted.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let default = FilterCriteria::default();
        let mut out = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        if self.allowed_use != default.allowed_use {
            let v: Vec<&str> = self.allowed_use.iter().map(|c| c.as_str()).collect();
            push("allow_use", v.join(","));
        }
        for (flag, key) in [
            (self.forbid_attribution_burden, "forbid_attribution_burden"),
            (self.forbid_share_alike, "forbid_share_alike"),
            (self.exclude_model_generated, "exclude_model_generated"),
        ] {
            if flag {
                push(key, "true".into());
            }
        }
        for (set, key) in [
            (&self.exclude_generated_by, "exclude_generated_by"),
            (&self.exclude_creators, "exclude_creators"),
            (&self.exclude_source_domains, "exclude_source_domains"),
            (&self.require_languages, "require_languages"),
            (&self.require_tasks, "require_tasks"),
        ] {
            for v in set {
                push(key, v.clone());
            }
        }
        if let Some(r) = self.year_range {
            push("year_range", r.to_string());
        }
        let policy = &self.evidence_policy;
        if policy.openai_terms_as != default.evidence_policy.openai_terms_as {
            push("openai_terms_as", policy.openai_terms_as.as_str().into());
        }
        if policy.accept_evidence != default.evidence_policy.accept_evidence {
            let v: Vec<&str> = policy.accept_evidence.iter().map(|e| e.as_str()).collect();
            push("accept_evidence", v.join(","));
        }
        out
    }

    /// `key=value&...`, percent-encoded.
    pub fn to_query_string(&self) -> String {
        url::form_urlencoded::Serializer::new(String::new())
            .extend_pairs(self.to_pairs())
            .finish()
    }

    pub fn from_query_string(q: &str) -> Result<FilterCriteria, CriteriaError> {
        let pairs: Vec<(String, String)> = url::form_urlencoded::parse(q.as_bytes())
            .map(|(k, v)| (k.into_owned(), v.into_owned()))
            .collect();
        FilterCriteria::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }
}

/// Evidence sources as accepted by `accept_evidence`.
pub fn evidence_sources() -> impl Iterator<Item = &'static str> {
    EvidenceSource::ALL.into_iter().map(EvidenceSource::as_str)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::license::LicenseRegistry;
    use crate::schema::{DatasetRecord, LicenseEvidence};

    fn rec(id: &str, license: Option<&str>, origin: Origin, by: Option<&str>) -> DatasetRecord {
        let mut r = DatasetRecord::new(id, id, "t");
        if let Some(l) = license {
            r.licenses.push(LicenseEvidence {
                raw_name: l.into(),
                canonical_id: None,
                url: None,
                evidence_source: EvidenceSource::Paper,
                author_stated: true,
            });
        }
        r.origin = origin;
        r.generated_by = by.map(str::to_string);
        r
    }

    fn three() -> Arc<Store> {
        Arc::new(
            Store::from_records(
                vec![
                    rec("t/commercial-human", Some("mit"), Origin::HumanWeb, None),
                    rec("t/unspecified-openai", None, Origin::ModelGenerated, Some("openai")),
                    rec("t/nc-human", Some("cc-by-nc-4.0"), Origin::HumanWeb, None),
                ],
                Arc::new(LicenseRegistry::builtin()),
                Policy::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn default_criteria_keep_everything() {
        let store = three();
        let sel = apply_filter(&store, &FilterCriteria::default());
        assert_eq!(sel.len(), 3);
        assert!(sel.excluded().is_empty());
    }

    #[test]
    fn clause_by_clause() {
        let store = three();
        let c = FilterCriteria {
            allowed_use: [UseCategory::Commercial, UseCategory::Unspecified].into(),
            exclude_generated_by: ["openai".to_string()].into(),
            ..Default::default()
        };
        let sel = apply_filter(&store, &c);
        assert_eq!(sel.included_ids(), vec!["t/commercial-human"]);
    }

    #[test]
    fn explain_lists_every_failed_clause() {
        let mut r = rec("t/x", Some("cc-by-nc-4.0"), Origin::ModelGenerated, Some("openai"));
        r.licenses[0].raw_name = "OpenAI Terms of Use".into();
        let store = Arc::new(
            Store::from_records(vec![r], Arc::new(LicenseRegistry::builtin()), Policy::default())
                .unwrap(),
        );
        let c = FilterCriteria {
            allowed_use: [UseCategory::Commercial].into(),
            exclude_generated_by: ["OpenAI".to_string()].into(),
            ..Default::default()
        };
        let failed = explain(&store, &store.records()[0], &c);
        assert_eq!(failed.len(), 2);
        assert_eq!(
            failed[0].to_string(),
            "use-category(Non-Commercial not in {Commercial})"
        );
        assert!(matches!(&failed[1], FailedClause::GeneratedBy { value } if value == "openai"));
    }

    #[test]
    fn nc_vs_commercial_only() {
        let store = three();
        let c = FilterCriteria { allowed_use: [UseCategory::Commercial].into(), ..Default::default() };
        let nc = store.get("t/nc-human").unwrap();
        assert_eq!(
            explain(&store, nc, &c),
            vec![FailedClause::UseCategory {
                actual: UseCategory::NonCommercial,
                allowed: vec![UseCategory::Commercial]
            }]
        );
        assert!(explain(&store, store.get("t/commercial-human").unwrap(), &c).is_empty());
    }

    #[test]
    fn missing_year_fails_active_range() {
        let store = three();
        let c = FilterCriteria { year_range: Some(YearRange::new(2020, 2023).unwrap()), ..Default::default() };
        assert_eq!(apply_filter(&store, &c).len(), 0);
    }

    #[test]
    fn pairs_round_trip() {
        let c = FilterCriteria {
            allowed_use: [UseCategory::Commercial, UseCategory::Unspecified].into(),
            forbid_share_alike: true,
            exclude_creators: ["Google, Inc.".to_string()].into(),
            require_languages: ["en".to_string(), "fr".to_string()].into(),
            year_range: Some(YearRange::new(2019, 2023).unwrap()),
            evidence_policy: Policy::widened(),
            ..Default::default()
        };
        let q = c.to_query_string();
        assert_eq!(FilterCriteria::from_query_string(&q).unwrap(), c);
        assert_eq!(FilterCriteria::from_query_string("").unwrap(), FilterCriteria::default());
    }

    #[test]
    fn bad_params_are_named() {
        let e = FilterCriteria::from_query_string("allow_use=bogus").unwrap_err();
        assert_eq!(e.param, "allow_use");
        let e = FilterCriteria::from_query_string("year_range=2023:2019").unwrap_err();
        assert_eq!(e.param, "year_range");
        let e = FilterCriteria::from_query_string("openai_terms_as=academic-only").unwrap_err();
        assert_eq!(e.param, "openai_terms_as");
        let e = FilterCriteria::from_query_string("colour=red").unwrap_err();
        assert_eq!(e.param, "colour");
    }
}
