//! Canonical dataset-record model.
//!
//! A store is a UTF-8 file of JSON Lines, one [`DatasetRecord`] per line.
//! Fields this version does not know about are kept in
//! [`DatasetRecord::extensions`] and written back unchanged.

mod date;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use url::Url;

pub use date::CollectionDate;
pub use validate::{validate_store, Problem, Taxonomies, ValidationReport};

/// Fields a record line must carry.
pub const REQUIRED_FIELDS: [&str; 4] = ["id", "name", "collection", "licenses"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    MalformedSyntax(String),
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("invariant `{invariant}` violated: {detail}")]
    InvariantViolation {
        invariant: &'static str,
        detail: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    Github,
    Huggingface,
    Paperswithcode,
}

impl Aggregator {
    pub const ALL: [Aggregator; 3] = [
        Aggregator::Github,
        Aggregator::Huggingface,
        Aggregator::Paperswithcode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregator::Github => "github",
            Aggregator::Huggingface => "huggingface",
            Aggregator::Paperswithcode => "paperswithcode",
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Aggregator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "github" | "gh" => Ok(Aggregator::Github),
            "huggingface" | "hf" => Ok(Aggregator::Huggingface),
            "paperswithcode" | "pwc" => Ok(Aggregator::Paperswithcode),
            other => Err(format!("unknown aggregator `{other}`")),
        }
    }
}

/// Links to the platforms that host a copy of, or metadata about, a dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatorLinks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub huggingface: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub github: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paperswithcode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arxiv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_scholar: Option<String>,
}

impl AggregatorLinks {
    pub fn is_empty(&self) -> bool {
        self.iter().next().is_none()
    }

    /// Present links as `(field name, url)` in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &str)> {
        [
            ("huggingface", &self.huggingface),
            ("github", &self.github),
            ("paperswithcode", &self.paperswithcode),
            ("arxiv", &self.arxiv),
            ("semantic_scholar", &self.semantic_scholar),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
    }

    pub fn for_aggregator(&self, aggregator: Aggregator) -> Option<&str> {
        match aggregator {
            Aggregator::Github => self.github.as_deref(),
            Aggregator::Huggingface => self.huggingface.as_deref(),
            Aggregator::Paperswithcode => self.paperswithcode.as_deref(),
        }
    }
}

/// `min`/`mean`/`max` of a per-example quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Range3 {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Range3 {
    pub fn is_consistent(&self) -> bool {
        [self.min, self.mean, self.max]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
            && self.min <= self.mean
            && self.mean <= self.max
    }
}

/// Length statistics, measured in characters so they do not depend on a tokenizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TextMetrics {
    pub input_chars: Range3,
    pub target_chars: Range3,
    pub dialog_turns: Range3,
}

impl TextMetrics {
    pub fn is_consistent(&self) -> bool {
        self.input_chars.is_consistent()
            && self.target_chars.is_consistent()
            && self.dialog_turns.is_consistent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvidenceSource {
    Paper,
    Collection,
    GithubData,
    GithubRepo,
    Huggingface,
    Paperswithcode,
}

impl EvidenceSource {
    pub const ALL: [EvidenceSource; 6] = [
        EvidenceSource::Paper,
        EvidenceSource::Collection,
        EvidenceSource::GithubData,
        EvidenceSource::GithubRepo,
        EvidenceSource::Huggingface,
        EvidenceSource::Paperswithcode,
    ];

    /// Sources where a license can be attributed to the dataset authors.
    pub fn can_be_author_stated(self) -> bool {
        matches!(
            self,
            EvidenceSource::Paper
                | EvidenceSource::Collection
                | EvidenceSource::GithubData
                | EvidenceSource::Huggingface
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceSource::Paper => "paper",
            EvidenceSource::Collection => "collection",
            EvidenceSource::GithubData => "github-data",
            EvidenceSource::GithubRepo => "github-repo",
            EvidenceSource::Huggingface => "huggingface",
            EvidenceSource::Paperswithcode => "paperswithcode",
        }
    }
}

impl std::str::FromStr for EvidenceSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvidenceSource::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown evidence source `{s}`"))
    }
}

/// One license statement found for a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseEvidence {
    pub raw_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub evidence_source: EvidenceSource,
    #[serde(default)]
    pub author_stated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskFormat {
    ZeroShot,
    FewShot,
    ChainOfThought,
    MultiTurnDialog,
    ResponseRanking,
}

impl TaskFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskFormat::ZeroShot => "zero-shot",
            TaskFormat::FewShot => "few-shot",
            TaskFormat::ChainOfThought => "chain-of-thought",
            TaskFormat::MultiTurnDialog => "multi-turn-dialog",
            TaskFormat::ResponseRanking => "response-ranking",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    #[default]
    HumanWeb,
    ModelGenerated,
    Both,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::HumanWeb => "human-web",
            Origin::ModelGenerated => "model-generated",
            Origin::Both => "both",
        }
    }

    pub fn is_synthetic(self) -> bool {
        self != Origin::HumanWeb
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CreatorCategory {
    Academic,
    IndustryLab,
    ResearchGroup,
    Corporation,
    Startup,
    Other,
}

/// One audited dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub name: String,
    pub collection: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "AggregatorLinks::is_empty")]
    pub links: AggregatorLinks,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub languages: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub task_categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub text_topics: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub formats: BTreeSet<TaskFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_of_collection: Option<CollectionDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_metrics: Option<TextMetrics>,
    pub licenses: Vec<LicenseEvidence>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aggregator_labels: BTreeMap<Aggregator, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub text_sources: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub source_domains: Vec<String>,
    #[serde(default)]
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_by: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub creators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub creator_categories: Vec<CreatorCategory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub download_count: Option<u64>,
    /// Unrecognised fields, written back verbatim.
    #[serde(flatten)]
    pub extensions: BTreeMap<String, Value>,
}

impl DatasetRecord {
    /// A record with only identity fields set and everything else defaulted.
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        collection: impl Into<String>,
    ) -> Self {
        DatasetRecord {
            id: id.into(),
            name: name.into(),
            collection: collection.into(),
            collection_url: None,
            description: None,
            links: AggregatorLinks::default(),
            languages: BTreeSet::new(),
            task_categories: Vec::new(),
            text_topics: Vec::new(),
            formats: BTreeSet::new(),
            time_of_collection: None,
            text_metrics: None,
            licenses: Vec::new(),
            aggregator_labels: BTreeMap::new(),
            text_sources: Vec::new(),
            source_domains: Vec::new(),
            origin: Origin::HumanWeb,
            generated_by: None,
            creators: Vec::new(),
            creator_categories: Vec::new(),
            citation_count: None,
            download_count: None,
            extensions: BTreeMap::new(),
        }
    }

    pub fn year(&self) -> Option<i32> {
        self.time_of_collection.map(|d| d.year)
    }

    /// All invariant violations, as `(invariant, detail)` pairs.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.id.trim().is_empty() {
            out.push(("id", "id must be non-empty".to_string()));
        }
        if self.origin == Origin::HumanWeb && self.generated_by.is_some() {
            out.push((
                "generated_by",
                "human-web records cannot name a generating model".to_string(),
            ));
        }
        for lang in &self.languages {
            if !is_language_code(lang) {
                out.push(("languages", format!("`{lang}` is not a language code")));
            }
        }
        if let Some(m) = &self.text_metrics {
            if !m.is_consistent() {
                out.push((
                    "text_metrics",
                    "each triple needs finite values with min <= mean <= max".to_string(),
                ));
            }
        }
        for (field, link) in self.links.iter() {
            if !is_absolute_url(link) {
                out.push(("links", format!("{field} link `{link}` is not an absolute URL")));
            }
        }
        if let Some(u) = &self.collection_url {
            if !is_absolute_url(u) {
                out.push(("collection_url", format!("`{u}` is not an absolute URL")));
            }
        }
        for ev in &self.licenses {
            if ev.raw_name.trim().is_empty() {
                out.push(("licenses", "license raw_name must be non-empty".to_string()));
            }
            if ev.author_stated && !ev.evidence_source.can_be_author_stated() {
                out.push((
                    "licenses",
                    format!(
                        "`{}` evidence from {} cannot be author-stated",
                        ev.raw_name,
                        ev.evidence_source.as_str()
                    ),
                ));
            }
            if let Some(u) = &ev.url {
                if !is_absolute_url(u) {
                    out.push(("licenses", format!("license url `{u}` is not an absolute URL")));
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), RecordError> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((invariant, detail)) => Err(RecordError::InvariantViolation { invariant, detail }),
        }
    }
}

/// `[a-z]{2,3}(-[A-Za-z0-9]{2,8})*`, or the literal `code` for programming languages.
pub fn is_language_code(code: &str) -> bool {
    if code == "code" {
        return true;
    }
    let mut parts = code.split('-');
    let primary = parts.next().unwrap_or_default();
    if !(2..=3).contains(&primary.len()) || !primary.bytes().all(|b| b.is_ascii_lowercase()) {
        return false;
    }
    parts.all(|p| (2..=8).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_alphanumeric()))
}

fn is_absolute_url(s: &str) -> bool {
    Url::parse(s).map(|u| u.has_host() || !u.cannot_be_a_base()).unwrap_or(false)
}

/// Lowercase kebab-case slug.
pub fn slugify(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            out.push(c);
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

/// `<collection-slug>/<dataset-slug>`.
pub fn canonical_id(collection: &str, name: &str) -> String {
    format!("{}/{}", slugify(collection), slugify(name))
}

/// Parses one store line.
pub fn parse_record(text: &str) -> Result<DatasetRecord, RecordError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| RecordError::MalformedSyntax(e.to_string()))?;
    let Value::Object(map) = &value else {
        return Err(RecordError::MalformedSyntax("record must be an object".into()));
    };
    for field in REQUIRED_FIELDS {
        if !map.contains_key(field) {
            return Err(RecordError::MissingField(field));
        }
    }
    let record: DatasetRecord =
        serde_json::from_value(value).map_err(|e| RecordError::MalformedSyntax(e.to_string()))?;
    record.check()?;
    Ok(record)
}

/// Serializes to a single store line (no trailing newline).
pub fn serialize_record(record: &DatasetRecord) -> String {
    serde_json::to_string(record).expect("records always serialize")
}
