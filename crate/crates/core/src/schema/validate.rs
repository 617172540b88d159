use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetRecord;

const TASK_CATEGORIES: &str = include_str!("../../data/task_categories.txt");
const SOURCE_DOMAINS: &str = include_str!("../../data/source_domains.txt");
const FORMATS: &str = include_str!("../../data/formats.txt");

/// Controlled vocabularies records are checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomies {
    pub task_categories: BTreeSet<String>,
    pub source_domains: BTreeSet<String>,
    pub formats: BTreeSet<String>,
}

impl Default for Taxonomies {
    fn default() -> Self {
        Taxonomies::builtin()
    }
}

impl Taxonomies {
    pub fn builtin() -> Self {
        Taxonomies {
            task_categories: parse_taxonomy(TASK_CATEGORIES),
            source_domains: parse_taxonomy(SOURCE_DOMAINS),
            formats: parse_taxonomy(FORMATS),
        }
    }

    /// Reads `task_categories.txt`, `source_domains.txt` and `formats.txt`
    /// from `dir`; missing files fall back to the built-in lists.
    pub fn load_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |name: &str, fallback: &str| -> std::io::Result<BTreeSet<String>> {
            let path = dir.join(name);
            if path.exists() {
                Ok(parse_taxonomy(&std::fs::read_to_string(path)?))
            } else {
                Ok(parse_taxonomy(fallback))
            }
        };
        Ok(Taxonomies {
            task_categories: read("task_categories.txt", TASK_CATEGORIES)?,
            source_domains: read("source_domains.txt", SOURCE_DOMAINS)?,
            formats: read("formats.txt", FORMATS)?,
        })
    }
}

/// One entry per line; `#` starts a comment; blank lines ignored.
pub fn parse_taxonomy(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or_default().trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Problem {
    DuplicateId { id: String, occurrences: usize },
    InvariantViolation { id: String, invariant: String, detail: String },
    UnknownTaxonomy { id: String, taxonomy: String, value: String },
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Problem::DuplicateId { id, occurrences } => {
                write!(f, "duplicate-id {id} ({occurrences} records)")
            }
            Problem::InvariantViolation { id, invariant, detail } => {
                write!(f, "invariant-violation {id} [{invariant}] {detail}")
            }
            Problem::UnknownTaxonomy { id, taxonomy, value } => {
                write!(f, "unknown-taxonomy {id} [{taxonomy}] {value:?}")
            }
        }
    }
}

/// Problems found in a store, sorted so the report does not depend on record order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: usize,
    pub problems: Vec<Problem>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    /// Combines reports from independently validated shards. Duplicate ids
    /// across shards are not detected here.
    pub fn merge(mut self, other: ValidationReport) -> ValidationReport {
        self.records += other.records;
        self.problems.extend(other.problems);
        self.problems.sort();
        self
    }
}

pub fn validate_store(records: &[DatasetRecord], taxonomies: &Taxonomies) -> ValidationReport {
    let mut problems = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records {
        *seen.entry(r.id.as_str()).or_default() += 1;
        for (invariant, detail) in r.violations() {
            problems.push(Problem::InvariantViolation {
                id: r.id.clone(),
                invariant: invariant.to_string(),
                detail,
            });
        }
        for task in &r.task_categories {
            if !taxonomies.task_categories.contains(task) {
                problems.push(Problem::UnknownTaxonomy {
                    id: r.id.clone(),
                    taxonomy: "task_categories".into(),
                    value: task.clone(),
                });
            }
        }
        for dom in &r.source_domains {
            if !taxonomies.source_domains.contains(dom) {
                problems.push(Problem::UnknownTaxonomy {
                    id: r.id.clone(),
                    taxonomy: "source_domains".into(),
                    value: dom.clone(),
                });
            }
        }
        for fmt in &r.formats {
            if !taxonomies.formats.contains(fmt.as_str()) {
                problems.push(Problem::UnknownTaxonomy {
                    id: r.id.clone(),
                    taxonomy: "formats".into(),
                    value: fmt.as_str().to_string(),
                });
            }
        }
    }
    for (id, n) in seen {
        if n > 1 {
            problems.push(Problem::DuplicateId { id: id.to_string(), occurrences: n });
        }
    }
    problems.sort();
    ValidationReport { records: records.len(), problems }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str) -> DatasetRecord {
        DatasetRecord::new(id, id, "flan")
    }

    #[test]
    fn empty_store_is_clean() {
        assert!(validate_store(&[], &Taxonomies::builtin()).is_empty());
    }

    #[test]
    fn duplicate_id_reported_once() {
        let report = validate_store(&[rec("flan/anli"), rec("flan/anli")], &Taxonomies::builtin());
        assert_eq!(
            report.problems,
            vec![Problem::DuplicateId { id: "flan/anli".into(), occurrences: 2 }]
        );
    }

    #[test]
    fn trailing_space_task_is_unknown() {
        let tax = Taxonomies::builtin();
        assert!(tax.task_categories.contains("Question Answering"));
        let mut r = rec("flan/squad");
        r.task_categories = vec!["Question Answering".into(), "QuestionAnswering ".into()];
        let report = validate_store(&[r], &tax);
        assert_eq!(
            report.problems,
            vec![Problem::UnknownTaxonomy {
                id: "flan/squad".into(),
                taxonomy: "task_categories".into(),
                value: "QuestionAnswering ".into(),
            }]
        );
    }

    #[test]
    fn taxonomy_comments() {
        let t = parse_taxonomy("# header\nA\n\n B # trailing\n#C\n");
        assert_eq!(t, ["A", "B"].iter().map(|s| s.to_string()).collect());
    }
}
