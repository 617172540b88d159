//! Loading record files into an immutable, indexed [`Store`].

mod enrich;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::license::{categorize_dataset, Categorization, LicenseRegistry, Policy, UseCategory};
use crate::schema::{parse_record, serialize_record, DatasetRecord, RecordError};

pub use enrich::{
    enrich, AggregatorClient, AggregatorInfo, ClientError, DumpLine, EnrichFailure, EnrichReport,
    FixtureClient,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: RecordError,
    },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
}

/// A record together with its license categorization under the store's policy.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredRecord {
    pub record: DatasetRecord,
    pub rights: Categorization,
}

/// Secondary indices from facet values to record ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StoreIndices {
    pub language: BTreeMap<String, BTreeSet<String>>,
    pub task: BTreeMap<String, BTreeSet<String>>,
    pub collection: BTreeMap<String, BTreeSet<String>>,
    pub use_category: BTreeMap<UseCategory, BTreeSet<String>>,
    pub year: BTreeMap<i32, BTreeSet<String>>,
}

impl StoreIndices {
    fn build(records: &[StoredRecord]) -> Self {
        let mut ix = StoreIndices::default();
        for sr in records {
            let r = &sr.record;
            for l in &r.languages {
                ix.language.entry(l.clone()).or_default().insert(r.id.clone());
            }
            for t in &r.task_categories {
                ix.task.entry(t.clone()).or_default().insert(r.id.clone());
            }
            ix.collection.entry(r.collection.clone()).or_default().insert(r.id.clone());
            ix.use_category
                .entry(sr.rights.profile.use_category)
                .or_default()
                .insert(r.id.clone());
            if let Some(y) = r.year() {
                ix.year.entry(y).or_default().insert(r.id.clone());
            }
        }
        ix
    }
}

/// Immutable set of categorized records, ordered by id.
#[derive(Debug, Clone)]
pub struct Store {
    records: Vec<StoredRecord>,
    by_id: HashMap<String, usize>,
    indices: StoreIndices,
    registry: Arc<LicenseRegistry>,
    policy: Policy,
    built_at: DateTime<Utc>,
    policy_fingerprint: String,
}

impl Store {
    pub fn from_records(
        records: Vec<DatasetRecord>,
        registry: Arc<LicenseRegistry>,
        policy: Policy,
    ) -> Result<Store, IngestError> {
        let mut records: Vec<StoredRecord> = records
            .into_iter()
            .map(|record| {
                let rights = categorize_dataset(&record, &registry, &policy);
                StoredRecord { record, rights }
            })
            .collect();
        records.sort_by(|a, b| a.record.id.cmp(&b.record.id));
        if let Some(w) = records.windows(2).find(|w| w[0].record.id == w[1].record.id) {
            return Err(IngestError::DuplicateId(w[0].record.id.clone()));
        }
        let by_id = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.record.id.clone(), i))
            .collect();
        let indices = StoreIndices::build(&records);
        let policy_fingerprint = policy.fingerprint();
        Ok(Store {
            records,
            by_id,
            indices,
            registry,
            policy,
            built_at: Utc::now(),
            policy_fingerprint,
        })
    }

    pub fn empty(registry: Arc<LicenseRegistry>, policy: Policy) -> Store {
        Store::from_records(Vec::new(), registry, policy).expect("empty store has no duplicates")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[StoredRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&StoredRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.record.id.as_str())
    }

    pub fn indices(&self) -> &StoreIndices {
        &self.indices
    }

    pub fn registry(&self) -> &Arc<LicenseRegistry> {
        &self.registry
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn built_at(&self) -> DateTime<Utc> {
        self.built_at
    }

    pub fn policy_fingerprint(&self) -> &str {
        &self.policy_fingerprint
    }

    /// Categorization of `sr` under `policy`, reusing the cached one when the
    /// policy matches the store's.
    pub fn rights_under(&self, sr: &StoredRecord, policy: &Policy) -> Categorization {
        if policy == &self.policy {
            sr.rights.clone()
        } else {
            categorize_dataset(&sr.record, &self.registry, policy)
        }
    }

    /// Hex digest over the serialized records and the policy; used as the
    /// snapshot version.
    pub fn content_fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for sr in &self.records {
            h.update(serialize_record(&sr.record).as_bytes());
            h.update(b"\n");
        }
        h.update(self.policy_fingerprint.as_bytes());
        crate::license::hex_digest(&h.finalize())
    }

    /// The records as a store file (JSON Lines, ordered by id).
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for sr in &self.records {
            out.push_str(&serialize_record(&sr.record));
            out.push('\n');
        }
        out
    }
}

/// Expands directories to their `*.jsonl` files (sorted, non-recursive).
pub fn expand_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>, IngestError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|source| IngestError::Io { path: p.clone(), source })?;
            let mut files: Vec<PathBuf> = rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Parses every record in one store file.
pub fn read_records(path: &Path) -> Result<Vec<DatasetRecord>, IngestError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    parse_records(&text, path)
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<DatasetRecord>, IngestError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_record(l).map_err(|source| IngestError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

/// Loads, categorizes and indexes the records in `paths`. Files are parsed
/// in parallel; an id appearing twice anywhere is an error.
pub fn load_store(
    paths: &[PathBuf],
    registry: Arc<LicenseRegistry>,
    policy: Policy,
) -> Result<Store, IngestError> {
    let files = expand_paths(paths)?;
    let parsed: Vec<Result<Vec<DatasetRecord>, IngestError>> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || read_records(f))).collect();
        handles.into_iter().map(|h| h.join().expect("parser thread panicked")).collect()
    });
    let mut records = Vec::new();
    for batch in parsed {
        records.extend(batch?);
    }
    Store::from_records(records, registry, policy)
}
