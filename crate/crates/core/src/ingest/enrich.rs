//! Aggregator metadata enrichment.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{IngestError, Store};
use crate::schema::{Aggregator, AggregatorLinks, DatasetRecord};

/// What one platform reports about a dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatorInfo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub download_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation_count: Option<u64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct ClientError(pub String);

/// Source of crowdsourced aggregator metadata. An empty map means the
/// client knows nothing about the record.
pub trait AggregatorClient: Sync {
    fn fetch(
        &self,
        id: &str,
        links: &AggregatorLinks,
    ) -> Result<BTreeMap<Aggregator, AggregatorInfo>, ClientError>;
}

/// One line of a per-platform dump file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpLine {
    pub id: String,
    #[serde(flatten)]
    pub info: AggregatorInfo,
}

/// Offline client replaying `<platform>.jsonl` dumps from a directory.
/// Only platforms the record links to are answered.
#[derive(Debug, Clone, Default)]
pub struct FixtureClient {
    dumps: BTreeMap<Aggregator, HashMap<String, AggregatorInfo>>,
}

impl FixtureClient {
    pub fn load(dir: &Path) -> Result<Self, IngestError> {
        let mut dumps = BTreeMap::new();
        for agg in Aggregator::ALL {
            let path = dir.join(format!("{}.jsonl", agg.as_str()));
            if !path.exists() {
                continue;
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|source| IngestError::Io { path: path.clone(), source })?;
            let mut map = HashMap::new();
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let dl: DumpLine = serde_json::from_str(line).map_err(|e| IngestError::Parse {
                    path: path.clone(),
                    line: i + 1,
                    source: crate::schema::RecordError::MalformedSyntax(e.to_string()),
                })?;
                map.insert(dl.id, dl.info);
            }
            dumps.insert(agg, map);
        }
        Ok(FixtureClient { dumps })
    }

    pub fn from_dumps(dumps: BTreeMap<Aggregator, HashMap<String, AggregatorInfo>>) -> Self {
        FixtureClient { dumps }
    }
}

impl AggregatorClient for FixtureClient {
    fn fetch(
        &self,
        id: &str,
        links: &AggregatorLinks,
    ) -> Result<BTreeMap<Aggregator, AggregatorInfo>, ClientError> {
        Ok(self
            .dumps
            .iter()
            .filter(|(agg, _)| links.for_aggregator(**agg).is_some())
            .filter_map(|(agg, map)| map.get(id).map(|info| (*agg, info.clone())))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnrichFailure {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnrichReport {
    pub enriched: usize,
    pub untouched: usize,
    pub failures: Vec<EnrichFailure>,
}

/// Count precedence when several platforms report one.
const COUNT_PRECEDENCE: [Aggregator; 3] =
    [Aggregator::Huggingface, Aggregator::Paperswithcode, Aggregator::Github];

fn apply(record: &mut DatasetRecord, infos: &BTreeMap<Aggregator, AggregatorInfo>) {
    for (agg, info) in infos {
        if let Some(label) = &info.license_label {
            record.aggregator_labels.insert(*agg, label.clone());
        }
    }
    let first = |f: fn(&AggregatorInfo) -> Option<u64>| {
        COUNT_PRECEDENCE.iter().find_map(|a| infos.get(a).and_then(f))
    };
    if let Some(d) = first(|i| i.download_count) {
        record.download_count = Some(d);
    }
    if let Some(c) = first(|i| i.citation_count) {
        record.citation_count = Some(c);
    }
}

const MAX_WORKERS: usize = 8;

/// Returns a new store with aggregator labels and counts filled from
/// `client`. Per-record client failures are collected, never fatal.
/// Client calls fan out over at most [`MAX_WORKERS`] threads; results are
/// merged in record-id order.
pub fn enrich(store: &Store, client: &dyn AggregatorClient) -> (Store, EnrichReport) {
    let records = store.records();
    let workers = MAX_WORKERS.min(records.len().max(1));
    let chunk = records.len().div_ceil(workers).max(1);
    let fetched: Vec<Result<BTreeMap<Aggregator, AggregatorInfo>, ClientError>> =
        std::thread::scope(|s| {
            let handles: Vec<_> = records
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        part.iter()
                            .map(|sr| client.fetch(&sr.record.id, &sr.record.links))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("client thread panicked"))
                .collect()
        });

    let mut report = EnrichReport::default();
    let mut out = Vec::with_capacity(records.len());
    for (sr, result) in records.iter().zip(fetched) {
        let mut record = sr.record.clone();
        match result {
            Ok(infos) if !infos.is_empty() => {
                apply(&mut record, &infos);
                report.enriched += 1;
            }
            Ok(_) => report.untouched += 1,
            Err(e) => {
                report.untouched += 1;
                report.failures.push(EnrichFailure { id: record.id.clone(), message: e.0 });
            }
        }
        out.push(record);
    }
    let enriched = Store::from_records(out, Arc::clone(store.registry()), store.policy().clone())
        .expect("ids were unique in the source store");
    (enriched, report)
}
