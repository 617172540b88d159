//! Seeded generators for the bundled fixture corpora.
//!
//! Every generator is a pure function of its seed. The `gen-fixtures` binary
//! writes [`render_fixtures`] under `fixtures/`, and a test checks that the
//! checked-in files still match.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::card::{generate_card, render_markdown};
use crate::filter::{apply_filter, FilterCriteria};
use crate::ingest::{DumpLine, Store};
use crate::license::{LicenseRegistry, Policy, UseCategory};
use crate::schema::{
    canonical_id, serialize_record, Aggregator, CollectionDate, CreatorCategory, DatasetRecord,
    EvidenceSource, LicenseEvidence, Origin, Range3, TaskFormat, TextMetrics,
};

pub const FIXTURE_SEED: u64 = 0x5eed_2023;

/// Agreement targets for the aggregator corpus. Rows are the verified use
/// category, columns the category of the platform's label, both in
/// [`UseCategory::ALL`] order.
pub const AGREEMENT_TARGETS: [(Aggregator, [[u64; 4]; 4]); 3] = [
    (Aggregator::Github, [[349, 507, 0, 0], [112, 458, 0, 0], [49, 303, 0, 0], [9, 71, 0, 0]]),
    (
        Aggregator::Huggingface,
        [[176, 677, 1, 2], [164, 395, 6, 5], [113, 152, 80, 7], [9, 65, 2, 4]],
    ),
    (
        Aggregator::Paperswithcode,
        [[313, 520, 1, 22], [31, 523, 1, 15], [2, 191, 157, 2], [5, 65, 2, 8]],
    ),
];

/// Per-group `(datasets, model-generated datasets)` of the diversity corpus.
/// The restricted group is split into Non-Commercial and Academic-Only.
pub const DIVERSITY_GROUPS: [(UseCategory, usize, usize); 4] = [
    (UseCategory::Commercial, 250, 32),
    (UseCategory::Unspecified, 404, 55),
    (UseCategory::NonCommercial, 180, 82),
    (UseCategory::AcademicOnly, 33, 15),
];

/// Per-year `(datasets, restricted datasets)` of the yearly corpus.
pub const YEARLY_TARGETS: [(i32, usize, usize); 6] = [
    (2018, 100, 20),
    (2019, 100, 20),
    (2020, 100, 20),
    (2021, 100, 20),
    (2022, 100, 20),
    (2023, 200, 122),
];

const COMMERCIAL_LINEAGES: &[&[&str]] = &[
    &["CC BY 4.0"],
    &["MIT"],
    &["Apache 2.0"],
    &["CC BY-SA 4.0"],
    &["CC BY 4.0", "MIT"],
    &["CC0 1.0"],
    &["BSD 3-Clause"],
    &["CC BY-SA 3.0"],
];
const NON_COMMERCIAL_LINEAGES: &[&[&str]] = &[
    &["CC BY-NC 4.0"],
    &["CC BY-NC-SA 4.0"],
    &["OpenAI Terms of Use"],
    &["CC BY 4.0", "OpenAI Terms of Use"],
    &["MIT", "CC BY-NC 4.0"],
    &["Non Commercial"],
];
const ACADEMIC_LINEAGES: &[&[&str]] =
    &[&["Academic Only"], &["CC BY 4.0", "Academic Only"], &["CC BY-NC 4.0", "Academic Only"]];

const STATED_SOURCES: [EvidenceSource; 4] = [
    EvidenceSource::Paper,
    EvidenceSource::Collection,
    EvidenceSource::GithubData,
    EvidenceSource::Huggingface,
];

const COMMERCIAL_LABELS: [(Aggregator, &[&str]); 3] = [
    (Aggregator::Github, &["MIT License", "Apache License 2.0", "CC BY 4.0", "CC0 1.0"]),
    (Aggregator::Huggingface, &["mit", "apache-2.0", "cc-by-4.0", "cc-by-sa-4.0", "cc0-1.0"]),
    (Aggregator::Paperswithcode, &["MIT", "Apache 2.0", "CC BY 4.0", "CC BY-SA 4.0"]),
];
const NON_COMMERCIAL_LABELS: &[&str] = &["cc-by-nc-4.0", "cc-by-nc-sa-4.0", "other"];
const ACADEMIC_LABELS: &[&str] = &["Academic Only", "Research Only"];

const TASKS: &[&str] = &[
    "Brainstorming",
    "Classification",
    "Code Generation",
    "Creative Writing",
    "Dialog Generation",
    "Explanation",
    "Fact Verification",
    "Information Extraction",
    "Logical and Mathematical Reasoning",
    "Natural Language Inference",
    "Open-form Text Generation",
    "Question Answering",
    "Sentiment Analysis",
    "Summarization",
    "Translation",
];
const DOMAINS: &[&str] = &[
    "Academic Papers",
    "Biomedical",
    "Books",
    "Code",
    "Encyclopedias",
    "Exams",
    "General Web",
    "Legal",
    "News",
    "Reviews",
    "Social Media",
];
const TOPICS: &[&str] = &[
    "science", "history", "sports", "politics", "medicine", "law", "finance", "cooking", "travel",
    "music", "film", "programming", "mathematics", "education", "religion", "geography",
    "technology", "business", "health", "literature",
];
const SOURCES: &[&str] = &[
    "wikipedia.org", "reddit.com", "stackexchange.com", "github.com", "arxiv.org", "news sites",
    "exam papers", "movie reviews", "product reviews", "textbooks", "government sites",
    "court rulings", "pubmed", "quora.com", "twitter.com",
];
const LANGUAGES: &[&str] = &[
    "en", "en", "en", "en", "zh", "es", "fr", "de", "ja", "ko", "ru", "ar", "hi", "sw", "yo",
    "id", "vi", "tr", "fi", "code",
];
const CREATORS: &[(&str, CreatorCategory)] = &[
    ("University of Somewhere", CreatorCategory::Academic),
    ("Northern Institute of Technology", CreatorCategory::Academic),
    ("Open Text Lab", CreatorCategory::ResearchGroup),
    ("Acme AI Research", CreatorCategory::IndustryLab),
    ("Widget Corp", CreatorCategory::Corporation),
    ("Tiny Startup Inc", CreatorCategory::Startup),
];
const GENERATORS: &[&str] = &["openai", "openai", "anthropic", "cohere", "meta"];

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn pick<'a, T>(r: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(r).expect("non-empty choice list")
}

fn sample_distinct(
    r: &mut ChaCha8Rng,
    items: &[&str],
    n: std::ops::RangeInclusive<usize>,
) -> Vec<String> {
    let n = r.random_range(n);
    let mut out: Vec<String> =
        items.choose_multiple(r, n.min(items.len())).map(|s| s.to_string()).collect();
    out.sort();
    out
}

fn evidence(raw: &str, source: EvidenceSource, stated: bool) -> LicenseEvidence {
    LicenseEvidence {
        raw_name: raw.to_string(),
        canonical_id: None,
        url: None,
        evidence_source: source,
        author_stated: stated,
    }
}

/// Licenses whose composition lands on `category` under the default policy.
fn lineage(r: &mut ChaCha8Rng, category: UseCategory) -> Vec<LicenseEvidence> {
    let names: &[&str] = match category {
        UseCategory::Commercial => pick(r, COMMERCIAL_LINEAGES),
        UseCategory::NonCommercial => pick(r, NON_COMMERCIAL_LINEAGES),
        UseCategory::AcademicOnly => pick(r, ACADEMIC_LINEAGES),
        UseCategory::Unspecified => {
            // Either nothing at all or repository-only evidence, which the
            // default policy does not accept.
            return if r.random_bool(0.25) {
                vec![evidence(pick(r, &["MIT", "Apache 2.0"]), EvidenceSource::GithubRepo, false)]
            } else {
                Vec::new()
            };
        }
    };
    names.iter().map(|n| evidence(n, *pick(r, &STATED_SOURCES), true)).collect()
}

fn metrics(input: f64, target: f64, turns: f64) -> TextMetrics {
    let range = |m: f64| Range3 { min: (m * 0.1).floor(), mean: m, max: (m * 4.0).ceil() };
    TextMetrics { input_chars: range(input), target_chars: range(target), dialog_turns: range(turns) }
}

/// Log-normal-ish positive draw with the given median.
fn skewed(r: &mut ChaCha8Rng, median: f64) -> f64 {
    let z: f64 = (0..4).map(|_| r.random::<f64>()).sum::<f64>() - 2.0;
    (median * (z * 1.2).exp() * 10.0).round() / 10.0
}

struct Base {
    collection: String,
    name: String,
    year: i32,
}

fn base_record(r: &mut ChaCha8Rng, b: Base) -> DatasetRecord {
    let id = canonical_id(&b.collection, &b.name);
    let mut rec = DatasetRecord::new(id, b.name, b.collection.clone());
    rec.collection_url =
        Some(format!("https://example.org/collections/{}", crate::schema::slugify(&b.collection)));
    let arxiv = format!("{:02}{:02}.{:05}", b.year % 100, r.random_range(1..=12), r.random_range(0..99999));
    rec.links.arxiv = Some(format!("https://arxiv.org/abs/{arxiv}"));
    rec.time_of_collection = Some(CollectionDate::year_month(b.year, r.random_range(1..=12)));
    let lang_count = if r.random_bool(0.8) { 1 } else { r.random_range(2..=4) };
    rec.languages = sample_distinct(r, LANGUAGES, lang_count..=lang_count).into_iter().collect();
    rec.task_categories = sample_distinct(r, TASKS, 1..=2);
    rec.text_topics = sample_distinct(r, TOPICS, 5..=11);
    rec.text_sources = sample_distinct(r, SOURCES, 1..=2);
    rec.source_domains = sample_distinct(r, DOMAINS, 1..=2);
    rec.formats = [TaskFormat::ZeroShot].into_iter().collect();
    if r.random_bool(0.2) {
        rec.formats.insert(TaskFormat::FewShot);
    }
    let (creator, category) = pick(r, CREATORS);
    rec.creators = vec![creator.to_string()];
    rec.creator_categories = vec![*category];
    rec.text_metrics = Some(metrics(skewed(r, 700.0), skewed(r, 80.0), 1.0));
    rec
}

fn make_synthetic(r: &mut ChaCha8Rng, rec: &mut DatasetRecord) {
    rec.origin = if r.random_bool(0.85) { Origin::ModelGenerated } else { Origin::Both };
    rec.generated_by = Some(pick(r, GENERATORS).to_string());
    if !rec.source_domains.iter().any(|d| d == "Model Generated") {
        rec.source_domains.push("Model Generated".to_string());
        rec.source_domains.sort();
    }
}

fn label_for(r: &mut ChaCha8Rng, agg: Aggregator, column: UseCategory) -> Option<String> {
    let label = match column {
        UseCategory::Unspecified => return None,
        UseCategory::Commercial => {
            let labels = COMMERCIAL_LABELS.iter().find(|(a, _)| *a == agg).expect("every platform").1;
            pick(r, labels)
        }
        UseCategory::NonCommercial => pick(r, NON_COMMERCIAL_LABELS),
        UseCategory::AcademicOnly => pick(r, ACADEMIC_LABELS),
    };
    Some(label.to_string())
}

/// 1858 records linked to all three platforms, whose platform labels
/// reproduce [`AGREEMENT_TARGETS`] cell for cell. Download counts come from
/// the Hugging Face dump and citation counts from Papers with Code.
pub fn agreement_records(seed: u64) -> Vec<DatasetRecord> {
    let mut r = rng(seed, 1);
    // (row, column per platform) for every record, row-major then shuffled.
    let mut plan: Vec<(UseCategory, [UseCategory; 3])> = Vec::new();
    for (row, verified) in UseCategory::ALL.into_iter().enumerate() {
        let mut columns: Vec<Vec<UseCategory>> = AGREEMENT_TARGETS
            .iter()
            .map(|(_, m)| {
                let mut cols: Vec<UseCategory> = UseCategory::ALL
                    .into_iter()
                    .flat_map(|c| std::iter::repeat_n(c, m[row][c.index()] as usize))
                    .collect();
                cols.shuffle(&mut r);
                cols
            })
            .collect();
        let n = columns[0].len();
        debug_assert!(columns.iter().all(|c| c.len() == n), "row sums differ across platforms");
        for _ in 0..n {
            let cols = [
                columns[0].pop().expect("row length"),
                columns[1].pop().expect("row length"),
                columns[2].pop().expect("row length"),
            ];
            plan.push((verified, cols));
        }
    }
    plan.shuffle(&mut r);

    plan.into_iter()
        .enumerate()
        .map(|(i, (verified, cols))| {
            let collection = format!("Audit Collection {:02}", i % 8 + 1);
            let name = format!("Dataset {:04}", i + 1);
            let year = r.random_range(2015..=2023);
            let mut rec = base_record(&mut r, Base { collection, name, year });
            let slug = rec.id.replace('/', "-");
            rec.links.github = Some(format!("https://github.com/audit-org/{slug}"));
            rec.links.huggingface = Some(format!("https://huggingface.co/datasets/audit-org/{slug}"));
            rec.links.paperswithcode = Some(format!("https://paperswithcode.com/dataset/{slug}"));
            rec.licenses = lineage(&mut r, verified);
            if r.random_bool(0.1) {
                make_synthetic(&mut r, &mut rec);
            }
            for ((agg, _), col) in AGREEMENT_TARGETS.iter().zip(cols) {
                if let Some(label) = label_for(&mut r, *agg, col) {
                    rec.aggregator_labels.insert(*agg, label);
                }
            }
            rec.download_count = Some(skewed(&mut r, 2000.0) as u64);
            rec.citation_count = Some(skewed(&mut r, 40.0) as u64);
            rec
        })
        .collect()
}

/// Removes everything enrichment fills in.
pub fn strip_aggregator_data(record: &mut DatasetRecord) {
    record.aggregator_labels.clear();
    record.download_count = None;
    record.citation_count = None;
}

/// Per-platform dumps that, replayed through enrichment, restore what
/// [`strip_aggregator_data`] removes. GitHub also reports a (lower
/// precedence) download count.
pub fn aggregator_dumps(records: &[DatasetRecord]) -> BTreeMap<Aggregator, Vec<DumpLine>> {
    let mut dumps: BTreeMap<Aggregator, Vec<DumpLine>> = BTreeMap::new();
    let mut sorted: Vec<&DatasetRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for rec in sorted {
        for agg in Aggregator::ALL {
            if rec.links.for_aggregator(agg).is_none() {
                continue;
            }
            let mut line = DumpLine { id: rec.id.clone(), info: Default::default() };
            line.info.license_label = rec.aggregator_labels.get(&agg).cloned();
            match agg {
                Aggregator::Huggingface => line.info.download_count = rec.download_count,
                Aggregator::Paperswithcode => line.info.citation_count = rec.citation_count,
                Aggregator::Github => {
                    line.info.download_count = rec.download_count.map(|d| d / 10)
                }
            }
            dumps.entry(agg).or_default().push(line);
        }
    }
    dumps
}

/// Records grouped per [`DIVERSITY_GROUPS`], with the restricted group
/// covering more tasks and sources and producing longer targets.
pub fn diversity_records(seed: u64) -> Vec<DatasetRecord> {
    let mut r = rng(seed, 2);
    let mut out = Vec::new();
    for (category, n, synthetic) in DIVERSITY_GROUPS {
        let mut flags: Vec<bool> = (0..n).map(|i| i < synthetic).collect();
        flags.shuffle(&mut r);
        let restricted = category.is_restricted();
        for (i, synth) in flags.into_iter().enumerate() {
            let collection = format!("{} Pool", category.label());
            let name = format!("{} {:03}", category.as_str(), i + 1);
            let year = r.random_range(2017..=2023);
            let mut rec = base_record(&mut r, Base { collection, name, year });
            if restricted {
                rec.task_categories = sample_distinct(&mut r, TASKS, 2..=5);
                rec.text_sources = sample_distinct(&mut r, SOURCES, 2..=7);
                rec.text_topics = sample_distinct(&mut r, TOPICS, 6..=12);
                rec.text_metrics = Some(metrics(skewed(&mut r, 650.0), skewed(&mut r, 600.0), 1.0));
            } else if category == UseCategory::Unspecified {
                rec.text_topics = sample_distinct(&mut r, TOPICS, 7..=11);
            }
            rec.licenses = lineage(&mut r, category);
            if synth {
                make_synthetic(&mut r, &mut rec);
            }
            out.push(rec);
        }
    }
    out
}

/// Records per [`YEARLY_TARGETS`]; restricted datasets are split roughly
/// four to one between Non-Commercial and Academic-Only.
pub fn yearly_records(seed: u64) -> Vec<DatasetRecord> {
    let mut r = rng(seed, 3);
    let mut out = Vec::new();
    for (year, n, restricted) in YEARLY_TARGETS {
        for i in 0..n {
            let category = if i < restricted {
                if r.random_bool(0.8) { UseCategory::NonCommercial } else { UseCategory::AcademicOnly }
            } else if r.random_bool(0.6) {
                UseCategory::Commercial
            } else {
                UseCategory::Unspecified
            };
            let collection = format!("Releases {year}");
            let name = format!("Release {year}-{:03}", i + 1);
            let mut rec = base_record(&mut r, Base { collection, name, year });
            rec.licenses = lineage(&mut r, category);
            if r.random_bool(if year == 2023 { 0.4 } else { 0.1 }) {
                make_synthetic(&mut r, &mut rec);
            }
            out.push(rec);
        }
    }
    out
}

/// `n` records of every shape: all four categories, optional links, labels
/// and metadata. Used for scale tests.
pub fn mixed_records(seed: u64, n: usize) -> Vec<DatasetRecord> {
    let mut r = rng(seed, 4);
    (0..n)
        .map(|i| {
            let collection = format!("Mixed {:02}", i % 20);
            let name = format!("Mixed Dataset {i:05}");
            let year = r.random_range(2010..=2024);
            let mut rec = base_record(&mut r, Base { collection, name, year });
            let category = *pick(&mut r, &UseCategory::ALL);
            rec.licenses = lineage(&mut r, category);
            if r.random_bool(0.2) {
                make_synthetic(&mut r, &mut rec);
            }
            for agg in Aggregator::ALL {
                if r.random_bool(0.6) {
                    let slug = rec.id.replace('/', "-");
                    let link = match agg {
                        Aggregator::Github => format!("https://github.com/mixed/{slug}"),
                        Aggregator::Huggingface => format!("https://huggingface.co/datasets/mixed/{slug}"),
                        Aggregator::Paperswithcode => format!("https://paperswithcode.com/dataset/{slug}"),
                    };
                    match agg {
                        Aggregator::Github => rec.links.github = Some(link),
                        Aggregator::Huggingface => rec.links.huggingface = Some(link),
                        Aggregator::Paperswithcode => rec.links.paperswithcode = Some(link),
                    }
                    let col = *pick(&mut r, &UseCategory::ALL);
                    if let Some(l) = label_for(&mut r, agg, col) {
                        rec.aggregator_labels.insert(agg, l);
                    }
                }
            }
            if r.random_bool(0.05) {
                rec.time_of_collection = None;
            }
            rec
        })
        .collect()
}

struct Sample<'a> {
    name: &'a str,
    collection: &'a str,
    licenses: &'a [(&'a str, EvidenceSource, bool)],
    languages: &'a [&'a str],
    tasks: &'a [&'a str],
    domains: &'a [&'a str],
    generated_by: Option<&'a str>,
    creator: (&'a str, CreatorCategory),
    year: i32,
}

const SAMPLES: &[Sample] = &[
    Sample {
        name: "Instruct Web 52k",
        collection: "Instruct Web",
        licenses: &[("CC BY-NC 4.0", EvidenceSource::Huggingface, true)],
        languages: &["en"],
        tasks: &["Brainstorming", "Open-form Text Generation", "Question Answering"],
        domains: &["Model Generated"],
        generated_by: Some("openai"),
        creator: ("Northern Institute of Technology", CreatorCategory::Academic),
        year: 2023,
    },
    Sample {
        name: "Human Dialogues 15k",
        collection: "Human Dialogues",
        licenses: &[("CC BY-SA 3.0", EvidenceSource::GithubData, true)],
        languages: &["en"],
        tasks: &["Brainstorming", "Classification", "Question Answering", "Summarization"],
        domains: &["Encyclopedias", "General Web"],
        generated_by: None,
        creator: ("Widget Corp", CreatorCategory::Corporation),
        year: 2023,
    },
    Sample {
        name: "Open Conversations",
        collection: "Open Conversations",
        licenses: &[("Apache 2.0", EvidenceSource::Paper, true)],
        languages: &["de", "en", "es", "fr", "ru"],
        tasks: &["Dialog Generation"],
        domains: &["General Web"],
        generated_by: None,
        creator: ("Open Text Lab", CreatorCategory::ResearchGroup),
        year: 2023,
    },
    Sample {
        name: "Preference Pairs",
        collection: "Preference Pairs",
        licenses: &[("MIT", EvidenceSource::Huggingface, true)],
        languages: &["en"],
        tasks: &["Dialog Generation", "Response Ranking"],
        domains: &["Model Generated"],
        generated_by: Some("anthropic"),
        creator: ("Acme AI Research", CreatorCategory::IndustryLab),
        year: 2022,
    },
    Sample {
        name: "Shared Chats",
        collection: "Shared Chats",
        licenses: &[("MIT", EvidenceSource::GithubRepo, false)],
        languages: &["en", "zh"],
        tasks: &["Dialog Generation"],
        domains: &["Model Generated", "Social Media"],
        generated_by: Some("openai"),
        creator: ("Tiny Startup Inc", CreatorCategory::Startup),
        year: 2023,
    },
    Sample {
        name: "Task Mixture v2",
        collection: "Task Mixture",
        licenses: &[("Apache 2.0", EvidenceSource::Collection, true)],
        languages: &["en"],
        tasks: &["Natural Language Inference", "Question Answering", "Summarization", "Translation"],
        domains: &["Encyclopedias", "News", "Reviews"],
        generated_by: None,
        creator: ("Acme AI Research", CreatorCategory::IndustryLab),
        year: 2022,
    },
    Sample {
        name: "Multilingual Prompts",
        collection: "Task Mixture",
        licenses: &[("Apache 2.0", EvidenceSource::Collection, true), ("CC BY 4.0", EvidenceSource::Paper, true)],
        languages: &["ar", "en", "hi", "sw", "yo", "zh"],
        tasks: &["Question Answering", "Translation"],
        domains: &["Encyclopedias", "General Web"],
        generated_by: None,
        creator: ("University of Somewhere", CreatorCategory::Academic),
        year: 2022,
    },
    Sample {
        name: "Evolved Instructions",
        collection: "Evolved Instructions",
        licenses: &[("OpenAI Terms of Use", EvidenceSource::Paper, true), ("CC BY 4.0", EvidenceSource::Huggingface, true)],
        languages: &["en"],
        tasks: &["Code Generation", "Logical and Mathematical Reasoning", "Open-form Text Generation"],
        domains: &["Code", "Model Generated"],
        generated_by: Some("openai"),
        creator: ("University of Somewhere", CreatorCategory::Academic),
        year: 2023,
    },
    Sample {
        name: "Code Snippets QA",
        collection: "Code Snippets QA",
        licenses: &[("GPL 3.0", EvidenceSource::GithubData, true), ("CC BY-SA 4.0", EvidenceSource::Paper, true)],
        languages: &["code", "en"],
        tasks: &["Code Generation", "Question Answering"],
        domains: &["Code", "Social Media"],
        generated_by: None,
        creator: ("Open Text Lab", CreatorCategory::ResearchGroup),
        year: 2021,
    },
    Sample {
        name: "Exam Questions",
        collection: "Exam Questions",
        licenses: &[("Academic Research Only", EvidenceSource::Paper, true)],
        languages: &["en", "ja", "ko"],
        tasks: &["Multiple Choice Question Answering", "Logical and Mathematical Reasoning"],
        domains: &["Exams"],
        generated_by: None,
        creator: ("University of Somewhere", CreatorCategory::Academic),
        year: 2020,
    },
    Sample {
        name: "Clinical Notes Summaries",
        collection: "Clinical Notes Summaries",
        licenses: &[("Access Request Form", EvidenceSource::Collection, true)],
        languages: &["en"],
        tasks: &["Summarization", "Information Extraction"],
        domains: &["Biomedical"],
        generated_by: None,
        creator: ("Northern Institute of Technology", CreatorCategory::Academic),
        year: 2019,
    },
    Sample {
        name: "Legal Clauses",
        collection: "Legal Clauses",
        licenses: &[("Proprietary Clause Terms", EvidenceSource::Paper, true)],
        languages: &["en", "fr"],
        tasks: &["Classification", "Information Extraction"],
        domains: &["Legal"],
        generated_by: None,
        creator: ("Widget Corp", CreatorCategory::Corporation),
        year: 2021,
    },
];

/// A dozen hand-written records covering every license situation: plain
/// permissive, copyleft clash, model terms, academic-only, request form,
/// unrecognised terms and repository-only evidence.
pub fn sample_records() -> Vec<DatasetRecord> {
    SAMPLES
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let id = canonical_id(s.collection, s.name);
            let mut rec = DatasetRecord::new(id.clone(), s.name, s.collection);
            let slug = crate::schema::slugify(s.name);
            rec.collection_url =
                Some(format!("https://example.org/collections/{}", crate::schema::slugify(s.collection)));
            rec.description = Some(format!("Sample dataset {} used in documentation and tests.", i + 1));
            rec.links.huggingface = Some(format!("https://huggingface.co/datasets/example/{slug}"));
            rec.links.github = Some(format!("https://github.com/example/{slug}"));
            if i % 3 == 0 {
                rec.links.arxiv = Some(format!("https://arxiv.org/abs/{}01.{:05}", s.year % 100, 1000 + i));
            }
            rec.licenses = s.licenses.iter().map(|(n, src, stated)| evidence(n, *src, *stated)).collect();
            rec.languages = s.languages.iter().map(|l| l.to_string()).collect();
            rec.task_categories = s.tasks.iter().map(|t| t.to_string()).collect();
            rec.source_domains = s.domains.iter().map(|d| d.to_string()).collect();
            rec.text_sources = s.domains.iter().map(|d| d.to_lowercase()).collect();
            rec.formats = if s.tasks.contains(&"Dialog Generation") {
                [TaskFormat::MultiTurnDialog].into_iter().collect()
            } else {
                [TaskFormat::ZeroShot].into_iter().collect()
            };
            if let Some(g) = s.generated_by {
                rec.origin = Origin::ModelGenerated;
                rec.generated_by = Some(g.to_string());
            }
            rec.creators = vec![s.creator.0.to_string()];
            rec.creator_categories = vec![s.creator.1];
            rec.time_of_collection = Some(CollectionDate::year(s.year));
            rec.text_metrics = Some(metrics(200.0 + 75.0 * i as f64, 120.0 + 40.0 * i as f64, 1.0 + (i % 4) as f64));
            rec.citation_count = Some(((i * 37) % 11 * 90) as u64);
            rec.download_count = Some(((i * 7919) % 5000 * 13) as u64);
            rec
        })
        .collect()
}

/// Criteria of the golden card: commercial use only, no share-alike.
pub fn golden_criteria() -> FilterCriteria {
    FilterCriteria {
        allowed_use: [UseCategory::Commercial].into_iter().collect(),
        forbid_share_alike: true,
        ..FilterCriteria::default()
    }
}

/// Markdown card of [`sample_records`] under [`golden_criteria`].
pub fn golden_card_markdown() -> String {
    let store = Store::from_records(sample_records(), Arc::new(LicenseRegistry::builtin()), Policy::default())
        .expect("sample ids are unique");
    render_markdown(&generate_card(&apply_filter(&Arc::new(store), &golden_criteria())))
}

fn jsonl<'a>(records: impl IntoIterator<Item = &'a DatasetRecord>) -> String {
    let mut sorted: Vec<&DatasetRecord> = records.into_iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.iter().map(|r| serialize_record(r) + "\n").collect()
}

/// Every fixture file, keyed by path relative to the fixtures root.
pub fn render_fixtures(seed: u64) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();

    let agreement = agreement_records(seed);
    let collections: BTreeSet<&str> = agreement.iter().map(|r| r.collection.as_str()).collect();
    for c in collections {
        files.insert(
            format!("table2/{}.jsonl", crate::schema::slugify(c)),
            jsonl(agreement.iter().filter(|r| r.collection == c)),
        );
    }
    for (agg, lines) in aggregator_dumps(&agreement) {
        let text: String = lines
            .iter()
            .map(|l| serde_json::to_string(l).expect("dump lines serialize") + "\n")
            .collect();
        files.insert(format!("aggregator_dump/{}.jsonl", agg.as_str()), text);
    }
    files.insert("table3/records.jsonl".into(), jsonl(&diversity_records(seed)));
    files.insert("fig3/records.jsonl".into(), jsonl(&yearly_records(seed)));
    files.insert("sample/records.jsonl".into(), jsonl(&sample_records()));
    files.insert("cards/golden.md".into(), golden_card_markdown());
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::Selection;
    use crate::license::categorize_dataset;

    fn categories(records: &[DatasetRecord]) -> Vec<UseCategory> {
        let reg = LicenseRegistry::builtin();
        let policy = Policy::default();
        records.iter().map(|r| categorize_dataset(r, &reg, &policy).profile.use_category).collect()
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(agreement_records(3), agreement_records(3));
        assert_ne!(agreement_records(3), agreement_records(4));
        assert_eq!(mixed_records(1, 50), mixed_records(1, 50));
    }

    #[test]
    fn every_record_is_valid() {
        let mut all = agreement_records(FIXTURE_SEED);
        all.extend(diversity_records(FIXTURE_SEED));
        all.extend(yearly_records(FIXTURE_SEED));
        all.extend(sample_records());
        all.extend(mixed_records(FIXTURE_SEED, 300));
        for r in &all {
            assert_eq!(r.check(), Ok(()), "{}", r.id);
        }
    }

    #[test]
    fn agreement_rows_match_lineages() {
        let records = agreement_records(FIXTURE_SEED);
        let cats = categories(&records);
        for (row, c) in UseCategory::ALL.into_iter().enumerate() {
            let expected: u64 = AGREEMENT_TARGETS[0].1[row].iter().sum();
            assert_eq!(cats.iter().filter(|x| **x == c).count() as u64, expected, "{c}");
        }
    }

    #[test]
    fn diversity_groups_have_planned_sizes() {
        let records = diversity_records(FIXTURE_SEED);
        let cats = categories(&records);
        for (c, n, synthetic) in DIVERSITY_GROUPS {
            let group: Vec<&DatasetRecord> =
                records.iter().zip(&cats).filter(|(_, x)| **x == c).map(|(r, _)| r).collect();
            assert_eq!(group.len(), n);
            assert_eq!(group.iter().filter(|r| r.origin.is_synthetic()).count(), synthetic);
        }
    }

    #[test]
    fn sample_card_is_non_trivial() {
        let md = golden_card_markdown();
        assert!(md.contains("## Selection criteria"));
        let store = Arc::new(
            Store::from_records(sample_records(), Arc::new(LicenseRegistry::builtin()), Policy::default())
                .unwrap(),
        );
        let all = Selection::all(&store);
        let cats: BTreeSet<UseCategory> = all.records().map(|(_, c)| c.profile.use_category).collect();
        assert_eq!(cats.len(), 4);
    }
}
