//! Strategies, oracles and property bodies shared by the property and
//! acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use dpe_core::analytics::{CountryLanguage, CountryLanguageTable};
use dpe_core::card::{generate_card, merge_cards, ProvenanceCard};
use dpe_core::filter::{apply_filter, explain, FilterCriteria, YearRange};
use dpe_core::ingest::Store;
use dpe_core::license::{LicenseRegistry, Policy, RightsProfile, UseCategory};
use dpe_core::schema::{
    AggregatorLinks, CollectionDate, DatasetRecord, EvidenceSource, LicenseEvidence, Origin,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

pub fn registry() -> Arc<LicenseRegistry> {
    Arc::new(LicenseRegistry::builtin())
}

pub fn store_of(records: Vec<DatasetRecord>) -> Arc<Store> {
    Arc::new(Store::from_records(records, registry(), Policy::default()).expect("unique ids"))
}

pub const LICENSE_POOL: &[&str] = &[
    "MIT",
    "Apache 2.0",
    "CC BY 4.0",
    "CC BY-SA 4.0",
    "CC BY-NC 4.0",
    "CC BY-NC-SA 4.0",
    "GPL 3.0",
    "OpenAI Terms of Use",
    "Academic Only",
    "Access Request Form",
    "Some Bespoke Terms",
];
pub const LANGUAGE_POOL: &[&str] = &["en", "en-gb", "fr", "de", "zh", "sw", "yo", "code"];
pub const TASK_POOL: &[&str] = &["Translation", "Summarization", "Question Answering", "Classification"];
pub const CREATOR_POOL: &[&str] = &["Acme Lab", "Uni A", "Widget Corp"];
pub const DOMAIN_POOL: &[&str] = &["News", "Code", "Legal", "Model Generated"];
pub const GENERATOR_POOL: &[&str] = &["openai", "OpenAI", "anthropic", "meta"];

pub fn arb_use() -> impl Strategy<Value = UseCategory> {
    prop::sample::select(UseCategory::ALL.to_vec())
}

/// Valid (specified) rights profiles.
pub fn arb_profile() -> impl Strategy<Value = RightsProfile> {
    (
        prop::sample::select(vec![
            UseCategory::Commercial,
            UseCategory::NonCommercial,
            UseCategory::AcademicOnly,
        ]),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(u, a, s)| RightsProfile::new(u, a, s))
}

fn subset(pool: &'static [&'static str]) -> impl Strategy<Value = Vec<String>> {
    prop::sample::subsequence(pool.to_vec(), 0..=pool.len().min(3))
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn arb_evidence() -> impl Strategy<Value = LicenseEvidence> {
    (
        prop::sample::select(LICENSE_POOL.to_vec()),
        prop::sample::select(EvidenceSource::ALL.to_vec()),
        any::<bool>(),
    )
        .prop_map(|(name, source, stated)| LicenseEvidence {
            raw_name: name.to_string(),
            canonical_id: None,
            url: None,
            evidence_source: source,
            author_stated: stated && source.can_be_author_stated(),
        })
}

/// A valid record with id `c{idx % 3}/r{idx}`.
pub fn arb_record(idx: usize) -> impl Strategy<Value = DatasetRecord> {
    (
        prop::collection::vec(arb_evidence(), 0..3),
        subset(LANGUAGE_POOL),
        subset(TASK_POOL),
        subset(CREATOR_POOL),
        subset(DOMAIN_POOL),
        prop::option::of(2015i32..2025),
        0u8..3,
        prop::sample::select(GENERATOR_POOL.to_vec()),
        (any::<bool>(), any::<bool>(), any::<bool>()),
        prop::option::of(0u64..10_000),
    )
        .prop_map(
            move |(licenses, langs, tasks, creators, domains, year, origin, gen, links, count)| {
                let collection = format!("c{}", idx % 3);
                let mut r = DatasetRecord::new(format!("{collection}/r{idx}"), format!("R {idx}"), collection);
                r.licenses = licenses;
                r.languages = langs.into_iter().collect();
                r.task_categories = tasks;
                r.creators = creators;
                r.source_domains = domains;
                r.time_of_collection = year.map(CollectionDate::year);
                r.origin = [Origin::HumanWeb, Origin::ModelGenerated, Origin::Both][origin as usize];
                if r.origin.is_synthetic() {
                    r.generated_by = Some(gen.to_string());
                }
                let mut l = AggregatorLinks::default();
                if links.0 {
                    l.github = Some(format!("https://github.com/x/r{idx}"));
                }
                if links.1 {
                    l.huggingface = Some(format!("https://huggingface.co/datasets/x/r{idx}"));
                }
                if links.2 {
                    l.paperswithcode = Some(format!("https://paperswithcode.com/dataset/r{idx}"));
                }
                r.links = l;
                r.download_count = count;
                r
            },
        )
}

/// Records with distinct ids, offset so two calls with different offsets
/// never collide.
pub fn arb_records_from(offset: usize, max: usize) -> impl Strategy<Value = Vec<DatasetRecord>> {
    (0..=max).prop_flat_map(move |n| {
        (offset..offset + n).map(arb_record).collect::<Vec<_>>()
    })
}

pub fn arb_records(max: usize) -> impl Strategy<Value = Vec<DatasetRecord>> {
    arb_records_from(0, max)
}

fn arb_policy() -> impl Strategy<Value = Policy> {
    prop::sample::select(vec![0u8, 1, 2]).prop_map(|k| match k {
        0 => Policy::default(),
        1 => Policy::widened(),
        _ => Policy { openai_terms_as: UseCategory::Commercial, ..Policy::default() },
    })
}

fn str_set(pool: &'static [&'static str]) -> impl Strategy<Value = BTreeSet<String>> {
    subset(pool).prop_map(|v| v.into_iter().collect())
}

pub fn arb_criteria() -> impl Strategy<Value = FilterCriteria> {
    (
        prop::sample::subsequence(UseCategory::ALL.to_vec(), 0..=4),
        (any::<bool>(), any::<bool>(), any::<bool>()),
        str_set(GENERATOR_POOL),
        str_set(CREATOR_POOL),
        str_set(DOMAIN_POOL),
        str_set(LANGUAGE_POOL),
        str_set(TASK_POOL),
        prop::option::of((2015i32..2025, 0i32..6)),
        arb_policy(),
    )
        .prop_map(|(uses, flags, gens, creators, domains, langs, tasks, years, policy)| {
            FilterCriteria {
                allowed_use: uses.into_iter().collect(),
                forbid_attribution_burden: flags.0,
                forbid_share_alike: flags.1,
                exclude_model_generated: flags.2,
                exclude_generated_by: gens,
                exclude_creators: creators,
                exclude_source_domains: domains,
                require_languages: langs,
                require_tasks: tasks,
                year_range: years.map(|(lo, w)| YearRange::new(lo, lo + w).unwrap()),
                evidence_policy: policy,
            }
        })
}

fn keep_some(r: &mut ChaCha8Rng, set: &BTreeSet<String>) -> BTreeSet<String> {
    set.iter().filter(|_| r.random_bool(0.6)).cloned().collect()
}

/// Adds clauses or shrinks allow-sets of `c`, never loosening it. Match-any
/// requirement sets only shrink once active, and never back to empty.
pub fn strengthen(c: &FilterCriteria, seed: u64) -> FilterCriteria {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut s = c.clone();
    s.allowed_use = c.allowed_use.iter().copied().filter(|_| r.random_bool(0.7)).collect();
    s.forbid_attribution_burden |= r.random_bool(0.2);
    s.forbid_share_alike |= r.random_bool(0.2);
    s.exclude_model_generated |= r.random_bool(0.2);
    let grow = |set: &mut BTreeSet<String>, pool: &[&str], r: &mut ChaCha8Rng| {
        if r.random_bool(0.3) {
            set.insert(pool.iter().choose(r).unwrap().to_string());
        }
    };
    grow(&mut s.exclude_generated_by, GENERATOR_POOL, &mut r);
    grow(&mut s.exclude_creators, CREATOR_POOL, &mut r);
    grow(&mut s.exclude_source_domains, DOMAIN_POOL, &mut r);
    for (set, pool) in [
        (&mut s.require_languages, LANGUAGE_POOL),
        (&mut s.require_tasks, TASK_POOL),
    ] {
        if set.is_empty() {
            if r.random_bool(0.3) {
                set.insert(pool.iter().choose(&mut r).unwrap().to_string());
            }
        } else {
            let kept = keep_some(&mut r, set);
            if !kept.is_empty() {
                *set = kept;
            }
        }
    }
    s.year_range = match c.year_range {
        None if r.random_bool(0.3) => {
            let lo = r.random_range(2015..2025);
            Some(YearRange::new(lo, lo + r.random_range(0..5)).unwrap())
        }
        None => None,
        Some(y) => {
            let lo = r.random_range(y.lo..=y.hi);
            let hi = r.random_range(lo..=y.hi);
            Some(YearRange::new(lo, hi).unwrap())
        }
    };
    s
}

/// Included ids are a subset of the store, strengthened criteria include a
/// subset, and `explain` is empty exactly for included records.
pub fn check_filter_triple(
    records: Vec<DatasetRecord>,
    c: &FilterCriteria,
    seed: u64,
) -> Result<(), TestCaseError> {
    let store = store_of(records);
    let sel = apply_filter(&store, c);
    let all: BTreeSet<&str> = store.ids().collect();
    let inc: BTreeSet<&str> = sel.included_ids().into_iter().collect();
    prop_assert!(inc.is_subset(&all));
    prop_assert_eq!(inc.len() + sel.excluded().len(), all.len());

    let strong = strengthen(c, seed);
    let sel2 = apply_filter(&store, &strong);
    let inc2: BTreeSet<&str> = sel2.included_ids().into_iter().collect();
    prop_assert!(inc2.is_subset(&inc), "strengthened criteria admitted {:?}", inc2.difference(&inc));

    for sr in store.records() {
        let reasons = explain(&store, sr, c);
        prop_assert_eq!(reasons.is_empty(), inc.contains(sr.record.id.as_str()), "{}", sr.record.id);
        if let Some(stored) = sel.excluded().get(&sr.record.id) {
            prop_assert_eq!(stored, &reasons);
        }
    }
    Ok(())
}

pub fn card_of(records: Vec<DatasetRecord>) -> ProvenanceCard {
    generate_card(&dpe_core::filter::Selection::all(&store_of(records)))
}

fn same_content(a: &ProvenanceCard, b: &ProvenanceCard) -> bool {
    a.entries == b.entries && a.summary == b.summary
}

/// Merge is associative and has the empty card as identity; entry counts add.
pub fn check_card_algebra(
    a: Vec<DatasetRecord>,
    b: Vec<DatasetRecord>,
    c: Vec<DatasetRecord>,
) -> Result<(), TestCaseError> {
    let (ca, cb, cc) = (card_of(a), card_of(b), card_of(c));
    let left = merge_cards(&merge_cards(&ca, &cb).unwrap(), &cc).unwrap();
    let right = merge_cards(&ca, &merge_cards(&cb, &cc).unwrap()).unwrap();
    prop_assert!(same_content(&left, &right));
    prop_assert!(left.summary_is_consistent());

    let empty = ProvenanceCard::empty();
    prop_assert!(same_content(&merge_cards(&ca, &empty).unwrap(), &ca));
    prop_assert!(same_content(&merge_cards(&empty, &ca).unwrap(), &ca));

    let ab = merge_cards(&ca, &cb).unwrap();
    prop_assert_eq!(ab.len(), ca.len() + cb.len());
    prop_assert_eq!(ab.summary.datasets, ca.summary.datasets + cb.summary.datasets);
    for (cat, n) in &ab.summary.use_categories {
        let sum = ca.summary.use_categories.get(cat).copied().unwrap_or(0)
            + cb.summary.use_categories.get(cat).copied().unwrap_or(0);
        prop_assert_eq!(*n, sum);
    }
    Ok(())
}

/// Representation scores by the defining double loop: for each table row,
/// the language's fraction times the number of datasets containing it.
pub fn brute_force_scores(
    datasets: &[BTreeSet<String>],
    table: &CountryLanguageTable,
) -> BTreeMap<String, f64> {
    let primary = |c: &str| c.split('-').next().unwrap().to_ascii_lowercase();
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for row in table.rows() {
        let mut covered = 0u64;
        for langs in datasets {
            if langs.iter().any(|l| primary(l) == primary(&row.language)) {
                covered += 1;
            }
        }
        *out.entry(row.country.clone()).or_insert(0.0) += row.fraction * covered as f64;
    }
    out
}

/// A random representation instance with up to `countries` countries and
/// `datasets` datasets over a 40-language space. Every tenth seed uses the
/// full size.
pub fn random_representation_instance(
    seed: u64,
    countries: usize,
    datasets: usize,
) -> (CountryLanguageTable, Vec<DatasetRecord>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let langs: Vec<String> = (0..40)
        .map(|i| format!("{}{}", (b'a' + (i / 26) as u8) as char, (b'a' + (i % 26) as u8) as char))
        .collect();
    let full = seed % 10 == 0;
    let n_countries = if full { countries } else { r.random_range(1..=countries) };
    let mut rows = Vec::new();
    for k in 0..n_countries {
        let n = r.random_range(1..=6);
        for l in langs.iter().choose_multiple(&mut r, n) {
            rows.push(CountryLanguage {
                country: format!("K{k:02}"),
                language: l.clone(),
                fraction: r.random::<f64>(),
            });
        }
    }
    let n_datasets = if full { datasets } else { r.random_range(0..=datasets) };
    let records = (0..n_datasets)
        .map(|i| {
            let mut rec = DatasetRecord::new(format!("d/{i}"), format!("D {i}"), "d");
            let n = r.random_range(0..=5);
            for l in langs.iter().choose_multiple(&mut r, n) {
                let code = if r.random_bool(0.2) { format!("{l}-x{}", r.random_range(10..99)) } else { l.clone() };
                rec.languages.insert(code);
            }
            rec
        })
        .collect();
    (CountryLanguageTable::from_rows(rows).expect("valid rows"), records)
}
