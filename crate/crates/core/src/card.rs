//! Data provenance cards: a structured, mergeable bibliography for a
//! dataset selection, with a markdown rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{FilterCriteria, Selection};
use crate::license::{detect_conflicts, Conflict, RightsProfile, UseCategory};
use crate::schema::{AggregatorLinks, CollectionDate, TaskFormat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CardError {
    #[error("cards share entry ids: {}", .0.join(", "))]
    IdCollision(Vec<String>),
    #[error("malformed card: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardLicense {
    pub raw_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub profile: RightsProfile,
    #[serde(default)]
    pub needs_review: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardEntry {
    pub id: String,
    pub name: String,
    pub collection: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection_url: Option<String>,
    #[serde(default)]
    pub links: AggregatorLinks,
    pub licenses: Vec<CardLicense>,
    pub profile: RightsProfile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conflicts: Vec<Conflict>,
    #[serde(default)]
    pub creators: Vec<String>,
    #[serde(default)]
    pub text_sources: Vec<String>,
    #[serde(default)]
    pub languages: Vec<String>,
    #[serde(default)]
    pub task_categories: Vec<String>,
    #[serde(default)]
    pub formats: Vec<TaskFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_of_collection: Option<CollectionDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub download_count: Option<u64>,
}

/// Distributions over the entries; always recomputable from them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardSummary {
    pub datasets: usize,
    pub use_categories: BTreeMap<UseCategory, usize>,
    pub languages: BTreeMap<String, usize>,
    pub task_categories: BTreeMap<String, usize>,
    pub creators: BTreeMap<String, usize>,
}

impl CardSummary {
    pub fn compute(entries: &[CardEntry]) -> CardSummary {
        let mut s = CardSummary { datasets: entries.len(), ..Default::default() };
        fn bump<'a>(m: &mut BTreeMap<String, usize>, items: impl IntoIterator<Item = &'a String>) {
            let distinct: BTreeSet<&String> = items.into_iter().collect();
            for k in distinct {
                *m.entry(k.clone()).or_default() += 1;
            }
        }
        for e in entries {
            *s.use_categories.entry(e.profile.use_category).or_default() += 1;
            bump(&mut s.languages, &e.languages);
            bump(&mut s.task_categories, &e.task_categories);
            bump(&mut s.creators, &e.creators);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceCard {
    pub entries: Vec<CardEntry>,
    pub summary: CardSummary,
    pub generated_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria_echo: Option<FilterCriteria>,
}

impl ProvenanceCard {
    pub fn empty() -> ProvenanceCard {
        ProvenanceCard {
            entries: Vec::new(),
            summary: CardSummary::default(),
            generated_at: String::new(),
            criteria_echo: None,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn summary_is_consistent(&self) -> bool {
        self.summary == CardSummary::compute(&self.entries)
    }

    /// Pretty JSON, the `.dpcard` format.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cards serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ProvenanceCard, CardError> {
        let card: ProvenanceCard =
            serde_json::from_str(text).map_err(|e| CardError::Malformed(e.to_string()))?;
        if !card.summary_is_consistent() {
            return Err(CardError::Malformed("summary does not match entries".into()));
        }
        Ok(card)
    }
}

/// One entry per included record, in id order.
pub fn generate_card(selection: &Selection) -> ProvenanceCard {
    let entries: Vec<CardEntry> = selection
        .records()
        .map(|(sr, rights)| {
            let r = &sr.record;
            CardEntry {
                id: r.id.clone(),
                name: r.name.clone(),
                collection: r.collection.clone(),
                collection_url: r.collection_url.clone(),
                links: r.links.clone(),
                licenses: rights
                    .applied
                    .iter()
                    .map(|a| CardLicense {
                        raw_name: a.evidence.raw_name.clone(),
                        canonical_id: a.evidence.canonical_id.clone(),
                        url: a.evidence.url.clone(),
                        profile: a.profile,
                        needs_review: a.needs_review,
                    })
                    .collect(),
                profile: rights.profile,
                conflicts: detect_conflicts(&rights.applied),
                creators: r.creators.clone(),
                text_sources: r.text_sources.clone(),
                languages: r.languages.iter().cloned().collect(),
                task_categories: r.task_categories.clone(),
                formats: r.formats.iter().copied().collect(),
                time_of_collection: r.time_of_collection,
                citation_count: r.citation_count,
                download_count: r.download_count,
            }
        })
        .collect();
    ProvenanceCard {
        summary: CardSummary::compute(&entries),
        entries,
        generated_at: selection.store().built_at().to_rfc3339(),
        criteria_echo: selection.criteria().cloned(),
    }
}

/// Concatenates two cards. Shared ids are an error, not deduplicated; the
/// result carries no criteria.
pub fn merge_cards(a: &ProvenanceCard, b: &ProvenanceCard) -> Result<ProvenanceCard, CardError> {
    let a_ids: BTreeSet<&str> = a.entries.iter().map(|e| e.id.as_str()).collect();
    let clash: Vec<String> = b
        .entries
        .iter()
        .filter(|e| a_ids.contains(e.id.as_str()))
        .map(|e| e.id.clone())
        .collect();
    if !clash.is_empty() {
        return Err(CardError::IdCollision(clash));
    }
    let mut entries: Vec<CardEntry> = a.entries.iter().chain(&b.entries).cloned().collect();
    entries.sort_by(|x, y| x.id.cmp(&y.id));
    Ok(ProvenanceCard {
        summary: CardSummary::compute(&entries),
        entries,
        generated_at: a.generated_at.clone().max(b.generated_at.clone()),
        criteria_echo: None,
    })
}

fn yes_no(b: bool, yes: &str, no: &str) -> String {
    if b { yes.to_string() } else { no.to_string() }
}

fn table(out: &mut String, title: &str, key: &str, rows: impl IntoIterator<Item = (String, usize)>) {
    let rows: Vec<(String, usize)> = rows.into_iter().collect();
    if rows.is_empty() {
        return;
    }
    let _ = writeln!(out, "### {title}\n\n| {key} | Datasets |\n|---|---:|");
    for (k, n) in rows {
        let _ = writeln!(out, "| {} | {n} |", k.replace('|', "\\|"));
    }
    out.push('\n');
}

fn list_line(out: &mut String, label: &str, items: &[String]) {
    if !items.is_empty() {
        let _ = writeln!(out, "- {label}: {}", items.join(", "));
    }
}

/// Deterministic markdown rendering of a card.
pub fn render_markdown(card: &ProvenanceCard) -> String {
    let mut out = String::new();
    out.push_str("# Data Provenance Card\n\n");
    let n = card.entries.len();
    let _ = writeln!(out, "{n} {}\n", if n == 1 { "dataset" } else { "datasets" });
    if let Some(c) = &card.criteria_echo {
        let pairs = c.to_pairs();
        if !pairs.is_empty() {
            out.push_str("## Selection criteria\n\n");
            for (k, v) in pairs {
                let _ = writeln!(out, "- `{k}` = `{v}`");
            }
            out.push('\n');
        }
    }
    if n == 0 {
        return out;
    }
    out.push_str("## Summary\n\n");
    let s = &card.summary;
    table(
        &mut out,
        "Permitted use",
        "Category",
        UseCategory::ALL
            .iter()
            .filter_map(|c| s.use_categories.get(c).map(|n| (c.label().to_string(), *n))),
    );
    table(&mut out, "Languages", "Language", s.languages.iter().map(|(k, v)| (k.clone(), *v)));
    table(&mut out, "Task categories", "Task", s.task_categories.iter().map(|(k, v)| (k.clone(), *v)));
    table(&mut out, "Creators", "Creator", s.creators.iter().map(|(k, v)| (k.clone(), *v)));

    out.push_str("## Datasets\n");
    for e in &card.entries {
        let _ = writeln!(out, "\n### {} (`{}`)\n", e.name, e.id);
        match &e.collection_url {
            Some(u) => { let _ = writeln!(out, "- Collection: [{}]({u})", e.collection); }
            None => { let _ = writeln!(out, "- Collection: {}", e.collection); }
        }
        if e.licenses.is_empty() {
            out.push_str("- Licenses: none found (Unspecified)\n");
        } else {
            out.push_str("- Licenses:\n");
            for l in &e.licenses {
                let id = l.canonical_id.as_deref().map(|i| format!(" `{i}`")).unwrap_or_default();
                let url = l.url.as_deref().map(|u| format!(" <{u}>")).unwrap_or_default();
                let review = if l.needs_review { " (needs review)" } else { "" };
                let _ = writeln!(out, "  - {}{id}{url}{review}", l.raw_name);
            }
        }
        let p = e.profile;
        let _ = writeln!(
            out,
            "- Rights: {}; {}; {}",
            p.use_category,
            yes_no(p.attribution_required, "attribution required", "no attribution required"),
            yes_no(p.share_alike_required, "share-alike", "no share-alike"),
        );
        for c in &e.conflicts {
            let _ = writeln!(out, "- Conflict: {c}");
        }
        list_line(&mut out, "Creators", &e.creators);
        list_line(&mut out, "Text sources", &e.text_sources);
        list_line(&mut out, "Languages", &e.languages);
        list_line(&mut out, "Tasks", &e.task_categories);
        let formats: Vec<String> = e.formats.iter().map(|f| f.as_str().to_string()).collect();
        list_line(&mut out, "Formats", &formats);
        if let Some(t) = e.time_of_collection {
            let _ = writeln!(out, "- Collected: {t}");
        }
        if let Some(c) = e.citation_count {
            let _ = writeln!(out, "- Citations: {c}");
        }
        if let Some(d) = e.download_count {
            let _ = writeln!(out, "- Downloads: {d}");
        }
        let links: Vec<String> = e.links.iter().map(|(k, u)| format!("[{k}]({u})")).collect();
        list_line(&mut out, "Links", &links);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{apply_filter, Selection};
    use crate::ingest::Store;
    use crate::license::{LicenseRegistry, Policy};
    use crate::schema::{DatasetRecord, EvidenceSource, LicenseEvidence};
    use std::sync::Arc;

    fn store(ids: &[&str]) -> Arc<Store> {
        let records = ids
            .iter()
            .map(|id| {
                let mut r = DatasetRecord::new(*id, *id, "c");
                r.licenses.push(LicenseEvidence {
                    raw_name: "CC BY-NC 4.0".into(),
                    canonical_id: None,
                    url: None,
                    evidence_source: EvidenceSource::Paper,
                    author_stated: true,
                });
                r.languages.insert("en".into());
                r
            })
            .collect();
        Arc::new(
            Store::from_records(records, Arc::new(LicenseRegistry::builtin()), Policy::default())
                .unwrap(),
        )
    }

    #[test]
    fn empty_selection_gives_empty_card() {
        let s = store(&[]);
        let card = generate_card(&Selection::all(&s));
        assert!(card.is_empty());
        assert_eq!(card.summary, CardSummary::default());
        assert_eq!(render_markdown(&card), "# Data Provenance Card\n\n0 datasets\n\n");
    }

    #[test]
    fn single_entry_carries_license_url() {
        let s = store(&["c/alpaca"]);
        let card = generate_card(&Selection::all(&s));
        assert_eq!(card.entries[0].licenses[0].canonical_id.as_deref(), Some("cc-by-nc-4.0"));
        let md = render_markdown(&card);
        assert_eq!(md.matches("\n### c/alpaca (`c/alpaca`)").count(), 1);
        assert!(md.contains("<https://creativecommons.org/licenses/by-nc/4.0/>"));
    }

    #[test]
    fn merge_rules() {
        let a = generate_card(&Selection::all(&store(&["c/a", "c/b", "c/c"])));
        let b = generate_card(&Selection::all(&store(&["c/d", "c/e", "c/f", "c/g"])));
        let m = merge_cards(&a, &b).unwrap();
        assert_eq!(m.len(), 7);
        assert!(m.summary_is_consistent());
        assert!(m.criteria_echo.is_none());
        let id = merge_cards(&a, &ProvenanceCard::empty()).unwrap();
        assert_eq!(id.entries, a.entries);
        assert_eq!(id.summary, a.summary);
        assert_eq!(
            merge_cards(&a, &a),
            Err(CardError::IdCollision(vec!["c/a".into(), "c/b".into(), "c/c".into()]))
        );
    }

    #[test]
    fn criteria_echo_rendered() {
        let s = store(&["c/a"]);
        let c = FilterCriteria { forbid_share_alike: true, ..Default::default() };
        let card = generate_card(&apply_filter(&s, &c));
        assert_eq!(card.criteria_echo.as_ref(), Some(&c));
        assert!(render_markdown(&card).contains("- `forbid_share_alike` = `true`"));
    }

    #[test]
    fn json_round_trip() {
        let card = generate_card(&Selection::all(&store(&["c/a", "c/b"])));
        assert_eq!(ProvenanceCard::from_json(&card.to_json()).unwrap(), card);
        let mut broken = card.clone();
        broken.summary.datasets = 5;
        assert!(ProvenanceCard::from_json(&broken.to_json()).is_err());
    }
}
