//! Response bodies and tables shared by the CLI and the HTTP API.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use dpe_core::analytics::{
    agreement_matrix, breakdown, diversity_report, error_rates, license_distribution,
    representation_scores, use_category_counts, Axis, Denominator, Estimator,
};
use dpe_core::card::generate_card;
use dpe_core::filter::{explain, FilterCriteria, Selection};
use dpe_core::license::{detect_conflicts, UseCategory};
use dpe_core::schema::Aggregator;
use serde::Serialize;
use serde_json::{json, Value};

use crate::snapshot::Snapshot;

pub const DEFAULT_PAGE_SIZE: usize = 100;
pub const MAX_PAGE_SIZE: usize = 1000;

/// A bad request parameter; the CLI exits 2 on it, the API answers 400.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamError {
    pub param: String,
    pub message: String,
}

impl ParamError {
    pub fn new(param: &str, message: impl Into<String>) -> Self {
        ParamError { param: param.to_string(), message: message.into() }
    }
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.param, self.message)
    }
}

impl From<dpe_core::filter::CriteriaError> for ParamError {
    fn from(e: dpe_core::filter::CriteriaError) -> Self {
        ParamError { param: e.param, message: e.message }
    }
}

/// Splits query pairs into criteria and the endpoint's own parameters.
/// Anything else must be a criteria key.
pub fn split_pairs(
    pairs: &[(String, String)],
    own: &[&str],
) -> Result<(FilterCriteria, BTreeMap<String, String>), ParamError> {
    let mut extra = BTreeMap::new();
    let mut criteria = Vec::new();
    for (k, v) in pairs {
        if own.contains(&k.as_str()) {
            if extra.insert(k.clone(), v.clone()).is_some() {
                return Err(ParamError::new(k, "given more than once"));
            }
        } else {
            criteria.push((k.as_str(), v.as_str()));
        }
    }
    Ok((FilterCriteria::from_pairs(criteria)?, extra))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Page {
    /// 1-based.
    pub number: usize,
    pub size: usize,
}

impl Default for Page {
    fn default() -> Self {
        Page { number: 1, size: DEFAULT_PAGE_SIZE }
    }
}

impl Page {
    pub fn from_params(params: &BTreeMap<String, String>) -> Result<Page, ParamError> {
        let mut page = Page::default();
        if let Some(v) = params.get("page") {
            page.number = v.parse().ok().filter(|n| *n >= 1).ok_or_else(|| {
                ParamError::new("page", format!("`{v}` is not a page number (1-based)"))
            })?;
        }
        if let Some(v) = params.get("page_size") {
            page.size = v.parse().ok().filter(|n| (1..=MAX_PAGE_SIZE).contains(n)).ok_or_else(|| {
                ParamError::new("page_size", format!("`{v}` is not between 1 and {MAX_PAGE_SIZE}"))
            })?;
        }
        Ok(page)
    }
}

/// `{version, total, items}` over the selected records; `page = None` lists
/// all of them.
pub fn datasets(snap: &Snapshot, sel: &Selection, page: Option<Page>) -> Value {
    let records = sel.records().map(|(sr, _)| &sr.record);
    let items: Vec<Value> = match page {
        Some(p) => records
            .skip((p.number - 1).saturating_mul(p.size))
            .take(p.size)
            .map(|r| serde_json::to_value(r).expect("records serialize"))
            .collect(),
        None => records.map(|r| serde_json::to_value(r).expect("records serialize")).collect(),
    };
    let mut body = json!({ "version": snap.version, "total": sel.len() });
    if let Some(p) = page {
        body["page"] = json!(p.number);
        body["page_size"] = json!(p.size);
    }
    body["items"] = Value::Array(items);
    body
}

/// One record with its rights under `criteria`'s policy and, when criteria
/// are given, why it is excluded.
pub fn dataset_detail(snap: &Snapshot, id: &str, criteria: Option<&FilterCriteria>) -> Option<Value> {
    let store = &snap.store;
    let sr = store.get(id)?;
    let policy = criteria.map(|c| &c.evidence_policy).unwrap_or(store.policy());
    let rights = store.rights_under(sr, policy);
    let conflicts: Vec<String> = detect_conflicts(&rights.applied).iter().map(|c| c.to_string()).collect();
    let mut body = json!({
        "version": snap.version,
        "record": sr.record,
        "rights": rights,
        "conflicts": conflicts,
    });
    if let Some(c) = criteria {
        let failed: Vec<String> = explain(store, sr, c).iter().map(|f| f.to_string()).collect();
        body["included"] = json!(failed.is_empty());
        body["explain"] = json!(failed);
    }
    Some(body)
}

pub fn summary(snap: &Snapshot, sel: &Selection) -> Value {
    let card = generate_card(sel);
    json!({
        "version": snap.version,
        "total": sel.len(),
        "categories": use_category_counts(sel),
        "licenses": license_distribution(sel, Denominator::Licenses),
        "summary": card.summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Licenses,
    Categories,
    Agreement,
    Diversity,
    Breakdown,
    Representation,
}

impl StatKind {
    pub const ALL: [StatKind; 6] = [
        StatKind::Licenses,
        StatKind::Categories,
        StatKind::Agreement,
        StatKind::Diversity,
        StatKind::Breakdown,
        StatKind::Representation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatKind::Licenses => "licenses",
            StatKind::Categories => "categories",
            StatKind::Agreement => "agreement",
            StatKind::Diversity => "diversity",
            StatKind::Breakdown => "breakdown",
            StatKind::Representation => "representation",
        }
    }

    /// Query parameters the analysis takes besides criteria.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            StatKind::Licenses => &["denominator"],
            StatKind::Agreement => &["aggregator"],
            StatKind::Diversity => &["estimator", "k", "bins"],
            StatKind::Breakdown => &["axis"],
            StatKind::Categories | StatKind::Representation => &[],
        }
    }
}

impl FromStr for StatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = StatKind::ALL.iter().map(|k| k.as_str()).collect();
            format!("unknown analysis `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatOptions {
    pub denominator: Denominator,
    /// Empty means all platforms.
    pub aggregators: Vec<Aggregator>,
    pub axis: Axis,
    pub estimator: Estimator,
}

impl Default for StatOptions {
    fn default() -> Self {
        StatOptions {
            denominator: Denominator::Licenses,
            aggregators: Vec::new(),
            axis: Axis::Year,
            estimator: Estimator::default(),
        }
    }
}

impl StatOptions {
    pub fn from_params(params: &BTreeMap<String, String>) -> Result<StatOptions, ParamError> {
        let mut o = StatOptions::default();
        if let Some(v) = params.get("denominator") {
            o.denominator = v.parse().map_err(|e: String| ParamError::new("denominator", e))?;
        }
        if let Some(v) = params.get("aggregator") {
            o.aggregators = v
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<Aggregator>())
                .collect::<Result<_, _>>()
                .map_err(|e| ParamError::new("aggregator", e.to_string()))?;
        }
        if let Some(v) = params.get("axis") {
            o.axis = v.parse().map_err(|e: dpe_core::analytics::AnalyticsError| {
                ParamError::new("axis", e.to_string())
            })?;
        }
        let number = |key: &str| -> Result<Option<usize>, ParamError> {
            params
                .get(key)
                .map(|v| {
                    v.parse().ok().filter(|n| *n >= 1).ok_or_else(|| {
                        ParamError::new(key, format!("`{v}` is not a positive integer"))
                    })
                })
                .transpose()
        };
        o.estimator = match params.get("estimator").map(String::as_str) {
            None | Some("knn") => Estimator::Knn { k: number("k")?.unwrap_or(3) },
            Some("histogram") => Estimator::Histogram { bins: number("bins")? },
            Some(other) => {
                return Err(ParamError::new(
                    "estimator",
                    format!("unknown estimator `{other}` (expected knn or histogram)"),
                ))
            }
        };
        Ok(o)
    }
}

/// Rows for `table` and `csv` output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, headers: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

pub struct Report {
    pub value: Value,
    pub tables: Vec<Table>,
}

fn share(x: f64) -> String {
    format!("{x:.4}")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_default()
}

pub fn stats(kind: StatKind, snap: &Snapshot, sel: &Selection, opts: &StatOptions) -> Report {
    let result: Value;
    let mut tables = Vec::new();
    match kind {
        StatKind::Licenses => {
            let d = license_distribution(sel, opts.denominator);
            let mut t = Table::new("licenses", &["license", "count", "share"]);
            for b in &d.buckets {
                t.rows.push(vec![b.key.clone(), b.count.to_string(), share(b.share)]);
            }
            tables.push(t);
            result = serde_json::to_value(&d).expect("serializable");
        }
        StatKind::Categories => {
            let c = use_category_counts(sel);
            let mut t = Table::new("categories", &["category", "count", "percent"]);
            for r in &c.rows {
                t.rows.push(vec![r.category.as_str().into(), r.count.to_string(), format!("{:.1}", r.percent)]);
            }
            tables.push(t);
            result = serde_json::to_value(&c).expect("serializable");
        }
        StatKind::Agreement => {
            let aggs = if opts.aggregators.is_empty() { Aggregator::ALL.to_vec() } else { opts.aggregators.clone() };
            let mut cells = Table::new(
                "agreement",
                &["aggregator", "verified", "commercial", "unspecified", "non-commercial", "academic-only"],
            );
            let mut rates = Table::new(
                "error rates",
                &["aggregator", "considered", "omission", "exact-match", "too-permissive"],
            );
            let mut items = Vec::new();
            for agg in aggs {
                let m = agreement_matrix(sel, agg);
                let r = error_rates(&m);
                for c in UseCategory::ALL {
                    let mut row = vec![agg.as_str().to_string(), c.as_str().to_string()];
                    row.extend(m.row(c).iter().map(u64::to_string));
                    cells.rows.push(row);
                }
                rates.rows.push(vec![
                    agg.as_str().into(),
                    r.considered.to_string(),
                    share(r.omission_rate),
                    share(r.exact_match_rate),
                    share(r.too_permissive_rate),
                ]);
                items.push(json!({ "matrix": m, "totals": m.totals(), "rates": r }));
            }
            tables.push(cells);
            tables.push(rates);
            result = Value::Array(items);
        }
        StatKind::Diversity => {
            let d = diversity_report(sel, opts.estimator);
            let mut t = Table::new("diversity", &["group", "feature", "samples", "mean", "sem", "entropy"]);
            for (group, g) in &d.groups {
                for (feature, s) in &g.features {
                    t.rows.push(vec![
                        kebab(group),
                        kebab(feature),
                        s.samples.to_string(),
                        share(s.mean),
                        share(s.sem),
                        opt(s.entropy),
                    ]);
                }
            }
            tables.push(t);
            result = json!({ "estimator": opts.estimator, "report": d });
        }
        StatKind::Breakdown => {
            let b = breakdown(sel, opts.axis, &snap.families);
            let mut t = Table::new(
                "breakdown",
                &["bucket", "total", "commercial", "unspecified", "non-commercial", "academic-only", "restricted-share"],
            );
            for bucket in &b.buckets {
                let mut row = vec![bucket.key.clone(), bucket.total.to_string()];
                row.extend(UseCategory::ALL.iter().map(|c| bucket.counts.get(c).copied().unwrap_or(0).to_string()));
                row.push(share(bucket.restricted_share));
                t.rows.push(row);
            }
            tables.push(t);
            result = serde_json::to_value(&b).expect("serializable");
        }
        StatKind::Representation => {
            let s = representation_scores(sel, &snap.countries);
            let mut t = Table::new("representation", &["country", "score"]);
            for (country, score) in &s {
                t.rows.push(vec![country.clone(), share(*score)]);
            }
            tables.push(t);
            result = serde_json::to_value(&s).expect("serializable");
        }
    }
    let value = json!({
        "version": snap.version,
        "total": sel.len(),
        "analysis": kind.as_str(),
        "result": result,
    });
    Report { value, tables }
}

/// Serde's name for a unit enum value.
fn kebab<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

/// One row per selected record.
pub fn selection_table(sel: &Selection) -> Table {
    let mut t = Table::new(
        "datasets",
        &["id", "use", "attribution", "share-alike", "licenses", "name"],
    );
    for (sr, rights) in sel.records() {
        let ids: Vec<&str> = rights
            .applied
            .iter()
            .map(|a| a.evidence.canonical_id.as_deref().unwrap_or(&a.evidence.raw_name))
            .collect();
        t.rows.push(vec![
            sr.record.id.clone(),
            rights.profile.use_category.as_str().into(),
            rights.profile.attribution_required.to_string(),
            rights.profile.share_alike_required.to_string(),
            ids.join(";"),
            sr.record.name.clone(),
        ]);
    }
    t
}

/// Excluded ids with the clauses they failed.
pub fn exclusion_table(sel: &Selection) -> Table {
    let mut t = Table::new("excluded", &["id", "failed"]);
    for (id, reasons) in sel.excluded() {
        let r: Vec<String> = reasons.iter().map(|r| r.to_string()).collect();
        t.rows.push(vec![id.clone(), r.join("; ")]);
    }
    t
}

/// Space-aligned columns; several tables are separated by a blank line and
/// titled.
pub fn render_table(tables: &[Table]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if tables.len() > 1 {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("{}\n", t.name));
        }
        let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
        for row in &t.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(&t.headers));
        for row in &t.rows {
            out.push_str(&line(row));
        }
    }
    out
}

/// RFC 4180 output; several tables are separated by a blank line.
pub fn render_csv(tables: &[Table]) -> String {
    let mut out = String::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&t.headers).expect("in-memory write");
        for row in &t.rows {
            w.write_record(row).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 input"));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("values serialize") + "\n"
}
