mod common;

use common::*;

#[test]
fn validate_reports_a_clean_store() {
    let out = cli(&["validate", fixtures("table2").to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "1858 records, 0 problems\n");
}

#[test]
fn validate_fails_on_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let line = std::fs::read_to_string(fixtures("sample/records.jsonl")).unwrap();
    let first = line.lines().next().unwrap();
    std::fs::write(dir.path().join("dup.jsonl"), format!("{first}\n{first}\n")).unwrap();
    let out = cli(&["validate", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("duplicate-id"), "{}", out.stdout);
    assert!(out.stdout.ends_with("2 records, 1 problems\n"), "{}", out.stdout);
}

#[test]
fn commercial_count_on_the_agreement_corpus() {
    let store = fixtures("table2");
    let out = cli(&["--store", store.to_str().unwrap(), "filter", "--allow-use", "commercial", "--count"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.trim(), "856");
}

#[test]
fn positional_paths_work_like_store() {
    let store = fixtures("table2");
    let a = cli(&["filter", store.to_str().unwrap(), "--allow-use", "non-commercial", "--count"]);
    let b = cli(&["--store", store.to_str().unwrap(), "filter", "--allow-use", "non-commercial", "--count"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.trim(), "352");
}

#[test]
fn bad_criteria_exit_two_and_name_the_flag() {
    let store = fixtures("sample");
    let out = cli(&["--store", store.to_str().unwrap(), "filter", "--allow-use", "bogus"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("allow_use"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_analysis_is_a_usage_error() {
    let store = fixtures("sample");
    let out = cli(&["--store", store.to_str().unwrap(), "stats", "vibes"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("unknown analysis"), "{}", out.stderr);
}

#[test]
fn missing_store_path_is_exit_one() {
    let out = cli(&["--store", "/nonexistent/records", "filter", "--count"]);
    assert_eq!(out.code, 1);
}

#[test]
fn card_matches_the_golden_file() {
    let store = fixtures("sample");
    let out = cli(&[
        "--store",
        store.to_str().unwrap(),
        "card",
        "--allow-use",
        "commercial",
        "--forbid-share-alike",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let golden = std::fs::read_to_string(fixtures("cards/golden.md")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn card_written_to_file_and_structured() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("card.json");
    let store = fixtures("sample");
    let out = cli(&[
        "--store",
        store.to_str().unwrap(),
        "card",
        "--format",
        "structured",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let card = dpe_core::card::ProvenanceCard::from_json(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(card.len(), 12);
}

#[test]
fn ingest_restores_labels_from_the_dump() {
    let dir = tempfile::tempdir().unwrap();
    let stripped = dir.path().join("stripped.jsonl");
    let mut text = String::new();
    for p in dpe_core::ingest::expand_paths(&[fixtures("table2")]).unwrap() {
        for mut r in dpe_core::ingest::read_records(&p).unwrap() {
            dpe_core::synth::strip_aggregator_data(&mut r);
            text.push_str(&dpe_core::schema::serialize_record(&r));
            text.push('\n');
        }
    }
    std::fs::write(&stripped, text).unwrap();

    let enriched = dir.path().join("enriched.jsonl");
    let out = cli(&[
        "ingest",
        stripped.to_str().unwrap(),
        "--aggregator-dump",
        fixtures("aggregator_dump").to_str().unwrap(),
        "--out",
        enriched.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.starts_with("1858 enriched, 0 untouched, 0 failures"), "{}", out.stderr);

    let agreement = cli(&["--store", enriched.to_str().unwrap(), "stats", "agreement", "--aggregator", "hf", "--format", "csv"]);
    assert_eq!(agreement.code, 0, "{}", agreement.stderr);
    assert!(agreement.stdout.contains("huggingface,1858,"), "{}", agreement.stdout);
}

#[test]
fn stats_render_in_every_format() {
    let store = fixtures("table3");
    for kind in ["licenses", "categories", "agreement", "diversity", "breakdown", "representation"] {
        for format in ["table", "csv", "structured"] {
            let out = cli(&["--store", store.to_str().unwrap(), "stats", kind, "--format", format]);
            assert_eq!(out.code, 0, "{kind}/{format}: {}", out.stderr);
            assert!(!out.stdout.is_empty());
            if format == "structured" {
                let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
                assert_eq!(v["analysis"], kind);
                assert_eq!(v["total"], 867);
            }
        }
    }
}

#[test]
fn restricted_share_by_year() {
    let store = fixtures("fig3");
    let out = cli(&["--store", store.to_str().unwrap(), "stats", "breakdown", "--axis", "year", "--format", "csv"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let last = out.stdout.lines().last().unwrap();
    assert!(last.starts_with("2023,200,") && last.ends_with(",0.6100"), "{last}");
}

#[test]
fn csv_output_parses_back() {
    let store = fixtures("sample");
    let out = cli(&["--store", store.to_str().unwrap(), "filter", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().next(), Some("id"));
    assert_eq!(rdr.records().count(), 12);
}
