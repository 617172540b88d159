mod common;

use common::*;
use proptest::prelude::*;

const USES: [&str; 4] = ["commercial", "unspecified", "non-commercial", "academic-only"];
const LANGS: [&str; 5] = ["en", "fr", "de", "zh", "sw"];
const TASKS: [&str; 4] = ["Dialog Generation", "Summarization", "Code Generation", "Question Answering"];

#[derive(Debug, Clone)]
struct Flags {
    allow: Vec<&'static str>,
    share_alike: bool,
    attribution: bool,
    synthetic: bool,
    langs: Vec<&'static str>,
    task: Option<&'static str>,
    years: Option<(i32, i32)>,
}

fn arb_flags() -> impl Strategy<Value = Flags> {
    (
        prop::sample::subsequence(USES.to_vec(), 0..=4),
        any::<(bool, bool, bool)>(),
        prop::sample::subsequence(LANGS.to_vec(), 0..=2),
        prop::option::of(prop::sample::select(TASKS.to_vec())),
        prop::option::of((2015i32..2024, 0i32..4)),
    )
        .prop_map(|(allow, (share_alike, attribution, synthetic), langs, task, years)| Flags {
            allow,
            share_alike,
            attribution,
            synthetic,
            langs,
            task,
            years: years.map(|(lo, w)| (lo, lo + w)),
        })
}

impl Flags {
    fn cli_args(&self) -> Vec<String> {
        let mut a = Vec::new();
        if !self.allow.is_empty() {
            a.push(format!("--allow-use={}", self.allow.join(",")));
        }
        for (on, flag) in [
            (self.share_alike, "--forbid-share-alike"),
            (self.attribution, "--forbid-attribution-burden"),
            (self.synthetic, "--exclude-model-generated"),
        ] {
            if on {
                a.push(flag.into());
            }
        }
        if !self.langs.is_empty() {
            a.push(format!("--require-language={}", self.langs.join(",")));
        }
        if let Some(t) = self.task {
            a.push(format!("--require-task={t}"));
        }
        if let Some((lo, hi)) = self.years {
            a.push(format!("--year-range={lo}:{hi}"));
        }
        a
    }

    fn query(&self) -> String {
        let mut q = url::form_urlencoded::Serializer::new(String::new());
        if !self.allow.is_empty() {
            q.append_pair("allow_use", &self.allow.join(","));
        }
        for (on, key) in [
            (self.share_alike, "forbid_share_alike"),
            (self.attribution, "forbid_attribution_burden"),
            (self.synthetic, "exclude_model_generated"),
        ] {
            if on {
                q.append_pair(key, "true");
            }
        }
        if !self.langs.is_empty() {
            q.append_pair("require_languages", &self.langs.join(","));
        }
        if let Some(t) = self.task {
            q.append_pair("require_tasks", t);
        }
        if let Some((lo, hi)) = self.years {
            q.append_pair("year_range", &format!("{lo}:{hi}"));
        }
        q.finish()
    }
}

fn run_cli(store: &str, sub: &[&str], flags: &Flags) -> Output {
    let extra = flags.cli_args();
    let mut args = vec!["--store", store];
    args.extend_from_slice(sub);
    args.extend(extra.iter().map(String::as_str));
    cli(&args)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cli_and_api_select_the_same_datasets(flags in arb_flags()) {
        let rt = tokio::runtime::Builder::new_current_thread().build().unwrap();
        let state = state_for("sample");
        let app = app(&state, [127, 0, 0, 1]);
        let store = fixtures("sample");
        let store = store.to_str().unwrap();
        let q = flags.query();

        let listed = run_cli(store, &["filter", "--format", "structured"], &flags);
        prop_assert_eq!(listed.code, 0, "{}", listed.stderr);
        let cli_v: serde_json::Value = serde_json::from_str(&listed.stdout).unwrap();
        let api_v = rt.block_on(get(&app, &format!("/v1/datasets?page_size=1000&{q}"))).json();
        prop_assert_eq!(&cli_v["total"], &api_v["total"]);
        prop_assert_eq!(&cli_v["items"], &api_v["items"]);
        prop_assert_eq!(&cli_v["version"], &api_v["version"]);

        let count = run_cli(store, &["filter", "--count"], &flags);
        prop_assert_eq!(count.stdout.trim(), api_v["total"].to_string());

        let card = run_cli(store, &["card"], &flags);
        let api_card = rt.block_on(get(&app, &format!("/v1/card?{q}")));
        prop_assert_eq!(card.stdout, api_card.text());

        for kind in ["categories", "licenses", "breakdown"] {
            let s = run_cli(store, &["stats", kind, "--format", "structured"], &flags);
            let cli_s: serde_json::Value = serde_json::from_str(&s.stdout).unwrap();
            let api_s = rt.block_on(get(&app, &format!("/v1/analytics/{kind}?{q}"))).json();
            prop_assert_eq!(cli_s, api_s);
        }
    }
}
