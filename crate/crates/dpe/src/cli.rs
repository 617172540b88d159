//! The `dpe` command line. Exit codes: 0 success, 1 a failed check or a
//! load error, 2 bad usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpe_core::card::{generate_card, render_markdown};
use dpe_core::filter::{apply_filter, FilterCriteria};
use dpe_core::ingest::{enrich, expand_paths, read_records, FixtureClient};
use dpe_core::schema::{validate_store, Taxonomies};

use crate::report::{self, ParamError, StatKind, StatOptions};
use crate::snapshot::{LoadOptions, Snapshot};

#[derive(Debug, Parser)]
#[command(name = "dpe", version, about = "Audit license provenance of dataset collections")]
pub struct Cli {
    /// Record file or directory of `.jsonl` files; repeatable.
    #[arg(long = "store", global = true, env = "DPE_STORE", value_delimiter = ',')]
    pub stores: Vec<PathBuf>,

    /// License registry (JSON Lines) replacing the built-in one.
    #[arg(long, global = true, env = "DPE_REGISTRY")]
    pub registry: Option<PathBuf>,

    /// Directory with `task_categories.txt`, `source_domains.txt`, `formats.txt`.
    #[arg(long, global = true)]
    pub taxonomies: Option<PathBuf>,

    /// Language family table (`code,family` CSV).
    #[arg(long, global = true)]
    pub families: Option<PathBuf>,

    /// Country language table (`country,language,fraction` CSV).
    #[arg(long, global = true)]
    pub countries: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check records against the schema and taxonomies.
    Validate {
        /// Files or directories; defaults to --store.
        paths: Vec<PathBuf>,
    },
    /// Fill aggregator labels and counts from platform dumps.
    Ingest {
        paths: Vec<PathBuf>,
        /// Directory with `<platform>.jsonl` dumps.
        #[arg(long)]
        aggregator_dump: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the datasets that pass the criteria.
    Filter {
        paths: Vec<PathBuf>,
        #[command(flatten)]
        criteria: CriteriaArgs,
        /// Print only the number of selected datasets.
        #[arg(long)]
        count: bool,
        /// Also list excluded datasets and the clauses they failed.
        #[arg(long)]
        show_excluded: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Render a provenance card for the selection.
    Card {
        paths: Vec<PathBuf>,
        #[command(flatten)]
        criteria: CriteriaArgs,
        #[arg(long, value_enum, default_value_t = CardFormat::Markdown)]
        format: CardFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate statistics over the selection.
    Stats {
        /// licenses, categories, agreement, diversity, breakdown or representation.
        kind: String,
        paths: Vec<PathBuf>,
        #[command(flatten)]
        criteria: CriteriaArgs,
        /// licenses or datasets.
        #[arg(long)]
        denominator: Option<String>,
        /// Comma list of platforms for `agreement`.
        #[arg(long)]
        aggregator: Option<String>,
        /// year, language-family, task-category or source-domain.
        #[arg(long)]
        axis: Option<String>,
        /// knn or histogram.
        #[arg(long)]
        estimator: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        bins: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Serve the HTTP API.
    Serve {
        paths: Vec<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "DPE_PORT", default_value_t = 8080)]
        port: u16,
        /// Reload the store on SIGHUP.
        #[arg(long)]
        reload_on_sighup: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CardFormat {
    Markdown,
    Structured,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CriteriaArgs {
    /// Allowed use categories (commercial, unspecified, non-commercial, academic-only).
    #[arg(long, value_delimiter = ',')]
    pub allow_use: Vec<String>,
    #[arg(long)]
    pub forbid_attribution_burden: bool,
    #[arg(long)]
    pub forbid_share_alike: bool,
    #[arg(long)]
    pub exclude_model_generated: bool,
    #[arg(long)]
    pub exclude_generated_by: Vec<String>,
    #[arg(long)]
    pub exclude_creator: Vec<String>,
    #[arg(long)]
    pub exclude_source_domain: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub require_language: Vec<String>,
    #[arg(long)]
    pub require_task: Vec<String>,
    /// LO:HI, inclusive.
    #[arg(long)]
    pub year_range: Option<String>,
    /// Category applied to model provider terms.
    #[arg(long)]
    pub openai_terms_as: Option<String>,
    /// Evidence sources treated as authoritative.
    #[arg(long, value_delimiter = ',')]
    pub accept_evidence: Vec<String>,
}

impl CriteriaArgs {
    /// The same `key=value` pairs the HTTP API takes.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: &str| out.push((k.to_string(), v.to_string()));
        for v in &self.allow_use {
            push("allow_use", v);
        }
        for (flag, key) in [
            (self.forbid_attribution_burden, "forbid_attribution_burden"),
            (self.forbid_share_alike, "forbid_share_alike"),
            (self.exclude_model_generated, "exclude_model_generated"),
        ] {
            if flag {
                push(key, "true");
            }
        }
        for (values, key) in [
            (&self.exclude_generated_by, "exclude_generated_by"),
            (&self.exclude_creator, "exclude_creators"),
            (&self.exclude_source_domain, "exclude_source_domains"),
            (&self.require_language, "require_languages"),
            (&self.require_task, "require_tasks"),
        ] {
            for v in values {
                push(key, v);
            }
        }
        if let Some(v) = &self.year_range {
            push("year_range", v);
        }
        if let Some(v) = &self.openai_terms_as {
            push("openai_terms_as", v);
        }
        for v in &self.accept_evidence {
            push("accept_evidence", v);
        }
        out
    }

    pub fn criteria(&self) -> Result<FilterCriteria, ParamError> {
        let pairs = self.to_pairs();
        Ok(FilterCriteria::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?)
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

impl Cli {
    fn load_options(&self, paths: &[PathBuf]) -> LoadOptions {
        let mut all = self.stores.clone();
        all.extend(paths.iter().cloned());
        LoadOptions {
            paths: all,
            registry: self.registry.clone(),
            taxonomies: self.taxonomies.clone(),
            families: self.families.clone(),
            countries: self.countries.clone(),
        }
    }

    fn snapshot(&self, paths: &[PathBuf]) -> Result<Snapshot, Failure> {
        Snapshot::load(&self.load_options(paths)).map_err(domain)
    }
}

fn write_to(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(domain),
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Validate { paths } => {
            let opts = cli.load_options(paths);
            if opts.paths.is_empty() {
                return Err(Failure::Usage("no records given (use --store PATH or pass paths)".into()));
            }
            let taxonomies = match &opts.taxonomies {
                Some(dir) => Taxonomies::load_dir(dir).map_err(|e| Failure::Domain(format!("{}: {e}", dir.display())))?,
                None => Taxonomies::builtin(),
            };
            let mut records = Vec::new();
            for p in expand_paths(&opts.paths).map_err(domain)? {
                records.extend(read_records(&p).map_err(domain)?);
            }
            let report = validate_store(&records, &taxonomies);
            for p in &report.problems {
                writeln!(out, "{p}").map_err(domain)?;
            }
            writeln!(out, "{} records, {} problems", report.records, report.problems.len()).map_err(domain)?;
            Ok(if report.is_empty() { 0 } else { 1 })
        }
        Command::Ingest { paths, aggregator_dump, out: dest } => {
            let snap = cli.snapshot(paths)?;
            let client = FixtureClient::load(aggregator_dump).map_err(domain)?;
            let (enriched, report) = enrich(&snap.store, &client);
            write_to(out, dest.as_ref(), &enriched.to_jsonl())?;
            writeln!(
                err,
                "{} enriched, {} untouched, {} failures",
                report.enriched,
                report.untouched,
                report.failures.len()
            )
            .map_err(domain)?;
            for f in &report.failures {
                writeln!(err, "  {}: {}", f.id, f.message).map_err(domain)?;
            }
            Ok(0)
        }
        Command::Filter { paths, criteria, count, show_excluded, format } => {
            let c = criteria.criteria()?;
            let snap = cli.snapshot(paths)?;
            let sel = apply_filter(&snap.store, &c);
            if *count {
                writeln!(out, "{}", sel.len()).map_err(domain)?;
                return Ok(0);
            }
            let text = match format {
                Format::Structured => {
                    let mut v = report::datasets(&snap, &sel, None);
                    if *show_excluded {
                        v["excluded"] = serde_json::to_value(sel.excluded()).map_err(domain)?;
                    }
                    report::to_pretty(&v)
                }
                Format::Table | Format::Csv => {
                    let mut tables = vec![report::selection_table(&sel)];
                    if *show_excluded {
                        tables.push(report::exclusion_table(&sel));
                    }
                    if *format == Format::Csv {
                        report::render_csv(&tables)
                    } else {
                        report::render_table(&tables)
                    }
                }
            };
            write_to(out, None, &text)?;
            Ok(0)
        }
        Command::Card { paths, criteria, format, out: dest } => {
            let c = criteria.criteria()?;
            let snap = cli.snapshot(paths)?;
            let card = generate_card(&apply_filter(&snap.store, &c));
            let text = match format {
                CardFormat::Markdown => render_markdown(&card),
                CardFormat::Structured => card.to_json(),
            };
            write_to(out, dest.as_ref(), &text)?;
            Ok(0)
        }
        Command::Stats { kind, paths, criteria, denominator, aggregator, axis, estimator, k, bins, format } => {
            let kind: StatKind = kind.parse().map_err(Failure::Usage)?;
            let c = criteria.criteria()?;
            let params = [
                ("denominator", denominator),
                ("aggregator", aggregator),
                ("axis", axis),
                ("estimator", estimator),
                ("k", k),
                ("bins", bins),
            ]
            .into_iter()
            .filter_map(|(key, v)| v.as_ref().map(|v| (key.to_string(), v.clone())))
            .collect();
            let opts = StatOptions::from_params(&params)?;
            let snap = cli.snapshot(paths)?;
            let sel = apply_filter(&snap.store, &c);
            let r = report::stats(kind, &snap, &sel, &opts);
            let text = match format {
                Format::Structured => report::to_pretty(&r.value),
                Format::Csv => report::render_csv(&r.tables),
                Format::Table => report::render_table(&r.tables),
            };
            write_to(out, None, &text)?;
            Ok(0)
        }
        Command::Serve { paths, host, port, reload_on_sighup } => {
            let opts = cli.load_options(paths);
            let snap = Snapshot::load(&opts).map_err(domain)?;
            let addr = format!("{host}:{port}");
            writeln!(err, "serving {} records on http://{addr}", snap.store.len()).map_err(domain)?;
            let state = crate::server::AppState::new(snap, opts);
            crate::server::serve(state, &addr, *reload_on_sighup).map_err(domain)?;
            Ok(0)
        }
    }
}
