//! Regenerates the bundled fixture corpora.
//!
//! Usage: `gen-fixtures [OUT_DIR] [--seed N]`. Defaults to the workspace
//! `fixtures/` directory and the standard seed.

use std::path::PathBuf;
use std::process::ExitCode;

use dpe_core::synth::{render_fixtures, FIXTURE_SEED};

fn main() -> ExitCode {
    let mut out = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"));
    let mut seed = FIXTURE_SEED;
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--seed" => match args.next().and_then(|s| s.parse().ok()) {
                Some(s) => seed = s,
                None => {
                    eprintln!("--seed needs an integer");
                    return ExitCode::from(2);
                }
            },
            "-h" | "--help" => {
                println!("usage: gen-fixtures [OUT_DIR] [--seed N]");
                return ExitCode::SUCCESS;
            }
            _ => out = PathBuf::from(arg),
        }
    }
    for (rel, content) in render_fixtures(seed) {
        let path = out.join(&rel);
        let written = path
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|()| std::fs::write(&path, content));
        if let Err(e) = written {
            eprintln!("{}: {e}", path.display());
            return ExitCode::FAILURE;
        }
        println!("wrote {rel}");
    }
    ExitCode::SUCCESS
}
