use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use dpe_core::analytics::{CountryLanguageTable, LanguageFamilies};
use dpe_core::ingest::{load_store, Store};
use dpe_core::license::{LicenseRegistry, Policy};
use dpe_core::schema::Taxonomies;

/// Where a snapshot comes from. Unset tables fall back to the built-in ones.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub paths: Vec<PathBuf>,
    pub registry: Option<PathBuf>,
    pub taxonomies: Option<PathBuf>,
    pub families: Option<PathBuf>,
    pub countries: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotError(pub String);

impl fmt::Display for SnapshotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SnapshotError {}

fn err(e: impl fmt::Display) -> SnapshotError {
    SnapshotError(e.to_string())
}

/// A loaded store plus the lookup tables analytics need. Immutable; the
/// version tag is the store's content hash.
#[derive(Debug)]
pub struct Snapshot {
    pub store: Arc<Store>,
    pub version: String,
    pub taxonomies: Taxonomies,
    pub families: LanguageFamilies,
    pub countries: CountryLanguageTable,
}

impl Snapshot {
    pub fn load(opts: &LoadOptions) -> Result<Snapshot, SnapshotError> {
        if opts.paths.is_empty() {
            return Err(SnapshotError("no store given (use --store PATH or DPE_STORE)".into()));
        }
        let registry = match &opts.registry {
            Some(p) => LicenseRegistry::load(p).map_err(err)?,
            None => LicenseRegistry::builtin(),
        };
        let store = load_store(&opts.paths, Arc::new(registry), Policy::default()).map_err(err)?;
        let mut snap = Snapshot::from_store(store);
        if let Some(dir) = &opts.taxonomies {
            snap.taxonomies = Taxonomies::load_dir(dir)
                .map_err(|e| SnapshotError(format!("{}: {e}", dir.display())))?;
        }
        if let Some(p) = &opts.families {
            snap.families = LanguageFamilies::load(p).map_err(err)?;
        }
        if let Some(p) = &opts.countries {
            snap.countries = CountryLanguageTable::load(p).map_err(err)?;
        }
        Ok(snap)
    }

    pub fn from_store(store: Store) -> Snapshot {
        let version = store.content_fingerprint();
        Snapshot {
            store: Arc::new(store),
            version,
            taxonomies: Taxonomies::builtin(),
            families: LanguageFamilies::builtin(),
            countries: CountryLanguageTable::builtin(),
        }
    }
}
