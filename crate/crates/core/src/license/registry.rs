use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LicenseError, RightsProfile, UseCategory};

const BUILTIN_REGISTRY: &str = include_str!("../../data/licenses.jsonl");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseRegistryEntry {
    pub canonical_id: String,
    pub display_name: String,
    #[serde(default)]
    pub aliases: BTreeSet<String>,
    pub profile: RightsProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_url: Option<String>,
    #[serde(default)]
    pub is_custom: bool,
    /// Provider terms of use (e.g. OpenAI's); permitted use follows [`super::Policy`].
    #[serde(default)]
    pub is_model_terms: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_review: bool,
}

/// Result of looking a raw license name up in the registry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LicenseMatch {
    Registered(String),
    /// A registry entry flagged `is_custom`.
    Custom(String),
    /// No entry matched; carries the raw name for registry extension.
    Unknown(String),
}

impl LicenseMatch {
    pub fn canonical_id(&self) -> Option<&str> {
        match self {
            LicenseMatch::Registered(id) | LicenseMatch::Custom(id) => Some(id),
            LicenseMatch::Unknown(_) => None,
        }
    }
}

/// Matching key: lowercase alphanumeric tokens with `license`/`licence`/`version`
/// dropped, `v2` read as `2`, and `.0` after a number dropped, so
/// `"cc_by_sa_4.0 License"` and `"CC BY-SA 4.0"` both become `ccbysa4`.
pub fn normalize_key(raw: &str) -> String {
    let lower = raw.to_lowercase();
    let mut out = String::new();
    let mut prev_numeric = false;
    for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        if matches!(token, "license" | "licence" | "version") {
            continue;
        }
        if prev_numeric && token.bytes().all(|b| b == b'0') {
            continue;
        }
        let token = match token.strip_prefix('v') {
            Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => rest,
            _ => token,
        };
        out.push_str(token);
        prev_numeric = token.bytes().last().is_some_and(|b| b.is_ascii_digit());
    }
    out
}

#[derive(Debug, Clone)]
pub struct LicenseRegistry {
    entries: Vec<LicenseRegistryEntry>,
    by_id: HashMap<String, usize>,
    by_key: HashMap<String, usize>,
}

impl LicenseRegistry {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_REGISTRY).expect("built-in registry is valid")
    }

    pub fn load(path: &Path) -> Result<Self, LicenseError> {
        let text = std::fs::read_to_string(path).map_err(|e| LicenseError::Registry {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Parses a JSON Lines registry file.
    pub fn parse(text: &str) -> Result<Self, LicenseError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: LicenseRegistryEntry =
                serde_json::from_str(line).map_err(|e| LicenseError::Registry {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            entries.push(entry);
        }
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<LicenseRegistryEntry>) -> Result<Self, LicenseError> {
        let mut by_id = HashMap::new();
        let mut by_key: HashMap<String, usize> = HashMap::new();
        for (idx, e) in entries.iter().enumerate() {
            if e.profile.use_category == UseCategory::Unspecified || !e.profile.is_valid() {
                return Err(LicenseError::Registry {
                    line: idx + 1,
                    message: format!("`{}` cannot carry the unspecified category", e.canonical_id),
                });
            }
            if by_id.insert(e.canonical_id.clone(), idx).is_some() {
                return Err(LicenseError::DuplicateId(e.canonical_id.clone()));
            }
            let names = std::iter::once(&e.canonical_id)
                .chain(std::iter::once(&e.display_name))
                .chain(e.aliases.iter());
            for name in names {
                let key = normalize_key(name);
                if key.is_empty() {
                    continue;
                }
                match by_key.get(&key) {
                    Some(&other) if other != idx => {
                        return Err(LicenseError::AliasCollision {
                            alias: name.clone(),
                            first: entries[other].canonical_id.clone(),
                            second: e.canonical_id.clone(),
                        })
                    }
                    _ => {
                        by_key.insert(key, idx);
                    }
                }
            }
        }
        Ok(LicenseRegistry { entries, by_id, by_key })
    }

    pub fn entries(&self) -> &[LicenseRegistryEntry] {
        &self.entries
    }

    pub fn get(&self, canonical_id: &str) -> Option<&LicenseRegistryEntry> {
        self.by_id.get(canonical_id).map(|&i| &self.entries[i])
    }

    pub fn normalize(&self, raw_name: &str) -> LicenseMatch {
        match self.by_key.get(&normalize_key(raw_name)) {
            Some(&i) => {
                let e = &self.entries[i];
                if e.is_custom {
                    LicenseMatch::Custom(e.canonical_id.clone())
                } else {
                    LicenseMatch::Registered(e.canonical_id.clone())
                }
            }
            None => LicenseMatch::Unknown(raw_name.to_string()),
        }
    }

    /// Registry profile, with model-terms entries taking the policy's category.
    pub fn profile_of(
        &self,
        canonical_id: &str,
        policy: &super::Policy,
    ) -> Result<RightsProfile, LicenseError> {
        let entry = self
            .get(canonical_id)
            .ok_or_else(|| LicenseError::UnknownId(canonical_id.to_string()))?;
        let mut profile = entry.profile;
        if entry.is_model_terms {
            profile.use_category = policy.openai_terms_as;
        }
        Ok(profile)
    }

    /// One JSON line per entry, in load order.
    pub fn to_jsonl(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("entries serialize") + "\n")
            .collect()
    }
}

impl Default for LicenseRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::license::Policy;
    use UseCategory::*;

    #[test]
    fn normalization_examples() {
        let reg = LicenseRegistry::builtin();
        assert_eq!(reg.normalize("CC BY-SA 4.0"), LicenseMatch::Registered("cc-by-sa-4.0".into()));
        assert_eq!(
            reg.normalize("cc_by_sa_4.0 License"),
            LicenseMatch::Registered("cc-by-sa-4.0".into())
        );
        assert_eq!(
            reg.normalize("Wind Information Proprietary Terms"),
            LicenseMatch::Unknown("Wind Information Proprietary Terms".into())
        );
        assert_eq!(reg.normalize("Apache License 2.0").canonical_id(), Some("apache-2.0"));
        assert_eq!(reg.normalize("MIT License").canonical_id(), Some("mit"));
        assert_eq!(reg.normalize("CDLA Sharing 1.0").canonical_id(), Some("cdla-sharing-1.0"));
        assert_eq!(
            reg.normalize("BigScience OpenRAIL-M").canonical_id(),
            Some("bigscience-openrail-m")
        );
        assert_eq!(reg.normalize("GPL v3").canonical_id(), Some("gpl-3.0"));
        assert_eq!(reg.normalize("Custom"), LicenseMatch::Custom("custom".into()));
    }

    #[test]
    fn every_table5_license_resolves() {
        let reg = LicenseRegistry::builtin();
        for name in [
            "CC BY-NC 4.0",
            "MIT License",
            "Academic Only",
            "Non Commercial",
            "CC BY-SA 3.0",
            "Apache License 2.0",
            "CC BY-NC-SA 4.0",
            "CC BY-SA 4.0",
            "CC BY 4.0",
            "BigScience OpenRAIL-M",
            "CDLA Sharing 1.0",
            "OpenAI Terms of Use",
        ] {
            assert!(
                matches!(reg.normalize(name), LicenseMatch::Registered(_)),
                "{name} did not resolve"
            );
        }
    }

    #[test]
    fn key_is_idempotent_on_display_names() {
        let reg = LicenseRegistry::builtin();
        for e in reg.entries() {
            let first = reg.normalize(&e.display_name);
            let id = first.canonical_id().unwrap();
            let again = reg.normalize(&reg.get(id).unwrap().display_name);
            assert_eq!(first, again);
            assert_eq!(id, e.canonical_id);
        }
    }

    #[test]
    fn profiles() {
        let reg = LicenseRegistry::builtin();
        let policy = Policy::default();
        assert_eq!(
            reg.profile_of("mit", &policy).unwrap(),
            RightsProfile::new(Commercial, true, false)
        );
        assert_eq!(
            reg.profile_of("cc-by-nc-4.0", &policy).unwrap(),
            RightsProfile::new(NonCommercial, true, false)
        );
        assert_eq!(
            reg.profile_of("openai-terms", &policy).unwrap(),
            RightsProfile::new(NonCommercial, false, false)
        );
        let lenient = Policy { openai_terms_as: Commercial, ..Policy::default() };
        assert_eq!(
            reg.profile_of("openai-terms", &lenient).unwrap().use_category,
            Commercial
        );
        assert_eq!(
            reg.profile_of("nope", &policy),
            Err(LicenseError::UnknownId("nope".into()))
        );
    }

    #[test]
    fn request_form_defaults_to_academic_only_with_review() {
        let reg = LicenseRegistry::builtin();
        let e = reg.get("request-form").unwrap();
        assert_eq!(e.profile.use_category, AcademicOnly);
        assert!(e.needs_review);
    }

    #[test]
    fn alias_collision_rejected() {
        let mut entries = LicenseRegistry::builtin().entries().to_vec();
        entries[0].aliases.insert("MIT".into());
        assert!(matches!(
            LicenseRegistry::from_entries(entries),
            Err(LicenseError::AliasCollision { .. })
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut entries = LicenseRegistry::builtin().entries().to_vec();
        let dup = entries[3].clone();
        entries.push(dup);
        assert!(matches!(
            LicenseRegistry::from_entries(entries),
            Err(LicenseError::DuplicateId(_))
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let reg = LicenseRegistry::builtin();
        let again = LicenseRegistry::parse(&reg.to_jsonl()).unwrap();
        assert_eq!(again.entries(), reg.entries());
    }

    #[test]
    fn key_rules() {
        assert_eq!(normalize_key("CC BY-SA 4.0"), "ccbysa4");
        assert_eq!(normalize_key("cc-by-sa-v4.0 licence"), "ccbysa4");
        assert_eq!(normalize_key("Apache License, Version 2.0"), "apache2");
        assert_eq!(normalize_key("cc0-1.0"), "cc01");
        assert_eq!(normalize_key("  "), "");
    }
}
