//! Dataset provenance audit engine.
//!
//! Records describing finetuning datasets are loaded into an immutable
//! [`ingest::Store`], their license lineages resolved into
//! [`license::RightsProfile`]s, filtered by a practitioner's risk tolerance,
//! summarised into mergeable provenance cards, and analysed.

pub mod license;
pub mod schema;
pub mod ingest;
pub mod filter;
pub mod card;
pub mod analytics;
pub mod synth;
