//! Command-line front end and HTTP API over an immutable store snapshot.
//!
//! Both surfaces share [`snapshot`] loading and the [`report`] builders, so
//! identical criteria produce identical selections and bodies.

pub mod cli;
pub mod report;
pub mod server;
pub mod snapshot;
