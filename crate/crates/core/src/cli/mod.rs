//! Configuration-driven runs.
//!
//! A run reads a JSON [`RunConfig`], executes one task pipeline and writes a
//! JSON [`Report`] plus CSV artifacts. The `hashed` part of the report holds
//! everything except wall times and is byte-identical across runs of the
//! same config.
//!
//! Exit codes: 0 success, 2 invalid input, 3 failure while computing, 4 when
//! some criterion came out `Inconclusive`.

mod catalog;
mod config;
mod run;

pub use catalog::{catalog, list_catalog, CatalogEntry};
pub use config::{ContinuityMap, ModulusCheck, Numeric, OutputPaths, RunConfig, TaskSpec};
pub use run::{
    error_kind, execute, exit_code, run, sha256_hex, write_outputs, Artifact, ErrorInfo, HashedSection,
    Provenance, Report, RunStatus, Timings, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION,
};

#[cfg(test)]
mod tests;
