//! Library side of the `twirl` command: manifests, report rendering and the
//! subcommand implementations.

pub mod commands;
pub mod manifest;
pub mod report;

pub use commands::Format;
pub use manifest::{ExperimentManifest, ManifestError, Overrides};
pub use report::{run_experiment, RunReport};
