//! Library side of the `texbank` command: manifests, run configuration,
//! feature CSVs, leave-one-out reports and synthetic corpora.

pub mod bank;
pub mod config;
pub mod error;
pub mod extract;
pub mod manifest;
pub mod report;
pub mod synth;

pub use bank::cmd_bank_dump;
pub use config::{Extractor, RunConfig};
pub use error::{CliError, Result};
pub use extract::{cmd_extract, FeatureTable};
pub use manifest::Manifest;
pub use report::cmd_classify;
pub use synth::{cmd_synth, SynthRequest};
