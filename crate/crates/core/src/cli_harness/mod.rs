//! Configuration, experiment runners, result tables and the acceptance
//! checks behind the `nonstatcov` binary.

pub mod checks;
mod config;
mod references;
mod report;
mod run;

pub use config::{ExperimentConfig, ExperimentKind, Grid};
pub use references::{reference_config, reference_model, REFERENCE_CONFIGS};
pub use report::{gap_rows, Metadata, Report, Row, Verdict, COLUMNS};
pub use run::run_experiment;
