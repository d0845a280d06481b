//! Game telemetry: the data model, its ingestion formats, parameter
//! normalization, and a seeded synthetic generator.

mod jsonl;
mod model;
mod params;
mod synth;
mod xapi;

pub use jsonl::{parse_dataset, serialize_dataset};
pub use model::{Dataset, DistrictState, Playthrough, TurnPoint, TurnRecord};
pub use params::{
    build_registry, parameter_value, DistrictField, Domain, DomainOverrides, GlobalParam,
    Normalization, ParameterRef, ParameterRegistry, ParseParameterError,
};
pub use synth::{generate_synthetic, parse_mix, SimConfig, Strategy, ACTIONS};
pub use xapi::{ingest_xapi, XapiIngest, ACTION_VERBS, GENERIC_ACTION_VERB, TURN_VERB};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("line {line}: malformed record: {message}")]
    Json { line: usize, message: String },
    #[error("line {line}: {path}: {message}")]
    Field { line: usize, path: String, message: String },
    #[error("line {line}: level {found} differs from the dataset's level {expected}")]
    MixedLevels { line: usize, expected: u32, found: u32 },
    #[error("line {line}: inconsistent districts: {message}")]
    Districts { line: usize, message: String },
    #[error("no playthroughs")]
    Empty,
    #[error("xAPI ingestion: {0}")]
    Xapi(String),
    #[error("domain override: {0}")]
    Override(String),
    #[error("simulation config: {0}")]
    Config(String),
}

impl DataError {
    /// 1-based source line, when the error is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            DataError::Json { line, .. }
            | DataError::Field { line, .. }
            | DataError::MixedLevels { line, .. }
            | DataError::Districts { line, .. } => Some(*line),
            _ => None,
        }
    }
}
