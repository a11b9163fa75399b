//! Value-driven multi-criteria action ranking.
//!
//! Given a scenario annotated with per-dimension relevance scores, a set of
//! candidate actions, and a personal preference profile, the engine
//! computes contextualized scores and ranks the actions by net outranking
//! flow (or via the MAUT / TOPSIS / AHP backends). The crate also ships
//! the ranking-similarity metric suite, corpus/study file tooling, and a
//! pluggable score-source interface for external assessment models.
//!
//! With the default `parallel` feature, batch evaluation fans out over
//! rayon; disabling it falls back to identical sequential code paths.

pub mod assessor;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod oracle;
pub mod ranking;
pub mod values;

pub use error::{Error, Result, ValidationReport, Violation};
pub use ranking::{rank, Backend, RankingResult};
pub use values::{
    AnnotatedAction, AnnotatedScenario, DimensionSet, PreferenceProfile, ScoringConfig,
    ValueVector, Variant,
};
