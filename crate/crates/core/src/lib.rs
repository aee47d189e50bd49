//! Sample-specific protein classification by sparse reconstruction.
//!
//! The pipeline: FASTA ingestion ([`seqio`]), fixed-length composition
//! features ([`encoding`]), dimensionality reduction ([`pca`]), l1 sparse
//! recovery against an over-complete dictionary of training samples
//! ([`sparse`]), and minimum class-residual decisions ([`classifier`]).
//! [`metrics`] and [`experiments`] cover evaluation; [`artifact`] defines
//! the on-disk model container; [`cli`] wires everything into a command
//! line tool.

pub mod artifact;
pub mod classifier;
pub mod cli;
pub mod encoding;
pub mod experiments;
pub mod metrics;
pub mod pca;
pub mod seqio;
pub mod sparse;

#[cfg(test)]
pub(crate) mod testutil;

pub use classifier::{Classification, Dictionary, SolverParams, SrcModel};
pub use encoding::EncodingKind;
pub use metrics::{ConfusionMatrix, MetricsReport};
pub use pca::PcaModel;
pub use seqio::{ClassLabel, LabeledRecord, ProteinRecord};
