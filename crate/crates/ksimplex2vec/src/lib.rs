//! k-simplex2vec: Euclidean feature vectors for the k-simplices of a
//! simplicial complex.
//!
//! The pipeline mirrors node2vec one dimension up: build a simplicial
//! complex (typically the clique complex of a graph), run random walks on
//! its k-simplices through upper and lower connections, then train a
//! skip-gram model on the walk corpus to obtain a map `F: X_k -> R^d`.
//!
//! The crate is organized as a library with runnable examples (see
//! `examples/`), plus a thin `ks2v` binary exposing the same pipeline as
//! subcommands.

pub mod cli;
pub mod complex;
pub mod embed;
pub mod eval;
pub mod pipeline;
pub mod sbm;
pub mod walks;

mod rng;

pub use complex::{Graph, Simplex, SimplicialComplex, VertexId};
pub use embed::{EmbeddingModel, Hyperparams, TrainMode, TrainingReport};
pub use walks::{TransitionMatrix, WalkCorpus, WalkMode};

use thiserror::Error;

/// Errors surfaced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex {0} in simplex")]
    DuplicateVertex(VertexId),
    #[error("empty vertex list for simplex")]
    EmptySimplex,
    #[error("invalid dimension {0}: {1}")]
    InvalidDimension(usize, &'static str),
    #[error("complex has no simplices of dimension {0}")]
    EmptyDimension(usize),
    #[error("vertex {0} has no block assignment")]
    UnknownVertex(VertexId),
    #[error("every walk in the corpus has length 0")]
    DegenerateCorpus,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("label vectors have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
