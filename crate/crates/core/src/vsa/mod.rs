//! Hypervector algebra: codebooks, binding operators, unbinding, path
//! encoding and blockwise cosine similarity.
//!
//! Six operator families are supported. [`Operator::Ghrr`] is the
//! non-commutative one: each hypervector is a stack of `D` unitary `m x m`
//! complex blocks and binding multiplies blocks pairwise. The other five are
//! flat arrays with commutative binding and exist mainly for comparison.

mod blocks;
mod codebook;
mod config;
mod hrr;
mod hypervector;
mod projection;

pub use codebook::{Codebook, CODEBOOK_MAGIC, CODEBOOK_VERSION};
pub use config::{BlockFamily, HdcConfig, Operator};
pub use hypervector::{Hypervector, Side};
pub use projection::project_embedding;

use thiserror::Error;

/// Guard added to divisors when unbinding the real element-wise family.
pub const DIVISION_EPSILON: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VsaError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("block size {block_size} requested for flat operator {operator:?}; flat families need m = 1")]
    FlatBlockSize { operator: Operator, block_size: usize },
    #[error("codebook needs at least one symbol")]
    EmptySymbols,
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("operator mismatch: {left:?} vs {right:?}")]
    FamilyMismatch { left: Operator, right: Operator },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("zero-norm block {block} in similarity")]
    ZeroNorm { block: usize },
    #[error("embedding is all zeros and cannot be normalized")]
    ZeroEmbedding,
    #[error("operation not supported for {0:?}: {1}")]
    Unsupported(Operator, &'static str),
    #[error("codebook format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = VsaError> = std::result::Result<T, E>;
