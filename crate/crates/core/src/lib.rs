//! Training-free knowledge-graph path retrieval with block-unitary
//! hypervectors.
//!
//! Relations get fixed random hypervectors ([`vsa::Codebook`]), relation
//! paths are encoded by non-commutative binding, candidate paths pulled from
//! the graph are ranked by blockwise cosine similarity plus an
//! inverse-frequency calibration ([`retriever`]), and the Top-K survivors
//! are handed to a language model in one call ([`adjudicator`]).
//! [`bench`] holds Monte Carlo checks of the concentration and capacity
//! bounds that make the scheme work, and [`synth`] generates planted-path
//! benchmarks.

pub mod adjudicator;
pub mod bench;
pub mod kg;
pub mod retriever;
pub mod rng;
pub mod synth;
pub mod vsa;

pub use vsa::{BlockFamily, Codebook, HdcConfig, Hypervector, Operator, Side};
