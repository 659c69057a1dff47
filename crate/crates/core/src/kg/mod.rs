//! Knowledge-graph storage: triples, relation schemas, the schema graph,
//! question records and schema IDF statistics.

mod graph;
mod idf;
mod questions;
mod schema;

pub use graph::{load_triples, EntityId, Graph, LoadReport, RelationId};
pub use idf::{idf_value, IdfTable};
pub use questions::{load_questions, write_questions, Question};
pub use schema::{Schema, SchemaGraph, SCHEMA_SEPARATOR};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: relation `{name}` contains the reserved separator `->`")]
    ReservedSeparator { line: usize, name: String },
    #[error("question `{question}`: topic entity `{entity}` is not in the graph")]
    UnknownTopic { question: String, entity: String },
    #[error("candidate set given for unknown question `{0}`")]
    UnknownQuestion(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = KgError> = std::result::Result<T, E>;
