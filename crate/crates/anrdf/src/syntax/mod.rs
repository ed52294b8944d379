//! Text formats: annotation literals, `.anrdf` documents and AnQL queries.

pub mod cursor;
pub mod document;
pub mod literal;
pub mod query;

use thiserror::Error;

pub use document::{declared_domain, parse_document, serialize_dataset, serialize_graph, Document, PrefixMap};
pub use query::parse_query;

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}
