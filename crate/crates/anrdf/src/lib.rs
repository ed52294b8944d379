//! Annotated RDF.
//!
//! Triples carry values from an annotation domain (boolean, fuzzy, temporal,
//! provenance or a compound of two). The crate provides the domains, ρdf
//! closure over annotated graphs, the AnQL query language and a text syntax
//! for documents and queries.

pub mod anql;
pub mod compound;
pub mod domain;
pub mod graph;
pub mod syntax;

pub use anql::{evaluate, evaluate_dataset, Answers, DefaultRewrite, Query};
pub use domain::{Annotation, Domain, DomainError, Semiring};
pub use graph::{AnnotatedGraph, Dataset, DefaultMode, GraphError, Term, Triple};
pub use syntax::{parse_document, parse_query, SyntaxError};
