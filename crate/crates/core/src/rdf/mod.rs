//! RDF data model, Turtle and N-Triples syntaxes, and a named-graph store.

mod chars;
mod cursor;
mod iso;
mod ntriples;
mod store;
mod term;
mod turtle;
pub mod vocab;

use std::path::Path;

pub use iso::isomorphic;
pub use ntriples::{parse_nquads, parse_ntriples, parse_term, write_nquads, write_ntriples};
pub use store::{save_atomically, Dataset, QuadStore};
pub use term::{BlankNode, Iri, Literal, Quad, Subject, Term, Triple};
pub use turtle::{parse_turtle, write_turtle};

use crate::ops;

#[derive(Debug, thiserror::Error)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("relative IRI <{iri}> at line {line}, column {column} but no base IRI is set")]
    RelativeIriWithoutBase { iri: String, line: usize, column: usize },
    #[error("RDF collections are not supported (line {line}, column {column})")]
    UnsupportedCollection { line: usize, column: usize },
    #[error("invalid IRI <{iri}>: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("statement without graph name: {0}")]
    MissingGraphName(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RdfError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RdfError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Concrete syntaxes understood by [`parse_document`] and [`serialize_document`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Syntax {
    Turtle,
    NTriples,
}

/// Parses a complete document. `base` resolves relative IRIs in Turtle;
/// N-Triples only admits absolute IRIs.
pub fn parse_document(text: &str, base: Option<&Iri>, syntax: Syntax) -> Result<Vec<Triple>, RdfError> {
    ops::record("parse_document");
    match syntax {
        Syntax::Turtle => parse_turtle(text, base),
        Syntax::NTriples => parse_ntriples(text),
    }
}

/// Serializes triples; the output re-parses to an isomorphic graph.
pub fn serialize_document(triples: &[Triple], syntax: Syntax) -> String {
    ops::record("serialize_document");
    match syntax {
        Syntax::Turtle => write_turtle(triples, vocab::DEFAULT_PREFIXES),
        Syntax::NTriples => write_ntriples(triples),
    }
}
