//! ZIP packages carrying a selection of one actor's graph plus the
//! documents it references.
//!
//! Layout:
//!
//! ```text
//! psidimas/psidimas.json   manifest
//! psidimas/data.nt         N-Triples
//! psidimas/files/<handle>  document bytes, no extension
//! ```

mod export;
mod import;
mod package;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use export::{build_export, configured_selection, Selection};
pub use import::{import_package, ImportSummary};
pub use package::parse_package;

use crate::cas::{Actor, CasError, ContentAccessService};
use crate::rdf::{RdfError, Triple};

pub const MANIFEST_VERSION: u64 = 1;
pub const ROOT_DIR: &str = "psidimas/";
pub const MANIFEST_ENTRY: &str = "psidimas/psidimas.json";
pub const DATA_ENTRY: &str = "psidimas/data.nt";
pub const FILES_DIR: &str = "psidimas/files/";

#[derive(Debug, thiserror::Error)]
pub enum ExchangeError {
    #[error("no graph for actor {0}")]
    UnknownActor(String),
    #[error("selected subject {0} does not occur in the graph")]
    UnknownSubject(String),
    #[error("document {handle} cannot be exported: {reason}")]
    DocumentMissing { handle: String, reason: String },
    #[error("malformed package: {0}")]
    Malformed(String),
    #[error("package integrity: {0}")]
    Integrity(String),
    #[error("unsupported manifest version {0}")]
    UnsupportedVersion(u64),
    #[error("document {handle} already exists with different content")]
    Conflict { handle: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error(transparent)]
    Cas(#[from] CasError),
}

impl ExchangeError {
    /// Short machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            ExchangeError::UnknownActor(_) | ExchangeError::UnknownSubject(_) => "not-found",
            ExchangeError::DocumentMissing { .. } => "document-missing",
            ExchangeError::Malformed(_) => "malformed-package",
            ExchangeError::Integrity(_) => "integrity",
            ExchangeError::UnsupportedVersion(_) => "unsupported-version",
            ExchangeError::Conflict { .. } => "conflict",
            ExchangeError::Io { .. } | ExchangeError::Cas(_) => "storage",
            ExchangeError::Rdf(_) => "malformed-package",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub handle: String,
    pub file_name: String,
    pub file_extension: String,
    pub file_type: String,
    pub file_size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub version: u64,
    pub source_actor: String,
    pub source_vocabulary: String,
    pub exported_at: String,
    pub triple_count: usize,
    pub files: Vec<ManifestFile>,
}

#[derive(Debug, Clone)]
pub struct ExportPackage {
    pub manifest: ExportManifest,
    pub data_triples: Vec<Triple>,
    /// handle -> bytes
    pub files: std::collections::BTreeMap<String, Vec<u8>>,
}

impl ContentAccessService {
    /// Exports the actor's graph under its configured selection.
    pub fn export(&self, actor: &Actor) -> Result<Vec<u8>, ExchangeError> {
        let store = self.snapshot();
        let selection = configured_selection(&store, actor);
        build_export(&store, actor, &selection, self.storage_root())
    }

    pub fn import(&self, actor: &Actor, package: &ExportPackage) -> Result<ImportSummary, ExchangeError> {
        self.dataset()
            .write(|store| import_package(store, package, actor, self.storage_root()))
    }
}
