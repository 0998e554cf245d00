//! JSON bodies of the action API and upload responses.

use serde::{Deserialize, Serialize};
use webcas_core::cas::DocumentRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub subject: String,
    pub handle: String,
    pub file_name: String,
    pub file_extension: String,
    pub file_type: String,
    pub file_size: u64,
}

impl From<&DocumentRecord> for DocumentSummary {
    fn from(r: &DocumentRecord) -> Self {
        DocumentSummary {
            subject: r.subject.as_str().to_owned(),
            handle: r.handle.clone(),
            file_name: r.file_name.clone(),
            file_extension: r.file_extension.clone(),
            file_type: r.file_type.clone(),
            file_size: r.file_size,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WhoAmI {
    pub authenticated: bool,
    pub webid: Option<String>,
    pub actor: Option<String>,
    /// Local name of the actor class, e.g. `Student`.
    pub class: Option<String>,
    pub vocabulary: Option<String>,
    pub verification: String,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct OwnData {
    pub actor: String,
    pub graph: String,
    pub triple_count: usize,
    pub ntriples: String,
    pub permissions: Vec<String>,
    pub export_exclude: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetPermission {
    pub webid: String,
    pub grant: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSelection {
    pub exclude: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordDecision {
    pub applicant: String,
    pub decision: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GetDocument {
    pub handle: String,
}

#[derive(Debug, Serialize)]
pub struct DocumentContent {
    pub document: DocumentSummary,
    pub content_base64: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreUpdate {
    /// Graph to change; defaults to the requester's own graph.
    #[serde(default)]
    pub graph: Option<String>,
    /// Turtle (or N-Triples) with triples to remove. Applied first.
    #[serde(default)]
    pub delete: String,
    /// Turtle (or N-Triples) with triples to add.
    #[serde(default)]
    pub insert: String,
}

#[derive(Debug, Serialize)]
pub struct StoreUpdated {
    pub deleted: usize,
    pub inserted: usize,
}
