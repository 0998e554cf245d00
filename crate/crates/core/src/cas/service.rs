use std::path::{Path, PathBuf};

use super::{
    check_access, get_document, list_documents, record_decision, set_export_exclusions, set_permission,
    store_document, AccessDecision,
    Actor, CasError, DocumentRecord,
};
use crate::rdf::{Dataset, Iri, QuadStore};

/// A dataset, a document directory and the actors that own graphs in them.
///
/// Mutations go through [`Dataset::write`], so they are serialized and each
/// is persisted before it becomes visible.
pub struct ContentAccessService {
    dataset: Dataset,
    storage_root: PathBuf,
    actors: Vec<Actor>,
}

impl ContentAccessService {
    /// Creates missing actor graphs and makes sure each holds its seed
    /// triples.
    pub fn open(dataset: Dataset, storage_root: impl Into<PathBuf>, actors: Vec<Actor>) -> Result<Self, CasError> {
        dataset.write(|store| {
            for actor in &actors {
                store.create_graph(actor.iri.clone());
                for t in actor.seed_triples() {
                    store.insert(&actor.iri, t);
                }
            }
            Ok::<_, CasError>(())
        })?;
        Ok(ContentAccessService {
            dataset,
            storage_root: storage_root.into(),
            actors,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn storage_root(&self) -> &Path {
        &self.storage_root
    }

    pub fn actors(&self) -> &[Actor] {
        &self.actors
    }

    pub fn actor(&self, name: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.name == name)
    }

    /// The actor whose configured WebID is `webid`.
    pub fn actor_for_webid(&self, webid: &Iri) -> Option<&Actor> {
        self.actors.iter().find(|a| &a.webid == webid)
    }

    pub fn snapshot(&self) -> QuadStore {
        self.dataset.snapshot()
    }

    pub fn set_permission(&self, actor: &Actor, webid: &Iri, grant: bool) -> Result<bool, CasError> {
        self.dataset.write(|store| set_permission(store, actor, webid, grant))
    }

    pub fn check_access(&self, owner: &Actor, requester: Option<&Iri>) -> AccessDecision {
        check_access(&self.dataset.read(), owner, requester)
    }

    pub fn store_document(
        &self,
        actor: &Actor,
        file_name: &str,
        media_type: &str,
        bytes: &[u8],
    ) -> Result<DocumentRecord, CasError> {
        self.dataset
            .write(|store| store_document(store, actor, file_name, media_type, bytes, &self.storage_root))
    }

    pub fn get_document(&self, actor: &Actor, handle: &str) -> Result<(DocumentRecord, Vec<u8>), CasError> {
        get_document(&self.dataset.read(), actor, handle, &self.storage_root)
    }

    pub fn list_documents(&self, actor: &Actor) -> Vec<DocumentRecord> {
        list_documents(&self.dataset.read(), actor)
    }

    pub fn set_export_exclusions(&self, actor: &Actor, subjects: &[Iri]) -> Result<(), CasError> {
        self.dataset.write(|store| set_export_exclusions(store, actor, subjects))
    }

    pub fn record_decision(&self, actor: &Actor, applicant: &Iri, value: &str) -> Result<Iri, CasError> {
        self.dataset.write(|store| record_decision(store, actor, applicant, value))
    }
}
