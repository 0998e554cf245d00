use std::collections::HashMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{ExchangeError, ExportPackage};
use crate::cas::{find_record, layout_path, write_file_atomically, Actor};
use crate::ops;
use crate::rdf::{BlankNode, Iri, Literal, QuadStore, Subject, Term, Triple};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ImportSummary {
    pub triples_added: usize,
    pub files_added: usize,
    /// Statements dropped because they would have changed the importer's
    /// own subject or permissions.
    pub triples_skipped: usize,
}

/// Copies the package into `target`'s graph and document directory.
///
/// Subjects and predicates are kept; `fileServerPath` values are replaced
/// by the local path. Blank nodes get labels derived from the source actor
/// so a re-import lands on the same nodes. A file whose handle already
/// exists locally with different bytes aborts the import before anything
/// is written.
pub fn import_package(
    store: &mut QuadStore,
    package: &ExportPackage,
    target: &Actor,
    storage_root: &Path,
) -> Result<ImportSummary, ExchangeError> {
    ops::record("import_package");
    if !store.contains_graph(&target.iri) {
        return Err(ExchangeError::UnknownActor(target.iri.to_string()));
    }

    // Plan file writes, checking for conflicts first.
    let extensions: HashMap<&str, &str> = package
        .manifest
        .files
        .iter()
        .map(|f| (f.handle.as_str(), f.file_extension.as_str()))
        .collect();
    let mut to_write: Vec<(PathBuf, &[u8])> = Vec::new();
    let mut local_paths: HashMap<&str, PathBuf> = HashMap::new();
    for (handle, bytes) in &package.files {
        let ext = extensions[handle.as_str()];
        let path = layout_path(storage_root, target, handle, ext);
        if let Some(existing) = find_record(store, &target.iri, handle) {
            let same_place = existing.as_ref().is_ok_and(|r| r.file_extension == ext);
            if !same_place {
                return Err(ExchangeError::Conflict { handle: handle.clone() });
            }
        }
        match std::fs::read(&path) {
            Ok(current) if current == *bytes => {}
            Ok(_) => return Err(ExchangeError::Conflict { handle: handle.clone() }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => to_write.push((path.clone(), bytes)),
            Err(e) => return Err(ExchangeError::Io { path, source: e }),
        }
        local_paths.insert(handle, path);
    }

    let own_subject = Subject::Iri(target.subject());
    let source = package.manifest.source_actor.as_str();
    let mut skipped = 0;
    let mut selection = Vec::with_capacity(package.data_triples.len());
    for t in &package.data_triples {
        if t.subject == own_subject || t.predicate.local_name() == "permission" {
            skipped += 1;
            continue;
        }
        let mut t = relabel(t, source);
        if t.predicate.local_name() == "fileServerPath" {
            if let Some(path) = handle_of(&package.data_triples, &t.subject).and_then(|h| local_paths.get(h)) {
                t.object = Term::Literal(Literal::string(path.to_string_lossy()));
            }
        }
        selection.push(t);
    }

    let mut written = Vec::new();
    for (path, bytes) in &to_write {
        if let Err(e) = write_file_atomically(path, bytes) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e.into());
        }
        written.push(path.clone());
    }

    let triples_added = match Iri::new(source) {
        Ok(from) if from != target.iri => store.copy_triples(&from, &selection, &target.iri),
        _ => selection.into_iter().filter(|t| store.insert(&target.iri, t.clone())).count(),
    };
    Ok(ImportSummary {
        triples_added,
        files_added: written.len(),
        triples_skipped: skipped,
    })
}

fn handle_of<'a>(triples: &'a [Triple], subject: &Subject) -> Option<&'a str> {
    triples
        .iter()
        .find(|t| &t.subject == subject && t.predicate.local_name() == "fileHandle")
        .and_then(|t| t.object.as_literal())
        .map(|l| l.lexical())
}

fn relabel(t: &Triple, source: &str) -> Triple {
    let blank = |b: &BlankNode| {
        let digest = Sha256::digest(format!("{source}\u{0}{}", b.label()).as_bytes());
        BlankNode::new_unchecked(format!("i{}", hex::encode(&digest[..12])))
    };
    Triple {
        subject: match &t.subject {
            Subject::BlankNode(b) => Subject::BlankNode(blank(b)),
            s => s.clone(),
        },
        predicate: t.predicate.clone(),
        object: match &t.object {
            Term::BlankNode(b) => Term::BlankNode(blank(b)),
            o => o.clone(),
        },
    }
}
