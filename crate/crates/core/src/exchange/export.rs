use std::collections::{BTreeMap, BTreeSet};
use std::io::{Cursor, Write};
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipWriter};

use super::{ExchangeError, ExportManifest, ManifestFile, DATA_ENTRY, FILES_DIR, MANIFEST_ENTRY, MANIFEST_VERSION};
use crate::cas::{find_record, layout_path, Actor, DocumentRecord};
use crate::ops;
use crate::rdf::{write_ntriples, BlankNode, Iri, QuadStore, Subject, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    /// Triples about these subjects, plus the blank nodes they reach.
    Subjects(Vec<Iri>),
}

/// The selection the owner has configured with `voc:exportExclude`
/// triples on its own subject.
pub fn configured_selection(store: &QuadStore, actor: &Actor) -> Selection {
    let excluded: BTreeSet<Iri> = store
        .objects(&actor.iri, &Subject::Iri(actor.subject()), &actor.vocabulary.export_exclude())
        .into_iter()
        .filter_map(|t| t.as_iri().cloned())
        .collect();
    if excluded.is_empty() {
        return Selection::All;
    }
    let subjects: BTreeSet<Iri> = store
        .graph(&actor.iri)
        .into_iter()
        .flatten()
        .filter_map(|t| t.subject.as_iri())
        .filter(|s| !excluded.contains(*s))
        .cloned()
        .collect();
    Selection::Subjects(subjects.into_iter().collect())
}

/// True for triples that never leave the owner's graph: permissions and
/// export configuration.
pub(crate) fn is_private(t: &Triple) -> bool {
    matches!(t.predicate.local_name(), "permission" | "exportExclude")
}

/// Builds the ZIP for `actor`. Nothing is returned unless every referenced
/// document could be read and matches its recorded size.
pub fn build_export(
    store: &QuadStore,
    actor: &Actor,
    selection: &Selection,
    storage_root: &Path,
) -> Result<Vec<u8>, ExchangeError> {
    ops::record("build_export");
    let graph = store
        .graph(&actor.iri)
        .ok_or_else(|| ExchangeError::UnknownActor(actor.iri.to_string()))?;

    let selected: Vec<&Triple> = match selection {
        Selection::All => graph.iter().collect(),
        Selection::Subjects(subjects) => select_subjects(graph, subjects)?,
    };
    let mut triples: Vec<&Triple> = selected.into_iter().filter(|t| !is_private(t)).collect();

    let mut documents: BTreeMap<Iri, DocumentRecord> = BTreeMap::new();
    for t in &triples {
        if t.predicate.local_name() != "fileHandle" {
            continue;
        }
        let (Subject::Iri(subject), Some(handle)) = (&t.subject, t.object.as_literal()) else {
            continue;
        };
        if let Some(Ok(record)) = find_record(store, &actor.iri, handle.lexical()) {
            if &record.subject == subject {
                documents.insert(subject.clone(), record);
            }
        }
    }
    // A file link is only kept if the document itself travels along.
    triples.retain(|t| {
        t.predicate.local_name() != "file" || t.object.as_iri().is_none_or(|o| documents.contains_key(o))
    });

    let mut files = Vec::with_capacity(documents.len());
    for record in documents.values() {
        let path = layout_path(storage_root, actor, &record.handle, &record.file_extension);
        let bytes = std::fs::read(&path).map_err(|e| ExchangeError::DocumentMissing {
            handle: record.handle.clone(),
            reason: format!("{}: {e}", path.display()),
        })?;
        if bytes.len() as u64 != record.file_size {
            return Err(ExchangeError::DocumentMissing {
                handle: record.handle.clone(),
                reason: format!("file has {} bytes, metadata says {}", bytes.len(), record.file_size),
            });
        }
        files.push((record, bytes));
    }
    files.sort_by(|a, b| a.0.handle.cmp(&b.0.handle));

    let manifest = ExportManifest {
        version: MANIFEST_VERSION,
        source_actor: actor.iri.as_str().to_owned(),
        source_vocabulary: actor.vocabulary.namespace().to_owned(),
        exported_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        triple_count: triples.len(),
        files: files
            .iter()
            .map(|(r, _)| ManifestFile {
                handle: r.handle.clone(),
                file_name: r.file_name.clone(),
                file_extension: r.file_extension.clone(),
                file_type: r.file_type.clone(),
                file_size: r.file_size,
            })
            .collect(),
    };
    let data = write_ntriples(triples.iter().copied());
    let manifest_json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");

    let zip_err = |e: zip::result::ZipError| ExchangeError::Malformed(format!("writing archive: {e}"));
    let io_err = |e: std::io::Error| ExchangeError::Malformed(format!("writing archive: {e}"));
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
    let options = SimpleFileOptions::default().compression_method(CompressionMethod::Deflated);
    zip.start_file(MANIFEST_ENTRY, options).map_err(zip_err)?;
    zip.write_all(&manifest_json).map_err(io_err)?;
    zip.start_file(DATA_ENTRY, options).map_err(zip_err)?;
    zip.write_all(data.as_bytes()).map_err(io_err)?;
    for (record, bytes) in &files {
        zip.start_file(format!("{FILES_DIR}{}", record.handle), options)
            .map_err(zip_err)?;
        zip.write_all(bytes).map_err(io_err)?;
    }
    Ok(zip.finish().map_err(zip_err)?.into_inner())
}

fn select_subjects<'a>(graph: &'a BTreeSet<Triple>, subjects: &[Iri]) -> Result<Vec<&'a Triple>, ExchangeError> {
    let mut wanted: BTreeSet<Subject> = BTreeSet::new();
    for s in subjects {
        let s = Subject::Iri(s.clone());
        if !graph.iter().any(|t| t.subject == s) {
            return Err(ExchangeError::UnknownSubject(s.to_string()));
        }
        wanted.insert(s);
    }
    // Follow blank node objects so nested descriptions stay complete.
    let mut frontier: Vec<Subject> = wanted.iter().cloned().collect();
    while let Some(s) = frontier.pop() {
        for t in graph.iter().filter(|t| t.subject == s) {
            if let Term::BlankNode(b) = &t.object {
                let next = Subject::BlankNode(BlankNode::clone(b));
                if wanted.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    Ok(graph.iter().filter(|t| wanted.contains(&t.subject)).collect())
}
