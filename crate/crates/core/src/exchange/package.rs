use std::collections::{BTreeMap, BTreeSet};
use std::io::{Cursor, Read};

use zip::ZipArchive;

use super::{
    ExchangeError, ExportManifest, ExportPackage, DATA_ENTRY, FILES_DIR, MANIFEST_ENTRY, MANIFEST_VERSION, ROOT_DIR,
};
use crate::cas::{is_safe_extension, is_valid_handle};
use crate::ops;
use crate::rdf::{parse_document, Iri, Subject, Syntax, Triple};

/// Upper bound for the manifest and data entries after decompression.
const MAX_TEXT_ENTRY: u64 = 64 * 1024 * 1024;

/// Reads and validates a package: manifest version, entry layout, statement
/// count, file sizes and file references.
pub fn parse_package(zip_bytes: &[u8]) -> Result<ExportPackage, ExchangeError> {
    ops::record("parse_package");
    let malformed = |m: String| ExchangeError::Malformed(m);
    let mut archive = ZipArchive::new(Cursor::new(zip_bytes)).map_err(|e| malformed(format!("not a ZIP archive: {e}")))?;

    let mut manifest_raw = None;
    let mut data_raw = None;
    let mut file_entries: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..archive.len() {
        let entry = archive.by_index(i).map_err(|e| malformed(e.to_string()))?;
        let name = entry.name().to_owned();
        if !name.starts_with(ROOT_DIR) {
            return Err(malformed(format!("entry {name:?} is outside {ROOT_DIR}")));
        }
        if entry.is_dir() {
            continue;
        }
        drop(entry);
        if name == MANIFEST_ENTRY {
            manifest_raw = Some(read_entry(&mut archive, i, MAX_TEXT_ENTRY)?);
        } else if name == DATA_ENTRY {
            data_raw = Some(read_entry(&mut archive, i, MAX_TEXT_ENTRY)?);
        } else if let Some(handle) = name.strip_prefix(FILES_DIR) {
            if !is_valid_handle(handle) {
                return Err(malformed(format!("file entry {name:?} is not named by a handle")));
            }
            file_entries.insert(handle.to_owned(), i);
        } else {
            return Err(malformed(format!("unexpected entry {name:?}")));
        }
    }
    let manifest_raw = manifest_raw.ok_or_else(|| malformed(format!("missing {MANIFEST_ENTRY}")))?;
    let data_raw = data_raw.ok_or_else(|| malformed(format!("missing {DATA_ENTRY}")))?;

    let manifest = parse_manifest(&manifest_raw)?;
    let source = Iri::new(manifest.source_actor.as_str())
        .map_err(|e| malformed(format!("source_actor: {e}")))?;
    let text = String::from_utf8(data_raw).map_err(|_| malformed(format!("{DATA_ENTRY} is not UTF-8")))?;
    let data_triples = parse_document(&text, Some(&source), Syntax::Turtle)?;
    if data_triples.len() != manifest.triple_count {
        return Err(ExchangeError::Integrity(format!(
            "manifest announces {} statements, data has {}",
            manifest.triple_count,
            data_triples.len()
        )));
    }

    let mut files = BTreeMap::new();
    for f in &manifest.files {
        if !is_valid_handle(&f.handle) || !is_safe_extension(&f.file_extension) {
            return Err(malformed(format!("bad file entry {:?}{:?}", f.handle, f.file_extension)));
        }
        let index = file_entries
            .remove(&f.handle)
            .ok_or_else(|| malformed(format!("manifest lists {} but the archive lacks it", f.handle)))?;
        let bytes = read_entry(&mut archive, index, f.file_size)?;
        if bytes.len() as u64 != f.file_size {
            return Err(ExchangeError::Integrity(format!(
                "{} has {} bytes, manifest says {}",
                f.handle,
                bytes.len(),
                f.file_size
            )));
        }
        if files.insert(f.handle.clone(), bytes).is_some() {
            return Err(malformed(format!("{} listed twice", f.handle)));
        }
    }
    if let Some(extra) = file_entries.keys().next() {
        return Err(malformed(format!("file {extra} is not in the manifest")));
    }
    check_file_links(&data_triples, &files)?;

    Ok(ExportPackage {
        manifest,
        data_triples,
        files,
    })
}

fn parse_manifest(raw: &[u8]) -> Result<ExportManifest, ExchangeError> {
    let value: serde_json::Value =
        serde_json::from_slice(raw).map_err(|e| ExchangeError::Malformed(format!("manifest: {e}")))?;
    match value.get("version").and_then(serde_json::Value::as_u64) {
        Some(MANIFEST_VERSION) => {}
        Some(v) => return Err(ExchangeError::UnsupportedVersion(v)),
        None => return Err(ExchangeError::Malformed("manifest has no numeric version".into())),
    }
    serde_json::from_value(value).map_err(|e| ExchangeError::Malformed(format!("manifest: {e}")))
}

/// Reads at most `limit + 1` bytes so an oversized entry is detected
/// without inflating all of it.
fn read_entry(archive: &mut ZipArchive<Cursor<&[u8]>>, index: usize, limit: u64) -> Result<Vec<u8>, ExchangeError> {
    let entry = archive
        .by_index(index)
        .map_err(|e| ExchangeError::Malformed(e.to_string()))?;
    let name = entry.name().to_owned();
    let mut out = Vec::new();
    entry
        .take(limit.saturating_add(1))
        .read_to_end(&mut out)
        .map_err(|e| ExchangeError::Malformed(format!("{name}: {e}")))?;
    if out.len() as u64 > limit && (name == MANIFEST_ENTRY || name == DATA_ENTRY) {
        return Err(ExchangeError::Malformed(format!("{name} exceeds {limit} bytes")));
    }
    Ok(out)
}

/// Every object of a `file` predicate must be a document whose handle is
/// shipped in the package.
fn check_file_links(triples: &[Triple], files: &BTreeMap<String, Vec<u8>>) -> Result<(), ExchangeError> {
    let handles_of = |doc: &Iri| -> BTreeSet<&str> {
        let s = Subject::Iri(doc.clone());
        triples
            .iter()
            .filter(|t| t.subject == s && t.predicate.local_name() == "fileHandle")
            .filter_map(|t| t.object.as_literal().map(|l| l.lexical()))
            .collect()
    };
    for t in triples.iter().filter(|t| t.predicate.local_name() == "file") {
        let Some(doc) = t.object.as_iri() else { continue };
        let handles = handles_of(doc);
        if handles.is_empty() || !handles.iter().any(|h| files.contains_key(*h)) {
            return Err(ExchangeError::Integrity(format!("{doc} is linked but its file is not in the package")));
        }
    }
    Ok(())
}
