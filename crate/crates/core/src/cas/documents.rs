use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::rngs::OsRng;
use rand::RngCore;

use super::{require_graph, Actor, CasError};
use crate::ops;
use crate::rdf::vocab::xsd;
use crate::rdf::{Iri, Literal, QuadStore, Subject, Term, Triple};

/// Metadata of one stored document as read back from its triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub subject: Iri,
    /// Namespace of the metadata predicates, e.g. the student vocabulary for
    /// documents imported from a student.
    pub namespace: String,
    pub handle: String,
    pub file_name: String,
    pub file_extension: String,
    pub file_type: String,
    pub file_size: u64,
    pub server_path: String,
}

impl DocumentRecord {
    /// The six metadata triples in vocabulary `namespace`.
    pub fn triples(&self) -> Vec<Triple> {
        let p = |local: &str| Iri::new_unchecked(format!("{}{local}", self.namespace));
        let s = || self.subject.clone();
        vec![
            Triple::new(s(), p("fileExtension"), Literal::string(&self.file_extension)),
            Triple::new(s(), p("fileHandle"), Literal::string(&self.handle)),
            Triple::new(s(), p("fileName"), Literal::string(&self.file_name)),
            Triple::new(s(), p("fileServerPath"), Literal::string(&self.server_path)),
            Triple::new(
                s(),
                p("fileSize"),
                Literal::typed(self.file_size.to_string(), Iri::new_unchecked(xsd::INTEGER)),
            ),
            Triple::new(s(), p("fileType"), Literal::string(&self.file_type)),
        ]
    }
}

/// 128 random bits as 32 lowercase hex digits.
pub fn new_handle() -> String {
    let mut bytes = [0u8; 16];
    OsRng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

pub fn is_valid_handle(handle: &str) -> bool {
    handle.len() == 32 && handle.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// A leading dot followed by 1-16 ASCII alphanumerics.
pub(crate) fn is_safe_extension(ext: &str) -> bool {
    ext.strip_prefix('.')
        .is_some_and(|rest| (1..=16).contains(&rest.len()) && rest.bytes().all(|b| b.is_ascii_alphanumeric()))
}

fn extension_of(file_name: &str) -> Option<String> {
    let ext = Path::new(file_name).extension()?.to_str()?;
    let ext = format!(".{ext}");
    is_safe_extension(&ext).then_some(ext)
}

/// `<root>/<actor>/<handle><ext>`
pub(crate) fn layout_path(storage_root: &Path, actor: &Actor, handle: &str, extension: &str) -> PathBuf {
    storage_root.join(&actor.name).join(format!("{handle}{extension}"))
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so readers never see a partial file.
pub(crate) fn write_file_atomically(path: &Path, bytes: &[u8]) -> Result<(), CasError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CasError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CasError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CasError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CasError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CasError::io(path, e.error))?;
    Ok(())
}

/// Writes the file, then adds its metadata and the `voc:file` link to the
/// actor's graph. If the file cannot be written the graph is untouched.
pub fn store_document(
    store: &mut QuadStore,
    actor: &Actor,
    file_name: &str,
    media_type: &str,
    bytes: &[u8],
    storage_root: &Path,
) -> Result<DocumentRecord, CasError> {
    ops::record("store_document");
    require_graph(store, actor)?;
    if bytes.is_empty() {
        return Err(CasError::EmptyDocument);
    }
    let file_extension = extension_of(file_name).ok_or_else(|| CasError::MissingExtension(file_name.to_owned()))?;
    let handle = loop {
        let h = new_handle();
        if find_record(store, &actor.iri, &h).is_none() {
            break h;
        }
    };
    let path = layout_path(storage_root, actor, &handle, &file_extension);
    write_file_atomically(&path, bytes)?;

    let record = DocumentRecord {
        subject: actor.document_subject(&handle),
        namespace: actor.vocabulary.namespace().to_owned(),
        handle,
        file_name: file_name.to_owned(),
        file_extension,
        file_type: media_type.to_owned(),
        file_size: bytes.len() as u64,
        server_path: path.to_string_lossy().into_owned(),
    };
    for t in record.triples() {
        store.insert(&actor.iri, t);
    }
    store.insert(
        &actor.iri,
        Triple::new(actor.subject(), actor.vocabulary.file(), record.subject.clone()),
    );
    Ok(record)
}

/// Returns the metadata and the exact stored bytes.
pub fn get_document(
    store: &QuadStore,
    actor: &Actor,
    handle: &str,
    storage_root: &Path,
) -> Result<(DocumentRecord, Vec<u8>), CasError> {
    ops::record("get_document");
    if !is_valid_handle(handle) {
        return Err(CasError::InvalidHandle(handle.to_owned()));
    }
    let record = find_record(store, &actor.iri, handle).ok_or_else(|| CasError::NotFound(handle.to_owned()))??;
    let path = layout_path(storage_root, actor, handle, &record.file_extension);
    let bytes = fs::read(&path).map_err(|e| CasError::Integrity {
        handle: handle.to_owned(),
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    if bytes.len() as u64 != record.file_size {
        return Err(CasError::Integrity {
            handle: handle.to_owned(),
            reason: format!("file has {} bytes, metadata says {}", bytes.len(), record.file_size),
        });
    }
    Ok((record, bytes))
}

/// Every document whose metadata lives in the actor's graph, ordered by
/// handle. Documents with incomplete metadata are skipped.
pub fn list_documents(store: &QuadStore, actor: &Actor) -> Vec<DocumentRecord> {
    let mut out: Vec<DocumentRecord> = handle_triples(store, &actor.iri)
        .filter_map(|(_, handle)| find_record(store, &actor.iri, &handle)?.ok())
        .collect();
    out.sort_by(|a, b| a.handle.cmp(&b.handle));
    out.dedup_by(|a, b| a.handle == b.handle);
    out
}

fn handle_triples<'a>(store: &'a QuadStore, graph: &Iri) -> impl Iterator<Item = (&'a Triple, String)> + 'a {
    store
        .graph(graph)
        .into_iter()
        .flatten()
        .filter(|t| t.predicate.local_name() == "fileHandle")
        .filter_map(|t| Some((t, t.object.as_literal()?.lexical().to_owned())))
}

/// Looks a document up by its `fileHandle` literal in any vocabulary.
/// `Some(Err)` means the handle exists but its metadata is incomplete.
pub(crate) fn find_record(store: &QuadStore, graph: &Iri, handle: &str) -> Option<Result<DocumentRecord, CasError>> {
    let (triple, _) = handle_triples(store, graph).find(|(_, h)| h == handle)?;
    let Subject::Iri(subject) = &triple.subject else {
        return Some(Err(CasError::Integrity {
            handle: handle.to_owned(),
            reason: "document subject is a blank node".into(),
        }));
    };
    let namespace = &triple.predicate.as_str()[..triple.predicate.as_str().len() - "fileHandle".len()];
    Some(read_record(store, graph, subject, namespace, handle))
}

fn read_record(
    store: &QuadStore,
    graph: &Iri,
    subject: &Iri,
    namespace: &str,
    handle: &str,
) -> Result<DocumentRecord, CasError> {
    let s = Subject::Iri(subject.clone());
    let field = |local: &str| -> Result<String, CasError> {
        let predicate = Iri::new_unchecked(format!("{namespace}{local}"));
        store
            .objects(graph, &s, &predicate)
            .into_iter()
            .find_map(|o| match o {
                Term::Literal(l) => Some(l.lexical().to_owned()),
                _ => None,
            })
            .ok_or_else(|| CasError::Integrity {
                handle: handle.to_owned(),
                reason: format!("missing {local}"),
            })
    };
    let file_extension = field("fileExtension")?;
    if !is_safe_extension(&file_extension) {
        return Err(CasError::Integrity {
            handle: handle.to_owned(),
            reason: format!("unsafe extension {file_extension:?}"),
        });
    }
    let size = field("fileSize")?;
    Ok(DocumentRecord {
        subject: subject.clone(),
        namespace: namespace.to_owned(),
        handle: handle.to_owned(),
        file_name: field("fileName")?,
        file_type: field("fileType")?,
        file_size: size.parse().map_err(|_| CasError::Integrity {
            handle: handle.to_owned(),
            reason: format!("bad fileSize {size:?}"),
        })?,
        server_path: field("fileServerPath")?,
        file_extension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cas::Vocabulary;

    fn setup() -> (QuadStore, Actor, tempfile::TempDir) {
        let actor = Actor::new(
            "student",
            Iri::new("http://example.org/Student").unwrap(),
            Vocabulary::student(),
            Iri::new("http://example.org/StudentWebID").unwrap(),
        )
        .unwrap();
        let mut store = QuadStore::new();
        store.create_graph(actor.iri.clone());
        (store, actor, tempfile::tempdir().unwrap())
    }

    #[test]
    fn handles_are_lowercase_hex() {
        let h = new_handle();
        assert!(is_valid_handle(&h), "{h}");
        assert_ne!(h, new_handle());
        assert!(!is_valid_handle("7AA5C0F9A76E9A62E3104925C6D6BD81"));
        assert!(is_valid_handle("7aa5c0f9a76e9a62e3104925c6d6bd81"));
    }

    #[test]
    fn store_and_get() {
        let (mut store, actor, dir) = setup();
        let bytes = b"%PDF-1.4 hello".to_vec();
        let rec = store_document(&mut store, &actor, "Curriculum.pdf", "application/pdf", &bytes, dir.path()).unwrap();
        assert_eq!(rec.file_extension, ".pdf");
        assert!(rec.server_path.ends_with(&format!("{}.pdf", rec.handle)));
        assert_eq!(store.graph(&actor.iri).unwrap().len(), 7);
        let (got, data) = get_document(&store, &actor, &rec.handle, dir.path()).unwrap();
        assert_eq!(got, rec);
        assert_eq!(data, bytes);
        assert_eq!(list_documents(&store, &actor), vec![rec]);
    }

    #[test]
    fn rejects_bad_input() {
        let (mut store, actor, dir) = setup();
        assert!(matches!(
            store_document(&mut store, &actor, "a.pdf", "application/pdf", b"", dir.path()),
            Err(CasError::EmptyDocument)
        ));
        assert!(matches!(
            store_document(&mut store, &actor, "README", "text/plain", b"x", dir.path()),
            Err(CasError::MissingExtension(_))
        ));
        assert!(matches!(
            get_document(&store, &actor, "nope", dir.path()),
            Err(CasError::InvalidHandle(_))
        ));
        assert!(matches!(
            get_document(&store, &actor, &new_handle(), dir.path()),
            Err(CasError::NotFound(_))
        ));
        assert!(store.graph(&actor.iri).unwrap().is_empty());
    }

    #[test]
    fn failed_write_leaves_no_metadata() {
        let (mut store, actor, dir) = setup();
        // A regular file where the actor directory should be.
        fs::write(dir.path().join("student"), b"blocker").unwrap();
        assert!(matches!(
            store_document(&mut store, &actor, "a.txt", "text/plain", b"x", dir.path()),
            Err(CasError::Io { .. })
        ));
        assert!(store.graph(&actor.iri).unwrap().is_empty());
    }

    #[test]
    fn tampering_is_detected() {
        let (mut store, actor, dir) = setup();
        let rec = store_document(&mut store, &actor, "a.txt", "text/plain", b"12345", dir.path()).unwrap();
        fs::write(&rec.server_path, b"1234").unwrap();
        assert!(matches!(
            get_document(&store, &actor, &rec.handle, dir.path()),
            Err(CasError::Integrity { .. })
        ));
        fs::remove_file(&rec.server_path).unwrap();
        assert!(matches!(
            get_document(&store, &actor, &rec.handle, dir.path()),
            Err(CasError::Integrity { .. })
        ));
    }
}
