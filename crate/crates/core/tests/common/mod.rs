#![allow(dead_code)]

use std::path::PathBuf;

use webcas_core::cas::{Actor, Vocabulary};
use webcas_core::rdf::{parse_document, Iri, Syntax, Triple};

pub const STUDENT_GRAPH: &str = "http://example.org/Student";
pub const MASTER_WEBID: &str = "http://hmsc.example.org/webid#id";
pub const HANDLE: &str = "7aa5c0f9a76e9a62e3104925c6d6bd81";

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn dossier() -> Vec<Triple> {
    parse_document(&fixture("dossier.ttl"), Some(&iri(STUDENT_GRAPH)), Syntax::Turtle).unwrap()
}

pub fn document_metadata() -> Vec<Triple> {
    parse_document(&fixture("document.ttl"), None, Syntax::Turtle).unwrap()
}

pub fn profile_card(profile_document: &str) -> Vec<Triple> {
    parse_document(&fixture("profile.ttl"), Some(&iri(profile_document)), Syntax::Turtle).unwrap()
}

pub fn student_actor() -> Actor {
    Actor::new(
        "student",
        iri(STUDENT_GRAPH),
        Vocabulary::student(),
        iri("http://example.org/StudentWebID"),
    )
    .unwrap()
}

pub fn master_actor() -> Actor {
    Actor::new(
        "hmsc",
        iri("http://hmsc.example.org/actor"),
        Vocabulary::hmsc(),
        iri(MASTER_WEBID),
    )
    .unwrap()
}

/// Counts N-Triples statements by looking only at line structure:
/// non-blank lines that are not comments.
pub fn count_statement_lines(text: &str) -> usize {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .count()
}

/// Reads entry names and contents of a ZIP archive.
pub fn zip_entries(bytes: &[u8]) -> Vec<(String, Vec<u8>)> {
    use std::io::Read;
    let mut archive = zip::ZipArchive::new(std::io::Cursor::new(bytes)).unwrap();
    (0..archive.len())
        .map(|i| {
            let mut f = archive.by_index(i).unwrap();
            let mut data = Vec::new();
            f.read_to_end(&mut data).unwrap();
            (f.name().to_owned(), data)
        })
        .collect()
}

/// Builds a ZIP archive from raw `(name, bytes)` entries.
pub fn make_zip(entries: &[(&str, &[u8])]) -> Vec<u8> {
    use std::io::Write;
    let mut w = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
    for (name, data) in entries {
        w.start_file(*name, zip::write::SimpleFileOptions::default()).unwrap();
        w.write_all(data).unwrap();
    }
    w.finish().unwrap().into_inner()
}
