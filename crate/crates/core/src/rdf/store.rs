use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};

use parking_lot::{RwLock, RwLockReadGuard};

use super::ntriples::{parse_nquads, write_nquads};
use super::{BlankNode, Iri, Quad, RdfError, Subject, Term, Triple};
use crate::ops;

/// Named graphs, each a duplicate-free set of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadStore {
    graphs: BTreeMap<Iri, BTreeSet<Triple>>,
    next_blank: u64,
}

impl QuadStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates an empty graph; returns false if it already existed.
    pub fn create_graph(&mut self, graph: Iri) -> bool {
        if self.graphs.contains_key(&graph) {
            return false;
        }
        self.graphs.insert(graph, BTreeSet::new());
        true
    }

    pub fn contains_graph(&self, graph: &Iri) -> bool {
        self.graphs.contains_key(graph)
    }

    pub fn graph(&self, graph: &Iri) -> Option<&BTreeSet<Triple>> {
        self.graphs.get(graph)
    }

    pub fn graph_names(&self) -> impl Iterator<Item = &Iri> {
        self.graphs.keys()
    }

    /// Total number of quads.
    pub fn len(&self) -> usize {
        self.graphs.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, graph: &Iri, triple: &Triple) -> bool {
        self.graphs.get(graph).is_some_and(|g| g.contains(triple))
    }

    /// Inserts a triple, creating the graph if needed. Returns true if new.
    pub fn insert(&mut self, graph: &Iri, triple: Triple) -> bool {
        self.graphs.entry(graph.clone()).or_default().insert(triple)
    }

    pub fn remove(&mut self, graph: &Iri, triple: &Triple) -> bool {
        self.graphs.get_mut(graph).is_some_and(|g| g.remove(triple))
    }

    /// Inserts freshly parsed triples, renaming their blank nodes to labels
    /// unused anywhere in the store. Co-reference within `triples` is kept.
    pub fn insert_document(&mut self, graph: &Iri, triples: impl IntoIterator<Item = Triple>) -> usize {
        let mut renamed: HashMap<BlankNode, BlankNode> = HashMap::new();
        let mut added = 0;
        for t in triples {
            let subject = match t.subject {
                Subject::BlankNode(b) => Subject::BlankNode(self.rename(&mut renamed, b)),
                s => s,
            };
            let object = match t.object {
                Term::BlankNode(b) => Term::BlankNode(self.rename(&mut renamed, b)),
                o => o,
            };
            if self.insert(graph, Triple { subject, predicate: t.predicate, object }) {
                added += 1;
            }
        }
        added
    }

    fn rename(&mut self, renamed: &mut HashMap<BlankNode, BlankNode>, b: BlankNode) -> BlankNode {
        if let Some(r) = renamed.get(&b) {
            return r.clone();
        }
        let fresh = loop {
            let candidate = BlankNode::new_unchecked(format!("n{}", self.next_blank));
            self.next_blank += 1;
            if !self.uses_blank(&candidate) {
                break candidate;
            }
        };
        renamed.insert(b, fresh.clone());
        fresh
    }

    fn uses_blank(&self, b: &BlankNode) -> bool {
        self.graphs.values().flatten().any(|t| {
            t.subject.as_blank() == Some(b) || t.object.as_blank() == Some(b)
        })
    }

    /// All quads matching the bound positions; `None` is a wildcard.
    pub fn match_pattern(
        &self,
        graph: Option<&Iri>,
        subject: Option<&Subject>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<Quad> {
        ops::record("match_pattern");
        let graphs: Box<dyn Iterator<Item = (&Iri, &BTreeSet<Triple>)>> = match graph {
            Some(g) => Box::new(self.graphs.get_key_value(g).into_iter()),
            None => Box::new(self.graphs.iter()),
        };
        graphs
            .flat_map(|(g, triples)| {
                triples
                    .iter()
                    .filter(|t| {
                        subject.is_none_or(|s| &t.subject == s)
                            && predicate.is_none_or(|p| &t.predicate == p)
                            && object.is_none_or(|o| &t.object == o)
                    })
                    .map(move |t| Quad { graph: g.clone(), triple: t.clone() })
            })
            .collect()
    }

    /// Objects of all `(subject, predicate, ?)` triples in `graph`.
    pub fn objects(&self, graph: &Iri, subject: &Subject, predicate: &Iri) -> Vec<Term> {
        self.graphs
            .get(graph)
            .into_iter()
            .flatten()
            .filter(|t| &t.subject == subject && &t.predicate == predicate)
            .map(|t| t.object.clone())
            .collect()
    }

    /// Copies `selection` into `to`. Returns the number of triples that were
    /// not already present there.
    pub fn copy_triples(&mut self, from: &Iri, selection: &[Triple], to: &Iri) -> usize {
        ops::record("copy_triples");
        if from == to {
            return 0;
        }
        let target = self.graphs.entry(to.clone()).or_default();
        selection.iter().filter(|t| target.insert((*t).clone())).count()
    }

    pub fn quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.graphs.iter().flat_map(|(g, triples)| {
            triples.iter().map(move |t| Quad {
                graph: g.clone(),
                triple: t.clone(),
            })
        })
    }

    pub fn to_nquads(&self) -> String {
        let quads: Vec<Quad> = self.quads().collect();
        write_nquads(&quads)
    }

    pub fn from_nquads(text: &str) -> Result<Self, RdfError> {
        let mut store = QuadStore::new();
        for q in parse_nquads(text)? {
            store.insert(&q.graph, q.triple);
        }
        Ok(store)
    }
}

/// A [`QuadStore`] shared between threads and optionally persisted as an
/// N-Quads file.
///
/// Readers run concurrently; writers are serialized. A write closure works
/// on a copy which replaces the live store only after it has been persisted,
/// so readers never observe a partially applied write.
#[derive(Debug)]
pub struct Dataset {
    store: RwLock<QuadStore>,
    path: Option<PathBuf>,
}

impl Dataset {
    pub fn in_memory(store: QuadStore) -> Self {
        Dataset {
            store: RwLock::new(store),
            path: None,
        }
    }

    /// Loads the dataset at `path`, or starts empty if the file is absent.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, RdfError> {
        let path = path.into();
        let store = match std::fs::read_to_string(&path) {
            Ok(text) => QuadStore::from_nquads(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => QuadStore::new(),
            Err(e) => return Err(RdfError::io(&path, e)),
        };
        Ok(Dataset {
            store: RwLock::new(store),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn read(&self) -> RwLockReadGuard<'_, QuadStore> {
        self.store.read()
    }

    pub fn snapshot(&self) -> QuadStore {
        self.store.read().clone()
    }

    /// Applies `f` as one atomic, persisted write.
    pub fn write<R, E>(&self, f: impl FnOnce(&mut QuadStore) -> Result<R, E>) -> Result<R, E>
    where
        E: From<RdfError>,
    {
        let mut guard = self.store.write();
        let mut next = guard.clone();
        let result = f(&mut next)?;
        if next != *guard {
            if let Some(path) = &self.path {
                save_atomically(path, &next)?;
            }
            *guard = next;
        }
        Ok(result)
    }
}

pub fn save_atomically(path: &Path, store: &QuadStore) -> Result<(), RdfError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| RdfError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| RdfError::io(dir, e))?;
    tmp.write_all(store.to_nquads().as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| RdfError::io(path, e))?;
    tmp.persist(path).map_err(|e| RdfError::io(path, e.error))?;
    Ok(())
}
