//! Per-actor named graphs with permission triples and document metadata.

mod documents;
mod service;

use std::fmt;
use std::path::PathBuf;

pub use documents::{
    get_document, is_valid_handle, list_documents, new_handle, store_document, DocumentRecord,
};
pub(crate) use documents::{find_record, is_safe_extension, layout_path, write_file_atomically};
pub use service::ContentAccessService;

use crate::ops;
use crate::rdf::vocab::rdf;
use crate::rdf::{Iri, Literal, QuadStore, RdfError, Subject, Term, Triple};

/// Base of the per-role vocabularies.
pub const VOCAB_BASE: &str = "http://persemid.bfh.ch/vocab/";

#[derive(Debug, thiserror::Error)]
pub enum CasError {
    #[error("no graph for actor {0}")]
    UnknownActor(String),
    #[error("refusing to store an empty document")]
    EmptyDocument,
    #[error("file name {0:?} has no usable extension")]
    MissingExtension(String),
    #[error("invalid document handle {0:?}")]
    InvalidHandle(String),
    #[error("document {0} not found")]
    NotFound(String),
    #[error("document {handle} is inconsistent: {reason}")]
    Integrity { handle: String, reason: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

impl CasError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CasError::Io {
            path: path.into(),
            source,
        }
    }
}

/// An actor vocabulary such as `http://persemid.bfh.ch/vocab/student#`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    namespace: String,
    class: String,
}

impl Vocabulary {
    /// `namespace` must be an absolute IRI ending in `#` or `/`; `class` is
    /// the local name of the actor class, e.g. `Student`.
    pub fn new(namespace: &str, class: &str) -> Result<Self, RdfError> {
        Iri::new(namespace)?;
        if !namespace.ends_with(['#', '/']) {
            return Err(RdfError::InvalidIri {
                iri: namespace.to_owned(),
                reason: "vocabulary namespace must end in '#' or '/'".into(),
            });
        }
        Ok(Vocabulary {
            namespace: namespace.to_owned(),
            class: class.to_owned(),
        })
    }

    /// The vocabulary `VOCAB_BASE<short>#` with class `class`.
    pub fn persemid(short: &str, class: &str) -> Self {
        Vocabulary {
            namespace: format!("{VOCAB_BASE}{short}#"),
            class: class.to_owned(),
        }
    }

    pub fn student() -> Self {
        Self::persemid("student", "Student")
    }

    pub fn hbsc() -> Self {
        Self::persemid("hbsc", "Hbsc")
    }

    pub fn hmsc() -> Self {
        Self::persemid("hmsc", "Hmsc")
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn term(&self, local: &str) -> Iri {
        Iri::new_unchecked(format!("{}{local}", self.namespace))
    }

    pub fn class(&self) -> Iri {
        self.term(&self.class)
    }

    pub fn webid(&self) -> Iri {
        self.term("webid")
    }

    pub fn permission(&self) -> Iri {
        self.term("permission")
    }

    pub fn file(&self) -> Iri {
        self.term("file")
    }

    /// Subjects whose export is suppressed by the owner.
    pub fn export_exclude(&self) -> Iri {
        self.term("exportExclude")
    }

    pub fn decision(&self) -> Iri {
        self.term("decision")
    }

    pub fn decision_for(&self) -> Iri {
        self.term("decisionFor")
    }
}

/// An actor: one named graph, one vocabulary, one storage directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    /// Short name used for storage directories and URLs, e.g. `student`.
    pub name: String,
    /// Graph name and base of every subject the actor mints.
    pub iri: Iri,
    pub vocabulary: Vocabulary,
    /// The WebID the actor authenticates with.
    pub webid: Iri,
}

impl Actor {
    pub fn new(name: &str, iri: Iri, vocabulary: Vocabulary, webid: Iri) -> Result<Self, CasError> {
        let valid = !name.is_empty()
            && name
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-' || b == b'_');
        if !valid {
            return Err(CasError::UnknownActor(format!("invalid actor name {name:?}")));
        }
        if iri.fragment().is_some() {
            return Err(CasError::Rdf(RdfError::InvalidIri {
                iri: iri.into_string(),
                reason: "actor IRI must not have a fragment".into(),
            }));
        }
        Ok(Actor {
            name: name.to_owned(),
            iri,
            vocabulary,
            webid,
        })
    }

    /// The actor's own subject, `<iri#>`.
    pub fn subject(&self) -> Iri {
        self.iri.join_str("#")
    }

    pub fn document_subject(&self, handle: &str) -> Iri {
        self.iri.join_str(&format!("#{handle}"))
    }

    /// The two triples every actor graph starts with.
    pub fn seed_triples(&self) -> Vec<Triple> {
        vec![
            Triple::new(self.subject(), Iri::new_unchecked(rdf::TYPE), self.vocabulary.class()),
            Triple::new(self.subject(), self.vocabulary.webid(), self.webid.clone()),
        ]
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenyReason {
    NotAuthenticated,
    NotAuthorized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessDecision {
    Allowed,
    Denied(DenyReason),
}

impl AccessDecision {
    pub fn is_allowed(self) -> bool {
        self == AccessDecision::Allowed
    }
}

fn require_graph(store: &QuadStore, actor: &Actor) -> Result<(), CasError> {
    if store.contains_graph(&actor.iri) {
        Ok(())
    } else {
        Err(CasError::UnknownActor(actor.iri.to_string()))
    }
}

/// Adds or removes `(actor, voc:permission, webid)`. Returns whether the
/// graph changed.
pub fn set_permission(store: &mut QuadStore, actor: &Actor, webid: &Iri, grant: bool) -> Result<bool, CasError> {
    ops::record("set_permission");
    require_graph(store, actor)?;
    let triple = Triple::new(actor.subject(), actor.vocabulary.permission(), webid.clone());
    Ok(if grant {
        store.insert(&actor.iri, triple)
    } else {
        store.remove(&actor.iri, &triple)
    })
}

/// WebIDs granted read access to the actor's graph.
pub fn permissions(store: &QuadStore, actor: &Actor) -> Vec<Iri> {
    iri_objects(store, actor, &actor.vocabulary.permission())
}

/// The WebIDs the actor's graph names as its own.
pub fn owner_webids(store: &QuadStore, actor: &Actor) -> Vec<Iri> {
    iri_objects(store, actor, &actor.vocabulary.webid())
}

fn iri_objects(store: &QuadStore, actor: &Actor, predicate: &Iri) -> Vec<Iri> {
    store
        .objects(&actor.iri, &Subject::Iri(actor.subject()), predicate)
        .into_iter()
        .filter_map(|t| match t {
            Term::Iri(i) => Some(i),
            _ => None,
        })
        .collect()
}

/// Subjects left out of the actor's configured export.
pub fn export_exclusions(store: &QuadStore, actor: &Actor) -> Vec<Iri> {
    iri_objects(store, actor, &actor.vocabulary.export_exclude())
}

/// Replaces the actor's `voc:exportExclude` list with `subjects`.
pub fn set_export_exclusions(store: &mut QuadStore, actor: &Actor, subjects: &[Iri]) -> Result<(), CasError> {
    require_graph(store, actor)?;
    let predicate = actor.vocabulary.export_exclude();
    for old in export_exclusions(store, actor) {
        store.remove(&actor.iri, &Triple::new(actor.subject(), predicate.clone(), old));
    }
    for s in subjects {
        store.insert(&actor.iri, Triple::new(actor.subject(), predicate.clone(), s.clone()));
    }
    Ok(())
}

/// Graph-level read access: the owner's own WebID and every granted WebID.
pub fn check_access(store: &QuadStore, owner: &Actor, requester: Option<&Iri>) -> AccessDecision {
    ops::record("check_access");
    let Some(requester) = requester else {
        return AccessDecision::Denied(DenyReason::NotAuthenticated);
    };
    let subject = Subject::Iri(owner.subject());
    let object = Term::Iri(requester.clone());
    let listed = |predicate: Iri| {
        !store
            .match_pattern(Some(&owner.iri), Some(&subject), Some(&predicate), Some(&object))
            .is_empty()
    };
    if listed(owner.vocabulary.webid()) || listed(owner.vocabulary.permission()) {
        AccessDecision::Allowed
    } else {
        AccessDecision::Denied(DenyReason::NotAuthorized)
    }
}

/// Stores `<actor#decision-N> voc:decision value ; voc:decisionFor applicant`,
/// replacing any earlier decision for the same applicant. Returns the subject.
pub fn record_decision(store: &mut QuadStore, actor: &Actor, applicant: &Iri, value: &str) -> Result<Iri, CasError> {
    require_graph(store, actor)?;
    let subject = decision_subject(actor, applicant);
    let decision = actor.vocabulary.decision();
    for old in store.objects(&actor.iri, &Subject::Iri(subject.clone()), &decision) {
        store.remove(&actor.iri, &Triple::new(subject.clone(), decision.clone(), old));
    }
    store.insert(&actor.iri, Triple::new(subject.clone(), decision, Literal::string(value)));
    store.insert(
        &actor.iri,
        Triple::new(subject.clone(), actor.vocabulary.decision_for(), applicant.clone()),
    );
    Ok(subject)
}

pub fn decision_subject(actor: &Actor, applicant: &Iri) -> Iri {
    use sha2::{Digest, Sha256};
    let digest = hex::encode(Sha256::digest(applicant.as_str().as_bytes()));
    actor.iri.join_str(&format!("#decision-{}", &digest[..32]))
}

/// Finds the decision recorded for `applicant` in any graph of the given
/// triples, matching the `decision`/`decisionFor` local names.
pub fn find_decision(triples: &[Triple], applicant: &Iri) -> Option<String> {
    let target = Term::Iri(applicant.clone());
    triples
        .iter()
        .filter(|t| t.predicate.local_name() == "decisionFor" && t.object == target)
        .find_map(|link| {
            let ns = &link.predicate.as_str()[..link.predicate.as_str().len() - "decisionFor".len()];
            triples
                .iter()
                .find(|t| {
                    t.subject == link.subject
                        && t.predicate.as_str().strip_prefix(ns) == Some("decision")
                })
                .and_then(|t| t.object.as_literal())
                .map(|l| l.lexical().to_owned())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn student() -> Actor {
        Actor::new(
            "student",
            iri("http://example.org/Student"),
            Vocabulary::student(),
            iri("https://h/webid/student#id"),
        )
        .unwrap()
    }

    fn store_with(actor: &Actor) -> QuadStore {
        let mut store = QuadStore::new();
        store.create_graph(actor.iri.clone());
        for t in actor.seed_triples() {
            store.insert(&actor.iri, t);
        }
        store
    }

    #[test]
    fn export_exclusions_are_replaced() {
        let a = student();
        let mut store = store_with(&a);
        let (x, y) = (iri("http://example.org/Student#x"), iri("http://example.org/Student#y"));
        set_export_exclusions(&mut store, &a, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(export_exclusions(&store, &a).len(), 2);
        set_export_exclusions(&mut store, &a, std::slice::from_ref(&y)).unwrap();
        assert_eq!(export_exclusions(&store, &a), vec![y]);
        set_export_exclusions(&mut store, &a, &[]).unwrap();
        assert!(export_exclusions(&store, &a).is_empty());
        assert_eq!(store.len(), 2);
    }

    #[test]
    fn permission_state_machine() {
        let a = student();
        let own = a.webid.clone();
        let master = iri("http://hmsc.example.org/webid#id");
        let mut store = store_with(&a);
        assert_eq!(check_access(&store, &a, Some(&own)), AccessDecision::Allowed);
        assert_eq!(
            check_access(&store, &a, Some(&master)),
            AccessDecision::Denied(DenyReason::NotAuthorized)
        );
        assert_eq!(check_access(&store, &a, None), AccessDecision::Denied(DenyReason::NotAuthenticated));
        assert!(set_permission(&mut store, &a, &master, true).unwrap());
        assert!(!set_permission(&mut store, &a, &master, true).unwrap());
        assert_eq!(permissions(&store, &a), vec![master.clone()]);
        assert!(check_access(&store, &a, Some(&master)).is_allowed());
        assert!(set_permission(&mut store, &a, &master, false).unwrap());
        assert!(!set_permission(&mut store, &a, &master, false).unwrap());
        assert!(!check_access(&store, &a, Some(&master)).is_allowed());
    }

    #[test]
    fn unknown_graph() {
        let mut store = QuadStore::new();
        let w = Iri::new("http://x/#id").unwrap();
        assert!(matches!(
            set_permission(&mut store, &student(), &w, true),
            Err(CasError::UnknownActor(_))
        ));
    }

    #[test]
    fn permission_on_a_foreign_subject_does_not_count() {
        let a = student();
        let intruder = iri("https://evil/#id");
        let mut store = store_with(&a);
        store.insert(
            &a.iri,
            Triple::new(Iri::new("http://other.org/X#").unwrap(), a.vocabulary.permission(), intruder.clone()),
        );
        assert!(!check_access(&store, &a, Some(&intruder)).is_allowed());
    }

    #[test]
    fn decisions_replace_and_are_found() {
        let master = Actor::new("hmsc", iri("https://h/actors/hmsc"), Vocabulary::hmsc(), iri("https://h/webid/hmsc#id")).unwrap();
        let applicant = iri("https://h/webid/student#id");
        let mut store = store_with(&master);
        record_decision(&mut store, &master, &applicant, "rejected").unwrap();
        let subject = record_decision(&mut store, &master, &applicant, "accepted").unwrap();
        assert!(subject.as_str().starts_with("https://h/actors/hmsc#decision-"));
        let triples: Vec<Triple> = store.graph(&master.iri).unwrap().iter().cloned().collect();
        assert_eq!(find_decision(&triples, &applicant).as_deref(), Some("accepted"));
        assert_eq!(triples.len(), 4);
    }

    #[test]
    fn actor_names_are_restricted() {
        let w = iri("http://x/w#id");
        assert!(Actor::new("../etc", iri("http://x/a"), Vocabulary::student(), w.clone()).is_err());
        assert!(Actor::new("", iri("http://x/a"), Vocabulary::student(), w.clone()).is_err());
        assert!(Actor::new("a", iri("http://x/a#f"), Vocabulary::student(), w).is_err());
    }
}
