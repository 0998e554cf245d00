mod common;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use common::*;
use webcas_core::cas::{AccessDecision, CasError, ContentAccessService, DenyReason};
use webcas_core::rdf::{isomorphic, Dataset, Iri, Literal, Triple};

fn service(dir: &std::path::Path) -> ContentAccessService {
    let dataset = Dataset::open(dir.join("dataset.nq")).unwrap();
    ContentAccessService::open(dataset, dir.join("files"), vec![student_actor(), master_actor()]).unwrap()
}

#[test]
fn state_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let (handle, before) = {
        let svc = service(dir.path());
        let student = svc.actor("student").unwrap().clone();
        svc.dataset()
            .write(|s| Ok::<_, CasError>(s.insert_document(&student.iri, dossier())))
            .unwrap();
        svc.set_permission(&student, &iri(MASTER_WEBID), true).unwrap();
        let rec = svc.store_document(&student, "cv.txt", "text/plain", b"hello").unwrap();
        (rec.handle, svc.snapshot())
    };
    let svc = service(dir.path());
    let after = svc.snapshot();
    for g in before.graph_names() {
        let a: Vec<Triple> = before.graph(g).unwrap().iter().cloned().collect();
        let b: Vec<Triple> = after.graph(g).unwrap().iter().cloned().collect();
        assert!(isomorphic(&a, &b));
    }
    let student = svc.actor("student").unwrap();
    let (_, bytes) = svc.get_document(student, &handle).unwrap();
    assert_eq!(bytes, b"hello");
    assert!(svc.check_access(student, Some(&iri(MASTER_WEBID))).is_allowed());
}

#[test]
fn seeds_make_the_owner_its_own_reader() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path());
    let master = svc.actor("hmsc").unwrap();
    assert_eq!(svc.check_access(master, Some(&iri(MASTER_WEBID))), AccessDecision::Allowed);
    assert_eq!(
        svc.check_access(master, Some(&iri("http://example.org/StudentWebID"))),
        AccessDecision::Denied(DenyReason::NotAuthorized)
    );
    assert_eq!(svc.actor_for_webid(&iri(MASTER_WEBID)).unwrap().name, "hmsc");
}

#[test]
fn identical_bytes_get_distinct_handles() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path());
    let student = svc.actor("student").unwrap();
    let a = svc.store_document(student, "a.pdf", "application/pdf", b"same").unwrap();
    let b = svc.store_document(student, "a.pdf", "application/pdf", b"same").unwrap();
    assert_ne!(a.handle, b.handle);
    assert_eq!(svc.get_document(student, &a.handle).unwrap().1, b"same");
    assert_eq!(svc.get_document(student, &b.handle).unwrap().1, b"same");
    assert_eq!(svc.list_documents(student).len(), 2);
}

#[test]
fn file_sizes_match_disk() {
    let dir = tempfile::tempdir().unwrap();
    let svc = service(dir.path());
    let student = svc.actor("student").unwrap();
    for n in [1usize, 17, 4096, 70_000] {
        svc.store_document(student, "x.bin", "application/octet-stream", &vec![7u8; n]).unwrap();
    }
    for rec in svc.list_documents(student) {
        let on_disk = std::fs::metadata(&rec.server_path).unwrap().len();
        assert_eq!(on_disk, rec.file_size);
    }
}

#[test]
fn readers_never_see_partial_copies() {
    let dataset = Arc::new(Dataset::in_memory(Default::default()));
    let from = iri("http://example.org/From");
    let to = iri("http://example.org/To");
    let batch: Vec<Triple> = (0..200)
        .map(|i| Triple::new(iri(&format!("http://example.org/s{i}")), iri("http://example.org/p"), Literal::integer(i)))
        .collect();
    let done = Arc::new(AtomicBool::new(false));
    let readers: Vec<_> = (0..4)
        .map(|_| {
            let (dataset, done, to) = (dataset.clone(), done.clone(), to.clone());
            std::thread::spawn(move || {
                let mut seen = 0;
                while !done.load(Ordering::Relaxed) {
                    let n = dataset.read().graph(&to).map_or(0, |g| g.len());
                    assert_eq!(n % 200, 0, "observed {n} triples");
                    seen += 1;
                }
                seen
            })
        })
        .collect();
    for round in 0..50 {
        let target: Iri = if round % 2 == 0 { to.clone() } else { iri("http://example.org/Other") };
        dataset
            .write(|s| {
                if round % 4 == 0 {
                    for t in &batch {
                        s.remove(&to, t);
                    }
                }
                Ok::<_, CasError>(s.copy_triples(&from, &batch, &target))
            })
            .unwrap();
    }
    done.store(true, Ordering::Relaxed);
    for r in readers {
        assert!(r.join().unwrap() > 0);
    }
}
