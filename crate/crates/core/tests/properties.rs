mod common;

use std::sync::OnceLock;

use common::*;
use proptest::prelude::*;
use webcas_core::cas::set_permission;
use webcas_core::exchange::{build_export, parse_package, Selection};
use webcas_core::rdf::vocab::{psid, xsd};
use webcas_core::rdf::{
    isomorphic, parse_document, serialize_document, BlankNode, Iri, Literal, QuadStore, Subject, Syntax, Term,
    Triple,
};
use webcas_core::webid::{
    check_interlink, generate_identity, profile_triples, verify_webid, CertificateInfo, Identity, RsaKey,
    StaticFetcher, VerificationResult,
};

fn arb_iri() -> impl Strategy<Value = Iri> {
    prop_oneof![
        (0u8..20).prop_map(|i| iri(&format!("http://example.org/r{i}"))),
        (0u8..10).prop_map(|i| iri(&format!("http://persemid.bfh.ch/vocab/student#p{i}"))),
        "[a-z]{1,6}".prop_map(|s| iri(&format!("https://ex.org/ns/{s}#"))),
        Just(iri("http://example.org/caf\u{e9}/\u{4e16}")),
        Just(iri("urn:uuid:12345678-1234-1234-1234-123456789abc")),
    ]
}

fn arb_blank() -> impl Strategy<Value = BlankNode> {
    (0u8..8).prop_map(|i| BlankNode::new(format!("b{i}")).unwrap())
}

fn arb_literal() -> impl Strategy<Value = Literal> {
    let text = proptest::collection::vec(
        prop_oneof![
            any::<char>(),
            Just('"'),
            Just('\\'),
            Just('\n'),
            Just('\''),
            Just('\u{7f}'),
        ],
        0..12,
    )
    .prop_map(|cs| cs.into_iter().collect::<String>());
    prop_oneof![
        text.clone().prop_map(Literal::string),
        (text.clone(), "[a-z]{1,3}(-[a-z0-9]{1,4})?").prop_map(|(t, l)| Literal::lang(t, l).unwrap()),
        any::<i64>().prop_map(Literal::integer),
        "[+-]?[0-9]{0,4}\\.[0-9]{1,4}".prop_map(|d| Literal::typed(d, iri(xsd::DECIMAL))),
        "[+-]?[0-9]{1,3}(\\.[0-9]{1,3})?[eE][+-]?[0-9]{1,2}".prop_map(|d| Literal::typed(d, iri(xsd::DOUBLE))),
        prop_oneof![Just("true"), Just("false")].prop_map(|b| Literal::typed(b, iri(xsd::BOOLEAN))),
        (text, arb_iri()).prop_map(|(t, dt)| Literal::typed(t, dt)),
        "0[0-9]{0,3}".prop_map(|d| Literal::typed(d, iri(xsd::INTEGER))),
    ]
}

fn arb_triple() -> impl Strategy<Value = Triple> {
    let subject = prop_oneof![
        3 => arb_iri().prop_map(Subject::Iri),
        1 => arb_blank().prop_map(Subject::BlankNode),
    ];
    let object = prop_oneof![
        2 => arb_iri().prop_map(Term::Iri),
        1 => arb_blank().prop_map(Term::BlankNode),
        3 => arb_literal().prop_map(Term::Literal),
    ];
    (subject, arb_iri(), object).prop_map(|(s, p, o)| Triple {
        subject: s,
        predicate: p,
        object: o,
    })
}

fn arb_graph() -> impl Strategy<Value = Vec<Triple>> {
    proptest::collection::vec(arb_triple(), 0..=200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn turtle_round_trip(graph in arb_graph()) {
        let text = serialize_document(&graph, Syntax::Turtle);
        let back = parse_document(&text, None, Syntax::Turtle)
            .unwrap_or_else(|e| panic!("{e}\n{text}"));
        prop_assert!(isomorphic(&graph, &back), "{}", text);
    }

    #[test]
    fn ntriples_round_trip(graph in arb_graph()) {
        let text = serialize_document(&graph, Syntax::NTriples);
        let back = parse_document(&text, None, Syntax::NTriples).unwrap();
        prop_assert!(isomorphic(&graph, &back));
        // N-Triples output is also valid Turtle.
        let as_turtle = parse_document(&text, None, Syntax::Turtle).unwrap();
        prop_assert!(isomorphic(&graph, &as_turtle));
    }

    #[test]
    fn nquads_persistence_round_trip(a in arb_graph(), b in arb_graph()) {
        let mut store = QuadStore::new();
        let (ga, gb) = (iri("http://example.org/A"), iri("http://example.org/B"));
        store.create_graph(ga.clone());
        store.create_graph(gb.clone());
        store.insert_document(&ga, a);
        store.insert_document(&gb, b);
        let loaded = QuadStore::from_nquads(&store.to_nquads()).unwrap();
        for g in [&ga, &gb] {
            let x: Vec<Triple> = store.graph(g).unwrap().iter().cloned().collect();
            let y: Vec<Triple> = loaded.graph(g).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            prop_assert!(isomorphic(&x, &y));
        }
    }

    #[test]
    fn insert_document_keeps_blank_coreference(graph in arb_graph()) {
        let mut store = QuadStore::new();
        let g = iri("http://example.org/G");
        store.insert_document(&g, graph.clone());
        let stored: Vec<Triple> = store.graph(&g).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        prop_assert!(isomorphic(&graph, &stored));
    }
}

struct Fixture {
    ids: Vec<Identity>,
}

fn fixture_ids() -> &'static Fixture {
    static IDS: OnceLock<Fixture> = OnceLock::new();
    IDS.get_or_init(|| Fixture {
        ids: (0..4)
            .map(|i| generate_identity("p", &iri(&format!("https://host/webid/p{i}#id")), 2048).unwrap())
            .collect(),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutated_modulus_is_rejected(which in 0usize..4, pos in any::<prop::sample::Index>(), mask in 1u8..=255) {
        let id = &fixture_ids().ids[which];
        let mut modulus = id.key.modulus().to_vec();
        let i = pos.index(modulus.len());
        modulus[i] ^= mask;
        let fetcher = match RsaKey::new(&modulus, id.key.exponent()) {
            Ok(k) => StaticFetcher::new().with(&id.webid, serialize_document(&profile_triples(&id.webid, &[k]), Syntax::Turtle)),
            // All-zero modulus cannot even be written as a key.
            Err(_) => return Ok(()),
        };
        let info = id.certificate_info().unwrap();
        prop_assert_eq!(verify_webid(&info, &fetcher), VerificationResult::KeyMismatch(id.webid.clone()));
    }

    #[test]
    fn modulus_normalization_is_invariant(which in 0usize..4, zeros in 0usize..4, upper in proptest::collection::vec(any::<bool>(), 512)) {
        let id = &fixture_ids().ids[which];
        let hex: String = "00".repeat(zeros)
            + &id.key.modulus_hex().chars().zip(upper.iter().cycle()).map(|(c, u)| if *u { c.to_ascii_uppercase() } else { c }).collect::<String>();
        let doc = format!(
            "@prefix cert: <http://www.w3.org/ns/auth/cert#> .\n<#id> cert:key [ cert:modulus \"{hex}\"^^<{}> ; cert:exponent {} ] .\n",
            xsd::HEX_BINARY,
            id.key.exponent()
        );
        let fetcher = StaticFetcher::new().with(&id.webid, doc);
        prop_assert!(verify_webid(&id.certificate_info().unwrap(), &fetcher).is_verified());
    }

    #[test]
    fn interlink_is_symmetric(
        pair in (0usize..4, 0usize..4),
        extra_keys in proptest::collection::vec(proptest::collection::vec(0usize..4, 0..3), 4),
        links in proptest::collection::vec(proptest::collection::vec(0usize..4, 0..3), 4),
        published in proptest::collection::vec(any::<bool>(), 4),
    ) {
        let ids = &fixture_ids().ids;
        let mut fetcher = StaticFetcher::new();
        for (i, id) in ids.iter().enumerate() {
            if !published[i] {
                continue;
            }
            let mut keys = vec![id.key.clone()];
            keys.extend(extra_keys[i].iter().map(|k| ids[*k].key.clone()));
            let mut triples = profile_triples(&id.webid, &keys);
            for l in &links[i] {
                triples.push(Triple::new(id.webid.clone(), iri(psid::LINKED_IDENTITY), ids[*l].webid.clone()));
            }
            fetcher.insert(&id.webid, serialize_document(&triples, Syntax::Turtle));
        }
        let a: CertificateInfo = ids[pair.0].certificate_info().unwrap();
        let b: CertificateInfo = ids[pair.1].certificate_info().unwrap();
        prop_assert_eq!(check_interlink(&a, &b, &fetcher), check_interlink(&b, &a, &fetcher));
    }
}

fn arb_actor_data() -> impl Strategy<Value = Vec<Triple>> {
    let predicate = prop_oneof![
        "[a-z]{1,8}".prop_map(|l| iri(&format!("http://persemid.bfh.ch/vocab/student#{l}"))),
        Just(iri("http://persemid.bfh.ch/vocab/student#permission")),
        Just(iri("http://persemid.bfh.ch/vocab/hbsc#permission")),
        Just(iri("https://other.example/acl/permission")),
    ];
    let subject = prop_oneof![
        Just(iri("http://example.org/Student#")),
        "[a-z]{1,4}".prop_map(|s| iri(&format!("http://example.org/Student#{s}"))),
    ];
    let object = prop_oneof![
        arb_iri().prop_map(Term::Iri),
        arb_literal().prop_map(Term::Literal),
    ];
    proptest::collection::vec(
        (subject, predicate, object).prop_map(|(s, p, o)| Triple::new(s, p, o)),
        0..60,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permissions_never_leak(data in arb_actor_data(), grants in proptest::collection::vec(arb_iri(), 0..4)) {
        let actor = student_actor();
        let mut store = QuadStore::new();
        store.create_graph(actor.iri.clone());
        store.insert_document(&actor.iri, data);
        for g in &grants {
            set_permission(&mut store, &actor, g, true).unwrap();
        }
        let root = tempfile::tempdir().unwrap();
        let zip = build_export(&store, &actor, &Selection::All, root.path()).unwrap();
        let package = parse_package(&zip).unwrap();
        prop_assert!(package.data_triples.iter().all(|t| t.predicate.local_name() != "permission"));
        let data_nt = zip_entries(&zip).into_iter().find(|(n, _)| n == "psidimas/data.nt").unwrap().1;
        let text = String::from_utf8(data_nt).unwrap();
        for line in text.lines() {
            let predicate = line.split_whitespace().nth(1).unwrap_or_default();
            prop_assert!(!predicate.trim_end_matches('>').ends_with("permission"), "{}", line);
        }
    }
}
