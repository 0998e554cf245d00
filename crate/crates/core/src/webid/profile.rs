use super::RsaKey;
use crate::rdf::vocab::{cert, foaf, psid, rdf, xsd};
use crate::rdf::{parse_document, BlankNode, Iri, Literal, RdfError, Subject, Syntax, Term, Triple};

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

/// The keys a FOAF profile publishes for one WebID.
#[derive(Debug, Clone)]
pub struct WebIdProfile {
    pub webid: Iri,
    pub keys: Vec<RsaKey>,
    pub source_graph: Vec<Triple>,
}

impl WebIdProfile {
    /// Parses a Turtle profile document, resolving relative IRIs against the
    /// document part of `webid`.
    pub fn parse(turtle: &str, webid: &Iri) -> Result<Self, ProfileError> {
        let base = webid.document();
        let triples = parse_document(turtle, Some(&base), Syntax::Turtle)?;
        Ok(Self::from_triples(webid.clone(), triples))
    }

    /// Collects every `cert:key` of `webid` that has an `xsd:hexBinary`
    /// modulus and an `xsd:integer` exponent. Malformed keys are skipped.
    pub fn from_triples(webid: Iri, triples: Vec<Triple>) -> Self {
        let subject = Subject::Iri(webid.clone());
        let mut keys = Vec::new();
        for t in &triples {
            if t.subject != subject || t.predicate.as_str() != cert::KEY {
                continue;
            }
            let Some(node) = t.object.to_subject() else {
                continue;
            };
            let moduli = values(&triples, &node, cert::MODULUS, xsd::HEX_BINARY);
            let exponents = values(&triples, &node, cert::EXPONENT, xsd::INTEGER);
            for m in &moduli {
                for e in &exponents {
                    let Some(e) = parse_integer(e) else {
                        tracing::debug!(%webid, exponent = %e, "skipping key with unusable exponent");
                        continue;
                    };
                    match RsaKey::from_hex(m, e) {
                        Ok(key) if !keys.contains(&key) => keys.push(key),
                        Ok(_) => {}
                        Err(reason) => tracing::debug!(%webid, "skipping key: {reason}"),
                    }
                }
            }
        }
        WebIdProfile {
            webid,
            keys,
            source_graph: triples,
        }
    }

    pub fn has_key(&self, key: &RsaKey) -> bool {
        self.keys.contains(key)
    }

    /// WebIDs this profile's subject declares itself linked to.
    pub fn linked_identities(&self) -> Vec<Iri> {
        let subject = Subject::Iri(self.webid.clone());
        self.source_graph
            .iter()
            .filter(|t| t.subject == subject && t.predicate.as_str() == psid::LINKED_IDENTITY)
            .filter_map(|t| t.object.as_iri().cloned())
            .collect()
    }
}

fn values<'a>(triples: &'a [Triple], subject: &Subject, predicate: &str, datatype: &str) -> Vec<&'a str> {
    triples
        .iter()
        .filter(|t| &t.subject == subject && t.predicate.as_str() == predicate)
        .filter_map(|t| t.object.as_literal())
        .filter(|l| l.datatype().as_str() == datatype)
        .map(Literal::lexical)
        .collect()
}

fn parse_integer(lexical: &str) -> Option<u64> {
    let digits = lexical.trim().strip_prefix('+').unwrap_or(lexical.trim());
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Builds a FOAF profile for `webid` with one blank-node `cert:key` per key.
pub fn profile_triples(webid: &Iri, keys: &[RsaKey]) -> Vec<Triple> {
    let iri = |s: &str| Iri::new_unchecked(s);
    let mut out = vec![Triple::new(webid.clone(), iri(rdf::TYPE), iri(foaf::PERSON))];
    for (i, key) in keys.iter().enumerate() {
        let node = BlankNode::new_unchecked(format!("key{i}"));
        out.push(Triple::new(webid.clone(), iri(cert::KEY), node.clone()));
        out.push(Triple::new(node.clone(), iri(rdf::TYPE), iri(cert::RSA_PUBLIC_KEY)));
        out.push(Triple::new(
            node.clone(),
            iri(cert::MODULUS),
            Literal::typed(key.modulus_hex(), iri(xsd::HEX_BINARY)),
        ));
        out.push(Triple::new(
            node,
            iri(cert::EXPONENT),
            Term::Literal(Literal::typed(key.exponent().to_string(), iri(xsd::INTEGER))),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROFILE: &str = r#"@prefix cert: <http://www.w3.org/ns/auth/cert#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
<#id> a foaf:Person;
  cert:key [ a cert:RSAPublicKey;
    cert:modulus "00C2BCF492680F885D"^^xsd:hexBinary;
    cert:exponent 65537 ;
  ] ;
  cert:key [ cert:modulus "abcdef"^^xsd:hexBinary; cert:exponent 3 ] .
"#;

    #[test]
    fn keys_are_collected_and_normalized() {
        let webid = Iri::new("https://h/webid/student#id").unwrap();
        let p = WebIdProfile::parse(PROFILE, &webid).unwrap();
        assert_eq!(p.keys.len(), 2);
        assert_eq!(p.keys[0].modulus_hex(), "c2bcf492680f885d");
        assert_eq!(p.keys[0].exponent(), 65537);
        assert_eq!(p.keys[1].exponent(), 3);
    }

    #[test]
    fn keys_of_other_subjects_are_ignored() {
        let other = Iri::new("https://h/webid/student#other").unwrap();
        assert!(WebIdProfile::parse(PROFILE, &other).unwrap().keys.is_empty());
    }

    #[test]
    fn untyped_modulus_is_skipped() {
        let webid = Iri::new("https://h/p#id").unwrap();
        let doc = "<#id> <http://www.w3.org/ns/auth/cert#key> [ <http://www.w3.org/ns/auth/cert#modulus> \"c2bc\" ; <http://www.w3.org/ns/auth/cert#exponent> 3 ] .";
        assert!(WebIdProfile::parse(doc, &webid).unwrap().keys.is_empty());
    }

    #[test]
    fn generated_triples_round_trip() {
        let webid = Iri::new("https://h/p#id").unwrap();
        let key = RsaKey::from_hex("c2bcf492", 65537).unwrap();
        let triples = profile_triples(&webid, std::slice::from_ref(&key));
        assert_eq!(triples.len(), 5);
        let p = WebIdProfile::from_triples(webid, triples);
        assert_eq!(p.keys, vec![key]);
    }
}
