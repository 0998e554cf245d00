//! Graph isomorphism up to blank node renaming.
//!
//! Blank nodes are first partitioned by iteratively refined neighbourhood
//! signatures; the remaining ambiguity inside each signature class is
//! resolved by a backtracking search for a consistent bijection.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::{BlankNode, Subject, Term, Triple};

/// Returns true if the two graphs are equal after some bijective renaming of
/// blank nodes. Duplicate triples are ignored.
pub fn isomorphic(a: &[Triple], b: &[Triple]) -> bool {
    let a: BTreeSet<&Triple> = a.iter().collect();
    let b: BTreeSet<&Triple> = b.iter().collect();
    if a.len() != b.len() {
        return false;
    }
    let (a_ground, a_blank): (Vec<&Triple>, Vec<&Triple>) = a.iter().partition(|t| !t.has_blank_nodes());
    let (b_ground, b_blank): (Vec<&Triple>, Vec<&Triple>) = b.iter().partition(|t| !t.has_blank_nodes());
    if a_ground != b_ground || a_blank.len() != b_blank.len() {
        return false;
    }
    if a_blank.is_empty() {
        return true;
    }
    let a_nodes = blank_nodes(&a_blank);
    let b_nodes = blank_nodes(&b_blank);
    if a_nodes.len() != b_nodes.len() {
        return false;
    }
    let (a_sig, b_sig) = refine(&a_blank, &a_nodes, &b_blank, &b_nodes);

    let mut a_classes: HashMap<u64, Vec<&BlankNode>> = HashMap::new();
    for n in &a_nodes {
        a_classes.entry(a_sig[n]).or_default().push(n);
    }
    let mut b_classes: HashMap<u64, Vec<&BlankNode>> = HashMap::new();
    for n in &b_nodes {
        b_classes.entry(b_sig[n]).or_default().push(n);
    }
    if a_classes.len() != b_classes.len()
        || a_classes
            .iter()
            .any(|(sig, members)| b_classes.get(sig).map(Vec::len) != Some(members.len()))
    {
        return false;
    }

    // Smallest classes first keeps the search shallow.
    let mut order: Vec<&BlankNode> = a_nodes.iter().copied().collect();
    order.sort_by_key(|n| (a_classes[&a_sig[n]].len(), *n));

    let mut incident: HashMap<&BlankNode, Vec<&Triple>> = HashMap::new();
    for t in &a_blank {
        for n in triple_blanks(t) {
            incident.entry(n).or_default().push(t);
        }
    }
    let b_set: HashSet<&Triple> = b_blank.iter().copied().collect();
    let search = Search {
        order: &order,
        candidates: &b_classes,
        a_sig: &a_sig,
        incident: &incident,
        b_set: &b_set,
    };
    let mut mapping = HashMap::new();
    let mut used = HashSet::new();
    search.run(0, &mut mapping, &mut used)
}

fn blank_nodes<'a>(triples: &[&'a Triple]) -> BTreeSet<&'a BlankNode> {
    triples.iter().flat_map(|t| triple_blanks(t)).collect()
}

fn triple_blanks(t: &Triple) -> impl Iterator<Item = &BlankNode> {
    t.subject.as_blank().into_iter().chain(t.object.as_blank())
}

fn hash_of(value: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

type Signatures<'a> = HashMap<&'a BlankNode, u64>;

fn refine<'a>(
    a: &[&'a Triple],
    a_nodes: &BTreeSet<&'a BlankNode>,
    b: &[&'a Triple],
    b_nodes: &BTreeSet<&'a BlankNode>,
) -> (Signatures<'a>, Signatures<'a>) {
    let mut a_sig: Signatures = a_nodes.iter().map(|n| (*n, 0)).collect();
    let mut b_sig: Signatures = b_nodes.iter().map(|n| (*n, 0)).collect();
    let mut classes = (0, 0);
    for _ in 0..=a_nodes.len() {
        a_sig = step(a, &a_sig);
        b_sig = step(b, &b_sig);
        let next = (distinct(&a_sig), distinct(&b_sig));
        if next == classes {
            break;
        }
        classes = next;
    }
    (a_sig, b_sig)
}

fn distinct(sig: &Signatures) -> usize {
    sig.values().collect::<HashSet<_>>().len()
}

fn step<'a>(triples: &[&'a Triple], current: &Signatures<'a>) -> Signatures<'a> {
    let mut edges: HashMap<&BlankNode, Vec<u64>> = HashMap::new();
    let term_sig = |t: &Term| match t {
        Term::BlankNode(b) => hash_of(("blank", current[b])),
        other => hash_of(("term", other)),
    };
    for t in triples {
        if let Subject::BlankNode(s) = &t.subject {
            let self_loop = t.object.as_blank() == Some(s);
            edges
                .entry(s)
                .or_default()
                .push(hash_of(("out", &t.predicate, term_sig(&t.object), self_loop)));
        }
        if let Term::BlankNode(o) = &t.object {
            let subject_sig = match &t.subject {
                Subject::BlankNode(b) => hash_of(("blank", current[b])),
                Subject::Iri(i) => hash_of(("term", i)),
            };
            edges
                .entry(o)
                .or_default()
                .push(hash_of(("in", &t.predicate, subject_sig)));
        }
    }
    current
        .iter()
        .map(|(n, old)| {
            let mut e = edges.remove(n).unwrap_or_default();
            e.sort_unstable();
            (*n, hash_of((old, e)))
        })
        .collect()
}

struct Search<'s, 'a> {
    order: &'s [&'a BlankNode],
    candidates: &'s HashMap<u64, Vec<&'a BlankNode>>,
    a_sig: &'s Signatures<'a>,
    incident: &'s HashMap<&'a BlankNode, Vec<&'a Triple>>,
    b_set: &'s HashSet<&'a Triple>,
}

impl<'a> Search<'_, 'a> {
    fn run(
        &self,
        depth: usize,
        mapping: &mut HashMap<&'a BlankNode, &'a BlankNode>,
        used: &mut HashSet<&'a BlankNode>,
    ) -> bool {
        let Some(&node) = self.order.get(depth) else {
            return true;
        };
        for &candidate in &self.candidates[&self.a_sig[node]] {
            if used.contains(candidate) {
                continue;
            }
            mapping.insert(node, candidate);
            used.insert(candidate);
            if self.consistent(node, mapping) && self.run(depth + 1, mapping, used) {
                return true;
            }
            mapping.remove(node);
            used.remove(candidate);
        }
        false
    }

    /// Every triple touching `node` whose blank nodes are all mapped must
    /// exist in the target graph.
    fn consistent(&self, node: &'a BlankNode, mapping: &HashMap<&'a BlankNode, &'a BlankNode>) -> bool {
        let Some(triples) = self.incident.get(node) else {
            return true;
        };
        triples.iter().all(|t| {
            let subject = match &t.subject {
                Subject::BlankNode(b) => match mapping.get(b) {
                    Some(m) => Subject::BlankNode((*m).clone()),
                    None => return true,
                },
                s => s.clone(),
            };
            let object = match &t.object {
                Term::BlankNode(b) => match mapping.get(b) {
                    Some(m) => Term::BlankNode((*m).clone()),
                    None => return true,
                },
                o => o.clone(),
            };
            let mapped = Triple {
                subject,
                predicate: t.predicate.clone(),
                object,
            };
            self.b_set.contains(&mapped)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_ntriples;

    fn nt(s: &str) -> Vec<Triple> {
        parse_ntriples(s).unwrap()
    }

    #[test]
    fn renamed_blank_nodes_are_isomorphic() {
        let a = nt("_:a <http://p> _:b .\n_:b <http://q> \"1\" .\n");
        let b = nt("_:x <http://p> _:y .\n_:y <http://q> \"1\" .\n");
        assert!(isomorphic(&a, &b));
    }

    #[test]
    fn structure_differences_are_detected() {
        let a = nt("_:a <http://p> _:b .\n_:b <http://q> \"1\" .\n");
        let b = nt("_:x <http://p> _:y .\n_:x <http://q> \"1\" .\n");
        assert!(!isomorphic(&a, &b));
        let c = nt("<http://s> <http://p> \"1\" .\n");
        let d = nt("<http://s> <http://p> \"2\" .\n");
        assert!(!isomorphic(&c, &d));
    }

    #[test]
    fn symmetric_rings_need_backtracking() {
        // Two 3-cycles vs one 6-cycle: every node has identical local signature.
        let two = nt("_:a <http://p> _:b .\n_:b <http://p> _:c .\n_:c <http://p> _:a .\n_:d <http://p> _:e .\n_:e <http://p> _:f .\n_:f <http://p> _:d .\n");
        let six = nt("_:a <http://p> _:b .\n_:b <http://p> _:c .\n_:c <http://p> _:d .\n_:d <http://p> _:e .\n_:e <http://p> _:f .\n_:f <http://p> _:a .\n");
        assert!(!isomorphic(&two, &six));
        let two_renamed = nt("_:f <http://p> _:d .\n_:d <http://p> _:e .\n_:e <http://p> _:f .\n_:c <http://p> _:a .\n_:a <http://p> _:b .\n_:b <http://p> _:c .\n");
        assert!(isomorphic(&two, &two_renamed));
    }

    #[test]
    fn empty_graphs() {
        assert!(isomorphic(&[], &[]));
    }
}
