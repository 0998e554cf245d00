//! N-Triples and N-Quads: one statement per line, absolute IRIs only.

use super::cursor::Cursor;
use super::{BlankNode, Iri, Literal, Quad, RdfError, Subject, Term, Triple};

pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, RdfError> {
    let mut out = Vec::new();
    parse_lines(text, false, |triple, _| out.push(triple))?;
    Ok(out)
}

/// Parses N-Quads. Every statement must carry a graph name.
pub fn parse_nquads(text: &str) -> Result<Vec<Quad>, RdfError> {
    let mut out = Vec::new();
    let mut missing_graph = None;
    parse_lines(text, true, |triple, graph| match graph {
        Some(graph) => out.push(Quad { graph, triple }),
        None => {
            if missing_graph.is_none() {
                missing_graph = Some(triple);
            }
        }
    })?;
    if let Some(t) = missing_graph {
        return Err(RdfError::MissingGraphName(t.to_string()));
    }
    Ok(out)
}

pub fn write_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

pub fn write_nquads<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> String {
    let mut out = String::new();
    for q in quads {
        out.push_str(&q.to_string());
        out.push('\n');
    }
    out
}

/// Parses one term in N-Triples syntax, e.g. `<http://a/b>`, `_:x` or
/// `"1"^^<http://www.w3.org/2001/XMLSchema#integer>`. Surrounding whitespace is
/// ignored; anything else after the term is an error.
pub fn parse_term(text: &str) -> Result<Term, RdfError> {
    let mut c = Cursor::new(text);
    c.skip_ws();
    let term = match c.peek() {
        Some('<') => Term::Iri(absolute_iri(&mut c)?),
        Some('_') => Term::BlankNode(BlankNode::new_unchecked(c.read_blank_label()?)),
        Some('"') => Term::Literal(literal(&mut c)?),
        _ => return Err(c.expected("term")),
    };
    c.skip_ws();
    if !c.at_end() {
        return Err(c.expected("end of input"));
    }
    Ok(term)
}

fn parse_lines(
    text: &str,
    quads: bool,
    mut emit: impl FnMut(Triple, Option<Iri>),
) -> Result<(), RdfError> {
    let mut c = Cursor::new(text);
    loop {
        c.skip_ws();
        if c.at_end() {
            return Ok(());
        }
        let subject = match c.peek() {
            Some('<') => Subject::Iri(absolute_iri(&mut c)?),
            Some('_') => Subject::BlankNode(BlankNode::new_unchecked(c.read_blank_label()?)),
            _ => return Err(c.expected("subject")),
        };
        c.skip_inline_ws();
        let predicate = absolute_iri(&mut c)?;
        c.skip_inline_ws();
        let object = match c.peek() {
            Some('<') => Term::Iri(absolute_iri(&mut c)?),
            Some('_') => Term::BlankNode(BlankNode::new_unchecked(c.read_blank_label()?)),
            Some('"') => Term::Literal(literal(&mut c)?),
            _ => return Err(c.expected("object")),
        };
        c.skip_inline_ws();
        let graph = if quads && c.peek() == Some('<') {
            let g = absolute_iri(&mut c)?;
            c.skip_inline_ws();
            Some(g)
        } else {
            None
        };
        if !c.eat('.') {
            return Err(c.expected("'.'"));
        }
        c.skip_inline_ws();
        if c.peek() == Some('#') {
            while c.peek().is_some_and(|ch| ch != '\n') {
                c.bump();
            }
        }
        match c.peek() {
            None | Some('\n' | '\r') => {}
            _ => return Err(c.expected("end of line")),
        }
        emit(Triple { subject, predicate, object }, graph);
    }
}

fn absolute_iri(c: &mut Cursor) -> Result<Iri, RdfError> {
    let start = c.pos();
    let raw = c.read_iriref()?;
    if oxiri::Iri::parse(raw.as_str()).is_err() {
        let (line, column) = c.location(start);
        return Err(RdfError::RelativeIriWithoutBase { iri: raw, line, column });
    }
    Ok(Iri::new_unchecked(raw))
}

fn literal(c: &mut Cursor) -> Result<Literal, RdfError> {
    let value = c.read_string(false, false)?;
    match c.peek() {
        Some('@') => {
            let start = c.pos();
            let tag = c.read_lang_tag()?;
            Literal::lang(value, tag).map_err(|e| c.error_at(start, e.to_string()))
        }
        Some('^') => {
            if !(c.eat('^') && c.eat('^')) {
                return Err(c.expected("'^^'"));
            }
            Ok(Literal::typed(value, absolute_iri(c)?))
        }
        _ => Ok(Literal::string(value)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_blank_object_is_one_line() {
        let t = Triple::new(
            Iri::new("http://a/s").unwrap(),
            Iri::new("http://a/p").unwrap(),
            BlankNode::new("k").unwrap(),
        );
        let out = write_ntriples([&t]);
        assert_eq!(out.lines().count(), 1);
        assert_eq!(parse_ntriples(&out).unwrap(), vec![t]);
    }

    #[test]
    fn rejects_relative_iris_and_prefixed_names() {
        assert!(matches!(
            parse_ntriples("<#a> <http://p> <http://o> ."),
            Err(RdfError::RelativeIriWithoutBase { .. })
        ));
        assert!(parse_ntriples("<http://a> a <http://o> .").is_err());
        assert!(parse_ntriples("<http://a> <http://p> <http://o> . <http://a> <http://p> <http://o> .").is_err());
    }

    #[test]
    fn single_terms() {
        assert_eq!(parse_term(" <http://a/b> ").unwrap(), Term::Iri(Iri::new("http://a/b").unwrap()));
        assert_eq!(parse_term("\"x\"@en").unwrap(), Term::Literal(Literal::lang("x", "en").unwrap()));
        assert!(parse_term("_:b1").unwrap().is_blank());
        assert!(parse_term("<rel>").is_err());
        assert!(parse_term("<http://a/b> <http://a/c>").is_err());
        assert!(parse_term("").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n<http://a> <http://p> \"x\"@en . # trailing\n<http://a> <http://p> \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n";
        let t = parse_ntriples(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].object.as_literal().unwrap().language(), Some("en"));
    }

    #[test]
    fn nquads_require_graph() {
        let ok = parse_nquads("<http://a> <http://p> <http://o> <http://g> .\n").unwrap();
        assert_eq!(ok[0].graph.as_str(), "http://g");
        assert!(matches!(
            parse_nquads("<http://a> <http://p> <http://o> .\n"),
            Err(RdfError::MissingGraphName(_))
        ));
    }
}
