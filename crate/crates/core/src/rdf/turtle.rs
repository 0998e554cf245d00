//! Turtle reader and writer.
//!
//! The reader covers the list-free subset of Turtle: `@prefix`/`@base` and their
//! SPARQL-style forms, the `a` keyword, predicate-object and object lists,
//! blank node property lists, typed and language-tagged literals, and the
//! numeric and boolean shorthands. Collections are rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use super::chars::{is_local_escape, is_pn_chars, is_pn_chars_base, is_pn_chars_u};
use super::cursor::Cursor;
use super::term::write_quoted;
use super::vocab::{rdf, xsd};
use super::{BlankNode, Iri, Literal, RdfError, Subject, Term, Triple};

/// Parses a Turtle document. Relative IRIs are resolved against `base`
/// (or a later `@base` directive).
pub fn parse_turtle(text: &str, base: Option<&Iri>) -> Result<Vec<Triple>, RdfError> {
    let base = match base {
        Some(b) => Some(
            oxiri::Iri::parse(b.as_str().to_owned()).map_err(|e| RdfError::InvalidIri {
                iri: b.as_str().to_owned(),
                reason: e.to_string(),
            })?,
        ),
        None => None,
    };
    let mut parser = Parser {
        cursor: Cursor::new(text),
        base,
        prefixes: HashMap::new(),
        labels: HashMap::new(),
        used_labels: HashSet::new(),
        next_anon: 0,
        triples: Vec::new(),
    };
    parser.document()?;
    Ok(parser.triples)
}

struct Parser {
    cursor: Cursor,
    base: Option<oxiri::Iri<String>>,
    prefixes: HashMap<String, String>,
    labels: HashMap<String, BlankNode>,
    used_labels: HashSet<String>,
    next_anon: usize,
    triples: Vec<Triple>,
}

impl Parser {
    fn document(&mut self) -> Result<(), RdfError> {
        loop {
            self.cursor.skip_ws();
            if self.cursor.at_end() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> Result<(), RdfError> {
        let c = &self.cursor;
        if c.starts_with("@prefix") {
            self.cursor.advance(7);
            self.prefix_directive()?;
            self.expect_dot()
        } else if c.starts_with("@base") {
            self.cursor.advance(5);
            self.base_directive()?;
            self.expect_dot()
        } else if c.starts_with_keyword("prefix") {
            self.cursor.advance(6);
            self.prefix_directive()
        } else if c.starts_with_keyword("base") {
            self.cursor.advance(4);
            self.base_directive()
        } else {
            self.triples_statement()?;
            self.expect_dot()
        }
    }

    fn expect_dot(&mut self) -> Result<(), RdfError> {
        self.cursor.skip_ws();
        if self.cursor.eat('.') {
            Ok(())
        } else {
            Err(self.cursor.expected("'.'"))
        }
    }

    fn prefix_directive(&mut self) -> Result<(), RdfError> {
        self.cursor.skip_ws();
        let name = self.pn_prefix()?;
        if !self.cursor.eat(':') {
            return Err(self.cursor.expected("':' after prefix name"));
        }
        self.cursor.skip_ws();
        let iri = self.iriref()?;
        self.prefixes.insert(name, iri.into_string());
        Ok(())
    }

    fn base_directive(&mut self) -> Result<(), RdfError> {
        self.cursor.skip_ws();
        let iri = self.iriref()?;
        self.base = Some(oxiri::Iri::parse(iri.into_string()).map_err(|e| self.cursor.error(e.to_string()))?);
        Ok(())
    }

    fn triples_statement(&mut self) -> Result<(), RdfError> {
        match self.cursor.peek() {
            Some('[') => {
                let (node, had_properties) = self.blank_node_property_list()?;
                self.cursor.skip_ws();
                let subject = Subject::BlankNode(node);
                if !had_properties || self.cursor.peek() != Some('.') {
                    self.predicate_object_list(&subject)?;
                }
                Ok(())
            }
            Some('(') => Err(self.collection_error()),
            _ => {
                let subject = self.subject()?;
                self.cursor.skip_ws();
                self.predicate_object_list(&subject)
            }
        }
    }

    fn collection_error(&self) -> RdfError {
        let (line, column) = self.cursor.location(self.cursor.pos());
        RdfError::UnsupportedCollection { line, column }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        match self.cursor.peek() {
            Some('_') if self.cursor.peek_at(1) == Some(':') => Ok(Subject::BlankNode(self.labelled_blank()?)),
            Some('"' | '\'') => Err(self.cursor.error("a literal cannot be a subject")),
            _ => Ok(Subject::Iri(self.iri()?)),
        }
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> Result<(), RdfError> {
        loop {
            let predicate = self.verb()?;
            self.cursor.skip_ws();
            self.object_list(subject, &predicate)?;
            self.cursor.skip_ws();
            if !self.cursor.eat(';') {
                return Ok(());
            }
            self.cursor.skip_ws();
            while self.cursor.eat(';') {
                self.cursor.skip_ws();
            }
            if matches!(self.cursor.peek(), Some('.' | ']') | None) {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, subject: &Subject, predicate: &Iri) -> Result<(), RdfError> {
        loop {
            let object = self.object()?;
            self.triples.push(Triple {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            self.cursor.skip_ws();
            if !self.cursor.eat(',') {
                return Ok(());
            }
            self.cursor.skip_ws();
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        if self.cursor.peek() == Some('a') && self.is_exact_keyword("a") {
            self.cursor.advance(1);
            return Ok(Iri::new_unchecked(rdf::TYPE));
        }
        match self.cursor.peek() {
            Some('_' | '[' | '"' | '\'') => Err(self.cursor.expected("predicate IRI")),
            _ => self.iri(),
        }
    }

    fn is_exact_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        let continues = match self.cursor.peek_at(n) {
            Some(':') => true,
            Some('.') => self.cursor.peek_at(n + 1).is_some_and(|c| is_pn_chars(c) || c == '.'),
            Some(c) => is_pn_chars(c),
            None => false,
        };
        self.cursor.starts_with(kw) && !continues
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.cursor.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('_') if self.cursor.peek_at(1) == Some(':') => Ok(Term::BlankNode(self.labelled_blank()?)),
            Some('[') => Ok(Term::BlankNode(self.blank_node_property_list()?.0)),
            Some('(') => Err(self.collection_error()),
            Some('"' | '\'') => Ok(Term::Literal(self.rdf_literal()?)),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => Ok(Term::Literal(self.numeric()?)),
            Some('.') if self.cursor.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                Ok(Term::Literal(self.numeric()?))
            }
            Some('t') if self.is_exact_keyword("true") => {
                self.cursor.advance(4);
                Ok(Term::Literal(Literal::typed("true", Iri::new_unchecked(xsd::BOOLEAN))))
            }
            Some('f') if self.is_exact_keyword("false") => {
                self.cursor.advance(5);
                Ok(Term::Literal(Literal::typed("false", Iri::new_unchecked(xsd::BOOLEAN))))
            }
            None => Err(self.cursor.expected("object")),
            _ => Ok(Term::Iri(self.iri()?)),
        }
    }

    /// Parses `[ ... ]` or `[]`; the flag reports whether properties were present.
    fn blank_node_property_list(&mut self) -> Result<(BlankNode, bool), RdfError> {
        if !self.cursor.eat('[') {
            return Err(self.cursor.expected("'['"));
        }
        self.cursor.skip_ws();
        let node = self.fresh_blank();
        if self.cursor.eat(']') {
            return Ok((node, false));
        }
        let subject = Subject::BlankNode(node.clone());
        self.predicate_object_list(&subject)?;
        self.cursor.skip_ws();
        if !self.cursor.eat(']') {
            return Err(self.cursor.expected("']'"));
        }
        Ok((node, true))
    }

    fn rdf_literal(&mut self) -> Result<Literal, RdfError> {
        let value = self.cursor.read_string(true, true)?;
        match self.cursor.peek() {
            Some('@') => {
                let start = self.cursor.pos();
                let tag = self.cursor.read_lang_tag()?;
                Literal::lang(value, tag).map_err(|e| self.cursor.error_at(start, e.to_string()))
            }
            Some('^') if self.cursor.peek_at(1) == Some('^') => {
                self.cursor.advance(2);
                let datatype = self.iri()?;
                Ok(Literal::typed(value, datatype))
            }
            _ => Ok(Literal::string(value)),
        }
    }

    fn numeric(&mut self) -> Result<Literal, RdfError> {
        let start = self.cursor.pos();
        let mut lexical = String::new();
        if let Some(sign @ ('+' | '-')) = self.cursor.peek() {
            lexical.push(sign);
            self.cursor.bump();
        }
        let int_digits = self.digits(&mut lexical);
        let mut datatype = xsd::INTEGER;
        if self.cursor.peek() == Some('.') && self.cursor.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.cursor.bump();
            lexical.push('.');
            self.digits(&mut lexical);
            datatype = xsd::DECIMAL;
        } else if int_digits > 0 && self.cursor.peek() == Some('.') && self.exponent_ahead(1) {
            self.cursor.bump();
            lexical.push('.');
        } else if int_digits == 0 {
            return Err(self.cursor.error_at(start, "malformed number"));
        }
        if self.exponent_ahead(0) {
            lexical.push(self.cursor.bump().unwrap_or('e'));
            if let Some(sign @ ('+' | '-')) = self.cursor.peek() {
                lexical.push(sign);
                self.cursor.bump();
            }
            self.digits(&mut lexical);
            datatype = xsd::DOUBLE;
        }
        Ok(Literal::typed(lexical, Iri::new_unchecked(datatype)))
    }

    fn digits(&mut self, out: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.cursor.peek().filter(char::is_ascii_digit) {
            out.push(c);
            self.cursor.bump();
            n += 1;
        }
        n
    }

    fn exponent_ahead(&self, offset: usize) -> bool {
        let c = &self.cursor;
        if !matches!(c.peek_at(offset), Some('e' | 'E')) {
            return false;
        }
        match c.peek_at(offset + 1) {
            Some('+' | '-') => c.peek_at(offset + 2).is_some_and(|d| d.is_ascii_digit()),
            Some(d) => d.is_ascii_digit(),
            None => false,
        }
    }

    fn iri(&mut self) -> Result<Iri, RdfError> {
        if self.cursor.peek() == Some('<') {
            self.iriref()
        } else {
            self.prefixed_name()
        }
    }

    fn iriref(&mut self) -> Result<Iri, RdfError> {
        let start = self.cursor.pos();
        let raw = self.cursor.read_iriref()?;
        self.resolve(raw, start)
    }

    fn resolve(&self, raw: String, start: usize) -> Result<Iri, RdfError> {
        if oxiri::Iri::parse(raw.as_str()).is_ok() {
            return Ok(Iri::new_unchecked(raw));
        }
        match &self.base {
            Some(base) => base
                .resolve(&raw)
                .map(|i| Iri::new_unchecked(i.into_inner()))
                .map_err(|e| self.cursor.error_at(start, format!("cannot resolve <{raw}>: {e}"))),
            None => {
                let (line, column) = self.cursor.location(start);
                Err(RdfError::RelativeIriWithoutBase { iri: raw, line, column })
            }
        }
    }

    fn pn_prefix(&mut self) -> Result<String, RdfError> {
        let mut name = String::new();
        match self.cursor.peek() {
            Some(c) if is_pn_chars_base(c) => {
                name.push(c);
                self.cursor.bump();
            }
            _ => return Ok(name),
        }
        loop {
            match self.cursor.peek() {
                Some(c) if is_pn_chars(c) => {
                    name.push(c);
                    self.cursor.bump();
                }
                Some('.') if self.cursor.peek_at(1).is_some_and(|c| is_pn_chars(c) || c == '.') => {
                    name.push('.');
                    self.cursor.bump();
                }
                _ => return Ok(name),
            }
        }
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let start = self.cursor.pos();
        let prefix = self.pn_prefix()?;
        if !self.cursor.eat(':') {
            return Err(self.cursor.error_at(start, "expected IRI or prefixed name"));
        }
        let namespace = self
            .prefixes
            .get(&prefix)
            .cloned()
            .ok_or_else(|| self.cursor.error_at(start, format!("undefined prefix '{prefix}:'")))?;
        let local = self.pn_local()?;
        let full = format!("{namespace}{local}");
        self.resolve(full, start)
    }

    fn pn_local(&mut self) -> Result<String, RdfError> {
        let mut local = String::new();
        let mut first = true;
        loop {
            let Some(c) = self.cursor.peek() else {
                return Ok(local);
            };
            let accepted = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()
            } else {
                is_pn_chars(c) || c == ':'
            };
            if accepted {
                local.push(c);
                self.cursor.bump();
            } else if c == '%' {
                let (h1, h2) = (self.cursor.peek_at(1), self.cursor.peek_at(2));
                match (h1, h2) {
                    (Some(a), Some(b)) if a.is_ascii_hexdigit() && b.is_ascii_hexdigit() => {
                        local.push('%');
                        local.push(a);
                        local.push(b);
                        self.cursor.advance(3);
                    }
                    _ => return Err(self.cursor.error("invalid percent escape in local name")),
                }
            } else if c == '\\' {
                match self.cursor.peek_at(1) {
                    Some(e) if is_local_escape(e) => {
                        local.push(e);
                        self.cursor.advance(2);
                    }
                    _ => return Err(self.cursor.error("invalid escape in local name")),
                }
            } else if c == '.' && !first && self.local_continues_after_dots() {
                local.push('.');
                self.cursor.bump();
            } else {
                return Ok(local);
            }
            first = false;
        }
    }

    fn local_continues_after_dots(&self) -> bool {
        let mut i = 0;
        while self.cursor.peek_at(i) == Some('.') {
            i += 1;
        }
        self.cursor
            .peek_at(i)
            .is_some_and(|c| is_pn_chars(c) || c == ':' || c == '%' || c == '\\')
    }

    fn labelled_blank(&mut self) -> Result<BlankNode, RdfError> {
        let label = self.cursor.read_blank_label()?;
        if let Some(node) = self.labels.get(&label) {
            return Ok(node.clone());
        }
        let node = if self.used_labels.contains(&label) {
            self.fresh_blank()
        } else {
            self.used_labels.insert(label.clone());
            BlankNode::new_unchecked(label.clone())
        };
        self.labels.insert(label, node.clone());
        Ok(node)
    }

    fn fresh_blank(&mut self) -> BlankNode {
        loop {
            let label = format!("b{}", self.next_anon);
            self.next_anon += 1;
            if self.used_labels.insert(label.clone()) {
                return BlankNode::new_unchecked(label);
            }
        }
    }
}

/// Serializes triples as Turtle, grouping by subject and inlining blank
/// nodes that are referenced exactly once.
pub fn write_turtle(triples: &[Triple], prefixes: &[(&str, &str)]) -> String {
    let mut by_subject: BTreeMap<&Subject, Vec<&Triple>> = BTreeMap::new();
    let mut object_refs: HashMap<&BlankNode, usize> = HashMap::new();
    let unique: BTreeSet<&Triple> = triples.iter().collect();
    for t in &unique {
        by_subject.entry(&t.subject).or_default().push(t);
        if let Term::BlankNode(b) = &t.object {
            *object_refs.entry(b).or_default() += 1;
        }
    }
    let mut writer = TurtleWriter {
        prefixes,
        by_subject: &by_subject,
        inlinable: object_refs
            .iter()
            .filter(|(_, &n)| n == 1)
            .map(|(b, _)| *b)
            .collect(),
        emitted: HashSet::new(),
        used_prefixes: BTreeSet::new(),
        body: String::new(),
    };
    for subject in by_subject.keys() {
        match subject {
            Subject::Iri(_) => writer.subject_block(subject),
            Subject::BlankNode(b) if !writer.inlinable.contains(b) => writer.subject_block(subject),
            Subject::BlankNode(_) => {}
        }
    }
    // Blank nodes only reachable through reference cycles.
    for subject in by_subject.keys() {
        if let Subject::BlankNode(b) = subject {
            if !writer.emitted.contains(b) {
                writer.subject_block(subject);
            }
        }
    }
    let mut out = String::new();
    for &i in &writer.used_prefixes {
        let (p, ns) = prefixes[i];
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    if !writer.used_prefixes.is_empty() && !writer.body.is_empty() {
        out.push('\n');
    }
    out.push_str(&writer.body);
    out
}

struct TurtleWriter<'a> {
    prefixes: &'a [(&'a str, &'a str)],
    by_subject: &'a BTreeMap<&'a Subject, Vec<&'a Triple>>,
    inlinable: HashSet<&'a BlankNode>,
    emitted: HashSet<&'a BlankNode>,
    used_prefixes: BTreeSet<usize>,
    body: String,
}

impl<'a> TurtleWriter<'a> {
    fn subject_block(&mut self, subject: &'a Subject) {
        if let Subject::BlankNode(b) = subject {
            self.emitted.insert(b);
        }
        let head = match subject {
            Subject::Iri(i) => self.iri(i),
            Subject::BlankNode(b) => b.to_string(),
        };
        let triples = self.by_subject.get(subject).cloned().unwrap_or_default();
        let list = self.predicate_object_list(&triples, 1);
        let _ = writeln!(self.body, "{head} {list} .");
    }

    fn predicate_object_list(&mut self, triples: &[&'a Triple], depth: usize) -> String {
        let mut groups: Vec<(&'a Iri, Vec<&'a Term>)> = Vec::new();
        let mut sorted: Vec<&'a Triple> = triples.to_vec();
        sorted.sort_by_key(|t| (t.predicate.as_str() != rdf::TYPE, &t.predicate, &t.object));
        for t in sorted {
            match groups.last_mut() {
                Some((p, objects)) if *p == &t.predicate => objects.push(&t.object),
                _ => groups.push((&t.predicate, vec![&t.object])),
            }
        }
        let mut out = String::new();
        for (i, (predicate, objects)) in groups.into_iter().enumerate() {
            if i > 0 {
                out.push_str(" ;\n");
                out.push_str(&indent(depth));
            }
            if predicate.as_str() == rdf::TYPE {
                out.push('a');
            } else {
                out.push_str(&self.iri(predicate));
            }
            out.push(' ');
            let rendered: Vec<String> = objects.into_iter().map(|o| self.object(o, depth)).collect();
            out.push_str(&rendered.join(", "));
        }
        out
    }

    fn object(&mut self, term: &'a Term, depth: usize) -> String {
        match term {
            Term::Iri(i) => self.iri(i),
            Term::Literal(l) => self.literal(l),
            Term::BlankNode(b) => {
                if !self.inlinable.contains(b) || self.emitted.contains(b) {
                    return b.to_string();
                }
                self.emitted.insert(b);
                let key = Subject::BlankNode(b.clone());
                match self.by_subject.get(&key) {
                    None => "[]".to_owned(),
                    Some(triples) => {
                        let triples = triples.clone();
                        let list = self.predicate_object_list(&triples, depth + 1);
                        format!("[\n{}{}\n{}]", indent(depth + 1), list, indent(depth))
                    }
                }
            }
        }
    }

    fn iri(&mut self, iri: &Iri) -> String {
        let best = self
            .prefixes
            .iter()
            .enumerate()
            .filter(|(_, (_, ns))| iri.as_str().starts_with(ns) && is_simple_local(&iri.as_str()[ns.len()..]))
            .max_by_key(|(_, (_, ns))| ns.len());
        match best {
            Some((i, (p, ns))) => {
                self.used_prefixes.insert(i);
                format!("{p}:{}", &iri.as_str()[ns.len()..])
            }
            None => iri.to_string(),
        }
    }

    fn literal(&mut self, literal: &Literal) -> String {
        if let Some(lang) = literal.language() {
            let mut s = String::new();
            let _ = write_quoted(&mut s, literal.lexical());
            return format!("{s}@{lang}");
        }
        let lexical = literal.lexical();
        let bare = match literal.datatype().as_str() {
            xsd::INTEGER => is_integer_lexical(lexical),
            xsd::DECIMAL => is_decimal_lexical(lexical),
            xsd::DOUBLE => is_double_lexical(lexical),
            xsd::BOOLEAN => lexical == "true" || lexical == "false",
            _ => false,
        };
        if bare {
            return lexical.to_owned();
        }
        let mut s = String::new();
        let _ = write_quoted(&mut s, lexical);
        if !literal.is_plain_string() {
            s.push_str("^^");
            s.push_str(&self.iri(literal.datatype()));
        }
        s
    }
}

fn indent(depth: usize) -> String {
    "    ".repeat(depth)
}

fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer_lexical(s: &str) -> bool {
    all_digits(strip_sign(s))
}

fn is_decimal_lexical(s: &str) -> bool {
    match strip_sign(s).split_once('.') {
        Some((int, frac)) => (int.is_empty() || all_digits(int)) && all_digits(frac),
        None => false,
    }
}

fn is_double_lexical(s: &str) -> bool {
    let Some(i) = s.find(['e', 'E']) else {
        return false;
    };
    let (mantissa, exp) = (strip_sign(&s[..i]), strip_sign(&s[i + 1..]));
    if !all_digits(exp) {
        return false;
    }
    match mantissa.split_once('.') {
        Some((int, frac)) => {
            (all_digits(int) && (frac.is_empty() || all_digits(frac))) || (int.is_empty() && all_digits(frac))
        }
        None => all_digits(mantissa),
    }
}
