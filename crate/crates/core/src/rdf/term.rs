use std::fmt;

use super::vocab::{rdf, xsd};
use super::RdfError;

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    /// Parses `value` as an absolute IRI.
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        match oxiri::Iri::parse(value.as_str()) {
            Ok(_) => Ok(Iri(value)),
            Err(e) => Err(RdfError::InvalidIri {
                iri: value,
                reason: e.to_string(),
            }),
        }
    }

    /// Wraps a string that is already known to be an absolute IRI.
    pub(crate) fn new_unchecked(value: impl Into<String>) -> Self {
        Iri(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// The IRI with its fragment (if any) removed.
    pub fn document(&self) -> Iri {
        match self.0.find('#') {
            Some(i) => Iri(self.0[..i].to_owned()),
            None => self.clone(),
        }
    }

    pub fn fragment(&self) -> Option<&str> {
        self.0.find('#').map(|i| &self.0[i + 1..])
    }

    pub fn scheme(&self) -> &str {
        self.0.split(':').next().unwrap_or_default()
    }

    /// Local name after the last `#` or `/`.
    pub fn local_name(&self) -> &str {
        match self.0.rfind(['#', '/']) {
            Some(i) => &self.0[i + 1..],
            None => &self.0,
        }
    }

    /// Concatenates `suffix` onto this IRI.
    pub fn join_str(&self, suffix: &str) -> Iri {
        Iri(format!("{}{}", self.0, suffix))
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for c in self.0.chars() {
            match c {
                '\u{00}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                    if (c as u32) <= 0xFFFF {
                        write!(f, "\\u{:04X}", c as u32)?
                    } else {
                        write!(f, "\\U{:08X}", c as u32)?
                    }
                }
                _ => write!(f, "{c}")?,
            }
        }
        write!(f, ">")
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A blank node, identified by a label local to its dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        if is_valid_blank_label(&label) {
            Ok(BlankNode(label))
        } else {
            Err(RdfError::InvalidBlankNode(label))
        }
    }

    pub(crate) fn new_unchecked(label: impl Into<String>) -> Self {
        BlankNode(label.into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

pub(crate) fn is_valid_blank_label(label: &str) -> bool {
    let chars: Vec<char> = label.chars().collect();
    let Some((&first, rest)) = chars.split_first() else {
        return false;
    };
    if !(super::chars::is_pn_chars_u(first) || first.is_ascii_digit()) {
        return false;
    }
    if let Some(&last) = rest.last() {
        if last == '.' {
            return false;
        }
    }
    rest.iter()
        .all(|&c| super::chars::is_pn_chars(c) || c == '.')
}

/// A literal value with its datatype and optional language tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::new_unchecked(xsd::STRING),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// A language-tagged string. Tags are stored lowercase.
    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Result<Self, RdfError> {
        let language = language.into();
        if !is_valid_lang_tag(&language) {
            return Err(RdfError::InvalidLanguageTag(language));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::new_unchecked(rdf::LANG_STRING),
            language: Some(language.to_ascii_lowercase()),
        })
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(xsd::INTEGER))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_plain_string(&self) -> bool {
        self.language.is_none() && self.datatype.as_str() == xsd::STRING
    }
}

pub(crate) fn is_valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    !primary.is_empty()
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, value: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in value.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            '\u{08}' => f.write_str("\\b")?,
            '\u{0C}' => f.write_str("\\f")?,
            c if (c as u32) < 0x20 || c == '\u{7F}' => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_quoted(f, &self.lexical)?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if self.datatype.as_str() != xsd::STRING {
            write!(f, "^^{}", self.datatype)
        } else {
            Ok(())
        }
    }
}

/// Any RDF term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankNode> {
        match self {
            Term::BlankNode(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    /// Converts to a subject term; literals cannot be subjects.
    pub fn to_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(i) => Some(Subject::Iri(i.clone())),
            Term::BlankNode(b) => Some(Subject::BlankNode(b.clone())),
            Term::Literal(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::BlankNode(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<BlankNode> for Term {
    fn from(value: BlankNode) -> Self {
        Term::BlankNode(value)
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

impl From<Subject> for Term {
    fn from(value: Subject) -> Self {
        match value {
            Subject::Iri(i) => Term::Iri(i),
            Subject::BlankNode(b) => Term::BlankNode(b),
        }
    }
}

/// The subject position of a triple: an IRI or a blank node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Iri(Iri),
    BlankNode(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(i) => Some(i),
            Subject::BlankNode(_) => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankNode> {
        match self {
            Subject::BlankNode(b) => Some(b),
            Subject::Iri(_) => None,
        }
    }
}

impl PartialEq<Term> for Subject {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Subject::Iri(a), Term::Iri(b)) => a == b,
            (Subject::BlankNode(a), Term::BlankNode(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(i) => i.fmt(f),
            Subject::BlankNode(b) => b.fmt(f),
        }
    }
}

impl From<Iri> for Subject {
    fn from(value: Iri) -> Self {
        Subject::Iri(value)
    }
}

impl From<BlankNode> for Subject {
    fn from(value: BlankNode) -> Self {
        Subject::BlankNode(value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    pub fn has_blank_nodes(&self) -> bool {
        matches!(self.subject, Subject::BlankNode(_)) || self.object.is_blank()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple together with the named graph holding it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub graph: Iri,
    pub triple: Triple,
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.triple;
        write!(f, "{} {} {} {} .", t.subject, t.predicate, t.object, self.graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_iri_is_rejected() {
        assert!(Iri::new("#id").is_err());
        assert!(Iri::new("http://example.org/a#id").is_ok());
    }

    #[test]
    fn iri_parts() {
        let iri = Iri::new("https://host/webid/student#id").unwrap();
        assert_eq!(iri.document().as_str(), "https://host/webid/student");
        assert_eq!(iri.fragment(), Some("id"));
        assert_eq!(iri.local_name(), "id");
        assert_eq!(iri.scheme(), "https");
        let p = Iri::new("http://persemid.bfh.ch/vocab/student#permission").unwrap();
        assert_eq!(p.local_name(), "permission");
    }

    #[test]
    fn literal_display_escapes() {
        let l = Literal::string("a \"b\"\n\\");
        assert_eq!(l.to_string(), r#""a \"b\"\n\\""#);
        let n = Literal::integer(65537);
        assert_eq!(
            n.to_string(),
            "\"65537\"^^<http://www.w3.org/2001/XMLSchema#integer>"
        );
        let fr = Literal::lang("chat", "FR").unwrap();
        assert_eq!(fr.to_string(), "\"chat\"@fr");
        assert!(Literal::lang("x", "e n").is_err());
    }

    #[test]
    fn blank_labels() {
        assert!(BlankNode::new("b0").is_ok());
        assert!(BlankNode::new("0a.b").is_ok());
        assert!(BlankNode::new("a.").is_err());
        assert!(BlankNode::new("").is_err());
        assert!(BlankNode::new("a b").is_err());
    }
}
