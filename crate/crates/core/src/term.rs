use std::fmt;
use std::sync::Arc;

use crate::vocab::{rdf, xsd};

/// An absolute IRI, compared by codepoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(iri: impl Into<Arc<str>>) -> Self {
        Iri(iri.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for c in self.0.chars() {
            match c {
                '\u{0}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                    write!(f, "\\u{:04X}", c as u32)?
                }
                _ => write!(f, "{c}")?,
            }
        }
        f.write_str(">")
    }
}

impl PartialEq<str> for Iri {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for Iri {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

/// A blank node. Identifiers are local to the graphs that share an allocator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(pub u64);

impl BlankNode {
    pub fn id(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:b{}", self.0)
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:b{}", self.0)
    }
}

/// A literal: lexical form, datatype IRI and, for `rdf:langString` only, a
/// lowercase language tag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    lang: Option<Arc<str>>,
}

impl Literal {
    /// # Panics
    ///
    /// If `datatype` is `rdf:langString`; use [`Literal::lang_string`].
    pub fn typed(lexical: impl Into<Arc<str>>, datatype: impl Into<Arc<str>>) -> Self {
        let datatype = Iri::new(datatype);
        assert!(
            datatype != rdf::LANG_STRING,
            "language-tagged strings need a language tag"
        );
        Literal { lexical: lexical.into(), datatype, lang: None }
    }

    pub fn string(lexical: impl Into<Arc<str>>) -> Self {
        Literal::typed(lexical, xsd::STRING)
    }

    /// The tag is stored lowercased.
    pub fn lang_string(lexical: impl Into<Arc<str>>, lang: &str) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::new(rdf::LANG_STRING),
            lang: Some(lang.to_ascii_lowercase().into()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    pub fn is_lang_string(&self) -> bool {
        self.lang.is_some()
    }

    pub fn has_datatype(&self, datatype: &str) -> bool {
        self.datatype == datatype
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_quoted(f, &self.lexical)?;
        match &self.lang {
            Some(lang) => write!(f, "@{lang}"),
            None if self.datatype == xsd::STRING => Ok(()),
            None => write!(f, "^^{}", self.datatype),
        }
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// An RDF term. Ordering is IRIs, then blank nodes, then literals; within a
/// kind IRIs sort by codepoints, blanks by id, literals by
/// (lexical, datatype, lang).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<Arc<str>>) -> Self {
        Term::Iri(Iri::new(iri))
    }

    pub fn blank(id: u64) -> Self {
        Term::Blank(BlankNode(id))
    }

    pub fn string(lexical: impl Into<Arc<str>>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn lang_string(lexical: impl Into<Arc<str>>, lang: &str) -> Self {
        Term::Literal(Literal::lang_string(lexical, lang))
    }

    pub fn typed(lexical: impl Into<Arc<str>>, datatype: impl Into<Arc<str>>) -> Self {
        Term::Literal(Literal::typed(lexical, datatype))
    }

    pub fn integer(value: i64) -> Self {
        Term::typed(value.to_string(), xsd::INTEGER)
    }

    pub fn boolean(value: bool) -> Self {
        Term::typed(if value { "true" } else { "false" }, xsd::BOOLEAN)
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// IRIs and blank nodes, the terms allowed in subject position.
    pub fn is_node(&self) -> bool {
        !self.is_literal()
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri.as_str()),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<BlankNode> {
        match self {
            Term::Blank(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    /// True for the IRI `iri` and nothing else.
    pub fn is(&self, iri: &str) -> bool {
        self.as_iri() == Some(iri)
    }

    /// True for a literal with exactly this datatype.
    pub fn is_literal_of(&self, datatype: &str) -> bool {
        self.as_literal().is_some_and(|l| l.has_datatype(datatype))
    }

    /// `"true"^^xsd:boolean` or `"1"^^xsd:boolean`.
    pub fn is_true_literal(&self) -> bool {
        self.as_literal()
            .is_some_and(|l| l.has_datatype(xsd::BOOLEAN) && matches!(l.lexical(), "true" | "1"))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// N-Triples syntax.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => fmt::Display::fmt(iri, f),
            Term::Blank(b) => fmt::Display::fmt(b, f),
            Term::Literal(l) => fmt::Display::fmt(l, f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

/// A triple. Subjects are IRIs or blank nodes and predicates are IRIs;
/// [`Triple::new`] enforces both.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    /// # Panics
    ///
    /// If the subject is a literal or the predicate is not an IRI.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Triple::try_new(subject, predicate, object).expect("malformed triple")
    }

    pub fn try_new(subject: Term, predicate: Term, object: Term) -> Option<Self> {
        (subject.is_node() && predicate.is_iri()).then_some(Triple { subject, predicate, object })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
