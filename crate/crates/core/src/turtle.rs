//! Reading and writing graphs as Turtle or N-Triples.
//!
//! Parsing is delegated to `rio_turtle`; every blank node of the input,
//! labelled or not, is given a new numeric id in document order. Writing is
//! deterministic: triples come out sorted by term order.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use oxiri::Iri as OxIri;
use rio_api::model as rio;
use rio_api::parser::{ParseError, TriplesParser};
use rio_turtle::{NTriplesParser, TurtleError, TurtleParser};

use crate::graph::Graph;
use crate::term::{write_quoted, Literal, Term, Triple};
use crate::vocab::{rdf, xsd, WELL_KNOWN_PREFIXES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Turtle,
    NTriples,
}

impl Format {
    /// `.nt` files are N-Triples, everything else Turtle.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("nt") => Format::NTriples,
            _ => Format::Turtle,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "turtle" | "ttl" => Ok(Format::Turtle),
            "ntriples" | "n-triples" | "nt" => Ok(Format::NTriples),
            other => Err(format!("unknown RDF format `{other}`")),
        }
    }
}

/// A syntax error. Line and column are 1-based; the column counts characters.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseDiagnostic {
    fn at_text(source: &str, needle: &str, message: String) -> Self {
        let offset = source.find(needle).unwrap_or(0);
        let before = &source[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = source[line_start..offset].chars().count() + 1;
        ParseDiagnostic { line, column, message }
    }
}

enum Failure {
    Syntax(TurtleError),
    Content { needle: String, message: String },
}

impl From<TurtleError> for Failure {
    fn from(e: TurtleError) -> Self {
        Failure::Syntax(e)
    }
}

/// Parses `source` into a new graph. On error nothing is returned but the
/// first diagnostic.
pub fn parse(source: &str, format: Format, base_iri: Option<&str>) -> Result<Graph, ParseDiagnostic> {
    let base = match base_iri {
        Some(b) => Some(OxIri::parse(b.to_owned()).map_err(|e| ParseDiagnostic {
            line: 1,
            column: 1,
            message: format!("invalid base IRI `{b}`: {e}"),
        })?),
        None => None,
    };
    let text = match format {
        Format::Turtle => unescape_hash_in_iris(source),
        Format::NTriples => source.to_owned(),
    };

    let mut graph = Graph::new();
    let mut labels: HashMap<String, u64> = HashMap::new();
    let mut on_triple = |t: rio::Triple<'_>| -> Result<(), Failure> {
        let mut blank = |id: &str| {
            let next = labels.len() as u64;
            Term::blank(*labels.entry(id.to_owned()).or_insert(next))
        };
        let subject = match t.subject {
            rio::Subject::NamedNode(n) => Term::iri(n.iri),
            rio::Subject::BlankNode(b) => blank(b.id),
            rio::Subject::Triple(_) => {
                return Err(Failure::Content { needle: "<<".into(), message: "quoted triples are not supported".into() })
            }
        };
        let object = match t.object {
            rio::Term::NamedNode(n) => Term::iri(n.iri),
            rio::Term::BlankNode(b) => blank(b.id),
            rio::Term::Literal(l) => convert_literal(l)?,
            rio::Term::Triple(_) => {
                return Err(Failure::Content { needle: "<<".into(), message: "quoted triples are not supported".into() })
            }
        };
        graph.add(subject, Term::iri(t.predicate.iri), object);
        Ok(())
    };

    let outcome = match format {
        Format::Turtle => TurtleParser::new(text.as_bytes(), base).parse_all(&mut on_triple),
        Format::NTriples => NTriplesParser::new(text.as_bytes()).parse_all(&mut on_triple),
    };
    match outcome {
        Ok(()) => Ok(graph),
        Err(Failure::Syntax(e)) => Err(syntax_diagnostic(&text, &e)),
        Err(Failure::Content { needle, message }) => Err(ParseDiagnostic::at_text(&text, &needle, message)),
    }
}

fn convert_literal(l: rio::Literal<'_>) -> Result<Term, Failure> {
    Ok(match l {
        rio::Literal::Simple { value } => Term::string(value),
        rio::Literal::LanguageTaggedString { value, language } => Term::lang_string(value, language),
        rio::Literal::Typed { value, datatype } if datatype.iri == rdf::LANG_STRING => {
            return Err(Failure::Content {
                needle: "langString".into(),
                message: format!("literal \"{value}\" has datatype rdf:langString but no language tag"),
            })
        }
        rio::Literal::Typed { value, datatype } => Term::Literal(Literal::typed(value, datatype.iri)),
    })
}

fn syntax_diagnostic(text: &str, e: &TurtleError) -> ParseDiagnostic {
    let full = e.to_string();
    let message = full.split(" on line ").next().unwrap_or(&full).to_owned();
    let Some(pos) = e.textual_position() else {
        return ParseDiagnostic { line: 1, column: 1, message };
    };
    // rio counts lines from 1 and bytes within the line from 1
    let line_index = (pos.line_number() as usize).saturating_sub(1);
    let byte_in_line = pos.byte_number().saturating_sub(1) as usize;
    let line_text = text.split('\n').nth(line_index).unwrap_or("");
    let mut cut = byte_in_line.min(line_text.len());
    while !line_text.is_char_boundary(cut) {
        cut -= 1;
    }
    ParseDiagnostic { line: line_index + 1, column: line_text[..cut].chars().count() + 1, message }
}

/// Turns `\#` inside `<...>` into `#`. Such escapes show up in documents
/// copied out of typeset sources; elsewhere the text is left untouched.
fn unescape_hash_in_iris(source: &str) -> String {
    #[derive(PartialEq)]
    enum State {
        Normal,
        Iri,
        Comment,
        Short(char),
        Long(char),
    }
    let chars: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len());
    let mut state = State::Normal;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match state {
            State::Normal => match c {
                '<' => state = State::Iri,
                '#' => state = State::Comment,
                '"' | '\'' if chars.get(i + 1) == Some(&c) && chars.get(i + 2) == Some(&c) => {
                    out.push(c);
                    out.push(c);
                    i += 2;
                    state = State::Long(c);
                }
                '"' | '\'' => state = State::Short(c),
                _ => {}
            },
            State::Iri => match c {
                '\\' if chars.get(i + 1) == Some(&'#') => {
                    out.push('#');
                    i += 2;
                    continue;
                }
                '>' => state = State::Normal,
                _ => {}
            },
            State::Comment => {
                if c == '\n' || c == '\r' {
                    state = State::Normal;
                }
            }
            State::Short(_) | State::Long(_) if c == '\\' => {
                out.push(c);
                if let Some(&next) = chars.get(i + 1) {
                    out.push(next);
                }
                i += 2;
                continue;
            }
            State::Short(q) => {
                if c == q || c == '\n' {
                    state = State::Normal;
                }
            }
            State::Long(q) => {
                if c == q && chars.get(i + 1) == Some(&q) && chars.get(i + 2) == Some(&q) {
                    out.push(c);
                    out.push(c);
                    i += 2;
                    state = State::Normal;
                }
            }
        }
        out.push(c);
        i += 1;
    }
    out
}

/// Writes `graph` in `format`. Output is a function of the triple set only.
pub fn serialize(graph: &Graph, format: Format) -> String {
    match format {
        Format::NTriples => graph.iter().map(|t| format!("{t}\n")).collect(),
        Format::Turtle => write_turtle(graph),
    }
}

fn write_turtle(graph: &Graph) -> String {
    if graph.is_empty() {
        return String::new();
    }
    let mut used = BTreeSet::new();
    let mut body = String::new();
    let mut current: Option<&Term> = None;
    let mut current_predicate: Option<&Term> = None;
    for t in graph.iter() {
        if current == Some(t.subject()) {
            if current_predicate == Some(t.predicate()) {
                body.push_str(", ");
            } else {
                body.push_str(" ;\n    ");
                write_predicate(&mut body, t, &mut used);
                body.push(' ');
            }
        } else {
            if current.is_some() {
                body.push_str(" .\n");
            }
            write_term(&mut body, t.subject(), &mut used);
            body.push(' ');
            write_predicate(&mut body, t, &mut used);
            body.push(' ');
        }
        write_term(&mut body, t.object(), &mut used);
        current = Some(t.subject());
        current_predicate = Some(t.predicate());
    }
    body.push_str(" .\n");

    let mut out = String::new();
    for (prefix, ns) in WELL_KNOWN_PREFIXES {
        if used.contains(prefix) {
            let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
        }
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

fn write_predicate(out: &mut String, t: &Triple, used: &mut BTreeSet<&'static str>) {
    if t.predicate().is(rdf::TYPE) {
        out.push('a');
    } else {
        write_term(out, t.predicate(), used);
    }
}

fn write_term(out: &mut String, term: &Term, used: &mut BTreeSet<&'static str>) {
    match term {
        Term::Iri(iri) => write_iri(out, iri.as_str(), used),
        Term::Blank(b) => {
            let _ = write!(out, "{b}");
        }
        Term::Literal(l) => {
            let _ = write_quoted(out, l.lexical());
            if let Some(lang) = l.lang() {
                let _ = write!(out, "@{lang}");
            } else if !l.has_datatype(xsd::STRING) {
                out.push_str("^^");
                write_iri(out, l.datatype().as_str(), used);
            }
        }
    }
}

fn write_iri(out: &mut String, iri: &str, used: &mut BTreeSet<&'static str>) {
    for (prefix, ns) in WELL_KNOWN_PREFIXES {
        if let Some(local) = iri.strip_prefix(ns) {
            if is_simple_local_name(local) {
                used.insert(prefix);
                let _ = write!(out, "{prefix}:{local}");
                return;
            }
        }
    }
    let _ = write!(out, "{}", crate::term::Iri::new(iri));
}

fn is_simple_local_name(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}
