//! The `.anrdf` document format.
//!
//! ```text
//! @domain temporal .
//! @prefix ex: <http://example.org/> .
//! (ex:chadHurley rdf:type ex:youtubeEmp) : {[2005,2010]} .
//! ex:a ex:b ex:c .
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use super::cursor::{is_name_char, is_name_start, is_number_char, Cursor};
use super::literal::parse_annotation;
use super::SyntaxError;
use crate::domain::{Annotation, Domain};
use crate::graph::{vocab, AnnotatedGraph, Dataset, DefaultMode, GraphError, Term, Triple};

/// Namespace used for `:name` and bare names unless the document rebinds `:`.
pub const DEFAULT_NAMESPACE: &str = "http://example.org/";

/// Prefix name (without the colon) to namespace IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap(BTreeMap<String, String>);

impl Default for PrefixMap {
    fn default() -> Self {
        let mut m = BTreeMap::new();
        m.insert(String::new(), DEFAULT_NAMESPACE.to_string());
        m.insert("rdf".into(), vocab::RDF.to_string());
        m.insert("rdfs".into(), vocab::RDFS.to_string());
        PrefixMap(m)
    }
}

impl PrefixMap {
    pub fn insert(&mut self, prefix: &str, namespace: &str) {
        self.0.insert(prefix.to_string(), namespace.to_string());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.0.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Shortest prefixed form of a term, falling back to its full form.
    pub fn compact(&self, term: &Term) -> String {
        if let Term::Iri(iri) = term {
            let best = self
                .0
                .iter()
                .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
                .filter(|(_, ns)| {
                    let local = &iri[ns.len()..];
                    !local.is_empty() && local.chars().all(is_name_char)
                })
                .max_by_key(|(_, ns)| ns.len());
            if let Some((prefix, ns)) = best {
                return format!("{prefix}:{}", &iri[ns.len()..]);
            }
        }
        term.to_string()
    }
}

/// A parsed document; the domain comes from the caller or the `@domain` header.
#[derive(Debug, Clone)]
pub struct Document {
    pub domain: Domain,
    pub prefixes: PrefixMap,
    pub annotated: Vec<(Triple, Annotation)>,
    pub plain: Vec<Triple>,
}

impl Document {
    pub fn into_dataset(self, mode: DefaultMode) -> Result<Dataset, GraphError> {
        Dataset::load(self.domain, self.annotated, self.plain, mode)
    }
}

/// Parses a document. `domain` overrides any `@domain` header; blank nodes
/// become skolem constants scoped by `graph_id`.
pub fn parse_document(
    text: &str,
    domain: Option<&Domain>,
    graph_id: &str,
) -> Result<Document, SyntaxError> {
    let mut cur = Cursor::new(text);
    let mut prefixes = PrefixMap::default();
    let mut active: Option<Domain> = domain.cloned();
    let mut annotated = Vec::new();
    let mut plain = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        let start = cur.pos();
        if cur.eat_keyword("@domain") || cur.eat_keyword("@domix") {
            cur.skip_ws();
            let id_at = cur.pos();
            let id = read_domain_id(&mut cur);
            let parsed = Domain::from_id(id).map_err(|e| cur.error_at(id_at, e.to_string()))?;
            if domain.is_none() {
                active = Some(parsed);
            }
        } else if cur.eat_keyword("@prefix") {
            cur.skip_ws();
            let name = cur.take_while(is_name_char).to_string();
            cur.expect(":")?;
            cur.skip_ws();
            let ns = parse_iri_ref(&mut cur)?;
            prefixes.insert(&name, &ns);
        } else if cur.peek() == Some('(') {
            cur.bump();
            let triple = parse_triple(&mut cur, &prefixes, graph_id, start)?;
            cur.skip_ws();
            cur.expect(")")?;
            cur.skip_ws();
            if cur.eat(":") {
                cur.skip_ws();
                let d = active.as_ref().ok_or_else(|| {
                    cur.error("annotated statement before any @domain declaration")
                })?;
                let value = parse_annotation(d, &mut cur)?;
                annotated.push((triple, value));
            } else {
                plain.push(triple);
            }
        } else {
            plain.push(parse_triple(&mut cur, &prefixes, graph_id, start)?);
        }
        cur.skip_ws();
        cur.expect(".")?;
    }
    Ok(Document {
        domain: active.unwrap_or(Domain::Boolean),
        prefixes,
        annotated,
        plain,
    })
}

/// The domain id named by the first `@domain` header, if the document starts
/// with one (after comments and prefix declarations).
pub fn declared_domain(text: &str) -> Option<String> {
    let mut cur = Cursor::new(text);
    loop {
        cur.skip_ws();
        if cur.eat_keyword("@domain") || cur.eat_keyword("@domix") {
            cur.skip_ws();
            return Some(read_domain_id(&mut cur).to_string());
        }
        if !cur.eat_keyword("@prefix") {
            return None;
        }
        cur.take_while(|c| c != '>');
        cur.eat(">");
        cur.skip_ws();
        cur.eat(".");
    }
}

fn read_domain_id<'a>(cur: &mut Cursor<'a>) -> &'a str {
    let rest = cur.rest();
    let mut depth = 0i32;
    let mut end = rest.len();
    for (i, c) in rest.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if depth == 0 && (c.is_whitespace() || c == '.') => {
                // A dot only ends the id when followed by whitespace or the end.
                if c == '.' && !rest[i + 1..].chars().next().is_none_or(char::is_whitespace) {
                    continue;
                }
                end = i;
                break;
            }
            _ => {}
        }
    }
    let id = &rest[..end];
    cur.reset(cur.pos() + end);
    id
}

fn parse_triple(
    cur: &mut Cursor,
    prefixes: &PrefixMap,
    graph_id: &str,
    start: usize,
) -> Result<Triple, SyntaxError> {
    let mut terms = Vec::with_capacity(3);
    for _ in 0..3 {
        cur.skip_ws();
        terms.push(parse_term(cur, prefixes, graph_id)?);
    }
    let o = terms.pop().expect("three terms");
    let p = terms.pop().expect("three terms");
    let s = terms.pop().expect("three terms");
    Triple::new(s, p, o).map_err(|e| cur.error_at(start, e.to_string()))
}

pub(crate) fn parse_iri_ref(cur: &mut Cursor) -> Result<String, SyntaxError> {
    cur.expect("<")?;
    let iri = cur.take_while(|c| c != '>' && !c.is_whitespace());
    cur.expect(">")?;
    Ok(iri.to_string())
}

pub(crate) fn parse_string(cur: &mut Cursor) -> Result<String, SyntaxError> {
    cur.expect("\"")?;
    let mut out = String::new();
    loop {
        match cur.bump() {
            None => return Err(cur.error("unterminated string literal")),
            Some('"') => return Ok(out),
            Some('\\') => match cur.bump() {
                Some('n') => out.push('\n'),
                Some('r') => out.push('\r'),
                Some('t') => out.push('\t'),
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                _ => return Err(cur.error("invalid escape in string literal")),
            },
            Some(c) => out.push(c),
        }
    }
}

/// Bare names with a fixed meaning.
fn vocabulary_word(word: &str) -> Option<&'static str> {
    Some(match word {
        "type" => vocab::TYPE,
        "sc" => vocab::SUB_CLASS_OF,
        "sp" => vocab::SUB_PROPERTY_OF,
        "dom" => vocab::DOMAIN,
        "range" => vocab::RANGE,
        _ => return None,
    })
}

/// Parses `<iri>`, `prefix:local`, `:local`, a bare name, `"literal"`, a
/// number (read as a literal) or `_:label`.
pub(crate) fn parse_term(
    cur: &mut Cursor,
    prefixes: &PrefixMap,
    graph_id: &str,
) -> Result<Term, SyntaxError> {
    let start = cur.pos();
    match cur.peek() {
        Some('<') => {
            let iri = parse_iri_ref(cur)?;
            Ok(if iri.starts_with(vocab::SKOLEM) {
                Term::Skolem(iri.into())
            } else {
                Term::iri(&iri)
            })
        }
        Some('"') => parse_string(cur).map(|s| Term::literal(&s)),
        Some('_') if cur.peek_nth(1) == Some(':') => {
            cur.eat("_:");
            let label = cur.take_while(is_name_char);
            if label.is_empty() {
                return Err(cur.error("empty blank node label"));
            }
            Ok(Term::skolem(graph_id, label))
        }
        Some(':') => {
            cur.bump();
            let local = cur.take_while(is_name_char);
            let ns = prefixes
                .get("")
                .ok_or_else(|| cur.error_at(start, "the empty prefix is not bound"))?;
            Ok(Term::iri(&format!("{ns}{local}")))
        }
        Some(c) if is_name_start(c) => {
            let name = cur.take_while(is_name_char);
            if cur.peek() == Some(':') {
                cur.bump();
                let local = cur.take_while(is_name_char);
                let ns = prefixes
                    .get(name)
                    .ok_or_else(|| cur.error_at(start, format!("undeclared prefix `{name}:`")))?;
                return Ok(Term::iri(&format!("{ns}{local}")));
            }
            if let Some(iri) = vocabulary_word(name) {
                return Ok(Term::iri(iri));
            }
            let ns = prefixes.get("").unwrap_or(DEFAULT_NAMESPACE);
            Ok(Term::iri(&format!("{ns}{name}")))
        }
        Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => {
            let token = cur.take_while(is_number_char);
            Ok(Term::literal(token))
        }
        _ => Err(cur.error(format!("expected a term, found {}", cur.describe()))),
    }
}

fn write_header(out: &mut String, domain: &Domain, prefixes: &PrefixMap) {
    let _ = writeln!(out, "@domain {} .", domain.id());
    for (p, ns) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
}

fn write_triple(out: &mut String, t: &Triple, prefixes: &PrefixMap) {
    let _ = write!(
        out,
        "{} {} {}",
        prefixes.compact(&t.subject),
        prefixes.compact(&t.predicate),
        prefixes.compact(&t.object)
    );
}

/// Serializes a graph with statements sorted by (subject, predicate, object).
pub fn serialize_graph(graph: &AnnotatedGraph, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    write_header(&mut out, graph.domain(), prefixes);
    write_annotated(&mut out, graph, prefixes);
    out
}

fn write_annotated(out: &mut String, graph: &AnnotatedGraph, prefixes: &PrefixMap) {
    for (t, a) in graph.sorted() {
        out.push('(');
        write_triple(out, &t, prefixes);
        let _ = writeln!(out, ") : {a} .");
    }
}

/// Serializes a dataset; side-graph statements are written unannotated.
pub fn serialize_dataset(ds: &Dataset, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    write_header(&mut out, ds.graph.domain(), prefixes);
    write_annotated(&mut out, &ds.graph, prefixes);
    if let Some(side) = &ds.side {
        for (t, _) in side.sorted() {
            write_triple(&mut out, &t, prefixes);
            out.push_str(" .\n");
        }
    }
    out
}
