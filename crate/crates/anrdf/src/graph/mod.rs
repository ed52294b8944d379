//! Annotated triples and graphs with ⊕-merge on insert.

mod closure;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::domain::{Annotation, Domain, DomainError, Semiring};

pub use closure::DEFAULT_MAX_FIRINGS;

pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const SUB_PROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
    pub const DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
    pub const RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
    /// Namespace of skolem IRIs minted for blank nodes.
    pub const SKOLEM: &str = "urn:skolem:";
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A skolem constant; its lexical form is an IRI in the `urn:skolem:` namespace.
    Skolem(Arc<str>),
    Iri(Arc<str>),
    Literal(Arc<str>),
}

impl Term {
    pub fn iri(s: &str) -> Term {
        Term::Iri(s.into())
    }

    pub fn literal(s: &str) -> Term {
        Term::Literal(s.into())
    }

    /// The skolem constant standing for blank node `label` of graph `graph_id`.
    pub fn skolem(graph_id: &str, label: &str) -> Term {
        Term::Skolem(format!("{}{graph_id}:{label}", vocab::SKOLEM).into())
    }

    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(s) | Term::Literal(s) | Term::Skolem(s) => s,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Term::Iri(_) => "iri",
            Term::Literal(_) => "literal",
            Term::Skolem(_) => "skolem",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) | Term::Skolem(s) => write!(f, "<{s}>"),
            Term::Literal(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Triple, GraphError> {
        if !predicate.is_iri() {
            return Err(GraphError::Predicate(predicate.to_string()));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("predicate {0} is not an IRI")]
    Predicate(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("closure stopped after {0} rule firings")]
    IterationCap(usize),
}

pub(crate) type Key = (u32, u32, u32);

/// How unannotated statements are treated when a document is loaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultMode {
    /// Plain statements are annotated with ⊤.
    Top,
    /// Plain statements go to a separate boolean graph.
    Segregate,
}

/// A set of annotated triples over one domain, at most one annotation per triple.
#[derive(Debug, Clone)]
pub struct AnnotatedGraph {
    domain: Domain,
    terms: IndexSet<Term>,
    statements: IndexMap<Key, Annotation>,
    by_s: HashMap<u32, Vec<usize>>,
    by_p: HashMap<u32, Vec<usize>>,
    by_o: HashMap<u32, Vec<usize>>,
    by_ps: HashMap<(u32, u32), Vec<usize>>,
    by_po: HashMap<(u32, u32), Vec<usize>>,
}

impl AnnotatedGraph {
    pub fn new(domain: Domain) -> AnnotatedGraph {
        AnnotatedGraph {
            domain,
            terms: IndexSet::new(),
            statements: IndexMap::new(),
            by_s: HashMap::new(),
            by_p: HashMap::new(),
            by_o: HashMap::new(),
            by_ps: HashMap::new(),
            by_po: HashMap::new(),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Merges `t:λ` into the graph; returns whether the stored value grew.
    pub fn insert(&mut self, t: Triple, annotation: Annotation) -> Result<bool, GraphError> {
        self.domain.check(&annotation)?;
        if !t.predicate.is_iri() {
            return Err(GraphError::Predicate(t.predicate.to_string()));
        }
        let key = (
            self.intern(t.subject),
            self.intern(t.predicate),
            self.intern(t.object),
        );
        Ok(self.merge(key, annotation))
    }

    pub fn get(&self, t: &Triple) -> Option<&Annotation> {
        let key = (
            self.id(&t.subject)?,
            self.id(&t.predicate)?,
            self.id(&t.object)?,
        );
        self.statements.get(&key)
    }

    /// True iff the graph stores `t:μ` with `λ ⪯ μ`; every triple entails `⊥`.
    pub fn entails(&self, t: &Triple, annotation: &Annotation) -> Result<bool, GraphError> {
        self.domain.check(annotation)?;
        if self.domain.is_bottom(annotation) {
            return Ok(true);
        }
        Ok(self
            .get(t)
            .is_some_and(|mu| self.domain.preceq(annotation, mu)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Triple, &Annotation)> + '_ {
        self.statements.iter().map(|(k, v)| (self.triple(*k), v))
    }

    /// Statements sorted by (subject, predicate, object).
    pub fn sorted(&self) -> Vec<(Triple, Annotation)> {
        let mut all: Vec<_> = self.iter().map(|(t, a)| (t, a.clone())).collect();
        all.sort();
        all
    }

    /// Statements matching the given positions; `None` is a wildcard.
    pub fn matching<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = (&'a Term, &'a Term, &'a Term, &'a Annotation)> + 'a> {
        let ids = [s, p, o].map(|t| t.map(|t| self.id(t)));
        if ids.iter().any(|i| matches!(i, Some(None))) {
            return Box::new(std::iter::empty());
        }
        let [s, p, o] = ids.map(|i| i.flatten());
        let candidates: Option<&Vec<usize>> = match (s, p, o) {
            (_, Some(p), Some(o)) => Some(self.by_po.get(&(p, o)).unwrap_or(&EMPTY)),
            (Some(s), Some(p), _) => Some(self.by_ps.get(&(p, s)).unwrap_or(&EMPTY)),
            (Some(s), _, _) => Some(self.by_s.get(&s).unwrap_or(&EMPTY)),
            (_, _, Some(o)) => Some(self.by_o.get(&o).unwrap_or(&EMPTY)),
            (_, Some(p), _) => Some(self.by_p.get(&p).unwrap_or(&EMPTY)),
            _ => None,
        };
        let keep = move |k: &Key| {
            s.is_none_or(|s| s == k.0) && p.is_none_or(|p| p == k.1) && o.is_none_or(|o| o == k.2)
        };
        let resolve = move |(k, v): (&'a Key, &'a Annotation)| {
            (
                self.term(k.0),
                self.term(k.1),
                self.term(k.2),
                v,
            )
        };
        match candidates {
            Some(list) => Box::new(
                list.iter()
                    .map(move |&i| self.statements.get_index(i).expect("indexed"))
                    .filter(move |(k, _)| keep(k))
                    .map(resolve),
            ),
            None => Box::new(self.statements.iter().map(resolve)),
        }
    }

    pub(crate) fn intern(&mut self, t: Term) -> u32 {
        self.terms.insert_full(t).0 as u32
    }

    pub(crate) fn id(&self, t: &Term) -> Option<u32> {
        self.terms.get_index_of(t).map(|i| i as u32)
    }

    pub(crate) fn term(&self, id: u32) -> &Term {
        self.terms.get_index(id as usize).expect("interned term")
    }

    fn triple(&self, k: Key) -> Triple {
        Triple {
            subject: self.term(k.0).clone(),
            predicate: self.term(k.1).clone(),
            object: self.term(k.2).clone(),
        }
    }

    pub(crate) fn merge(&mut self, key: Key, annotation: Annotation) -> bool {
        if self.domain.is_bottom(&annotation) {
            return false;
        }
        if let Some(current) = self.statements.get_mut(&key) {
            let joined = self.domain.oplus(current, &annotation);
            if joined == *current {
                return false;
            }
            *current = joined;
            return true;
        }
        let (idx, _) = self.statements.insert_full(key, annotation);
        let (s, p, o) = key;
        self.by_s.entry(s).or_default().push(idx);
        self.by_p.entry(p).or_default().push(idx);
        self.by_o.entry(o).or_default().push(idx);
        self.by_ps.entry((p, s)).or_default().push(idx);
        self.by_po.entry((p, o)).or_default().push(idx);
        true
    }

    pub(crate) fn key_at(&self, idx: usize) -> (Key, &Annotation) {
        let (k, v) = self.statements.get_index(idx).expect("statement index");
        (*k, v)
    }

    pub(crate) fn index_of(&self, key: &Key) -> Option<usize> {
        self.statements.get_index_of(key)
    }

    pub(crate) fn with_p(&self, p: u32) -> &[usize] {
        self.by_p.get(&p).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn with_ps(&self, p: u32, s: u32) -> &[usize] {
        self.by_ps.get(&(p, s)).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn with_po(&self, p: u32, o: u32) -> &[usize] {
        self.by_po.get(&(p, o)).map_or(&[], Vec::as_slice)
    }
}

static EMPTY: Vec<usize> = Vec::new();

impl PartialEq for AnnotatedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.len() == other.len() && self.sorted() == other.sorted()
    }
}

/// An annotated graph plus, in segregation mode, a boolean side graph holding
/// the plain statements.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: AnnotatedGraph,
    pub side: Option<AnnotatedGraph>,
}

impl Dataset {
    /// Loads annotated and plain statements according to `mode`.
    pub fn load(
        domain: Domain,
        annotated: impl IntoIterator<Item = (Triple, Annotation)>,
        plain: impl IntoIterator<Item = Triple>,
        mode: DefaultMode,
    ) -> Result<Dataset, GraphError> {
        let mut graph = AnnotatedGraph::new(domain);
        for (t, a) in annotated {
            graph.insert(t, a)?;
        }
        let mut side = None;
        for t in plain {
            match mode {
                DefaultMode::Top => {
                    let top = graph.domain().top();
                    graph.insert(t, top)?;
                }
                DefaultMode::Segregate => {
                    side.get_or_insert_with(|| AnnotatedGraph::new(Domain::Boolean))
                        .insert(t, Annotation::Boolean(true))?;
                }
            }
        }
        Ok(Dataset { graph, side })
    }

    pub fn closure(&self, max_firings: usize) -> Result<Dataset, GraphError> {
        Ok(Dataset {
            graph: self.graph.closure_with_cap(max_firings)?,
            side: self
                .side
                .as_ref()
                .map(|g| g.closure_with_cap(max_firings))
                .transpose()?,
        })
    }
}
