//! Independent reference implementations and random generators shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use anrdf::anql::{
    Builtin, Expr, Filter, Label, Pattern, Solution, TermPattern, TriplePattern, Value, Variable,
};
use anrdf::domain::{Annotation, Domain, Provenance, Rational, Sample, Semiring, TemporalValue, TimePoint};
use anrdf::graph::{vocab, AnnotatedGraph, Term, Triple};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EX: &str = "http://example.org/";

/// Contents of a file under the repository's `data/` directory.
pub fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ex(name: &str) -> Term {
    Term::iri(&format!("{EX}{name}"))
}

pub fn sp() -> Term {
    Term::iri(vocab::SUB_PROPERTY_OF)
}
pub fn sc() -> Term {
    Term::iri(vocab::SUB_CLASS_OF)
}
pub fn ty() -> Term {
    Term::iri(vocab::TYPE)
}
pub fn dom() -> Term {
    Term::iri(vocab::DOMAIN)
}
pub fn range() -> Term {
    Term::iri(vocab::RANGE)
}

pub fn triple(s: Term, p: Term, o: Term) -> Triple {
    Triple::new(s, p, o).expect("IRI predicate")
}

// ---------------------------------------------------------------------------
// Random ρdf graphs

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [Term]) -> &'a Term {
    items.choose(rng).expect("non-empty pool")
}

/// Up to `max` distinct triples mixing schema statements, typing, plain data
/// and a few odd shapes (vocabulary in object position, blank nodes, literals).
pub fn random_triples<R: Rng>(rng: &mut R, max: usize) -> Vec<Triple> {
    let classes: Vec<Term> = (0..4).map(|i| ex(&format!("C{i}"))).collect();
    let props: Vec<Term> = (0..4).map(|i| ex(&format!("p{i}"))).collect();
    let things: Vec<Term> = (0..4)
        .map(|i| ex(&format!("x{i}")))
        .chain([Term::skolem("g", "b0"), Term::skolem("g", "b1")])
        .collect();
    let vocab_terms = [sp(), sc(), ty(), dom(), range()];
    let mut everything: Vec<Term> = classes.clone();
    everything.extend(props.iter().cloned());
    everything.extend(things.iter().cloned());
    everything.extend(vocab_terms.iter().cloned());
    everything.push(Term::literal("lit"));
    let mut predicates = props.clone();
    predicates.extend(vocab_terms.iter().cloned());

    let n = rng.gen_range(0..=max);
    let mut out: BTreeSet<Triple> = BTreeSet::new();
    for _ in 0..n {
        let t = match rng.gen_range(0..10) {
            0 => {
                let mut targets = props.clone();
                targets.push(ty());
                targets.push(Term::skolem("g", "b0"));
                triple(pick(rng, &props).clone(), sp(), pick(rng, &targets).clone())
            }
            1 | 2 => triple(pick(rng, &classes).clone(), sc(), pick(rng, &classes).clone()),
            3 => triple(pick(rng, &props).clone(), dom(), pick(rng, &classes).clone()),
            4 => triple(pick(rng, &props).clone(), range(), pick(rng, &classes).clone()),
            5 => triple(pick(rng, &things).clone(), ty(), pick(rng, &classes).clone()),
            6 | 7 => {
                let mut objects = things.clone();
                objects.push(Term::literal("lit"));
                triple(pick(rng, &things).clone(), pick(rng, &props).clone(), pick(rng, &objects).clone())
            }
            8 => triple(
                Term::skolem("g", "b0"),
                pick(rng, &[dom(), range(), sp()]).clone(),
                pick(rng, &everything[..8]).clone(),
            ),
            _ => {
                let s = loop {
                    let s = pick(rng, &everything).clone();
                    if !matches!(s, Term::Literal(_)) {
                        break s;
                    }
                };
                triple(s, pick(rng, &predicates).clone(), pick(rng, &everything).clone())
            }
        };
        out.insert(t);
    }
    out.into_iter().collect()
}

/// Random triples, each with a non-⊥ annotation of `domain`.
pub fn random_annotated<R: Rng>(rng: &mut R, domain: &Domain, max: usize) -> Vec<(Triple, Annotation)> {
    random_triples(rng, max)
        .into_iter()
        .map(|t| {
            let a = loop {
                let a = domain.sample(rng);
                if !domain.is_bottom(&a) {
                    break a;
                }
            };
            (t, a)
        })
        .collect()
}

pub fn graph_of(domain: &Domain, triples: &[(Triple, Annotation)]) -> AnnotatedGraph {
    let mut g = AnnotatedGraph::new(domain.clone());
    for (t, a) in triples {
        g.insert(t.clone(), a.clone()).expect("valid statement");
    }
    g
}

pub fn top_graph(triples: &[Triple], domain: &Domain) -> AnnotatedGraph {
    let top = domain.top();
    let mut g = AnnotatedGraph::new(domain.clone());
    for t in triples {
        g.insert(t.clone(), top.clone()).expect("valid statement");
    }
    g
}

/// The stored statements of a graph as a map, leaving out ⊥ entries.
pub fn statements(g: &AnnotatedGraph) -> BTreeMap<Triple, Annotation> {
    let d = g.domain();
    g.iter()
        .filter(|(_, a)| !d.is_bottom(a))
        .map(|(t, a)| (t, a.clone()))
        .collect()
}

// ---------------------------------------------------------------------------
// Crisp ρdf closure: naive fixpoint over a set of triples.

pub type Crisp = BTreeSet<(Term, Term, Term)>;

fn crisp_round(g: &Crisp) -> Vec<(Term, Term, Term)> {
    let (sp, sc, ty, dom, range) = (sp(), sc(), ty(), dom(), range());
    let mut out = Vec::new();
    for (a, p, b) in g {
        for (c, q, d) in g {
            if *p == sp && *q == sp && b == c {
                out.push((a.clone(), sp.clone(), d.clone()));
            }
            if *p == sp && q == a {
                out.push((c.clone(), b.clone(), d.clone()));
            }
            if *p == sc && *q == sc && b == c {
                out.push((a.clone(), sc.clone(), d.clone()));
            }
            if *p == sc && *q == ty && d == a {
                out.push((c.clone(), ty.clone(), b.clone()));
            }
            if *p == dom && q == a {
                out.push((c.clone(), ty.clone(), b.clone()));
            }
            if *p == range && q == a {
                out.push((d.clone(), ty.clone(), b.clone()));
            }
            // (a dom|range b), (c sp a), (x c y)
            if (*p == dom || *p == range) && *q == sp && d == a {
                for (x, r, y) in g {
                    if r == c {
                        let target = if *p == dom { x } else { y };
                        out.push((target.clone(), ty.clone(), b.clone()));
                    }
                }
            }
        }
    }
    out
}

pub fn crisp_closure(input: &[Triple]) -> Crisp {
    let mut g: Crisp = input
        .iter()
        .map(|t| (t.subject.clone(), t.predicate.clone(), t.object.clone()))
        .collect();
    loop {
        let before = g.len();
        for t in crisp_round(&g) {
            if t.1.is_iri() {
                g.insert(t);
            }
        }
        if g.len() == before {
            return g;
        }
    }
}

// ---------------------------------------------------------------------------
// Annotated closure by brute force: every rule instance is refired each round
// until no annotation changes.

pub fn annotated_closure(domain: &Domain, input: &[(Triple, Annotation)]) -> BTreeMap<Triple, Annotation> {
    let mut g: BTreeMap<(Term, Term, Term), Annotation> = BTreeMap::new();
    for (t, a) in input {
        let key = (t.subject.clone(), t.predicate.clone(), t.object.clone());
        let merged = match g.get(&key) {
            Some(old) => domain.oplus(old, a),
            None => a.clone(),
        };
        g.insert(key, merged);
    }
    let (sp, sc, ty, dom, range) = (sp(), sc(), ty(), dom(), range());
    loop {
        let mut derived: Vec<((Term, Term, Term), Annotation)> = Vec::new();
        for ((a, p, b), m1) in &g {
            for ((c, q, d), m2) in &g {
                let both = || domain.otimes(m1, m2);
                if *p == sp && *q == sp && b == c {
                    derived.push(((a.clone(), sp.clone(), d.clone()), both()));
                }
                if *p == sp && q == a {
                    derived.push(((c.clone(), b.clone(), d.clone()), both()));
                }
                if *p == sc && *q == sc && b == c {
                    derived.push(((a.clone(), sc.clone(), d.clone()), both()));
                }
                if *p == sc && *q == ty && d == a {
                    derived.push(((c.clone(), ty.clone(), b.clone()), both()));
                }
                if *p == dom && q == a {
                    derived.push(((c.clone(), ty.clone(), b.clone()), both()));
                }
                if *p == range && q == a {
                    derived.push(((d.clone(), ty.clone(), b.clone()), both()));
                }
                if (*p == dom || *p == range) && *q == sp && d == a {
                    for ((x, r, y), m3) in &g {
                        if r == c {
                            let target = if *p == dom { x } else { y };
                            derived.push((
                                (target.clone(), ty.clone(), b.clone()),
                                domain.otimes(&both(), m3),
                            ));
                        }
                    }
                }
            }
        }
        let mut changed = false;
        for (key, ann) in derived {
            if !key.1.is_iri() || domain.is_bottom(&ann) {
                continue;
            }
            let next = match g.get(&key) {
                Some(old) => domain.oplus(old, &ann),
                None => ann,
            };
            if g.get(&key) != Some(&next) {
                g.insert(key, next);
                changed = true;
            }
        }
        if !changed {
            return g
                .into_iter()
                .filter(|(_, a)| !domain.is_bottom(a))
                .map(|((s, p, o), a)| (triple(s, p, o), a))
                .collect();
        }
    }
}

// ---------------------------------------------------------------------------
// Domain helpers

/// Truth of a monotone DNF under the assignment making exactly `truths` true.
pub fn provenance_holds(p: &Provenance, truths: &BTreeSet<String>) -> bool {
    p.clauses().iter().any(|c| c.is_subset(truths))
}

/// Every subset of `atoms`.
pub fn assignments(atoms: &[String]) -> Vec<BTreeSet<String>> {
    (0..1u32 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

/// Whether the time point `x` lies in the point set denoted by `t`.
pub fn temporal_covers(t: &TemporalValue, x: &TimePoint) -> bool {
    t.intervals().iter().any(|iv| iv.lo() <= x && x <= iv.hi())
}

/// Quarter-unit grid spanning the sampled time range, plus both infinities.
pub fn probe_points() -> Vec<TimePoint> {
    let mut out = vec![TimePoint::NegInf, TimePoint::PosInf];
    for q in -8..=88 {
        out.push(TimePoint::At(Rational::new(q.into(), 4.into())));
    }
    out
}

// ---------------------------------------------------------------------------
// Reference SPARQL evaluator for annotation-free patterns, on its own AST.

pub mod sparql {
    use super::*;

    pub const NODES: [&str; 4] = ["e0", "e1", "e2", "e3"];
    pub const PREDICATES: [&str; 3] = ["p0", "p1", "p2"];
    pub const LITERALS: [&str; 2] = ["l0", "l1"];

    #[derive(Debug, Clone)]
    pub enum Slot {
        Var(u8),
        Const(Term),
    }

    #[derive(Debug, Clone)]
    pub enum Cond {
        Bound(u8),
        IsIri(u8),
        Eq(Slot, Slot),
        Not(Box<Cond>),
        And(Box<Cond>, Box<Cond>),
        Or(Box<Cond>, Box<Cond>),
    }

    #[derive(Debug, Clone)]
    pub enum Pat {
        Bgp(Vec<[Slot; 3]>),
        Join(Box<Pat>, Box<Pat>),
        Union(Box<Pat>, Box<Pat>),
        LeftJoin(Box<Pat>, Box<Pat>, Option<Cond>),
        Filter(Box<Pat>, Cond),
    }

    pub type Mapping = BTreeMap<u8, Term>;
    pub type Store = BTreeSet<(Term, Term, Term)>;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    enum Truth {
        T,
        F,
        E,
    }

    fn value(slot: &Slot, m: &Mapping) -> Option<Term> {
        match slot {
            Slot::Var(v) => m.get(v).cloned(),
            Slot::Const(t) => Some(t.clone()),
        }
    }

    fn truth(c: &Cond, m: &Mapping) -> Truth {
        use Truth::*;
        match c {
            Cond::Bound(v) => if m.contains_key(v) { T } else { F },
            Cond::IsIri(v) => match m.get(v) {
                None => E,
                Some(t) => if t.is_iri() { T } else { F },
            },
            Cond::Eq(a, b) => match (value(a, m), value(b, m)) {
                (Some(x), Some(y)) => if x == y { T } else { F },
                _ => E,
            },
            Cond::Not(a) => match truth(a, m) {
                T => F,
                F => T,
                E => E,
            },
            Cond::And(a, b) => match (truth(a, m), truth(b, m)) {
                (E, _) | (_, E) => E,
                (T, T) => T,
                _ => F,
            },
            Cond::Or(a, b) => match (truth(a, m), truth(b, m)) {
                (T, _) | (_, T) => T,
                (E, _) | (_, E) => E,
                _ => F,
            },
        }
    }

    fn compatible(a: &Mapping, b: &Mapping) -> bool {
        a.iter().all(|(k, v)| b.get(k).is_none_or(|w| w == v))
    }

    fn union(a: &Mapping, b: &Mapping) -> Mapping {
        let mut out = a.clone();
        out.extend(b.iter().map(|(k, v)| (*k, v.clone())));
        out
    }

    fn bgp(g: &Store, tps: &[[Slot; 3]]) -> Vec<Mapping> {
        let mut found: BTreeSet<Mapping> = BTreeSet::new();
        fn go(g: &Store, tps: &[[Slot; 3]], m: Mapping, found: &mut BTreeSet<Mapping>) {
            let Some((tp, rest)) = tps.split_first() else {
                found.insert(m);
                return;
            };
            'triples: for (s, p, o) in g {
                let mut next = m.clone();
                for (slot, term) in tp.iter().zip([s, p, o]) {
                    match slot {
                        Slot::Const(c) if c != term => continue 'triples,
                        Slot::Const(_) => {}
                        Slot::Var(v) => match next.get(v) {
                            Some(bound) if bound != term => continue 'triples,
                            Some(_) => {}
                            None => {
                                next.insert(*v, term.clone());
                            }
                        },
                    }
                }
                go(g, rest, next, found);
            }
        }
        go(g, tps, Mapping::new(), &mut found);
        found.into_iter().collect()
    }

    pub fn eval(g: &Store, p: &Pat) -> Vec<Mapping> {
        match p {
            Pat::Bgp(tps) => bgp(g, tps),
            Pat::Join(a, b) => {
                let (l, r) = (eval(g, a), eval(g, b));
                let mut out = Vec::new();
                for x in &l {
                    for y in &r {
                        if compatible(x, y) {
                            out.push(union(x, y));
                        }
                    }
                }
                out
            }
            Pat::Union(a, b) => {
                let mut out = eval(g, a);
                out.extend(eval(g, b));
                out
            }
            Pat::LeftJoin(a, b, cond) => {
                let (l, r) = (eval(g, a), eval(g, b));
                let mut out = Vec::new();
                for x in &l {
                    let mut matched = false;
                    for y in &r {
                        if !compatible(x, y) {
                            continue;
                        }
                        let m = union(x, y);
                        if cond.as_ref().map_or(Truth::T, |c| truth(c, &m)) == Truth::T {
                            matched = true;
                            out.push(m);
                        }
                    }
                    if !matched {
                        out.push(x.clone());
                    }
                }
                out
            }
            Pat::Filter(a, c) => eval(g, a)
                .into_iter()
                .filter(|m| truth(c, m) == Truth::T)
                .collect(),
        }
    }

    fn slot_text(s: &Slot) -> String {
        match s {
            Slot::Var(v) => format!("?v{v}"),
            Slot::Const(t) => t.to_string(),
        }
    }

    fn cond_text(c: &Cond) -> String {
        match c {
            Cond::Bound(v) => format!("BOUND(?v{v})"),
            Cond::IsIri(v) => format!("isIRI(?v{v})"),
            Cond::Eq(a, b) => format!("({} = {})", slot_text(a), slot_text(b)),
            Cond::Not(a) => format!("!({})", cond_text(a)),
            Cond::And(a, b) => format!("({} && {})", cond_text(a), cond_text(b)),
            Cond::Or(a, b) => format!("({} || {})", cond_text(a), cond_text(b)),
        }
    }

    /// The pattern as a `{ ... }` group in query syntax.
    pub fn render(p: &Pat) -> String {
        match p {
            Pat::Bgp(tps) => {
                let body: Vec<String> = tps
                    .iter()
                    .map(|[s, p, o]| format!("{} {} {}", slot_text(s), slot_text(p), slot_text(o)))
                    .collect();
                format!("{{ {} }}", body.join(" . "))
            }
            Pat::Join(a, b) => format!("{{ {} {} }}", render(a), render(b)),
            Pat::Union(a, b) => format!("{{ {} UNION {} }}", render(a), render(b)),
            // The extra braces keep a filter inside `b` scoped to `b` rather
            // than turning it into the join condition.
            Pat::LeftJoin(a, b, None) => format!("{{ {} OPTIONAL {{ {} }} }}", render(a), render(b)),
            Pat::LeftJoin(a, b, Some(c)) => {
                format!("{{ {} OPTIONAL {{ {} FILTER({}) }} }}", render(a), render(b), cond_text(c))
            }
            Pat::Filter(a, c) => format!("{{ {} FILTER({}) }}", render(a), cond_text(c)),
        }
    }

    pub fn query_text(p: &Pat) -> String {
        format!("SELECT * WHERE {}", render(p))
    }

    pub fn random_store<R: Rng>(rng: &mut R) -> Store {
        let n = rng.gen_range(3..=14);
        let mut out = Store::new();
        for _ in 0..n {
            let s = ex(NODES.choose(rng).unwrap());
            let p = ex(PREDICATES.choose(rng).unwrap());
            let o = if rng.gen_range(0..5) == 0 {
                Term::literal(LITERALS.choose(rng).unwrap())
            } else {
                ex(NODES.choose(rng).unwrap())
            };
            out.insert((s, p, o));
        }
        out
    }

    pub fn store_triples(g: &Store) -> Vec<Triple> {
        g.iter().map(|(s, p, o)| triple(s.clone(), p.clone(), o.clone())).collect()
    }

    fn random_slot<R: Rng>(rng: &mut R, role: usize) -> Slot {
        let var_odds = if role == 1 { 5 } else { 2 };
        if rng.gen_range(0..var_odds) == 0 || (role != 1 && rng.gen_bool(0.3)) {
            return Slot::Var(rng.gen_range(0..4));
        }
        match role {
            1 => Slot::Const(ex(PREDICATES.choose(rng).unwrap())),
            2 if rng.gen_range(0..6) == 0 => Slot::Const(Term::literal(LITERALS.choose(rng).unwrap())),
            _ => Slot::Const(ex(NODES.choose(rng).unwrap())),
        }
    }

    fn random_cond<R: Rng>(rng: &mut R, depth: u32) -> Cond {
        let leaf = depth == 0 || rng.gen_bool(0.5);
        if leaf {
            return match rng.gen_range(0..3) {
                0 => Cond::Bound(rng.gen_range(0..4)),
                1 => Cond::IsIri(rng.gen_range(0..4)),
                _ => {
                    let b = if rng.gen_bool(0.5) {
                        Slot::Var(rng.gen_range(0..4))
                    } else {
                        Slot::Const(ex(NODES.choose(rng).unwrap()))
                    };
                    Cond::Eq(Slot::Var(rng.gen_range(0..4)), b)
                }
            };
        }
        match rng.gen_range(0..3) {
            0 => Cond::Not(Box::new(random_cond(rng, depth - 1))),
            1 => Cond::And(
                Box::new(random_cond(rng, depth - 1)),
                Box::new(random_cond(rng, depth - 1)),
            ),
            _ => Cond::Or(
                Box::new(random_cond(rng, depth - 1)),
                Box::new(random_cond(rng, depth - 1)),
            ),
        }
    }

    /// A random pattern whose operator nesting is at most `depth`.
    pub fn random_pattern<R: Rng>(rng: &mut R, depth: u32) -> Pat {
        if depth == 0 || rng.gen_range(0..4) == 0 {
            let n = rng.gen_range(1..=2);
            return Pat::Bgp(
                (0..n)
                    .map(|_| [random_slot(rng, 0), random_slot(rng, 1), random_slot(rng, 2)])
                    .collect(),
            );
        }
        let a = Box::new(random_pattern(rng, depth - 1));
        match rng.gen_range(0..4) {
            0 => Pat::Join(a, Box::new(random_pattern(rng, depth - 1))),
            1 => Pat::Union(a, Box::new(random_pattern(rng, depth - 1))),
            2 => {
                let cond = rng.gen_bool(0.4).then(|| random_cond(rng, 1));
                Pat::LeftJoin(a, Box::new(random_pattern(rng, depth - 1)), cond)
            }
            _ => Pat::Filter(a, random_cond(rng, 2)),
        }
    }

    /// Engine rows keyed like reference mappings (regular variables only).
    pub fn from_solutions(rows: &[Solution]) -> Vec<Mapping> {
        rows.iter()
            .map(|sol| {
                sol.iter()
                    .filter(|(k, _)| !k.is_internal())
                    .map(|(k, v)| {
                        let idx: u8 = k.name().trim_start_matches('v').parse().expect("?vN");
                        let Value::Term(t) = v else {
                            panic!("regular variable {k} bound to {v}");
                        };
                        (idx, t.clone())
                    })
                    .collect()
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Direct implementation of the annotated pattern semantics over a closed graph.

pub mod oracle {
    use super::*;

    /// How OPTIONAL keeps a left answer that has compatible right answers.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum OptionalRule {
        /// Kept unless some merged answer leaves every shared annotation as is.
        Covering,
        /// Kept only if every compatible right answer satisfies the condition
        /// and is strictly below it on every shared annotation variable, or
        /// the condition is false for all of them.
        Literal,
    }

    pub struct Oracle<'g> {
        pub graph: &'g AnnotatedGraph,
        pub rule: OptionalRule,
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    enum Truth {
        T,
        F,
        E,
    }

    impl<'g> Oracle<'g> {
        pub fn new(graph: &'g AnnotatedGraph, rule: OptionalRule) -> Self {
            Oracle { graph, rule }
        }

        fn d(&self) -> &Domain {
            self.graph.domain()
        }

        pub fn eval(&self, p: &Pattern) -> Vec<Solution> {
            let rows = match p {
                Pattern::Bap(tps) => self.bap(tps),
                Pattern::And(a, b) => {
                    let (l, r) = (self.eval(a), self.eval(b));
                    let mut out = Vec::new();
                    for x in &l {
                        for y in &r {
                            out.extend(self.merge(x, y));
                        }
                    }
                    out
                }
                Pattern::Union(a, b) => {
                    let mut out = self.eval(a);
                    out.extend(self.eval(b));
                    out
                }
                Pattern::Filter(a, f) => self
                    .eval(a)
                    .into_iter()
                    .filter(|s| self.truth(f, s) == Truth::T)
                    .collect(),
                Pattern::Optional { left, right, condition } => {
                    self.optional(&self.eval(left), &self.eval(right), condition.as_ref())
                }
                Pattern::Assign { pattern, expr, target } => self
                    .eval(pattern)
                    .into_iter()
                    .filter_map(|mut s| {
                        let v = self.expr(expr, &s)?;
                        if let Value::Annotation(a) = &v {
                            if self.d().check(a).is_ok() && self.d().is_bottom(a) {
                                return None;
                            }
                        }
                        s.insert(target.clone(), v);
                        Some(s)
                    })
                    .collect(),
                Pattern::SubSelect(vars, inner) => self
                    .eval(inner)
                    .into_iter()
                    .map(|s| s.into_iter().filter(|(k, _)| vars.contains(k)).collect())
                    .collect(),
                Pattern::OrderBy(inner, _) => self.eval(inner),
                Pattern::Limit(inner, n) => {
                    let rows = self.eval(inner);
                    assert!(rows.len() <= *n, "the oracle does not order rows, so LIMIT must not cut");
                    rows
                }
                Pattern::GroupBy { .. } => panic!("grouping is outside the oracle"),
            };
            self.prune(rows)
        }

        /// Every way of mapping the patterns onto stored statements.
        fn bap(&self, tps: &[TriplePattern]) -> Vec<Solution> {
            let stored: Vec<(Triple, Annotation)> =
                self.graph.iter().map(|(t, a)| (t, a.clone())).collect();
            let mut out = Vec::new();
            let mut choice = vec![0usize; tps.len()];
            if stored.is_empty() {
                return if tps.is_empty() { vec![Solution::new()] } else { out };
            }
            'combos: loop {
                if let Some(sol) = self.instantiate(tps, &choice, &stored) {
                    out.push(sol);
                }
                for slot in choice.iter_mut() {
                    *slot += 1;
                    if *slot < stored.len() {
                        continue 'combos;
                    }
                    *slot = 0;
                }
                break;
            }
            out
        }

        fn instantiate(
            &self,
            tps: &[TriplePattern],
            choice: &[usize],
            stored: &[(Triple, Annotation)],
        ) -> Option<Solution> {
            let d = self.d();
            let mut terms: BTreeMap<Variable, Term> = BTreeMap::new();
            let mut labels: BTreeMap<Variable, Vec<Annotation>> = BTreeMap::new();
            for (tp, &i) in tps.iter().zip(choice) {
                let (t, mu) = &stored[i];
                for (pat, term) in [(&tp.subject, &t.subject), (&tp.predicate, &t.predicate), (&tp.object, &t.object)] {
                    match pat {
                        TermPattern::Term(c) if c != term => return None,
                        TermPattern::Term(_) => {}
                        TermPattern::Var(v) => {
                            if terms.get(v).is_some_and(|b| b != term) {
                                return None;
                            }
                            terms.insert(v.clone(), term.clone());
                        }
                    }
                }
                match &tp.label {
                    Label::Const(c) => {
                        if !d.leq(c, mu).ok()? {
                            return None;
                        }
                    }
                    Label::Var(v) => labels.entry(v.clone()).or_default().push(mu.clone()),
                }
            }
            let mut sol: Solution = terms.into_iter().map(|(k, t)| (k, Value::Term(t))).collect();
            for (v, values) in labels {
                if sol.contains_key(&v) {
                    return None;
                }
                let meet = d.otimes_all(values.iter());
                if d.is_bottom(&meet) {
                    return None;
                }
                sol.insert(v, Value::Annotation(meet));
            }
            Some(sol)
        }

        fn merge(&self, a: &Solution, b: &Solution) -> Option<Solution> {
            let d = self.d();
            let mut out = a.clone();
            for (k, vb) in b {
                let merged = match (a.get(k), vb) {
                    (None, _) => vb.clone(),
                    (Some(Value::Annotation(x)), Value::Annotation(y)) => {
                        let m = d.otimes(x, y);
                        if d.is_bottom(&m) {
                            return None;
                        }
                        Value::Annotation(m)
                    }
                    (Some(va), _) if va == vb => vb.clone(),
                    _ => return None,
                };
                out.insert(k.clone(), merged);
            }
            Some(out)
        }

        fn optional(&self, left: &[Solution], right: &[Solution], cond: Option<&Filter>) -> Vec<Solution> {
            let d = self.d();
            let mut out = Vec::new();
            for l in left {
                let mut any_compatible = false;
                let mut all_true_and_below = true;
                let mut all_false = true;
                let mut covered = false;
                let mut merged_rows = Vec::new();
                for r in right {
                    let Some(m) = self.merge(l, r) else { continue };
                    any_compatible = true;
                    let t = cond.map_or(Truth::T, |c| self.truth(c, &m));
                    all_false &= t == Truth::F;
                    let shared: Vec<(&Annotation, &Annotation)> = l
                        .iter()
                        .filter_map(|(k, v)| match (v, r.get(k)) {
                            (Value::Annotation(x), Some(Value::Annotation(y))) => Some((x, y)),
                            _ => None,
                        })
                        .collect();
                    let strictly_below = shared.iter().all(|(x, y)| x != y && d.preceq(y, x));
                    all_true_and_below &= t == Truth::T && strictly_below;
                    if t == Truth::T {
                        covered |= shared.iter().all(|(x, y)| d.otimes(x, y) == **x);
                        merged_rows.push(m);
                    }
                }
                let keep_left = match self.rule {
                    OptionalRule::Covering => !covered,
                    OptionalRule::Literal => !any_compatible || all_true_and_below || all_false,
                };
                if keep_left {
                    out.push(l.clone());
                }
                out.extend(merged_rows);
            }
            out
        }

        fn expr(&self, e: &Expr, s: &Solution) -> Option<Value> {
            match e {
                Expr::Var(v) => s.get(v).cloned(),
                Expr::Const(v) => Some(v.clone()),
                Expr::Call(b @ (Builtin::Join | Builtin::Meet), args) => {
                    let values: Vec<Annotation> = args
                        .iter()
                        .filter_map(|a| self.expr(a, s))
                        .map(|v| match v {
                            Value::Annotation(a) => a,
                            other => panic!("non-annotation operand {other}"),
                        })
                        .collect();
                    let d = self.d();
                    let (first, rest) = values.split_first()?;
                    let out = rest.iter().fold(first.clone(), |acc, v| {
                        if *b == Builtin::Join {
                            d.oplus(&acc, v)
                        } else {
                            d.otimes(&acc, v)
                        }
                    });
                    Some(Value::Annotation(out))
                }
                Expr::Call(b, _) => panic!("built-in {} is outside the oracle", b.name()),
            }
        }

        fn truth(&self, f: &Filter, s: &Solution) -> Truth {
            use Truth::*;
            let kind = |e: &Expr, probe: fn(&Term) -> bool| match self.expr(e, s) {
                None => E,
                Some(Value::Term(t)) => if probe(&t) { T } else { F },
                Some(_) => F,
            };
            match f {
                Filter::Bound(v) => if s.contains_key(v) { T } else { F },
                Filter::IsIri(e) => kind(e, Term::is_iri),
                Filter::IsBlank(e) => kind(e, |t| matches!(t, Term::Skolem(_))),
                Filter::IsLiteral(e) => kind(e, |t| matches!(t, Term::Literal(_))),
                Filter::Eq(a, b) => match (self.expr(a, s), self.expr(b, s)) {
                    (Some(x), Some(y)) => if x == y { T } else { F },
                    _ => E,
                },
                Filter::Not(a) => match self.truth(a, s) {
                    T => F,
                    F => T,
                    E => E,
                },
                Filter::And(a, b) => match (self.truth(a, s), self.truth(b, s)) {
                    (E, _) | (_, E) => E,
                    (T, T) => T,
                    _ => F,
                },
                Filter::Or(a, b) => match (self.truth(a, s), self.truth(b, s)) {
                    (T, _) | (_, T) => T,
                    (E, _) | (_, E) => E,
                    _ => F,
                },
                Filter::Leq(a, b) => match (self.expr(a, s), self.expr(b, s)) {
                    (Some(Value::Annotation(x)), Some(Value::Annotation(y))) => {
                        if self.d().leq(&x, &y).unwrap_or(false) { T } else { F }
                    }
                    _ => F,
                },
                Filter::Call(b, _) => panic!("built-in {} is outside the oracle", b.name()),
            }
        }

        /// Keeps the domain-maximal answers; identical rows never remove each other.
        fn prune(&self, rows: Vec<Solution>) -> Vec<Solution> {
            let d = self.d();
            let below = |lo: &Solution, hi: &Solution| {
                lo != hi
                    && lo.keys().eq(hi.keys())
                    && lo.iter().all(|(k, v)| match (v, &hi[k]) {
                        (Value::Annotation(x), Value::Annotation(y)) => d.preceq(x, y),
                        (Value::Annotation(_), _) | (_, Value::Annotation(_)) => false,
                        (x, y) => x == y,
                    })
            };
            rows.iter()
                .filter(|r| !rows.iter().any(|o| below(r, o)))
                .cloned()
                .collect()
        }
    }

    // -----------------------------------------------------------------------
    // Random annotated patterns over the vocabulary of `random_triples`.

    pub fn random_label<R: Rng>(rng: &mut R, domain: &Domain) -> Label {
        if rng.gen_range(0..6) == 0 {
            Label::Const(domain.sample(rng))
        } else {
            Label::Var(Variable::new(&format!("l{}", rng.gen_range(0..3))))
        }
    }

    fn random_term_pattern<R: Rng>(rng: &mut R, role: usize) -> TermPattern {
        if rng.gen_bool(if role == 1 { 0.4 } else { 0.7 }) {
            return TermPattern::Var(Variable::new(&format!("x{}", rng.gen_range(0..3))));
        }
        let pool: Vec<Term> = match role {
            1 => vec![ty(), ty(), sc(), ex("p0"), ex("p1")],
            _ => vec![ex("C0"), ex("C1"), ex("x0"), ex("x1")],
        };
        TermPattern::Term(pool.choose(rng).unwrap().clone())
    }

    pub fn random_bap<R: Rng>(rng: &mut R, domain: &Domain) -> Pattern {
        let n = rng.gen_range(1..=2);
        Pattern::Bap(
            (0..n)
                .map(|_| TriplePattern {
                    subject: random_term_pattern(rng, 0),
                    predicate: random_term_pattern(rng, 1),
                    object: random_term_pattern(rng, 2),
                    label: random_label(rng, domain),
                })
                .collect(),
        )
    }

    fn any_label_var<R: Rng>(rng: &mut R) -> Expr {
        Expr::Var(Variable::new(&format!("l{}", rng.gen_range(0..3))))
    }

    pub fn random_filter<R: Rng>(rng: &mut R, domain: &Domain) -> Filter {
        match rng.gen_range(0..5) {
            0 => Filter::Bound(Variable::new(&format!("l{}", rng.gen_range(0..3)))),
            1 => Filter::Leq(any_label_var(rng), any_label_var(rng)),
            2 => Filter::Leq(any_label_var(rng), Expr::Const(Value::Annotation(domain.sample(rng)))),
            3 => Filter::Not(Box::new(Filter::Leq(any_label_var(rng), any_label_var(rng)))),
            _ => Filter::IsIri(Expr::Var(Variable::new(&format!("x{}", rng.gen_range(0..3))))),
        }
    }

    /// A random pattern whose variables are never used both as terms and as
    /// labels (`?x*` for terms, `?l*` for labels).
    pub fn random_pattern<R: Rng>(rng: &mut R, domain: &Domain, depth: u32) -> Pattern {
        if depth == 0 || rng.gen_range(0..3) == 0 {
            return random_bap(rng, domain);
        }
        let a = Box::new(random_pattern(rng, domain, depth - 1));
        match rng.gen_range(0..5) {
            0 => Pattern::And(a, Box::new(random_pattern(rng, domain, depth - 1))),
            1 => Pattern::Union(a, Box::new(random_pattern(rng, domain, depth - 1))),
            2 => Pattern::Optional {
                left: a,
                right: Box::new(random_pattern(rng, domain, depth - 1)),
                condition: rng.gen_bool(0.5).then(|| random_filter(rng, domain)),
            },
            3 => Pattern::Filter(a, random_filter(rng, domain)),
            _ => {
                let builtin = if rng.gen_bool(0.5) { Builtin::Meet } else { Builtin::Join };
                let other = if rng.gen_bool(0.5) {
                    any_label_var(rng)
                } else {
                    Expr::Const(Value::Annotation(domain.sample(rng)))
                };
                Pattern::Assign {
                    pattern: a,
                    expr: Expr::Call(builtin, vec![any_label_var(rng), other]),
                    target: Variable::new(&format!("l{}", rng.gen_range(0..3))),
                }
            }
        }
    }
}

/// Rows as a sorted list, for order-insensitive comparison.
pub fn sorted<T: Ord + Clone>(rows: &[T]) -> Vec<T> {
    let mut v = rows.to_vec();
    v.sort();
    v
}

/// Rows as a set.
pub fn as_set<T: Ord + Clone>(rows: &[T]) -> BTreeSet<T> {
    rows.iter().cloned().collect()
}

/// Every domain the crate ships, including the two registered compounds.
pub fn shipped_domains() -> Vec<Domain> {
    [
        "boolean",
        "fuzzy:min",
        "fuzzy:product",
        "fuzzy:lukasiewicz",
        "temporal",
        "provenance",
        "compound(temporal,fuzzy:product)",
        "compound(temporal,provenance)",
    ]
    .iter()
    .map(|id| Domain::from_id(id).expect("registered domain"))
    .collect()
}

/// A random document written with a mix of surface forms, plus the
/// statements it should parse to (graph id `g`).
pub struct RandomDocument {
    pub text: String,
    pub annotated: Vec<(Triple, Annotation)>,
    pub plain: Vec<Triple>,
}

const ODD_LITERALS: [&str; 5] = ["lit", "say \"hi\"", "back\\slash", "two\nlines", "tab\there"];

fn surface_form<R: Rng>(rng: &mut R, t: &Term) -> String {
    match t {
        Term::Literal(_) => t.to_string(),
        Term::Skolem(s) => match s.strip_prefix("urn:skolem:g:") {
            Some(label) if rng.gen_bool(0.7) => format!("_:{label}"),
            _ => t.to_string(),
        },
        Term::Iri(iri) => {
            let words = [
                (vocab::TYPE, "type", "rdf:type"),
                (vocab::SUB_CLASS_OF, "sc", "rdfs:subClassOf"),
                (vocab::SUB_PROPERTY_OF, "sp", "rdfs:subPropertyOf"),
                (vocab::DOMAIN, "dom", "rdfs:domain"),
                (vocab::RANGE, "range", "rdfs:range"),
            ];
            if let Some((_, bare, prefixed)) = words.iter().find(|(full, _, _)| **full == **iri) {
                return match rng.gen_range(0..3) {
                    0 => bare.to_string(),
                    1 => prefixed.to_string(),
                    _ => t.to_string(),
                };
            }
            match iri.strip_prefix(EX) {
                Some(local) => match rng.gen_range(0..4) {
                    0 => local.to_string(),
                    1 => format!(":{local}"),
                    2 => format!("ex:{local}"),
                    _ => t.to_string(),
                },
                None => t.to_string(),
            }
        }
    }
}

fn annotation_form<R: Rng>(rng: &mut R, a: &Annotation) -> String {
    let text = a.to_string();
    // A single interval may drop its braces.
    if let Annotation::Temporal(t) = a {
        if t.intervals().len() == 1 && rng.gen_bool(0.5) {
            return text[1..text.len() - 1].to_string();
        }
    }
    text
}

pub fn random_document<R: Rng>(rng: &mut R, domain: &Domain, max: usize) -> RandomDocument {
    let oddify = |rng: &mut R, t: Triple| -> Triple {
        match t.object {
            Term::Literal(_) => Triple::new(
                t.subject,
                t.predicate,
                Term::literal(ODD_LITERALS.choose(rng).expect("non-empty")),
            )
            .expect("valid triple"),
            _ => t,
        }
    };
    let mut text = format!("# generated\n@domain {} .\n", domain.id());
    if rng.gen_bool(0.8) {
        text.push_str(&format!("@prefix ex: <{EX}> .\n"));
    } else {
        text = format!("@prefix ex: <{EX}> .\n{text}");
    }
    let mut annotated = Vec::new();
    let mut plain = Vec::new();
    for (t, a) in random_annotated(rng, domain, max) {
        let t = oddify(rng, t);
        let spo = format!(
            "{} {} {}",
            surface_form(rng, &t.subject),
            surface_form(rng, &t.predicate),
            surface_form(rng, &t.object)
        );
        if rng.gen_range(0..4) == 0 {
            text.push_str(&format!("{spo} .\n"));
            plain.push(t);
        } else {
            let gap = if rng.gen_bool(0.5) { " " } else { "\n   " };
            text.push_str(&format!("( {spo} ) :{gap}{} .", annotation_form(rng, &a)));
            text.push_str(if rng.gen_bool(0.2) { "  # note\n" } else { "\n" });
            annotated.push((t, a));
        }
    }
    RandomDocument {
        text,
        annotated,
        plain,
    }
}
