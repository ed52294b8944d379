//! Annotated ρdf closure by change-driven forward chaining.
//!
//! Every statement whose annotation grows is put back on the agenda and joined
//! with the current annotations of the other premises, so each rule instance is
//! eventually fired with the final values of all of its premises.

use std::collections::VecDeque;

use super::{vocab, AnnotatedGraph, GraphError, Key, Term};
use crate::domain::{Annotation, Semiring};

pub const DEFAULT_MAX_FIRINGS: usize = 1_000_000;

struct Vocab {
    sp: u32,
    sc: u32,
    ty: u32,
    dom: u32,
    range: u32,
}

impl AnnotatedGraph {
    /// The closure under rules 2a–5b with the default firing cap.
    pub fn closure(&self) -> Result<AnnotatedGraph, GraphError> {
        self.closure_with_cap(DEFAULT_MAX_FIRINGS)
    }

    pub fn closure_with_cap(&self, max_firings: usize) -> Result<AnnotatedGraph, GraphError> {
        let mut g = self.clone();
        let v = Vocab {
            sp: g.intern(Term::iri(vocab::SUB_PROPERTY_OF)),
            sc: g.intern(Term::iri(vocab::SUB_CLASS_OF)),
            ty: g.intern(Term::iri(vocab::TYPE)),
            dom: g.intern(Term::iri(vocab::DOMAIN)),
            range: g.intern(Term::iri(vocab::RANGE)),
        };
        let mut agenda: VecDeque<usize> = (0..g.len()).collect();
        let mut queued = vec![true; g.len()];
        let mut firings = 0usize;
        while let Some(idx) = agenda.pop_front() {
            queued[idx] = false;
            let derived = consequences(&g, &v, idx);
            for (key, ann) in derived {
                firings += 1;
                if firings > max_firings {
                    return Err(GraphError::IterationCap(max_firings));
                }
                if !g.term(key.1).is_iri() {
                    continue;
                }
                if g.merge(key, ann) {
                    let at = g.index_of(&key).expect("merged");
                    if at >= queued.len() {
                        queued.resize(at + 1, false);
                    }
                    if !queued[at] {
                        queued[at] = true;
                        agenda.push_back(at);
                    }
                }
            }
        }
        Ok(g)
    }
}

/// All rule conclusions in which statement `idx` takes part as a premise.
fn consequences(g: &AnnotatedGraph, v: &Vocab, idx: usize) -> Vec<(Key, Annotation)> {
    let d = g.domain();
    let ((s, p, o), mu) = g.key_at(idx);
    let mu = mu.clone();
    let mut out: Vec<(Key, Annotation)> = Vec::new();
    let mut emit = |key: Key, ann: Annotation| {
        if !d.is_bottom(&ann) {
            out.push((key, ann));
        }
    };
    let val = |i: usize| g.key_at(i);

    // As a schema statement.
    if p == v.sp {
        // 2a: (s sp o), (o sp c) -> (s sp c) and (a sp s), (s sp o) -> (a sp o)
        for &i in g.with_ps(v.sp, o) {
            let ((_, _, c), nu) = val(i);
            emit((s, v.sp, c), d.otimes(&mu, nu));
        }
        for &i in g.with_po(v.sp, s) {
            let ((a, _, _), nu) = val(i);
            emit((a, v.sp, o), d.otimes(nu, &mu));
        }
        // 2b: (s sp o), (x s y) -> (x o y)
        for &i in g.with_p(s) {
            let ((x, _, y), nu) = val(i);
            emit((x, o, y), d.otimes(&mu, nu));
        }
        // 5a/5b: (o dom|range b), (s sp o), (x s y) -> (x|y type b)
        for (schema, subject_side) in [(v.dom, true), (v.range, false)] {
            for &i in g.with_ps(schema, o) {
                let ((_, _, b), nu) = val(i);
                let base = d.otimes(&mu, nu);
                for &j in g.with_p(s) {
                    let ((x, _, y), omega) = val(j);
                    let target = if subject_side { x } else { y };
                    emit((target, v.ty, b), d.otimes(&base, omega));
                }
            }
        }
    }
    if p == v.sc {
        // 3a
        for &i in g.with_ps(v.sc, o) {
            let ((_, _, c), nu) = val(i);
            emit((s, v.sc, c), d.otimes(&mu, nu));
        }
        for &i in g.with_po(v.sc, s) {
            let ((a, _, _), nu) = val(i);
            emit((a, v.sc, o), d.otimes(nu, &mu));
        }
        // 3b: (s sc o), (x type s) -> (x type o)
        for &i in g.with_po(v.ty, s) {
            let ((x, _, _), nu) = val(i);
            emit((x, v.ty, o), d.otimes(&mu, nu));
        }
    }
    if p == v.ty {
        // 3b: (o sc b), (s type o) -> (s type b)
        for &i in g.with_ps(v.sc, o) {
            let ((_, _, b), nu) = val(i);
            emit((s, v.ty, b), d.otimes(&mu, nu));
        }
    }
    for (schema, subject_side) in [(v.dom, true), (v.range, false)] {
        if p != schema {
            continue;
        }
        // 4a/4b: (s dom|range o), (x s y) -> (x|y type o)
        for &i in g.with_p(s) {
            let ((x, _, y), nu) = val(i);
            let target = if subject_side { x } else { y };
            emit((target, v.ty, o), d.otimes(&mu, nu));
        }
        // 5a/5b: (s dom|range o), (q sp s), (x q y) -> (x|y type o)
        for &i in g.with_po(v.sp, s) {
            let ((q, _, _), nu) = val(i);
            let base = d.otimes(&mu, nu);
            for &j in g.with_p(q) {
                let ((x, _, y), omega) = val(j);
                let target = if subject_side { x } else { y };
                emit((target, v.ty, o), d.otimes(&base, omega));
            }
        }
    }

    // As a data statement (s p o) with p in the property position of a rule.
    // 2b: (p sp e) -> (s e o)
    for &i in g.with_ps(v.sp, p) {
        let ((_, _, e), nu) = val(i);
        emit((s, e, o), d.otimes(nu, &mu));
    }
    for (schema, subject_side) in [(v.dom, true), (v.range, false)] {
        let target = if subject_side { s } else { o };
        // 4a/4b: (p dom|range b) -> (target type b)
        for &i in g.with_ps(schema, p) {
            let ((_, _, b), nu) = val(i);
            emit((target, v.ty, b), d.otimes(nu, &mu));
        }
        // 5a/5b: (p sp a), (a dom|range b) -> (target type b)
        for &i in g.with_ps(v.sp, p) {
            let ((_, _, a), nu) = val(i);
            for &j in g.with_ps(schema, a) {
                let ((_, _, b), omega) = val(j);
                emit((target, v.ty, b), d.otimes(&d.otimes(nu, omega), &mu));
            }
        }
    }
    out
}
