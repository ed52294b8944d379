//! Compound domains built from a lattice `D1` and a domain `D2`.
//!
//! A value is a finite set of pairs `⟨x, y⟩` read as the function
//! `z ↦ ⊕₂ { ⊗₂ y_J | J ⊆ A, z ⪯₁ ⊕₁ x_J }`. Values are kept in normal form
//! (saturated, then reduced to the maximal non-degenerate pairs).

pub mod checks;

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::domain::{DomainError, Sample, Semiring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompoundError {
    #[error("naive saturation is limited to {bound} pairs, got {size}")]
    BoundExceeded { bound: usize, size: usize },
}

/// A normalized set of pairs, sorted by serialized form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompoundValue<X, Y> {
    pairs: Vec<(X, Y)>,
}

impl<X, Y> CompoundValue<X, Y> {
    pub fn pairs(&self) -> &[(X, Y)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl<X: fmt::Display, Y: fmt::Display> fmt::Display for CompoundValue<X, Y> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "<{x}, {y}>")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundDomain<A, B> {
    pub first: A,
    pub second: B,
    /// Largest input accepted by [`CompoundDomain::saturate_naive`].
    pub naive_bound: usize,
}

pub(crate) type Pair<A, B> = (<A as Semiring>::Value, <B as Semiring>::Value);

impl<A: Semiring + fmt::Display, B: Semiring> CompoundDomain<A, B> {
    /// Fails unless `first` is a lattice, which normal forms rely on.
    pub fn new(first: A, second: B) -> Result<Self, DomainError> {
        if !first.is_lattice() {
            return Err(DomainError::NonLattice(first.to_string()));
        }
        Ok(CompoundDomain {
            first,
            second,
            naive_bound: 4,
        })
    }
}

impl<A: Semiring, B: Semiring> CompoundDomain<A, B> {
    /// The function denoted by `pairs`, applied to `z`.
    pub fn evaluate(&self, pairs: &[Pair<A, B>], z: &A::Value) -> B::Value {
        assert!(pairs.len() < 31, "evaluate enumerates subsets of at most 30 pairs");
        let mut best = self.second.bottom();
        for mask in 0u32..(1u32 << pairs.len()) {
            let chosen = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p);
            let (xs, ys): (Vec<_>, Vec<_>) = chosen.map(|(x, y)| (x, y)).unzip();
            if self.first.preceq(z, &self.first.oplus_all(xs)) {
                best = self.second.oplus(&best, &self.second.otimes_all(ys));
            }
        }
        best
    }

    /// Algorithm 1 as stated: ranges over every set `X` of subsets of `pairs`.
    pub fn saturate_naive(&self, pairs: &[Pair<A, B>]) -> Result<Vec<Pair<A, B>>, CompoundError> {
        if pairs.len() > self.naive_bound {
            return Err(CompoundError::BoundExceeded {
                bound: self.naive_bound,
                size: pairs.len(),
            });
        }
        let (a, b) = (&self.first, &self.second);
        // Per subset J: (⊗₁ x_J, ⊕₂ y_J, ⊕₁ x_J, ⊗₂ y_J).
        let subsets: Vec<_> = (0u32..(1u32 << pairs.len()))
            .map(|mask| {
                let chosen: Vec<&Pair<A, B>> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, p)| p)
                    .collect();
                let xs = || chosen.iter().map(|p| &p.0);
                let ys = || chosen.iter().map(|p| &p.1);
                (
                    a.otimes_all(xs()),
                    b.oplus_all(ys()),
                    a.oplus_all(xs()),
                    b.otimes_all(ys()),
                )
            })
            .collect();
        let mut out = BTreeSet::new();
        for pairs in pairs.iter() {
            out.insert(pairs.clone());
        }
        for big_x in 0u64..(1u64 << subsets.len()) {
            let members = || {
                subsets
                    .iter()
                    .enumerate()
                    .filter(move |(i, _)| big_x & (1 << i) != 0)
                    .map(|(_, s)| s)
            };
            out.insert((
                a.oplus_all(members().map(|s| &s.0)),
                b.otimes_all(members().map(|s| &s.1)),
            ));
            out.insert((
                a.otimes_all(members().map(|s| &s.2)),
                b.oplus_all(members().map(|s| &s.3)),
            ));
        }
        Ok(out.into_iter().collect())
    }

    /// Closure under `⟨a⊗₁c, b⊕₂d⟩` and `⟨a⊕₁c, b⊗₂d⟩`, keeping only pairs not
    /// dominated by another pair. The result has the same maximal pairs as the
    /// full closure because both combinators are monotone.
    pub fn saturate_fast(&self, pairs: &[Pair<A, B>]) -> Vec<Pair<A, B>> {
        let mut current: Vec<Pair<A, B>> = Vec::new();
        let mut queue: Vec<Pair<A, B>> = Vec::new();
        for p in pairs {
            if !self.is_degenerate(p) && self.admit(&mut current, p.clone()) {
                queue.push(p.clone());
            }
        }
        while let Some(p) = queue.pop() {
            if !current.contains(&p) {
                continue;
            }
            let partners = current.clone();
            for q in &partners {
                if *q == p {
                    continue;
                }
                let meet_side = (
                    self.first.otimes(&p.0, &q.0),
                    self.second.oplus(&p.1, &q.1),
                );
                let join_side = (
                    self.first.oplus(&p.0, &q.0),
                    self.second.otimes(&p.1, &q.1),
                );
                for cand in [meet_side, join_side] {
                    if !self.is_degenerate(&cand) && self.admit(&mut current, cand.clone()) {
                        queue.push(cand);
                    }
                }
            }
        }
        current
    }

    fn dominated(&self, p: &Pair<A, B>, q: &Pair<A, B>) -> bool {
        self.first.preceq(&p.0, &q.0) && self.second.preceq(&p.1, &q.1)
    }

    fn is_degenerate(&self, p: &Pair<A, B>) -> bool {
        p.0 == self.first.bottom() || p.1 == self.second.bottom()
    }

    /// Adds `p` unless an existing pair dominates it, evicting pairs it dominates.
    fn admit(&self, set: &mut Vec<Pair<A, B>>, p: Pair<A, B>) -> bool {
        if set.iter().any(|q| self.dominated(&p, q)) {
            return false;
        }
        set.retain(|q| !self.dominated(q, &p));
        set.push(p);
        true
    }

    /// Algorithm 2: drops degenerate pairs and pairs dominated by a distinct pair.
    pub fn reduce(&self, pairs: &[Pair<A, B>]) -> CompoundValue<A::Value, B::Value> {
        let distinct: BTreeSet<&Pair<A, B>> = pairs.iter().collect();
        let kept: Vec<Pair<A, B>> = distinct
            .iter()
            .filter(|p| !self.is_degenerate(p))
            .filter(|p| {
                !distinct
                    .iter()
                    .any(|q| q != *p && self.dominated(p, q))
            })
            .map(|p| (*p).clone())
            .collect();
        Self::canonical(kept)
    }

    fn canonical(pairs: Vec<Pair<A, B>>) -> CompoundValue<A::Value, B::Value> {
        let mut keyed: Vec<(String, Pair<A, B>)> = pairs
            .into_iter()
            .map(|(x, y)| (format!("<{x}, {y}>"), (x, y)))
            .collect();
        keyed.sort_by(|l, r| l.0.cmp(&r.0).then_with(|| l.1.cmp(&r.1)));
        keyed.dedup_by(|l, r| l.1 == r.1);
        CompoundValue {
            pairs: keyed.into_iter().map(|(_, p)| p).collect(),
        }
    }

    /// Algorithm 3: `Reduce(Saturate(A))`, using the pairwise fixpoint.
    pub fn normalise(&self, pairs: &[Pair<A, B>]) -> CompoundValue<A::Value, B::Value> {
        self.reduce(&self.saturate_fast(pairs))
    }
}

impl<A: Semiring, B: Semiring> Semiring for CompoundDomain<A, B> {
    type Value = CompoundValue<A::Value, B::Value>;

    fn bottom(&self) -> Self::Value {
        CompoundValue { pairs: vec![] }
    }

    fn top(&self) -> Self::Value {
        CompoundValue {
            pairs: vec![(self.first.top(), self.second.top())],
        }
    }

    fn oplus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        let all: Vec<_> = a.pairs.iter().chain(&b.pairs).cloned().collect();
        self.normalise(&all)
    }

    fn otimes(&self, a: &Self::Value, b: &Self::Value) -> Self::Value {
        let mut all = Vec::with_capacity(a.len() * b.len());
        for (x, y) in &a.pairs {
            for (x2, y2) in &b.pairs {
                all.push((self.first.otimes(x, x2), self.second.otimes(y, y2)));
            }
        }
        self.normalise(&all)
    }

    fn is_lattice(&self) -> bool {
        false
    }
}

impl<A: Sample, B: Sample> Sample for CompoundDomain<A, B> {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Value {
        let n = rng.gen_range(0..=3);
        let pairs: Vec<_> = (0..n)
            .map(|_| (self.first.sample(rng), self.second.sample(rng)))
            .collect();
        self.normalise(&pairs)
    }
}
