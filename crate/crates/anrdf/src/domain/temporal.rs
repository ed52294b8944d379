//! Finite sets of closed intervals over ℚ ∪ {−∞, +∞} under the Hoare order,
//! plus Allen's interval relations lifted to interval sets.

use std::fmt;

use num::Zero;
use rand::Rng;
use thiserror::Error;

use super::rational::{format_rational, from_int, Rational};
use super::{Sample, Semiring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("interval [{0},{1}] has its lower endpoint above its upper endpoint")]
    Inverted(String, String),
    #[error("{0} is undefined on infinite endpoints")]
    Infinite(&'static str),
    #[error("{0} is undefined on the empty set of intervals")]
    Empty(&'static str),
}

/// A time point; the derived order puts −∞ below every rational and +∞ above.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimePoint {
    NegInf,
    At(Rational),
    PosInf,
}

impl TimePoint {
    pub fn year(y: i64) -> TimePoint {
        TimePoint::At(from_int(y))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TimePoint::At(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePoint::NegInf => f.write_str("-inf"),
            TimePoint::PosInf => f.write_str("+inf"),
            TimePoint::At(r) => f.write_str(&format_rational(r)),
        }
    }
}

/// A closed interval `[lo, hi]` with `lo ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: TimePoint,
    hi: TimePoint,
}

impl Interval {
    pub fn new(lo: TimePoint, hi: TimePoint) -> Result<Interval, TemporalError> {
        if lo > hi {
            return Err(TemporalError::Inverted(lo.to_string(), hi.to_string()));
        }
        Ok(Interval { lo, hi })
    }

    /// Shorthand for integer endpoints; panics when `lo > hi`.
    pub fn years(lo: i64, hi: i64) -> Interval {
        Interval::new(TimePoint::year(lo), TimePoint::year(hi)).expect("lo <= hi")
    }

    pub fn lo(&self) -> &TimePoint {
        &self.lo
    }

    pub fn hi(&self) -> &TimePoint {
        &self.hi
    }

    pub fn length(&self) -> Option<Rational> {
        Some(self.hi.finite()? - self.lo.finite()?)
    }

    fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A canonical interval set: sorted, pairwise disjoint and non-touching.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalValue {
    intervals: Vec<Interval>,
}

impl TemporalValue {
    pub fn empty() -> TemporalValue {
        TemporalValue::default()
    }

    pub fn full() -> TemporalValue {
        TemporalValue {
            intervals: vec![Interval {
                lo: TimePoint::NegInf,
                hi: TimePoint::PosInf,
            }],
        }
    }

    /// Builds the canonical form of the union of `intervals`.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(intervals: I) -> TemporalValue {
        let mut all: Vec<Interval> = intervals.into_iter().collect();
        all.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(all.len());
        for iv in all {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        TemporalValue { intervals: merged }
    }

    pub fn interval(iv: Interval) -> TemporalValue {
        TemporalValue { intervals: vec![iv] }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn join(&self, other: &TemporalValue) -> TemporalValue {
        TemporalValue::from_intervals(self.intervals.iter().chain(&other.intervals).cloned())
    }

    pub fn meet(&self, other: &TemporalValue) -> TemporalValue {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        TemporalValue::from_intervals(out)
    }

    /// Hoare order: every interval of `self` lies inside an interval of `other`.
    pub fn leq(&self, other: &TemporalValue) -> bool {
        let mut j = 0;
        for iv in &self.intervals {
            while j < other.intervals.len() && other.intervals[j].hi < iv.lo {
                j += 1;
            }
            match other.intervals.get(j) {
                Some(outer) if outer.contains(iv) => {}
                _ => return false,
            }
        }
        true
    }

    /// Total length of all intervals.
    pub fn length(&self) -> Result<Rational, TemporalError> {
        self.intervals.iter().try_fold(Rational::zero(), |acc, iv| {
            iv.length()
                .map(|l| acc + l)
                .ok_or(TemporalError::Infinite("length"))
        })
    }

    /// The longest interval; ties go to the earliest lower endpoint.
    pub fn maxlength(&self) -> Result<Interval, TemporalError> {
        let mut best: Option<(&Interval, Rational)> = None;
        for iv in &self.intervals {
            let len = iv.length().ok_or(TemporalError::Infinite("maxlength"))?;
            if best.as_ref().is_none_or(|(_, b)| len > *b) {
                best = Some((iv, len));
            }
        }
        best.map(|(iv, _)| iv.clone())
            .ok_or(TemporalError::Empty("maxlength"))
    }

    /// Earliest lower endpoint and total length (infinite lengths sort last),
    /// used to linearize temporal values for ordering.
    pub fn sort_key(&self) -> (Option<TimePoint>, Option<Rational>) {
        let start = self.intervals.first().map(|iv| iv.lo.clone());
        (start, self.length().ok())
    }
}

impl fmt::Display for TemporalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{iv}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TemporalDomain;

impl Semiring for TemporalDomain {
    type Value = TemporalValue;

    fn bottom(&self) -> TemporalValue {
        TemporalValue::empty()
    }

    fn top(&self) -> TemporalValue {
        TemporalValue::full()
    }

    fn oplus(&self, a: &TemporalValue, b: &TemporalValue) -> TemporalValue {
        a.join(b)
    }

    fn otimes(&self, a: &TemporalValue, b: &TemporalValue) -> TemporalValue {
        a.meet(b)
    }

    fn preceq(&self, a: &TemporalValue, b: &TemporalValue) -> bool {
        a.leq(b)
    }

    fn is_lattice(&self) -> bool {
        true
    }
}

fn sample_point<R: Rng + ?Sized>(rng: &mut R) -> TimePoint {
    match rng.gen_range(0..24) {
        0 => TimePoint::NegInf,
        1 => TimePoint::PosInf,
        2 => TimePoint::At(super::rational::ratio(rng.gen_range(0..40), 2)),
        _ => TimePoint::year(rng.gen_range(0..20)),
    }
}

pub(crate) fn sample_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval {
    let a = sample_point(rng);
    let b = if rng.gen_range(0..6) == 0 {
        a.clone()
    } else {
        sample_point(rng)
    };
    if a <= b {
        Interval { lo: a, hi: b }
    } else {
        Interval { lo: b, hi: a }
    }
}

impl Sample for TemporalDomain {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TemporalValue {
        match rng.gen_range(0..12) {
            0 => TemporalValue::empty(),
            1 => TemporalValue::full(),
            _ => {
                let n = rng.gen_range(1..=3);
                TemporalValue::from_intervals((0..n).map(|_| sample_interval(rng)))
            }
        }
    }
}

/// Allen's thirteen relations between two intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllenRelation {
    Before,
    After,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    Starts,
    StartedBy,
    During,
    Contains,
    Finishes,
    FinishedBy,
    Equals,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Before,
        AllenRelation::After,
        AllenRelation::Meets,
        AllenRelation::MetBy,
        AllenRelation::Overlaps,
        AllenRelation::OverlappedBy,
        AllenRelation::Starts,
        AllenRelation::StartedBy,
        AllenRelation::During,
        AllenRelation::Contains,
        AllenRelation::Finishes,
        AllenRelation::FinishedBy,
        AllenRelation::Equals,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AllenRelation::Before => "before",
            AllenRelation::After => "after",
            AllenRelation::Meets => "meets",
            AllenRelation::MetBy => "metBy",
            AllenRelation::Overlaps => "overlaps",
            AllenRelation::OverlappedBy => "overlappedBy",
            AllenRelation::Starts => "starts",
            AllenRelation::StartedBy => "startedBy",
            AllenRelation::During => "during",
            AllenRelation::Contains => "contains",
            AllenRelation::Finishes => "finishes",
            AllenRelation::FinishedBy => "finishedBy",
            AllenRelation::Equals => "equals",
        }
    }

    pub fn inverse(&self) -> AllenRelation {
        use AllenRelation::*;
        match self {
            Before => After,
            After => Before,
            Meets => MetBy,
            MetBy => Meets,
            Overlaps => OverlappedBy,
            OverlappedBy => Overlaps,
            Starts => StartedBy,
            StartedBy => Starts,
            During => Contains,
            Contains => During,
            Finishes => FinishedBy,
            FinishedBy => Finishes,
            Equals => Equals,
        }
    }

    /// Decides the relation between `[a,b]` and `[c,d]`. `meets` requires both
    /// intervals to be proper so that exactly one relation holds for every pair.
    pub fn holds(&self, x: &Interval, y: &Interval) -> bool {
        let (a, b, c, d) = (&x.lo, &x.hi, &y.lo, &y.hi);
        match self {
            AllenRelation::Before => b < c,
            AllenRelation::Meets => b == c && a < b && c < d,
            AllenRelation::Overlaps => a < c && c < b && b < d,
            AllenRelation::Starts => a == c && b < d,
            AllenRelation::During => c < a && b < d,
            AllenRelation::Finishes => b == d && c < a,
            AllenRelation::Equals => a == c && b == d,
            inverse => inverse.inverse().holds(y, x),
        }
    }
}

/// How a relation on intervals is lifted to sets of intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    ExistsExists,
    ExistsForall,
    ForallExists,
    ExistsForallAndForallExists,
    ForallForall,
}

impl Quantifier {
    pub const ALL: [Quantifier; 5] = [
        Quantifier::ExistsExists,
        Quantifier::ExistsForall,
        Quantifier::ForallExists,
        Quantifier::ExistsForallAndForallExists,
        Quantifier::ForallForall,
    ];

    /// Built-in name suffix, e.g. `beforeEA` for ∃∀.
    pub fn suffix(&self) -> &'static str {
        match self {
            Quantifier::ExistsExists => "EE",
            Quantifier::ExistsForall => "EA",
            Quantifier::ForallExists => "AE",
            Quantifier::ExistsForallAndForallExists => "EAAE",
            Quantifier::ForallForall => "AA",
        }
    }
}

/// Evaluates `r` lifted by `q` on two non-empty interval sets.
pub fn allen_lifted(
    r: AllenRelation,
    q: Quantifier,
    t1: &TemporalValue,
    t2: &TemporalValue,
) -> Result<bool, TemporalError> {
    if t1.is_empty() || t2.is_empty() {
        return Err(TemporalError::Empty("an Allen relation"));
    }
    let (xs, ys) = (t1.intervals(), t2.intervals());
    let exists_forall = || xs.iter().any(|x| ys.iter().all(|y| r.holds(x, y)));
    let forall_exists = || xs.iter().all(|x| ys.iter().any(|y| r.holds(x, y)));
    Ok(match q {
        Quantifier::ExistsExists => xs.iter().any(|x| ys.iter().any(|y| r.holds(x, y))),
        Quantifier::ExistsForall => exists_forall(),
        Quantifier::ForallExists => forall_exists(),
        Quantifier::ExistsForallAndForallExists => exists_forall() && forall_exists(),
        Quantifier::ForallForall => xs.iter().all(|x| ys.iter().all(|y| r.holds(x, y))),
    })
}
