//! Annotation domains: idempotent commutative semirings with a ⊤-annihilating join.
//!
//! Every domain implements [`Semiring`] over a typed value. [`Domain`] is the
//! runtime registry entry used by graphs and queries; its values are
//! [`Annotation`]s.

pub mod axioms;
pub mod boolean;
pub mod fuzzy;
pub mod provenance;
pub mod rational;
pub mod temporal;

use std::fmt;
use std::hash::Hash;

use rand::Rng;
use thiserror::Error;

use crate::compound::{CompoundDomain, CompoundValue};
pub use boolean::BooleanDomain;
pub use fuzzy::{Degree, FuzzyDomain, TNorm};
pub use provenance::{Provenance, ProvenanceDomain};
pub use rational::Rational;
pub use temporal::{Interval, TemporalDomain, TemporalValue, TimePoint};

/// The algebraic contract of an annotation domain.
///
/// `oplus` combines evidence for the same statement, `otimes` conjoins the
/// premises of a rule. The induced order is `a ⪯ b` iff `a ⊕ b = b`.
pub trait Semiring {
    type Value: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display;

    fn bottom(&self) -> Self::Value;
    fn top(&self) -> Self::Value;
    fn oplus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn otimes(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn preceq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        &self.oplus(a, b) == b
    }

    /// True when `otimes` is the greatest lower bound of the induced order.
    fn is_lattice(&self) -> bool;

    fn oplus_all<'a, I>(&self, values: I) -> Self::Value
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        values
            .into_iter()
            .fold(self.bottom(), |acc, v| self.oplus(&acc, v))
    }

    fn otimes_all<'a, I>(&self, values: I) -> Self::Value
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        values
            .into_iter()
            .fold(self.top(), |acc, v| self.otimes(&acc, v))
    }
}

/// Random value generation used by the property harnesses.
pub trait Sample: Semiring {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Value;

    /// The full carrier, for domains small enough to check exhaustively.
    fn universe(&self) -> Option<Vec<Self::Value>> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("unknown annotation domain `{0}`")]
    UnknownDomain(String),
    #[error("compound domain needs a lattice as first component, `{0}` is not a lattice")]
    NonLattice(String),
    #[error("compound domains cannot be nested (`{0}`)")]
    NestedCompound(String),
    #[error("value `{value}` does not belong to domain `{domain}`")]
    Mismatch { domain: String, value: String },
    #[error("invalid value: {0}")]
    InvalidValue(String),
}

/// An annotation value of any shipped domain, always in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    Boolean(bool),
    Fuzzy(Degree),
    Temporal(TemporalValue),
    Provenance(Provenance),
    Compound(CompoundValue<Annotation, Annotation>),
}

impl Annotation {
    pub fn kind(&self) -> &'static str {
        match self {
            Annotation::Boolean(_) => "boolean",
            Annotation::Fuzzy(_) => "fuzzy",
            Annotation::Temporal(_) => "temporal",
            Annotation::Provenance(_) => "provenance",
            Annotation::Compound(_) => "compound",
        }
    }

    pub fn as_temporal(&self) -> Option<&TemporalValue> {
        match self {
            Annotation::Temporal(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Boolean(b) => write!(f, "{b}"),
            Annotation::Fuzzy(d) => write!(f, "{d}"),
            Annotation::Temporal(t) => write!(f, "{t}"),
            Annotation::Provenance(p) => write!(f, "{p}"),
            Annotation::Compound(c) => write!(f, "{c}"),
        }
    }
}

/// A registered annotation domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Boolean,
    Fuzzy(TNorm),
    Temporal,
    Provenance,
    Compound(Box<CompoundDomain<Domain, Domain>>),
}

impl Domain {
    /// Resolves a registry identifier such as `fuzzy:product` or
    /// `compound(temporal,provenance)`.
    pub fn from_id(id: &str) -> Result<Domain, DomainError> {
        let id = id.trim();
        match id {
            "boolean" => return Ok(Domain::Boolean),
            "fuzzy:min" => return Ok(Domain::Fuzzy(TNorm::Min)),
            "fuzzy:product" => return Ok(Domain::Fuzzy(TNorm::Product)),
            "fuzzy:lukasiewicz" => return Ok(Domain::Fuzzy(TNorm::Lukasiewicz)),
            "temporal" => return Ok(Domain::Temporal),
            "provenance" => return Ok(Domain::Provenance),
            _ => {}
        }
        let inner = id
            .strip_prefix("compound(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| DomainError::UnknownDomain(id.to_string()))?;
        let (first, second) =
            split_top_level_comma(inner).ok_or_else(|| DomainError::UnknownDomain(id.to_string()))?;
        let first = Domain::from_id(first)?;
        let second = Domain::from_id(second)?;
        Domain::compound(first, second)
    }

    pub fn compound(first: Domain, second: Domain) -> Result<Domain, DomainError> {
        if matches!(first, Domain::Compound(_)) || matches!(second, Domain::Compound(_)) {
            return Err(DomainError::NestedCompound(format!(
                "compound({},{})",
                first.id(),
                second.id()
            )));
        }
        Ok(Domain::Compound(Box::new(CompoundDomain::new(first, second)?)))
    }

    pub fn id(&self) -> String {
        match self {
            Domain::Boolean => "boolean".into(),
            Domain::Fuzzy(t) => format!("fuzzy:{}", t.name()),
            Domain::Temporal => "temporal".into(),
            Domain::Provenance => "provenance".into(),
            Domain::Compound(c) => format!("compound({},{})", c.first.id(), c.second.id()),
        }
    }

    /// Checks that `value` is a well-formed value of this domain.
    pub fn check(&self, value: &Annotation) -> Result<(), DomainError> {
        let ok = match (self, value) {
            (Domain::Boolean, Annotation::Boolean(_))
            | (Domain::Fuzzy(_), Annotation::Fuzzy(_))
            | (Domain::Temporal, Annotation::Temporal(_))
            | (Domain::Provenance, Annotation::Provenance(_)) => true,
            (Domain::Compound(c), Annotation::Compound(v)) => {
                for (x, y) in v.pairs() {
                    c.first.check(x)?;
                    c.second.check(y)?;
                }
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(DomainError::Mismatch {
                domain: self.id(),
                value: value.to_string(),
            })
        }
    }

    pub fn join(&self, a: &Annotation, b: &Annotation) -> Result<Annotation, DomainError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.oplus(a, b))
    }

    pub fn meet(&self, a: &Annotation, b: &Annotation) -> Result<Annotation, DomainError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.otimes(a, b))
    }

    pub fn leq(&self, a: &Annotation, b: &Annotation) -> Result<bool, DomainError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.preceq(a, b))
    }

    pub fn is_bottom(&self, value: &Annotation) -> bool {
        *value == self.bottom()
    }

    /// Parses an annotation literal of this domain.
    pub fn parse_literal(&self, text: &str) -> Result<Annotation, crate::syntax::SyntaxError> {
        crate::syntax::literal::parse_annotation_str(self, text)
    }

    /// Brings a compound value to normal form; other values are already canonical.
    pub fn normalize(&self, value: &Annotation) -> Result<Annotation, DomainError> {
        self.check(value)?;
        match (self, value) {
            (Domain::Compound(c), Annotation::Compound(v)) => {
                Ok(Annotation::Compound(c.normalise(v.pairs())))
            }
            _ => Ok(value.clone()),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn split_top_level_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

// The `Semiring` view of `Domain` assumes values were validated with
// `Domain::check`; mixing payloads of different domains panics.
impl Semiring for Domain {
    type Value = Annotation;

    fn bottom(&self) -> Annotation {
        match self {
            Domain::Boolean => Annotation::Boolean(BooleanDomain.bottom()),
            Domain::Fuzzy(t) => Annotation::Fuzzy(FuzzyDomain::new(*t).bottom()),
            Domain::Temporal => Annotation::Temporal(TemporalDomain.bottom()),
            Domain::Provenance => Annotation::Provenance(ProvenanceDomain.bottom()),
            Domain::Compound(c) => Annotation::Compound(c.bottom()),
        }
    }

    fn top(&self) -> Annotation {
        match self {
            Domain::Boolean => Annotation::Boolean(BooleanDomain.top()),
            Domain::Fuzzy(t) => Annotation::Fuzzy(FuzzyDomain::new(*t).top()),
            Domain::Temporal => Annotation::Temporal(TemporalDomain.top()),
            Domain::Provenance => Annotation::Provenance(ProvenanceDomain.top()),
            Domain::Compound(c) => Annotation::Compound(c.top()),
        }
    }

    fn oplus(&self, a: &Annotation, b: &Annotation) -> Annotation {
        match (self, a, b) {
            (Domain::Boolean, Annotation::Boolean(x), Annotation::Boolean(y)) => {
                Annotation::Boolean(BooleanDomain.oplus(x, y))
            }
            (Domain::Fuzzy(t), Annotation::Fuzzy(x), Annotation::Fuzzy(y)) => {
                Annotation::Fuzzy(FuzzyDomain::new(*t).oplus(x, y))
            }
            (Domain::Temporal, Annotation::Temporal(x), Annotation::Temporal(y)) => {
                Annotation::Temporal(TemporalDomain.oplus(x, y))
            }
            (Domain::Provenance, Annotation::Provenance(x), Annotation::Provenance(y)) => {
                Annotation::Provenance(ProvenanceDomain.oplus(x, y))
            }
            (Domain::Compound(c), Annotation::Compound(x), Annotation::Compound(y)) => {
                Annotation::Compound(c.oplus(x, y))
            }
            _ => panic!("annotation {a} or {b} is not a value of domain {self}"),
        }
    }

    fn otimes(&self, a: &Annotation, b: &Annotation) -> Annotation {
        match (self, a, b) {
            (Domain::Boolean, Annotation::Boolean(x), Annotation::Boolean(y)) => {
                Annotation::Boolean(BooleanDomain.otimes(x, y))
            }
            (Domain::Fuzzy(t), Annotation::Fuzzy(x), Annotation::Fuzzy(y)) => {
                Annotation::Fuzzy(FuzzyDomain::new(*t).otimes(x, y))
            }
            (Domain::Temporal, Annotation::Temporal(x), Annotation::Temporal(y)) => {
                Annotation::Temporal(TemporalDomain.otimes(x, y))
            }
            (Domain::Provenance, Annotation::Provenance(x), Annotation::Provenance(y)) => {
                Annotation::Provenance(ProvenanceDomain.otimes(x, y))
            }
            (Domain::Compound(c), Annotation::Compound(x), Annotation::Compound(y)) => {
                Annotation::Compound(c.otimes(x, y))
            }
            _ => panic!("annotation {a} or {b} is not a value of domain {self}"),
        }
    }

    fn preceq(&self, a: &Annotation, b: &Annotation) -> bool {
        match (self, a, b) {
            (Domain::Temporal, Annotation::Temporal(x), Annotation::Temporal(y)) => {
                TemporalDomain.preceq(x, y)
            }
            (Domain::Provenance, Annotation::Provenance(x), Annotation::Provenance(y)) => {
                ProvenanceDomain.preceq(x, y)
            }
            _ => &self.oplus(a, b) == b,
        }
    }

    fn is_lattice(&self) -> bool {
        match self {
            Domain::Boolean => true,
            Domain::Fuzzy(t) => FuzzyDomain::new(*t).is_lattice(),
            Domain::Temporal => true,
            Domain::Provenance => true,
            Domain::Compound(c) => c.is_lattice(),
        }
    }
}

impl Sample for Domain {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Annotation {
        match self {
            Domain::Boolean => Annotation::Boolean(BooleanDomain.sample(rng)),
            Domain::Fuzzy(t) => Annotation::Fuzzy(FuzzyDomain::new(*t).sample(rng)),
            Domain::Temporal => Annotation::Temporal(TemporalDomain.sample(rng)),
            Domain::Provenance => Annotation::Provenance(ProvenanceDomain.sample(rng)),
            Domain::Compound(c) => Annotation::Compound(c.sample(rng)),
        }
    }

    fn universe(&self) -> Option<Vec<Annotation>> {
        match self {
            Domain::Boolean => Some(vec![Annotation::Boolean(false), Annotation::Boolean(true)]),
            _ => None,
        }
    }
}
