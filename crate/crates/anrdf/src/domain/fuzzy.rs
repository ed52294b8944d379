//! Fuzzy degrees in [0,1] with max as join and a t-norm as meet.

use std::fmt;

use num::{One, Zero};
use rand::Rng;

use super::rational::{format_rational, ratio, Rational};
use super::{DomainError, Sample, Semiring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TNorm {
    Min,
    Product,
    Lukasiewicz,
}

impl TNorm {
    pub fn name(&self) -> &'static str {
        match self {
            TNorm::Min => "min",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "lukasiewicz",
        }
    }
}

/// A truth degree, an exact rational in [0,1].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(Rational);

impl Degree {
    pub fn new(value: Rational) -> Result<Degree, DomainError> {
        if value < Rational::zero() || value > Rational::one() {
            return Err(DomainError::InvalidValue(format!(
                "fuzzy degree {} outside [0,1]",
                format_rational(&value)
            )));
        }
        Ok(Degree(value))
    }

    pub fn zero() -> Degree {
        Degree(Rational::zero())
    }

    pub fn one() -> Degree {
        Degree(Rational::one())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzyDomain {
    pub tnorm: TNorm,
}

impl FuzzyDomain {
    pub fn new(tnorm: TNorm) -> FuzzyDomain {
        FuzzyDomain { tnorm }
    }
}

impl Semiring for FuzzyDomain {
    type Value = Degree;

    fn bottom(&self) -> Degree {
        Degree::zero()
    }

    fn top(&self) -> Degree {
        Degree::one()
    }

    fn oplus(&self, a: &Degree, b: &Degree) -> Degree {
        a.max(b).clone()
    }

    fn otimes(&self, a: &Degree, b: &Degree) -> Degree {
        match self.tnorm {
            TNorm::Min => a.min(b).clone(),
            TNorm::Product => Degree(&a.0 * &b.0),
            TNorm::Lukasiewicz => {
                let s = &a.0 + &b.0 - Rational::one();
                Degree(if s > Rational::zero() { s } else { Rational::zero() })
            }
        }
    }

    fn preceq(&self, a: &Degree, b: &Degree) -> bool {
        a <= b
    }

    fn is_lattice(&self) -> bool {
        self.tnorm == TNorm::Min
    }
}

impl Sample for FuzzyDomain {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Degree {
        match rng.gen_range(0..10) {
            0 => Degree::zero(),
            1 => Degree::one(),
            2 => Degree(ratio(rng.gen_range(0..=100), 100)),
            _ => Degree(ratio(rng.gen_range(0..=10), 10)),
        }
    }
}
