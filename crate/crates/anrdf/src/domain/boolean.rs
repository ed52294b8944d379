//! The two-element domain ⟨{0,1}, max, min, 0, 1⟩ of plain RDF.

use rand::Rng;

use super::{Sample, Semiring};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BooleanDomain;

impl Semiring for BooleanDomain {
    type Value = bool;

    fn bottom(&self) -> bool {
        false
    }

    fn top(&self) -> bool {
        true
    }

    fn oplus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn otimes(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn is_lattice(&self) -> bool {
        true
    }
}

impl Sample for BooleanDomain {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        rng.gen()
    }

    fn universe(&self) -> Option<Vec<bool>> {
        Some(vec![false, true])
    }
}
