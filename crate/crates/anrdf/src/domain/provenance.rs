//! Provenance formulas: positive boolean formulas over atoms, kept as
//! irredundant monotone DNF so that logical equivalence is structural equality.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use super::{Sample, Semiring};

pub type Clause = BTreeSet<String>;

/// A monotone DNF whose clauses form an antichain. `false` has no clauses and
/// `true` is the single empty clause.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    clauses: Vec<Clause>,
}

impl Provenance {
    pub fn falsum() -> Provenance {
        Provenance { clauses: vec![] }
    }

    pub fn verum() -> Provenance {
        Provenance {
            clauses: vec![Clause::new()],
        }
    }

    pub fn atom(name: &str) -> Provenance {
        Provenance {
            clauses: vec![Clause::from([name.to_string()])],
        }
    }

    /// Canonical form of the disjunction of `clauses`.
    pub fn from_clauses<I: IntoIterator<Item = Clause>>(clauses: I) -> Provenance {
        let mut all: Vec<Clause> = clauses.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut kept: Vec<Clause> = Vec::with_capacity(all.len());
        // Sorted by size, so any subset of a clause is already kept.
        for c in all {
            if !kept.iter().any(|k| k.is_subset(&c)) {
                kept.push(c);
            }
        }
        Provenance { clauses: kept }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_false(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.clauses.len() == 1 && self.clauses[0].is_empty()
    }

    pub fn and(&self, other: &Provenance) -> Provenance {
        let mut out = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                out.push(a.union(b).cloned().collect());
            }
        }
        Provenance::from_clauses(out)
    }

    pub fn or(&self, other: &Provenance) -> Provenance {
        Provenance::from_clauses(self.clauses.iter().chain(&other.clauses).cloned())
    }

    /// Monotone implication `self ⊨ other`.
    pub fn implies(&self, other: &Provenance) -> bool {
        self.clauses
            .iter()
            .all(|c| other.clauses.iter().any(|d| d.is_subset(c)))
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        self.clauses
            .iter()
            .flat_map(|c| c.iter().map(String::as_str))
            .collect()
    }
}

/// Atoms print bare when they are plain identifiers, otherwise in angle brackets.
pub fn format_atom(atom: &str) -> String {
    let plain = atom
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && atom
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !matches!(atom, "true" | "false" | "v");
    if plain {
        atom.to_string()
    } else {
        format!("<{atom}>")
    }
}

fn write_clause(f: &mut fmt::Formatter<'_>, clause: &Clause) -> fmt::Result {
    if clause.len() == 1 {
        return f.write_str(&format_atom(clause.iter().next().expect("one atom")));
    }
    f.write_str("(")?;
    for (i, a) in clause.iter().enumerate() {
        if i > 0 {
            f.write_str(" ^ ")?;
        }
        f.write_str(&format_atom(a))?;
    }
    f.write_str(")")
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_false() {
            return f.write_str("false");
        }
        if self.is_true() {
            return f.write_str("true");
        }
        if self.clauses.len() == 1 {
            return write_clause(f, &self.clauses[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" v ")?;
            }
            write_clause(f, c)?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProvenanceDomain;

impl Semiring for ProvenanceDomain {
    type Value = Provenance;

    fn bottom(&self) -> Provenance {
        Provenance::falsum()
    }

    fn top(&self) -> Provenance {
        Provenance::verum()
    }

    fn oplus(&self, a: &Provenance, b: &Provenance) -> Provenance {
        a.or(b)
    }

    fn otimes(&self, a: &Provenance, b: &Provenance) -> Provenance {
        a.and(b)
    }

    fn preceq(&self, a: &Provenance, b: &Provenance) -> bool {
        a.implies(b)
    }

    fn is_lattice(&self) -> bool {
        true
    }
}

const SAMPLE_ATOMS: [&str; 4] = ["a", "b", "c", "d"];

impl Sample for ProvenanceDomain {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Provenance {
        match rng.gen_range(0..12) {
            0 => Provenance::falsum(),
            1 => Provenance::verum(),
            _ => {
                let n = rng.gen_range(1..=3);
                Provenance::from_clauses((0..n).map(|_| {
                    let k = rng.gen_range(1..=3);
                    (0..k)
                        .map(|_| SAMPLE_ATOMS[rng.gen_range(0..SAMPLE_ATOMS.len())].to_string())
                        .collect()
                }))
            }
        }
    }
}
