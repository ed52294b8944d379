//! Seeded checker for the annotation-domain axioms.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Sample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub cases: usize,
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub exhaustive: bool,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.counterexample {
                None => writeln!(f, "pass  {} ({} cases)", c.name, c.cases)?,
                Some(ce) => writeln!(f, "FAIL  {}: {}", c.name, ce)?,
            }
        }
        Ok(())
    }
}

type Law<S> = fn(
    &S,
    &<S as super::Semiring>::Value,
    &<S as super::Semiring>::Value,
    &<S as super::Semiring>::Value,
) -> bool;

fn laws<S: Sample>(lattice: bool) -> Vec<(&'static str, Law<S>)> {
    let mut v: Vec<(&'static str, Law<S>)> = vec![
        ("join idempotent", |d, a, _, _| d.oplus(a, a) == *a),
        ("join commutative", |d, a, b, _| d.oplus(a, b) == d.oplus(b, a)),
        ("join associative", |d, a, b, c| {
            d.oplus(&d.oplus(a, b), c) == d.oplus(a, &d.oplus(b, c))
        }),
        ("meet commutative", |d, a, b, _| d.otimes(a, b) == d.otimes(b, a)),
        ("meet associative", |d, a, b, c| {
            d.otimes(&d.otimes(a, b), c) == d.otimes(a, &d.otimes(b, c))
        }),
        ("bottom neutral for join", |d, a, _, _| d.oplus(&d.bottom(), a) == *a),
        ("top neutral for meet", |d, a, _, _| d.otimes(&d.top(), a) == *a),
        ("bottom annihilates meet", |d, a, _, _| {
            d.otimes(&d.bottom(), a) == d.bottom()
        }),
        ("top annihilates join", |d, a, _, _| d.oplus(&d.top(), a) == d.top()),
        ("meet distributes over join", |d, a, b, c| {
            d.otimes(a, &d.oplus(b, c)) == d.oplus(&d.otimes(a, b), &d.otimes(a, c))
        }),
        ("order reflexive", |d, a, _, _| d.preceq(a, a)),
        ("order antisymmetric", |d, a, b, _| {
            !(d.preceq(a, b) && d.preceq(b, a)) || a == b
        }),
        ("order transitive", |d, a, b, c| {
            !(d.preceq(a, b) && d.preceq(b, c)) || d.preceq(a, c)
        }),
        ("order agrees with join", |d, a, b, _| {
            d.preceq(a, b) == (d.oplus(a, b) == *b)
        }),
        ("join is an upper bound", |d, a, b, _| {
            let j = d.oplus(a, b);
            d.preceq(a, &j) && d.preceq(b, &j)
        }),
        ("meet is bounded", |d, a, b, _| {
            let m = d.otimes(a, b);
            d.preceq(&m, a) && d.preceq(&m, b)
        }),
        ("meet is monotone", |d, a, b, c| {
            !d.preceq(a, b) || d.preceq(&d.otimes(c, a), &d.otimes(c, b))
        }),
    ];
    if lattice {
        v.push(("lattice law", |d, x, y, z| {
            (d.preceq(z, x) && d.preceq(z, y)) == d.preceq(z, &d.otimes(x, y))
        }));
    }
    v
}

/// Checks every axiom on `samples` random triples drawn with `seed`, or on all
/// triples when the domain exposes a finite universe.
pub fn axiom_suite<S: Sample>(domain: &S, samples: usize, seed: u64) -> AxiomReport {
    let laws = laws::<S>(domain.is_lattice());
    let mut checks: Vec<AxiomCheck> = laws
        .iter()
        .map(|(name, _)| AxiomCheck {
            name,
            cases: 0,
            counterexample: None,
        })
        .collect();
    let mut run = |a: &S::Value, b: &S::Value, c: &S::Value| {
        for ((_, law), check) in laws.iter().zip(checks.iter_mut()) {
            if check.counterexample.is_some() {
                continue;
            }
            check.cases += 1;
            if !law(domain, a, b, c) {
                check.counterexample = Some(format!("a = {a}, b = {b}, c = {c}"));
            }
        }
    };
    let exhaustive = match domain.universe() {
        Some(all) => {
            for a in &all {
                for b in &all {
                    for c in &all {
                        run(a, b, c);
                    }
                }
            }
            true
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let a = domain.sample(&mut rng);
                let b = domain.sample(&mut rng);
                let c = domain.sample(&mut rng);
                run(&a, &b, &c);
            }
            false
        }
    };
    AxiomReport { checks, exhaustive }
}
