//! Seeded property suites for compound domains.
//!
//! They check that every pair set denotes a quasihomomorphism, that
//! normalisation preserves the denoted function, that two pair sets denoting
//! the same function share a normal form, and that the pairwise saturation
//! agrees with the exhaustive one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CompoundDomain, Pair};
use crate::domain::axioms::{AxiomCheck, AxiomReport};
use crate::domain::{Sample, Semiring};

/// Generated sublattices larger than this are skipped.
const LATTICE_CAP: usize = 96;

fn check(name: &'static str) -> AxiomCheck {
    AxiomCheck {
        name,
        cases: 0,
        counterexample: None,
    }
}

fn random_pairs<A: Sample, B: Sample, R: Rng>(
    d: &CompoundDomain<A, B>,
    rng: &mut R,
    max: usize,
) -> Vec<Pair<A, B>> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| (d.first.sample(rng), d.second.sample(rng)))
        .collect()
}

fn show<A: Semiring, B: Semiring>(pairs: &[Pair<A, B>]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(x, y)| format!("<{x}, {y}>")).collect();
    format!("[{}]", parts.join(", "))
}

/// The closure of `generators ∪ {⊥, ⊤}` under join and meet, or `None` when it
/// exceeds `cap` elements.
pub fn generated_sublattice<A: Semiring>(
    a: &A,
    generators: impl IntoIterator<Item = A::Value>,
    cap: usize,
) -> Option<Vec<A::Value>> {
    let mut all: Vec<A::Value> = vec![a.bottom(), a.top()];
    for g in generators {
        if !all.contains(&g) {
            all.push(g);
        }
    }
    let mut frontier = 0;
    while frontier < all.len() {
        let end = all.len();
        for i in 0..end {
            for j in frontier.max(i)..end {
                for v in [a.oplus(&all[i], &all[j]), a.otimes(&all[i], &all[j])] {
                    if !all.contains(&v) {
                        all.push(v);
                        if all.len() > cap {
                            return None;
                        }
                    }
                }
            }
        }
        frontier = end;
    }
    Some(all)
}

/// `f(z ⊕ z') ⪰ f(z) ⊗ f(z')` and `f(z ⊗ z') ⪰ f(z) ⊕ f(z')` for random pair
/// sets `f` and random points.
pub fn quasihomomorphism_check<A: Sample, B: Sample>(
    d: &CompoundDomain<A, B>,
    values: usize,
    points: usize,
    seed: u64,
) -> AxiomCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check("pair sets denote quasihomomorphisms");
    let (a, b) = (&d.first, &d.second);
    for _ in 0..values {
        let pairs = random_pairs(d, &mut rng, 3);
        for _ in 0..points {
            let z = a.sample(&mut rng);
            let z2 = a.sample(&mut rng);
            let (fz, fz2) = (d.evaluate(&pairs, &z), d.evaluate(&pairs, &z2));
            out.cases += 1;
            let join_ok = b.preceq(&b.otimes(&fz, &fz2), &d.evaluate(&pairs, &a.oplus(&z, &z2)));
            let meet_ok = b.preceq(&b.oplus(&fz, &fz2), &d.evaluate(&pairs, &a.otimes(&z, &z2)));
            if !(join_ok && meet_ok) {
                out.counterexample = Some(format!("A = {}, z = {z}, z' = {z2}", show::<A, B>(&pairs)));
                return out;
            }
        }
    }
    out
}

/// `evaluate(A, z) = evaluate(normalise(A), z)` for every `z` in the
/// sublattice generated by the first components of `A`.
pub fn representation_check<A: Sample, B: Sample>(
    d: &CompoundDomain<A, B>,
    values: usize,
    seed: u64,
) -> AxiomCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check("normalisation preserves the denoted function");
    for _ in 0..values {
        let pairs = random_pairs(d, &mut rng, 3);
        let Some(lattice) =
            generated_sublattice(&d.first, pairs.iter().map(|p| p.0.clone()), LATTICE_CAP)
        else {
            continue;
        };
        let normal = d.normalise(&pairs);
        out.cases += 1;
        if let Some(z) = lattice
            .iter()
            .find(|z| d.evaluate(&pairs, z) != d.evaluate(normal.pairs(), z))
        {
            out.counterexample = Some(format!("A = {}, z = {z}", show::<A, B>(&pairs)));
            return out;
        }
    }
    out
}

/// A second pair set related to `pairs`: sometimes denoting the same function
/// (saturation steps, dominated additions, the normal form itself), sometimes
/// not (perturbed or dropped pairs).
fn companion<A: Sample, B: Sample, R: Rng>(
    d: &CompoundDomain<A, B>,
    pairs: &[Pair<A, B>],
    rng: &mut R,
) -> Vec<Pair<A, B>> {
    let (a, b) = (&d.first, &d.second);
    let mut out = pairs.to_vec();
    let pick = |rng: &mut R| pairs[rng.gen_range(0..pairs.len())].clone();
    match (pairs.is_empty(), rng.gen_range(0..6)) {
        (true, _) | (_, 0) => return random_pairs(d, rng, 2),
        (_, 1) => {
            let (p, q) = (pick(rng), pick(rng));
            out.push((a.otimes(&p.0, &q.0), b.oplus(&p.1, &q.1)));
            out.push((a.oplus(&p.0, &q.0), b.otimes(&p.1, &q.1)));
        }
        (_, 2) => {
            let p = pick(rng);
            out.push((a.otimes(&p.0, &a.sample(rng)), b.otimes(&p.1, &b.sample(rng))));
        }
        (_, 3) => {
            let i = rng.gen_range(0..out.len());
            out[i].1 = b.sample(rng);
        }
        (_, 4) => return d.normalise(pairs).pairs().to_vec(),
        _ => {
            out.remove(rng.gen_range(0..out.len()));
        }
    }
    out.reverse();
    out
}

/// Pair sets that agree as functions on their generated sublattice have the
/// same normal form, and pair sets with the same normal form agree.
pub fn canonicity_check<A: Sample, B: Sample>(
    d: &CompoundDomain<A, B>,
    trials: usize,
    seed: u64,
) -> AxiomCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check("equal functions have equal normal forms");
    for _ in 0..trials {
        let left = random_pairs(d, &mut rng, 2);
        let right = companion(d, &left, &mut rng);
        let generators = left.iter().chain(&right).map(|p| p.0.clone());
        let Some(lattice) = generated_sublattice(&d.first, generators, LATTICE_CAP) else {
            continue;
        };
        out.cases += 1;
        let agree = lattice
            .iter()
            .all(|z| d.evaluate(&left, z) == d.evaluate(&right, z));
        let same_form = d.normalise(&left) == d.normalise(&right);
        if agree != same_form {
            out.counterexample = Some(format!(
                "A = {}, B = {}, functions agree: {agree}, normal forms equal: {same_form}",
                show::<A, B>(&left),
                show::<A, B>(&right)
            ));
            return out;
        }
    }
    out
}

/// `Reduce(saturate_fast(A)) = Reduce(saturate_naive(A))` for `|A| ≤ 3`.
pub fn saturation_check<A: Sample, B: Sample>(
    d: &CompoundDomain<A, B>,
    trials: usize,
    seed: u64,
) -> AxiomCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = check("pairwise saturation matches exhaustive saturation");
    for _ in 0..trials {
        let pairs = random_pairs(d, &mut rng, 3);
        let Ok(naive) = d.saturate_naive(&pairs) else {
            continue;
        };
        out.cases += 1;
        if d.reduce(&naive) != d.reduce(&d.saturate_fast(&pairs)) {
            out.counterexample = Some(format!("A = {}", show::<A, B>(&pairs)));
            return out;
        }
    }
    out
}

/// All four compound suites with the default sizes.
pub fn compound_suite<A: Sample, B: Sample>(d: &CompoundDomain<A, B>, seed: u64) -> AxiomReport {
    AxiomReport {
        checks: vec![
            quasihomomorphism_check(d, 500, 20, seed),
            representation_check(d, 500, seed.wrapping_add(1)),
            canonicity_check(d, 200, seed.wrapping_add(2)),
            saturation_check(d, 200, seed.wrapping_add(3)),
        ],
        exhaustive: false,
    }
}
