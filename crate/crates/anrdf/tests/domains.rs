mod common;

use std::collections::BTreeSet;

use anrdf::domain::axioms::axiom_suite;
use anrdf::domain::temporal::{allen_lifted, AllenRelation, Quantifier};
use anrdf::domain::{
    BooleanDomain, Degree, Domain, FuzzyDomain, Interval, Provenance, ProvenanceDomain, Sample,
    Semiring, TNorm, TemporalDomain, TemporalValue,
};
use common::*;
use proptest::prelude::*;

fn set(ivs: &[(i64, i64)]) -> TemporalValue {
    TemporalValue::from_intervals(ivs.iter().map(|&(a, b)| Interval::years(a, b)))
}

#[test]
fn interval_set_join_and_meet() {
    let a = set(&[(2, 5), (8, 12)]);
    let b = set(&[(4, 6), (9, 15)]);
    assert_eq!(TemporalDomain.oplus(&a, &b), set(&[(2, 6), (8, 15)]));
    assert_eq!(TemporalDomain.otimes(&a, &b), set(&[(4, 5), (9, 12)]));
    assert!(!set(&[(2005, 2010)]).leq(&set(&[(2002, 2009)])));
    assert_eq!(a.length().unwrap(), anrdf::domain::rational::from_int(7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn temporal_operations_match_point_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (TemporalDomain.sample(&mut r), TemporalDomain.sample(&mut r));
        let join = TemporalDomain.oplus(&a, &b);
        let meet = TemporalDomain.otimes(&a, &b);
        let mut subset = true;
        for x in probe_points() {
            let (ia, ib) = (temporal_covers(&a, &x), temporal_covers(&b, &x));
            prop_assert_eq!(temporal_covers(&join, &x), ia || ib, "join at {}", x);
            prop_assert_eq!(temporal_covers(&meet, &x), ia && ib, "meet at {}", x);
            subset &= !ia || ib;
        }
        prop_assert_eq!(TemporalDomain.preceq(&a, &b), subset);
        // Canonical form: sorted, disjoint, non-touching intervals.
        for w in join.intervals().windows(2) {
            prop_assert!(w[0].hi() < w[1].lo());
        }
    }

    #[test]
    fn provenance_operations_match_truth_tables(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (ProvenanceDomain.sample(&mut r), ProvenanceDomain.sample(&mut r));
        let atoms: Vec<String> = a.atoms().into_iter().chain(b.atoms()).map(String::from)
            .collect::<BTreeSet<_>>().into_iter().collect();
        let (and, or) = (a.and(&b), a.or(&b));
        let mut implied = true;
        for v in assignments(&atoms) {
            let (x, y) = (provenance_holds(&a, &v), provenance_holds(&b, &v));
            prop_assert_eq!(provenance_holds(&and, &v), x && y);
            prop_assert_eq!(provenance_holds(&or, &v), x || y);
            implied &= !x || y;
        }
        prop_assert_eq!(a.implies(&b), implied);
        // Antichain: no clause contains another.
        for (i, c) in and.clauses().iter().enumerate() {
            for (j, d) in and.clauses().iter().enumerate() {
                prop_assert!(i == j || !c.is_subset(d));
            }
        }
    }

    #[test]
    fn tnorms_are_commutative_associative_monotone(seed in any::<u64>(), which in 0usize..3) {
        let d = FuzzyDomain::new([TNorm::Min, TNorm::Product, TNorm::Lukasiewicz][which]);
        let mut r = rng(seed);
        let (a, b, c) = (d.sample(&mut r), d.sample(&mut r), d.sample(&mut r));
        prop_assert_eq!(d.otimes(&a, &b), d.otimes(&b, &a));
        prop_assert_eq!(d.otimes(&d.otimes(&a, &b), &c), d.otimes(&a, &d.otimes(&b, &c)));
        prop_assert_eq!(d.otimes(&a, &Degree::one()), a.clone());
        if a <= b {
            prop_assert!(d.otimes(&a, &c) <= d.otimes(&b, &c));
        }
        prop_assert!(d.otimes(&a, &b) <= a.clone().min(b.clone()));
    }
}

#[test]
fn allen_relations_partition_proper_intervals() {
    let points = [0, 1, 2, 3, 4];
    for a in points {
        for b in points.iter().filter(|&&b| b > a) {
            for c in points {
                for d in points.iter().filter(|&&d| d > c) {
                    let (x, y) = (Interval::years(a, *b), Interval::years(c, *d));
                    let n = AllenRelation::ALL.iter().filter(|r| r.holds(&x, &y)).count();
                    assert_eq!(n, 1, "[{a},{b}] vs [{c},{d}]");
                    for r in AllenRelation::ALL {
                        assert_eq!(r.holds(&x, &y), r.inverse().holds(&y, &x));
                    }
                }
            }
        }
    }
}

#[test]
fn allen_quantifiers_form_a_hierarchy() {
    let mut r = rng(7);
    for _ in 0..400 {
        let (a, b) = (TemporalDomain.sample(&mut r), TemporalDomain.sample(&mut r));
        if a.is_empty() || b.is_empty() {
            assert!(allen_lifted(AllenRelation::Before, Quantifier::ExistsExists, &a, &b).is_err());
            continue;
        }
        for rel in AllenRelation::ALL {
            let q = |q| allen_lifted(rel, q, &a, &b).unwrap();
            let (ee, ea, ae, eaae, aa) = (
                q(Quantifier::ExistsExists),
                q(Quantifier::ExistsForall),
                q(Quantifier::ForallExists),
                q(Quantifier::ExistsForallAndForallExists),
                q(Quantifier::ForallForall),
            );
            assert!(!aa || (ea && ae), "{rel:?} on {a} {b}");
            assert!(!ea || ee);
            assert!(!ae || ee);
            assert_eq!(eaae, ea && ae);
        }
    }
    let before = |x: &TemporalValue, y: &TemporalValue, q| {
        allen_lifted(AllenRelation::Before, q, x, y).unwrap()
    };
    let (x, y) = (set(&[(0, 2), (3, 4)]), set(&[(5, 7), (8, 9)]));
    assert!(before(&x, &y, Quantifier::ForallForall));
    let (x, y) = (set(&[(0, 2), (6, 7)]), set(&[(5, 9)]));
    assert!(before(&x, &y, Quantifier::ExistsExists));
    assert!(!before(&x, &y, Quantifier::ForallForall));
}

#[test]
fn provenance_canonical_forms() {
    let p = |s: &str| Provenance::atom(s);
    let x = p("a").or(&p("a").and(&p("b")));
    assert_eq!(x, p("a"));
    assert_eq!(p("a").and(&Provenance::falsum()), Provenance::falsum());
    assert_eq!(p("a").or(&Provenance::verum()), Provenance::verum());
    assert_eq!(p("chad").and(&p("foaf")).to_string(), "(chad ^ foaf)");
}

#[test]
fn only_min_is_a_lattice() {
    assert!(FuzzyDomain::new(TNorm::Min).is_lattice());
    for t in [TNorm::Product, TNorm::Lukasiewicz] {
        let d = FuzzyDomain::new(t);
        assert!(!d.is_lattice());
        let half = Degree::new(anrdf::domain::rational::ratio(1, 2)).unwrap();
        assert_ne!(d.otimes(&half, &half), half, "{t:?} is idempotent at 0.5");
    }
}

#[test]
fn boolean_operations_exhaustive() {
    let d = BooleanDomain;
    for a in [false, true] {
        for b in [false, true] {
            assert_eq!(d.oplus(&a, &b), a || b);
            assert_eq!(d.otimes(&a, &b), a && b);
            assert_eq!(d.preceq(&a, &b), !a || b);
        }
    }
    assert_eq!(d.universe().unwrap().len(), 2);
}

#[test]
fn axiom_suites_pass_for_shipped_domains() {
    for id in [
        "boolean",
        "fuzzy:min",
        "fuzzy:product",
        "fuzzy:lukasiewicz",
        "temporal",
        "provenance",
        "compound(temporal,provenance)",
    ] {
        let d = Domain::from_id(id).unwrap();
        let report = axiom_suite(&d, 150, 11);
        assert!(report.all_passed(), "{id}:\n{report}");
    }
}

/// With a non-idempotent second component, the pair-set meet does not
/// distribute over the pair-set join; every other law still holds.
#[test]
fn product_compound_fails_only_distributivity() {
    let d = Domain::from_id("compound(temporal,fuzzy:product)").unwrap();
    let report = axiom_suite(&d, 150, 11);
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    assert_eq!(failed, ["meet distributes over join"], "{report}");
}

#[test]
fn registry_rejects_bad_compounds() {
    use anrdf::domain::DomainError;
    assert!(matches!(
        Domain::from_id("compound(fuzzy:product,temporal)"),
        Err(DomainError::NonLattice(_))
    ));
    assert!(matches!(Domain::from_id("nope"), Err(DomainError::UnknownDomain(_))));
}
