use idealspace_core::closures::transitive_closure_pairs;
use idealspace_core::constructions::*;
use idealspace_core::ideals::{all_ideals, all_ideals_bounded, IdealView};
use idealspace_core::morphisms::*;
use idealspace_core::relations::{chain, rationals, sierpinski, FiniteRelation, RationalCoding};
use idealspace_core::{ElemSet, Verdict};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn preorder() -> impl Strategy<Value = FiniteRelation> {
    (1u64..5).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..10).prop_map(move |pairs| {
            let mut pairs: idealspace_core::PairSet = pairs.into_iter().collect();
            pairs.extend((0..n).map(|x| (x, x)));
            FiniteRelation::new((0..n).collect(), transitive_closure_pairs(&pairs)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn identity_fixes_every_ideal(r in preorder()) {
        let id = identity_code(&r.as_source());
        let twice = compose(&id, &id);
        for ideal in all_ideals(&r).unwrap().ideals {
            let (once, verdict) = apply_code(&id, &IdealView::Exact(ideal.clone()), 0);
            prop_assert_eq!(verdict, Verdict::Holds);
            prop_assert_eq!(once.elements(), &ideal);
            let (again, _) = apply_code(&twice, &IdealView::Exact(ideal.clone()), 0);
            prop_assert_eq!(again.elements(), &ideal);
        }
        prop_assert_eq!(mor_check(&id, 0, 10).overall(), Verdict::Holds);
    }

    #[test]
    fn relabelling_is_a_morphism(r in preorder(), shift in 1u64..20) {
        let n = r.carrier().len() as u64;
        let map: BTreeMap<u64, u64> = (0..n).map(|x| (x, (n - 1 - x) + shift)).collect();
        let target = FiniteRelation::from_pairs(r.pairs().iter().map(|&(a, b)| (map[&a], map[&b])));
        let target = FiniteRelation::new(map.values().copied().collect(), target.pairs().clone()).unwrap();
        let f = graph_code(&map, &r.as_source(), &target.as_source(), 0).unwrap();
        let target_census = all_ideals(&target).unwrap();
        for ideal in all_ideals(&r).unwrap().ideals {
            let (image, verdict) = apply_code(&f, &IdealView::Exact(ideal.clone()), 0);
            prop_assert_eq!(verdict, Verdict::Holds);
            let expected: ElemSet = ideal.iter().map(|x| map[x]).collect();
            prop_assert_eq!(image.elements(), &expected);
            prop_assert!(target_census.index_of(&expected).is_some());
        }
    }

    #[test]
    fn product_and_coproduct_censuses(r in preorder(), s in preorder()) {
        let (rs, ss) = (r.as_source(), s.as_source());
        let a = all_ideals(&r).unwrap().len();
        let b = all_ideals(&s).unwrap().len();
        let prod = FiniteRelation::from_source(&product(&rs, &ss), 0);
        let sum = FiniteRelation::from_source(&coproduct(&rs, &ss), 0);
        prop_assert_eq!(all_ideals_bounded(&prod, 16).unwrap().len(), a * b);
        prop_assert_eq!(all_ideals(&sum).unwrap().len(), a + b);
    }

    #[test]
    fn extensions_keep_the_points(r in preorder(), u in prop::collection::btree_set(0u64..5, 0..3)) {
        let spec = ExtensionSpec::single(r.as_source(), SetSource::Finite(u));
        let census = extension_census(&spec, 6).unwrap();
        prop_assert!(census.is_bijective());
    }
}

#[test]
fn graph_code_checks_its_hypotheses() {
    let s = sierpinski().as_source();
    let flat = FiniteRelation::from_pairs([(0, 0), (1, 1)]).as_source();
    let id: BTreeMap<u64, u64> = [(0, 0), (1, 1)].into();
    assert!(matches!(
        graph_code(&id, &s, &flat, 0),
        Err(MorphismError::Hypothesis(_))
    ));
    let partial: BTreeMap<u64, u64> = [(0, 0)].into();
    assert!(matches!(
        graph_code(&partial, &s, &s, 0),
        Err(MorphismError::Hypothesis(HypothesisWitness::NotTotal(1)))
    ));
}

#[test]
fn identity_on_the_rationals_passes_the_bounded_check() {
    let q = rationals(RationalCoding::SternBrocot);
    let report = mor_check(&identity_code(&q), 40, 12);
    for (name, verdict) in report.clauses() {
        assert!(!matches!(verdict, Verdict::Refuted(_)), "{name}: {verdict:?}");
    }
}

#[test]
fn bad_code_is_refuted() {
    // Sends 0 to 1 only: not downward closed since 0 ⊑ 1.
    let s = sierpinski().as_source();
    let code = FiniteRelation::from_pairs([(0, 1), (1, 1)]).as_source();
    let report = mor_check(&FunctionCode::new(code, s.clone(), s), 0, 4);
    assert!(matches!(report.downward, Verdict::Refuted(MorWitness::NotDownward { .. })));
}

#[test]
fn closed_point_becomes_open() {
    // {I : 1 ∉ I} is the closed point ↓0 of the two-element chain.
    let base = chain(2, true).as_source();
    let spec = ExtensionSpec::single(base, SetSource::Finite([1].into_iter().collect()));
    let census = extension_census(&spec, 4).unwrap();
    assert!(census.is_bijective());
    assert!(census.is_discrete());
}
