use idealspace_core::carrier::{pair, unpair, TreePredicate};
use idealspace_core::fixtures::*;
use idealspace_core::relations::{classify, FiniteRelation};
use idealspace_core::{ElemSet, Verdict};
use proptest::prelude::*;
use std::collections::BTreeMap;

/// Maximal compatible antichains, by brute force over subsets.
fn antichain_oracle(r: &FiniteRelation) -> Vec<ElemSet> {
    let elems: Vec<u64> = r.carrier().iter().copied().collect();
    let good = |s: &ElemSet| {
        !s.is_empty()
            && s.iter().all(|&x| s.iter().all(|&y| x == y || (!r.contains(x, y) && !r.contains(y, x))))
            && elems.iter().any(|&z| s.iter().all(|&x| r.contains(z, x)))
    };
    let mut out = Vec::new();
    for bits in 1u32..(1 << elems.len()) {
        let s: ElemSet = (0..elems.len()).filter(|i| bits & (1 << i) != 0).map(|i| elems[i]).collect();
        if good(&s)
            && elems.iter().all(|y| {
                let mut t = s.clone();
                !t.insert(*y) || !good(&t)
            })
        {
            out.push(s);
        }
    }
    out.sort();
    out
}

proptest! {
    #[test]
    fn antichains_match_oracle(n in 1u64..8, pairs in prop::collection::vec((0u64..8, 0u64..8), 0..16)) {
        let pairs = pairs.into_iter().filter(|&(a, b)| a < n && b < n).collect();
        let r = FiniteRelation::new((0..n).collect(), pairs).unwrap();
        prop_assert_eq!(antichain_census(&r).unwrap(), antichain_oracle(&r));
    }

    #[test]
    fn relabelled_truncations_are_isomorphic(layers in 1u64..4, n in 1u64..5, seed in any::<u64>()) {
        let r = layered_truncation(layers, &unit_grid(n));
        let mut codes: Vec<u64> = r.carrier().iter().copied().collect();
        let mut state = seed;
        for i in (1..codes.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            codes.swap(i, (state >> 33) as usize % (i + 1));
        }
        let perm: BTreeMap<u64, u64> = r.carrier().iter().copied().zip(codes).collect();
        let shuffled = FiniteRelation::new(
            perm.values().copied().collect(),
            r.pairs().iter().map(|(a, b)| (perm[a], perm[b])).collect(),
        ).unwrap();
        let h = find_isomorphism(&r, &shuffled).unwrap();
        for &a in r.carrier() {
            for &b in r.carrier() {
                prop_assert_eq!(r.contains(a, b), shuffled.contains(h[&a], h[&b]));
            }
        }
    }
}

#[test]
fn antichains_count_layers() {
    for layers in 1..=4 {
        let r = layered_truncation(layers, &unit_grid(4));
        let census = antichain_census(&r).unwrap();
        let widest = census.iter().map(ElemSet::len).max().unwrap();
        assert_eq!(widest as u64, layers);
    }
}

#[test]
fn tree_spaces_are_transitive() {
    let trees = [TreePredicate::full(), TreePredicate::root_only(), TreePredicate::bounded_depth(1)];
    for tree in trees {
        for src in [
            tree_space_t1(tree.clone()),
            tree_space_telophase(tree.clone()),
            tree_space_double_origin(tree.clone()),
        ] {
            let report = classify(&src, 300);
            assert!(report.transitive_upto.holds(), "{}", src.label());
            assert!(src.enumerate_upto(100).is_subset(&src.enumerate_upto(300)));
        }
    }
}

#[test]
fn spectrum_components_are_separate() {
    let spec = SpectrumSpec::finite([0, 2].into_iter().collect());
    for variant in [SpectrumVariant::Plain, SpectrumVariant::Star] {
        let r = spectrum_relation(&spec, variant);
        let report = classify(&r, 400);
        assert!(report.transitive_upto.holds());
        assert!(report.irreflexive_upto.holds());
        for (x, y) in r.enumerate_upto(400) {
            assert_eq!(unpair(x).0, unpair(y).0);
        }
    }
}

#[test]
fn spectrum_levels() {
    let spec = SpectrumSpec::finite([1].into_iter().collect());
    assert_eq!(star_layers(1, true, false), 6);
    let r = spectrum_relation(&spec, SpectrumVariant::Plain);
    // component 2 codes a = 1 ∈ A, so it has 2·1 + 1 = 3 layers; component 4 has 4
    let x = |c, m, p| pair(c, pair(m, p));
    assert_eq!(r.decide(x(2, 0, 0), x(2, 2, 1)), Some(true));
    assert_eq!(r.decide(x(2, 0, 0), x(2, 3, 1)), Some(false));
    assert_eq!(r.decide(x(4, 0, 0), x(4, 3, 1)), Some(true));
    assert_eq!(r.decide(x(2, 0, 0), x(4, 1, 1)), Some(false));
    assert_eq!(spec.level_of(3), idealspace_core::relations::Level::Omega);
}

fn flipping(a: u64, row: Vec<bool>, variant: SpectrumVariant) -> CopyRun {
    let mut approx = Approximation { horizon: row.len() as u64, components: 2, ..Default::default() };
    approx.table.insert(a, row);
    CopyRun::new(&SpectrumSpec::finite(ElemSet::new()).with_approximation(approx), variant)
}

#[test]
fn settled_copies_never_move() {
    let run = CopyRun::new(&SpectrumSpec::finite([0, 1].into_iter().collect()), SpectrumVariant::Plain);
    let audit = run.state(20).audit();
    assert!(audit.passed(), "{audit:?}");
    assert_eq!(audit.changes, 0);
    assert!(audit.warnings.is_empty());
}

#[test]
fn plain_copy_abandons_on_a_fall() {
    let run = flipping(1, vec![true, true, true, false], SpectrumVariant::Plain);
    let state = run.state(12);
    assert!(state.audit().passed());
    let abandoned: Vec<_> = state.components().iter().filter(|c| c.abandoned_at.is_some()).collect();
    assert_eq!(abandoned.len(), 1);
    assert_eq!(abandoned[0].kind, ComponentKind::Coded { a: 1 });
}

#[test]
fn star_copy_lowers_on_a_fall() {
    let run = flipping(1, vec![true, true, true, false], SpectrumVariant::Star);
    let audit = run.state(12).audit();
    assert!(audit.passed(), "{audit:?}");
    assert!(audit.changes > 0);
    let ledger = run.state(12).ledger().to_vec();
    assert!(ledger.iter().all(|c| c.to.layer + 1 == c.from.layer && c.stage == 3));
}

#[test]
fn one_layer_copy_cannot_lower() {
    // the complement side of a = 0 has ⟨0, 0, 1⟩ = 1 layer while Ā(0) holds
    let run = flipping(0, vec![false, true], SpectrumVariant::Star);
    let state = run.state(6);
    assert!(state.warnings().iter().any(|w| matches!(w, CopyWarning::CannotLower { .. })));
    assert!(state.audit().passed());
}

#[test]
fn late_rows_are_flagged() {
    let mut approx = Approximation { horizon: 1, ..Default::default() };
    approx.table.insert(0, vec![false, false, true]);
    let state = CopyState::new(&SpectrumSpec::finite(ElemSet::new()).with_approximation(approx), SpectrumVariant::Plain);
    assert_eq!(state.warnings(), &[CopyWarning::Unsettled { a: 0, settles_at: 2, horizon: 1 }]);
}

#[test]
fn copy_relation_is_a_growing_strict_order() {
    let run = flipping(1, vec![false, true, false, true], SpectrumVariant::Star);
    let r = run.relation();
    let mut last = Default::default();
    for s in [2, 5, 9, 14] {
        let now = r.enumerate_upto(s);
        assert!(idealspace_core::PairSet::is_subset(&last, &now));
        last = now;
    }
    assert_eq!(classify(&r, 14).irreflexive_upto, Verdict::Holds);
}
