//! Ideals of a relation: exact censuses for finite relations, prefix-relative
//! checks for infinite ones, and the maps between a transitive relation and
//! its strictification.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

use crate::carrier::decode_mask_pair;
use crate::closures::strictify;
use crate::relations::{FiniteRelation, Prefix, RelationSource};
use crate::verdict::absent;
use crate::{Code, ElemSet, Stage, Verdict};

pub const DEFAULT_CENSUS_BOUND: usize = 14;

/// An ideal, either known completely or observed up to a stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealView {
    Exact(ElemSet),
    Prefix {
        /// A chain whose downward closure is `observed`.
        generators: Vec<Code>,
        observed: ElemSet,
        stage: Stage,
    },
}

impl IdealView {
    /// The observed prefix of a chain-generated ideal.
    pub fn from_chain(r: &RelationSource, generators: Vec<Code>, stage: Stage) -> IdealView {
        let seed: ElemSet = generators.iter().copied().collect();
        let observed = downward_closure(r, &seed, stage);
        IdealView::Prefix {
            generators,
            observed,
            stage,
        }
    }

    pub fn elements(&self) -> &ElemSet {
        match self {
            IdealView::Exact(set) => set,
            IdealView::Prefix { observed, .. } => observed,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, IdealView::Exact(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum IdealWitness {
    Empty,
    /// `below ≺ member`, `member ∈ I`, `below ∉ I`.
    MissingLower { member: Code, below: Code },
    /// No element of `I` is above both.
    NoUpperBound(Code, Code),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("carrier has {size} elements; the census bound is {bound}")]
    CarrierTooLarge { size: usize, bound: usize },
    #[error("not an ideal: {0:?}")]
    NotIdeal(IdealWitness),
    #[error("relation is not transitive")]
    NotTransitive,
}

/// All ideals of a finite relation, with inclusion between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealCensus {
    pub relation: FiniteRelation,
    /// Sorted.
    pub ideals: Vec<ElemSet>,
    /// `(i, j)` with `ideals[i] ⊊ ideals[j]`.
    pub specialization: Vec<(usize, usize)>,
}

impl IdealCensus {
    fn assemble(relation: FiniteRelation, mut ideals: Vec<ElemSet>) -> IdealCensus {
        ideals.sort();
        ideals.dedup();
        let mut specialization = Vec::new();
        for (i, a) in ideals.iter().enumerate() {
            for (j, b) in ideals.iter().enumerate() {
                if i != j && a.is_subset(b) {
                    specialization.push((i, j));
                }
            }
        }
        IdealCensus {
            relation,
            ideals,
            specialization,
        }
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn index_of(&self, ideal: &ElemSet) -> Option<usize> {
        self.ideals.binary_search(ideal).ok()
    }

    /// Ideals containing `n`: the basic open `[n]`.
    pub fn basic_open(&self, n: Code) -> Vec<usize> {
        (0..self.ideals.len())
            .filter(|&i| self.ideals[i].contains(&n))
            .collect()
    }
}

/// Exhaustive census over all subsets of the carrier.
pub fn all_ideals(r: &FiniteRelation) -> Result<IdealCensus, IdealError> {
    all_ideals_bounded(r, DEFAULT_CENSUS_BOUND)
}

pub fn all_ideals_bounded(r: &FiniteRelation, bound: usize) -> Result<IdealCensus, IdealError> {
    let elems: Vec<Code> = r.carrier().iter().copied().collect();
    let k = elems.len();
    if k > bound || k >= 32 {
        return Err(IdealError::CarrierTooLarge { size: k, bound });
    }
    let index: BTreeMap<Code, usize> = elems.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut pred = alloc::vec![0u32; k];
    let mut succ = alloc::vec![0u32; k];
    for &(a, b) in r.pairs() {
        let (i, j) = (index[&a], index[&b]);
        pred[j] |= 1 << i;
        succ[i] |= 1 << j;
    }
    let mut ideals = Vec::new();
    for set in 1u32..(1u32 << k) {
        let members = || (0..k).filter(move |&i| set & (1 << i) != 0);
        let lower = members().all(|i| pred[i] & !set == 0);
        let directed = lower
            && members().all(|i| members().all(|j| succ[i] & succ[j] & set != 0));
        if directed {
            ideals.push(members().map(|i| elems[i]).collect());
        }
    }
    Ok(IdealCensus::assemble(r.clone(), ideals))
}

/// Census of a finite transitive relation of any size: its ideals are
/// exactly the sets `↓u` with `u ≺ u`.
pub fn principal_census(r: &FiniteRelation) -> Result<IdealCensus, IdealError> {
    if !r.is_transitive() {
        return Err(IdealError::NotTransitive);
    }
    let ideals = r
        .carrier()
        .iter()
        .filter(|&&u| r.contains(u, u))
        .map(|&u| r.carrier().iter().copied().filter(|&x| r.contains(x, u)).collect())
        .collect();
    Ok(IdealCensus::assemble(r.clone(), ideals))
}

/// The ideal axioms for a finite set, against the stage prefix.
pub fn check_ideal(r: &RelationSource, set: &ElemSet, stage: Stage) -> Verdict<IdealWitness> {
    check_in_prefix(r, &r.prefix(stage), set)
}

pub(crate) fn check_in_prefix(
    r: &RelationSource,
    p: &Prefix,
    set: &ElemSet,
) -> Verdict<IdealWitness> {
    if set.is_empty() {
        return Verdict::Refuted(IdealWitness::Empty);
    }
    for &member in set {
        if let Some(below) = p.preds(member).find(|x| !set.contains(x)) {
            return Verdict::Refuted(IdealWitness::MissingLower { member, below });
        }
    }
    let mut undecided = false;
    let elems: Vec<Code> = set.iter().copied().collect();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i..] {
            if elems.iter().any(|&c| p.contains(a, c) && p.contains(b, c)) {
                continue;
            }
            let final_absence = elems.iter().all(|&c| {
                (!p.contains(a, c) && r.absence_is_final(a, c))
                    || (!p.contains(b, c) && r.absence_is_final(b, c))
            });
            match absent(final_absence, IdealWitness::NoUpperBound(a, b)) {
                Verdict::Unknown => undecided = true,
                refuted => return refuted,
            }
        }
    }
    if undecided {
        Verdict::Unknown
    } else {
        Verdict::Holds
    }
}

/// Least superset of `seed` closed under predecessors visible at `stage`.
pub fn downward_closure(r: &RelationSource, seed: &ElemSet, stage: Stage) -> ElemSet {
    close_down(&r.prefix(stage), seed)
}

pub(crate) fn close_down(p: &Prefix, seed: &ElemSet) -> ElemSet {
    let mut out = seed.clone();
    let mut stack: Vec<Code> = seed.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for y in p.preds(x) {
            if out.insert(y) {
                stack.push(y);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Strictification maps

/// The image `f(I) = {⟨F, m⟩ : F ⊆ I}` of an ideal under the map into the
/// ideals of the strictified relation, held intensionally.
#[derive(Clone, Debug)]
pub struct StrictifiedIdeal {
    base: ElemSet,
    strict: RelationSource,
}

impl StrictifiedIdeal {
    pub fn base(&self) -> &ElemSet {
        &self.base
    }

    /// Membership of a code of the strictified carrier.
    pub fn contains(&self, code: Code) -> bool {
        let (mask, _) = decode_mask_pair(code);
        (0..64)
            .filter(|i| mask & (1 << i) != 0)
            .all(|x| self.base.contains(&x))
    }

    /// Members among the strictified carrier codes below `bound`.
    pub fn materialize(&self, bound: Code) -> ElemSet {
        self.strict
            .carrier_upto(bound)
            .into_iter()
            .filter(|&c| self.contains(c))
            .collect()
    }
}

/// `f` for the strictification of `r`. `r` should already be transitive.
pub fn strictify_forward(
    r: &RelationSource,
    ideal: &ElemSet,
    stage: Stage,
) -> Result<StrictifiedIdeal, IdealError> {
    if let Verdict::Refuted(w) = check_ideal(r, ideal, stage) {
        return Err(IdealError::NotIdeal(w));
    }
    Ok(StrictifiedIdeal {
        base: ideal.clone(),
        strict: strictify(r),
    })
}

/// `g(J)`: the union of the sets `F` over the codes `⟨F, m⟩` observed in `J`.
pub fn strictify_back(view: &IdealView) -> ElemSet {
    let mut out = ElemSet::new();
    for &code in view.elements() {
        let (mask, _) = decode_mask_pair(code);
        out.extend((0..64).filter(|i| mask & (1 << i) != 0));
    }
    out
}

// ---------------------------------------------------------------------------
// Principal and non-principal ideals

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Principality {
    /// The ideal has this largest element.
    Principal(Code),
    /// The generating chain is still strictly growing at the observed stage.
    NonPrincipalSoFar,
}

/// Whether an ideal has a largest element. `le` is the order (typically a
/// reflexive closure) read at `stage`.
pub fn principality(le: &RelationSource, view: &IdealView, stage: Stage) -> Principality {
    let p = le.prefix(stage);
    match view {
        IdealView::Exact(set) => set
            .iter()
            .copied()
            .find(|&c| set.iter().all(|&x| p.contains(x, c)))
            .map_or(Principality::NonPrincipalSoFar, Principality::Principal),
        IdealView::Prefix { generators, .. } => {
            let strictly_growing = generators.len() >= 2
                && generators
                    .windows(2)
                    .all(|w| w[0] != w[1] && p.contains(w[0], w[1]));
            match generators.last() {
                Some(&top) if !strictly_growing => Principality::Principal(top),
                _ => Principality::NonPrincipalSoFar,
            }
        }
    }
}

/// Census ideals with no largest element under the census relation.
pub fn nonprincipal_filter(census: &IdealCensus) -> Vec<ElemSet> {
    let r = &census.relation;
    census
        .ideals
        .iter()
        .filter(|set| {
            !set
                .iter()
                .any(|&c| set.iter().all(|&x| r.contains(x, c)))
        })
        .cloned()
        .collect()
}

/// Views that are not principal as far as `stage` shows.
pub fn nonprincipal_views(le: &RelationSource, views: &[IdealView], stage: Stage) -> Vec<IdealView> {
    views
        .iter()
        .filter(|v| principality(le, v, stage) == Principality::NonPrincipalSoFar)
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// Interpolability

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InterpolationGap {
    pub y: Code,
    /// At most two elements below `y` with no common upper bound below `y`.
    pub f: Vec<Code>,
}

/// Bounded test that every initial segment `{x : x ≺ y}` is directed.
///
/// For each `y ≤ element_bound` and each `F` of at most two elements of its
/// segment, also bounded, search the prefix for `z` with `F ≺ z ≺ y`. For a
/// transitive relation pairs suffice. `F = ∅` asks that the segment be
/// nonempty and is skipped when `empty_segment_ok` is set. A missing witness
/// refutes only a static source.
pub fn interpolable_bounded(
    r: &RelationSource,
    element_bound: Code,
    stage: Stage,
    empty_segment_ok: bool,
) -> Verdict<InterpolationGap> {
    let p = r.prefix(stage);
    let definitive = r.is_static();
    let mut undecided = false;
    let mut record = |gap: InterpolationGap| -> Option<Verdict<InterpolationGap>> {
        match absent(definitive, gap) {
            Verdict::Unknown => {
                undecided = true;
                None
            }
            refuted => Some(refuted),
        }
    };
    let tops: Vec<Code> = p.carrier.range(..=element_bound).copied().collect();
    for y in tops {
        let empty = ElemSet::new();
        let below = p.pred_set(y).unwrap_or(&empty);
        if !empty_segment_ok && below.is_empty() {
            if let Some(v) = record(InterpolationGap { y, f: Vec::new() }) {
                return v;
            }
            continue;
        }
        let segment: Vec<Code> = below.range(..=element_bound).copied().collect();
        for (i, &a) in segment.iter().enumerate() {
            for &b in &segment[i..] {
                let found = p
                    .succs(a)
                    .any(|z| below.contains(&z) && p.contains(b, z));
                if !found {
                    let f = if a == b { alloc::vec![a] } else { alloc::vec![a, b] };
                    if let Some(v) = record(InterpolationGap { y, f }) {
                        return v;
                    }
                }
            }
        }
    }
    if undecided {
        Verdict::Unknown
    } else {
        Verdict::Holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::{rationals, RationalCoding};

    fn fin(pairs: &[(Code, Code)]) -> FiniteRelation {
        FiniteRelation::from_pairs(pairs.iter().copied())
    }

    fn set(xs: &[Code]) -> ElemSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn census_examples() {
        assert!(all_ideals(&fin(&[(0, 1)])).unwrap().is_empty());
        assert_eq!(all_ideals(&fin(&[(0, 0)])).unwrap().ideals, [set(&[0])]);
        let s = all_ideals(&fin(&[(0, 0), (0, 1), (1, 1)])).unwrap();
        assert_eq!(s.ideals, [set(&[0]), set(&[0, 1])]);
        assert_eq!(s.specialization, [(0, 1)]);
        assert_eq!(s.basic_open(1), [1]);
    }

    #[test]
    fn census_bound() {
        let big = crate::relations::antichain(15);
        assert_eq!(
            all_ideals(&big),
            Err(IdealError::CarrierTooLarge { size: 15, bound: 14 })
        );
        assert_eq!(principal_census(&big).unwrap().len(), 15);
    }

    #[test]
    fn check_ideal_examples() {
        let point = fin(&[(0, 0)]).as_source();
        assert_eq!(check_ideal(&point, &set(&[0]), 3), Verdict::Holds);
        let s = fin(&[(0, 0), (0, 1), (1, 1)]).as_source();
        assert_eq!(
            check_ideal(&s, &set(&[1]), 0),
            Verdict::Refuted(IdealWitness::MissingLower { member: 1, below: 0 })
        );
        assert_eq!(check_ideal(&s, &ElemSet::new(), 0), Verdict::Refuted(IdealWitness::Empty));
    }

    #[test]
    fn rational_sets_without_upper_bound() {
        let q = rationals(RationalCoding::SternBrocot);
        // A single rational has no strict upper bound inside the set.
        let v = check_ideal(&q, &set(&[1]), 1);
        assert_eq!(v, Verdict::Refuted(IdealWitness::NoUpperBound(1, 1)));
    }

    #[test]
    fn downward_closure_examples() {
        let point = fin(&[(0, 0)]).as_source();
        assert_eq!(downward_closure(&point, &set(&[0]), 0), set(&[0]));
        let chain = fin(&[(0, 1), (1, 2)]).as_source();
        let once = downward_closure(&chain, &set(&[2]), 0);
        assert_eq!(once, set(&[0, 1, 2]));
        assert_eq!(downward_closure(&chain, &once, 0), once);
    }

    #[test]
    fn strictify_round_trip_on_point() {
        let point = fin(&[(0, 0)]).as_source();
        let f = strictify_forward(&point, &set(&[0]), 0).unwrap();
        let empty0 = crate::carrier::encode_finset_pair(&ElemSet::new(), 3).unwrap();
        let zero5 = crate::carrier::encode_finset_pair(&set(&[0]), 5).unwrap();
        assert!(f.contains(empty0) && f.contains(zero5));
        let j = IdealView::Exact(f.materialize(100));
        assert_eq!(strictify_back(&j), set(&[0]));
        assert!(matches!(
            strictify_forward(&point, &set(&[1]), 0),
            Err(IdealError::NotIdeal(_))
        ));
    }

    #[test]
    fn finite_censuses_have_no_nonprincipal_ideals() {
        let s = all_ideals(&fin(&[(0, 0), (0, 1), (1, 1)])).unwrap();
        assert!(nonprincipal_filter(&s).is_empty());
    }

    #[test]
    fn two_chain_is_not_interpolable() {
        let chain = fin(&[(0, 1)]).as_source();
        let v = interpolable_bounded(&chain, 5, 0, true);
        assert_eq!(v, Verdict::Refuted(InterpolationGap { y: 1, f: alloc::vec![0] }));
        let v = interpolable_bounded(&chain, 5, 0, false);
        assert_eq!(v, Verdict::Refuted(InterpolationGap { y: 0, f: Vec::new() }));
    }

    #[test]
    fn rationals_interpolate_on_bounded_prefix() {
        let q = rationals(RationalCoding::Dyadic);
        assert_eq!(interpolable_bounded(&q, 20, 400, false), Verdict::Holds);
    }
}
