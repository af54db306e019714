//! Function codes between ideal spaces.
//!
//! A code is a relation `R` read as the map `I ↦ {n : ∃m ∈ I, (m, n) ∈ R}`.
//! Pairs are oriented source first: in `(m, n)`, `m` is an element of the
//! source relation's carrier and `n` of the target's.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::ideals::{self, check_in_prefix, IdealCensus, IdealError, IdealView, IdealWitness};
use crate::relations::{ClassWitness, Enumerate, FiniteRelation, Prefix, RelationSource};
use crate::verdict::absent;
use crate::{Code, ElemSet, PairSet, Stage, Verdict};

/// A code together with the relations it maps between.
#[derive(Clone, Debug)]
pub struct FunctionCode {
    pub code: RelationSource,
    pub source: RelationSource,
    pub target: RelationSource,
}

impl FunctionCode {
    pub fn new(code: RelationSource, source: RelationSource, target: RelationSource) -> Self {
        FunctionCode {
            code,
            source,
            target,
        }
    }

    /// Image of a finite set under the stage-`stage` prefix of the code.
    pub fn image(&self, set: &ElemSet, stage: Stage) -> ElemSet {
        image_in(&self.code.prefix(stage), set)
    }
}

fn image_in(code: &Prefix, set: &ElemSet) -> ElemSet {
    set.iter().flat_map(|&m| code.succs(m)).collect()
}

/// Evaluate a code on an ideal, and check the image against the target's
/// ideal axioms. The image is exact when the input is exact and the code is
/// static; otherwise it is a prefix and only "holds" or "unknown" is
/// reported.
pub fn apply_code(
    r: &FunctionCode,
    ideal: &IdealView,
    stage: Stage,
) -> (IdealView, Verdict<IdealWitness>) {
    let image = r.image(ideal.elements(), stage);
    let verdict = check_in_prefix(&r.target, &r.target.prefix(stage), &image);
    if ideal.is_exact() && r.code.is_static() {
        (IdealView::Exact(image), verdict)
    } else {
        let verdict = match verdict {
            Verdict::Refuted(_) => Verdict::Unknown,
            v => v,
        };
        let view = IdealView::Prefix {
            generators: image.iter().copied().collect(),
            observed: image,
            stage,
        };
        (view, verdict)
    }
}

// ---------------------------------------------------------------------------
// The morphism predicate

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum MorWitness {
    /// `a R b` and `a ≺₁ a'` but not `a' R b`.
    NotUpward { a: Code, a_up: Code, b: Code },
    /// `a R b` and `b' ≺₂ b` but not `a R b'`.
    NotDownward { a: Code, b: Code, b_down: Code },
    /// No `b` with `a R b`.
    NotTotal { a: Code },
    /// `a R b`, `a R b'`, and no `b''` above both with `a R b''`.
    NotDirected { a: Code, b: Code, b2: Code },
    /// `a R b` and no `a' ≺₁ a` with `a' R b`.
    NotWitnessed { a: Code, b: Code },
}

/// The five clauses of the morphism predicate, each checked on a bounded
/// prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorCheckReport {
    pub upward: Verdict<MorWitness>,
    pub downward: Verdict<MorWitness>,
    pub total: Verdict<MorWitness>,
    pub directed: Verdict<MorWitness>,
    pub witnessed: Verdict<MorWitness>,
    pub stage: Stage,
}

impl MorCheckReport {
    pub fn clauses(&self) -> [(&'static str, &Verdict<MorWitness>); 5] {
        [
            ("upward", &self.upward),
            ("downward", &self.downward),
            ("total", &self.total),
            ("directed", &self.directed),
            ("witnessed", &self.witnessed),
        ]
    }

    pub fn overall(&self) -> Verdict<MorWitness> {
        self.clauses()
            .into_iter()
            .fold(Verdict::Holds, |acc, (_, v)| acc.and(v.clone()))
    }
}

struct Tally {
    undecided: bool,
    refuted: Option<MorWitness>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            undecided: false,
            refuted: None,
        }
    }

    /// Record a failure; returns true when the search can stop.
    fn fail(&mut self, definitive: bool, w: MorWitness) -> bool {
        match absent(definitive, w) {
            Verdict::Refuted(w) => {
                self.refuted = Some(w);
                true
            }
            _ => {
                self.undecided = true;
                false
            }
        }
    }

    fn finish(self) -> Verdict<MorWitness> {
        match (self.refuted, self.undecided) {
            (Some(w), _) => Verdict::Refuted(w),
            (None, true) => Verdict::Unknown,
            (None, false) => Verdict::Holds,
        }
    }
}

fn gone(r: &RelationSource, p: &Prefix, a: Code, b: Code) -> bool {
    !p.contains(a, b) && r.absence_is_final(a, b)
}

/// Check the morphism clauses for all elements up to `element_bound`.
pub fn mor_check(r: &FunctionCode, stage: Stage, element_bound: Code) -> MorCheckReport {
    let c = r.code.prefix(stage);
    let s1 = r.source.prefix(stage);
    let s2 = r.target.prefix(stage);
    let within = |x: &Code| *x <= element_bound;
    let code_pairs: Vec<(Code, Code)> = c
        .pairs
        .iter()
        .copied()
        .filter(|(a, b)| within(a) && within(b))
        .collect();

    let mut upward = Tally::new();
    'up: for &(a, b) in &code_pairs {
        for a_up in s1.succs(a).filter(within) {
            if !c.contains(a_up, b)
                && upward.fail(r.code.absence_is_final(a_up, b), MorWitness::NotUpward { a, a_up, b })
            {
                break 'up;
            }
        }
    }

    let mut downward = Tally::new();
    'down: for &(a, b) in &code_pairs {
        for b_down in s2.preds(b).filter(within) {
            if !c.contains(a, b_down)
                && downward.fail(
                    r.code.absence_is_final(a, b_down),
                    MorWitness::NotDownward { a, b, b_down },
                )
            {
                break;
            }
        }
        if downward.refuted.is_some() {
            break 'down;
        }
    }

    let mut total = Tally::new();
    for &a in s1.carrier.iter().filter(|a| within(a)) {
        if c.succs(a).next().is_none() && total.fail(r.code.is_static(), MorWitness::NotTotal { a }) {
            break;
        }
    }

    let mut directed = Tally::new();
    'dir: for &(a, b) in &code_pairs {
        for b2 in c.succs(a).filter(within).filter(|&b2| b2 >= b) {
            let images: Vec<Code> = c.succs(a).collect();
            let ok = images.iter().any(|&u| s2.contains(b, u) && s2.contains(b2, u));
            if !ok {
                let definitive = r.code.is_static()
                    && images
                        .iter()
                        .all(|&u| gone(&r.target, &s2, b, u) || gone(&r.target, &s2, b2, u));
                if directed.fail(definitive, MorWitness::NotDirected { a, b, b2 }) {
                    break 'dir;
                }
            }
        }
    }

    let mut witnessed = Tally::new();
    for &(a, b) in &code_pairs {
        let ok = s1.preds(a).any(|a2| c.contains(a2, b));
        if !ok {
            let definitive = r.source.is_static()
                && s1.preds(a).all(|a2| gone(&r.code, &c, a2, b));
            if witnessed.fail(definitive, MorWitness::NotWitnessed { a, b }) {
                break;
            }
        }
    }

    MorCheckReport {
        upward: upward.finish(),
        downward: downward.finish(),
        total: total.finish(),
        directed: directed.finish(),
        witnessed: witnessed.finish(),
        stage,
    }
}

// ---------------------------------------------------------------------------
// Identity, composition, graphs

struct Transpose {
    inner: RelationSource,
}

impl Enumerate for Transpose {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        self.inner.enumerate_upto(stage).into_iter().map(|(a, b)| (b, a)).collect()
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.inner.carrier_upto(stage)
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        self.inner.decide(b, a)
    }

    fn is_static(&self) -> bool {
        self.inner.is_static()
    }

    fn label(&self) -> String {
        format!("transpose({})", self.inner.label())
    }
}

/// `{(a, b) : b ≺ a}`, the code of the identity on the ideals of `≺`.
pub fn identity_code(r: &RelationSource) -> FunctionCode {
    FunctionCode::new(
        RelationSource::new(Transpose { inner: r.clone() }),
        r.clone(),
        r.clone(),
    )
}

struct Composite {
    first: RelationSource,
    second: RelationSource,
}

impl Enumerate for Composite {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let first = self.first.enumerate_upto(stage);
        let second = self.second.prefix(stage);
        let mut out = PairSet::new();
        for (m, n) in first {
            out.extend(second.succs(n).map(|p| (m, p)));
        }
        out
    }

    fn is_static(&self) -> bool {
        self.first.is_static() && self.second.is_static()
    }

    fn label(&self) -> String {
        format!("{};{}", self.first.label(), self.second.label())
    }
}

/// Relational composition: first `r`, then `s`.
pub fn compose(r: &FunctionCode, s: &FunctionCode) -> FunctionCode {
    FunctionCode::new(
        RelationSource::new(Composite {
            first: r.code.clone(),
            second: s.code.clone(),
        }),
        r.source.clone(),
        s.target.clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum HypothesisWitness {
    /// A source element outside the map's domain.
    NotTotal(Code),
    /// A target element outside the map's range.
    NotSurjective(Code),
    /// `x ≺ x'` but `f(x) ⊀ f(x')`.
    NotPreserved(Code, Code),
    /// `f(x) ≺ f(x')` but `x ⊀ x'`.
    NotReflected(Code, Code),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("graph hypothesis fails: {0:?}")]
    Hypothesis(HypothesisWitness),
    #[error("not a preorder: {0:?}")]
    NotPreorder(ClassWitness),
    #[error(transparent)]
    Census(#[from] IdealError),
}

/// Code `{(x, f(x))}` of a surjection that preserves and reflects the
/// relations. The hypotheses are checked on the carriers visible at `stage`.
pub fn graph_code(
    map: &BTreeMap<Code, Code>,
    source: &RelationSource,
    target: &RelationSource,
    stage: Stage,
) -> Result<FunctionCode, MorphismError> {
    let sp = source.prefix(stage);
    let tp = target.prefix(stage);
    let fail = |w| Err(MorphismError::Hypothesis(w));
    for &x in &sp.carrier {
        if !map.contains_key(&x) {
            return fail(HypothesisWitness::NotTotal(x));
        }
    }
    let range: ElemSet = map.values().copied().collect();
    for &y in &tp.carrier {
        if !range.contains(&y) {
            return fail(HypothesisWitness::NotSurjective(y));
        }
    }
    for &x in &sp.carrier {
        for &x2 in &sp.carrier {
            let below = sp.contains(x, x2);
            let image_below = tp.contains(map[&x], map[&x2]);
            if below && !image_below {
                return fail(HypothesisWitness::NotPreserved(x, x2));
            }
            if image_below && !below {
                return fail(HypothesisWitness::NotReflected(x, x2));
            }
        }
    }
    let graph = FiniteRelation::from_pairs(map.iter().map(|(&x, &y)| (x, y)));
    Ok(FunctionCode::new(
        graph.labelled("graph"),
        source.clone(),
        target.clone(),
    ))
}

/// The data linking a finite preorder to its ideal completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorData {
    /// `n ↦ b(n) = {m : m ⊑ n}`.
    pub principal: BTreeMap<Code, ElemSet>,
    pub census: IdealCensus,
    /// `(n, n')` with `b(n) ⊆ b(n')`.
    pub compact_order: PairSet,
    /// Elements with equal principal ideals.
    pub classes: Vec<ElemSet>,
}

pub fn functor_data(p: &FiniteRelation) -> Result<FunctorData, MorphismError> {
    let report = crate::relations::classify(&p.as_source(), 0);
    if let Verdict::Refuted(w) = report.reflexive_upto {
        return Err(MorphismError::NotPreorder(w));
    }
    if let Verdict::Refuted(w) = report.transitive_upto {
        return Err(MorphismError::NotPreorder(w));
    }
    let principal: BTreeMap<Code, ElemSet> = p
        .carrier()
        .iter()
        .map(|&n| {
            let below = p.carrier().iter().copied().filter(|&m| p.contains(m, n)).collect();
            (n, below)
        })
        .collect();
    let census = ideals::principal_census(p)?;
    let mut compact_order = PairSet::new();
    for (&n, bn) in &principal {
        for (&n2, bn2) in &principal {
            if bn.is_subset(bn2) {
                compact_order.insert((n, n2));
            }
        }
    }
    let mut by_ideal: BTreeMap<&ElemSet, ElemSet> = BTreeMap::new();
    for (&n, bn) in &principal {
        by_ideal.entry(bn).or_default().insert(n);
    }
    let classes = by_ideal.into_values().collect();
    Ok(FunctorData {
        principal,
        census,
        compact_order,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::all_ideals;
    use crate::relations::{chain, sierpinski};

    fn set(xs: &[Code]) -> ElemSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn identity_on_sierpinski() {
        let s = sierpinski().as_source();
        let id = identity_code(&s);
        let (img, v) = apply_code(&id, &IdealView::Exact(set(&[0, 1])), 0);
        assert_eq!(img, IdealView::Exact(set(&[0, 1])));
        assert_eq!(v, Verdict::Holds);
        let report = mor_check(&id, 0, 10);
        assert_eq!(report.overall(), Verdict::Holds);
    }

    #[test]
    fn empty_code_fails() {
        let s = sierpinski().as_source();
        let empty = FunctionCode::new(FiniteRelation::default().as_source(), s.clone(), s);
        let (img, v) = apply_code(&empty, &IdealView::Exact(set(&[0])), 0);
        assert!(img.elements().is_empty());
        assert_eq!(v, Verdict::Refuted(IdealWitness::Empty));
        assert_eq!(mor_check(&empty, 0, 10).total, Verdict::Refuted(MorWitness::NotTotal { a: 0 }));
    }

    #[test]
    fn constant_to_top() {
        let s = sierpinski().as_source();
        let code = FiniteRelation::from_pairs([(0, 0), (0, 1), (1, 0), (1, 1)]).as_source();
        let top = FunctionCode::new(code, s.clone(), s);
        for ideal in all_ideals(&sierpinski()).unwrap().ideals {
            let (img, v) = apply_code(&top, &IdealView::Exact(ideal), 0);
            assert_eq!(img.elements(), &set(&[0, 1]));
            assert!(v.holds());
        }
    }

    #[test]
    fn upward_violation_has_witness() {
        let s = sierpinski().as_source();
        // 0 R 0 but 0 ⊑ 1 and not 1 R 0
        let code = FiniteRelation::from_pairs([(0, 0)]).as_source();
        let f = FunctionCode::new(code, s.clone(), s);
        assert_eq!(
            mor_check(&f, 0, 5).upward,
            Verdict::Refuted(MorWitness::NotUpward { a: 0, a_up: 1, b: 0 })
        );
    }

    #[test]
    fn graph_hypotheses() {
        let s = sierpinski().as_source();
        let id: BTreeMap<Code, Code> = [(0, 0), (1, 1)].into();
        let g = graph_code(&id, &s, &s, 0).unwrap();
        for ideal in all_ideals(&sierpinski()).unwrap().ideals {
            let (img, _) = apply_code(&g, &IdealView::Exact(ideal.clone()), 0);
            assert_eq!(img.elements(), &ideal);
        }
        let flip: BTreeMap<Code, Code> = [(0, 1), (1, 0)].into();
        assert!(matches!(
            graph_code(&flip, &s, &s, 0),
            Err(MorphismError::Hypothesis(HypothesisWitness::NotPreserved(0, 1)))
        ));
    }

    #[test]
    fn functor_data_shapes() {
        let two = functor_data(&chain(2, true)).unwrap();
        assert_eq!(two.census.ideals, [set(&[0]), set(&[0, 1])]);
        assert_eq!(two.census.specialization, [(0, 1)]);
        let anti = functor_data(&crate::relations::antichain(3)).unwrap();
        assert_eq!(anti.census.len(), 3);
        assert!(anti.census.specialization.is_empty());
        let cyc = functor_data(&crate::relations::cycle(2)).unwrap();
        assert_eq!(cyc.census.ideals, [set(&[0, 1])]);
        assert_eq!(cyc.classes, [set(&[0, 1])]);
        assert!(matches!(
            functor_data(&chain(2, false)),
            Err(MorphismError::NotPreorder(_))
        ));
    }
}
