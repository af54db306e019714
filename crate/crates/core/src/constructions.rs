//! Products, coproducts, and adding co-c.e. closed sets to the topology.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::carrier::{checked_pair, decode_mask_pair, pair, unpair};
use crate::closures::{transitive_closure, StagedBase};
use crate::ideals::{principal_census, IdealCensus, IdealError, IdealView};
use crate::morphisms::FunctionCode;
use crate::relations::{Enumerate, FiniteRelation, Prefix, RelationSource};
use crate::{Code, ElemSet, PairSet, Stage};

// ---------------------------------------------------------------------------
// Product and coproduct

struct Product {
    left: RelationSource,
    right: RelationSource,
}

impl Enumerate for Product {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let l = self.left.enumerate_upto(stage);
        let r = self.right.enumerate_upto(stage);
        let mut out = PairSet::new();
        for &(a, a2) in &l {
            for &(b, b2) in &r {
                out.insert((pair(a, b), pair(a2, b2)));
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        let l = self.left.carrier_upto(stage);
        let r = self.right.carrier_upto(stage);
        l.iter()
            .flat_map(|&a| r.iter().map(move |&b| pair(a, b)))
            .collect()
    }

    fn decide(&self, x: Code, y: Code) -> Option<bool> {
        let ((a, b), (a2, b2)) = (unpair(x), unpair(y));
        match (self.left.decide(a, a2), self.right.decide(b, b2)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        }
    }

    fn is_static(&self) -> bool {
        self.left.is_static() && self.right.is_static()
    }

    fn label(&self) -> String {
        format!("({} x {})", self.left.label(), self.right.label())
    }
}

/// `(a, b) ≺ (a', b')` iff `a ≺₁ a'` and `b ≺₂ b'`, on codes `pair(a, b)`.
pub fn product(r1: &RelationSource, r2: &RelationSource) -> RelationSource {
    RelationSource::new(Product {
        left: r1.clone(),
        right: r2.clone(),
    })
}

struct Coproduct {
    left: RelationSource,
    right: RelationSource,
}

fn tag_left(a: Code) -> Code {
    2 * a
}

fn tag_right(b: Code) -> Code {
    2 * b + 1
}

impl Enumerate for Coproduct {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let l = self.left.enumerate_upto(stage);
        let r = self.right.enumerate_upto(stage);
        l.into_iter()
            .map(|(a, b)| (tag_left(a), tag_left(b)))
            .chain(r.into_iter().map(|(a, b)| (tag_right(a), tag_right(b))))
            .collect()
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        let l = self.left.carrier_upto(stage).into_iter().map(tag_left);
        let r = self.right.carrier_upto(stage).into_iter().map(tag_right);
        l.chain(r).collect()
    }

    fn decide(&self, x: Code, y: Code) -> Option<bool> {
        match (x % 2, y % 2) {
            (0, 0) => self.left.decide(x / 2, y / 2),
            (1, 1) => self.right.decide(x / 2, y / 2),
            _ => Some(false),
        }
    }

    fn is_static(&self) -> bool {
        self.left.is_static() && self.right.is_static()
    }

    fn label(&self) -> String {
        format!("({} + {})", self.left.label(), self.right.label())
    }
}

/// Disjoint union: `a ↦ 2a` on the left, `b ↦ 2b + 1` on the right.
pub fn coproduct(r1: &RelationSource, r2: &RelationSource) -> RelationSource {
    RelationSource::new(Coproduct {
        left: r1.clone(),
        right: r2.clone(),
    })
}

fn code_from(
    label: &str,
    build: impl Fn(Stage) -> PairSet + Send + Sync + 'static,
    statik: bool,
) -> RelationSource {
    struct StageCode<F> {
        label: String,
        build: F,
        statik: bool,
    }
    impl<F: Fn(Stage) -> PairSet + Send + Sync> Enumerate for StageCode<F> {
        fn pairs_upto(&self, stage: Stage) -> PairSet {
            (self.build)(stage)
        }
        fn is_static(&self) -> bool {
            self.statik
        }
        fn label(&self) -> String {
            self.label.clone()
        }
    }
    RelationSource::new(StageCode {
        label: String::from(label),
        build,
        statik,
    })
}

/// Code of a projection out of `product(r1, r2)`: `((a, b), a')` with `a' ≺ a`
/// on the chosen side.
pub fn projection_code(r1: &RelationSource, r2: &RelationSource, left: bool) -> FunctionCode {
    let (here, there) = if left { (r1, r2) } else { (r2, r1) };
    let (h, t) = (here.clone(), there.clone());
    let statik = here.is_static() && there.is_static();
    let code = code_from(
        if left { "proj1" } else { "proj2" },
        move |s| {
            let other = t.carrier_upto(s);
            let mut out = PairSet::new();
            for (a2, a) in h.enumerate_upto(s) {
                for &b in &other {
                    let from = if left { pair(a, b) } else { pair(b, a) };
                    out.insert((from, a2));
                }
            }
            out
        },
        statik,
    );
    FunctionCode::new(code, product(r1, r2), here.clone())
}

/// Code of an injection into `coproduct(r1, r2)`: `(a, tag(a'))` with `a' ≺ a`.
pub fn injection_code(r1: &RelationSource, r2: &RelationSource, left: bool) -> FunctionCode {
    let here = if left { r1.clone() } else { r2.clone() };
    let h = here.clone();
    let tag = if left { tag_left } else { tag_right };
    let code = code_from(
        if left { "inl" } else { "inr" },
        move |s| {
            h.enumerate_upto(s)
                .into_iter()
                .map(|(a2, a)| (a, tag(a2)))
                .collect()
        },
        here.is_static(),
    );
    FunctionCode::new(code, here, coproduct(r1, r2))
}

// ---------------------------------------------------------------------------
// Adding closed sets as open sets

/// A stage-enumerable set of naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSource {
    /// Enumerated in full at stage 0.
    Finite(ElemSet),
    All,
    Evens,
    Odds,
}

impl SetSource {
    pub fn contains(&self, x: Code) -> bool {
        match self {
            SetSource::Finite(s) => s.contains(&x),
            SetSource::All => true,
            SetSource::Evens => x.is_multiple_of(2),
            SetSource::Odds => x % 2 == 1,
        }
    }

    /// Elements enumerated by `stage`.
    pub fn upto(&self, stage: Stage) -> ElemSet {
        match self {
            SetSource::Finite(s) => s.clone(),
            _ => (0..stage).filter(|&x| self.contains(x)).collect(),
        }
    }

    pub fn enumerated_by(&self, x: Code, stage: Stage) -> bool {
        match self {
            SetSource::Finite(s) => s.contains(&x),
            _ => x < stage && self.contains(x),
        }
    }
}

/// A base relation and the sets `U` whose avoidance sets
/// `A = {I : I ∩ U = ∅}` are to become open.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    pub base: RelationSource,
    pub u_set: SetSource,
    pub family: Vec<SetSource>,
}

impl ExtensionSpec {
    pub fn single(base: RelationSource, u: SetSource) -> Self {
        ExtensionSpec {
            base,
            u_set: u.clone(),
            family: Vec::from([u]),
        }
    }

    pub fn family(base: RelationSource, family: Vec<SetSource>) -> Self {
        ExtensionSpec {
            base,
            u_set: family.first().cloned().unwrap_or(SetSource::Finite(ElemSet::new())),
            family,
        }
    }
}

/// Codes `pair(mask, m)`. The low `stars` bits of the mask are the fresh
/// symbols, one per closed set; bit `stars + x` is the base element `x`.
struct Extension {
    base: RelationSource,
    family: Vec<SetSource>,
}

impl Extension {
    fn stars(&self) -> u64 {
        self.family.len() as u64
    }

    fn star_mask(&self) -> u64 {
        (1u64 << self.stars()) - 1
    }

    fn elems(&self, mask: u64) -> impl Iterator<Item = Code> {
        let k = self.stars();
        (k..64).filter(move |&i| mask & (1 << i) != 0).map(move |i| i - k)
    }

    fn exists(&self, staged: &mut StagedBase<'_>, code: Code) -> bool {
        let (mask, m) = decode_mask_pair(code);
        let carrier = &staged.at(m).carrier;
        self.elems(mask).all(|x| carrier.contains(&x))
    }

    /// `F ⊏ G` once `m < n` is settled, with the base and `U^{(n)}` read at
    /// `n`. Condition (4) consults `u_stage`, or all of `U` when `None`.
    fn related(&self, below: &Prefix, f: u64, g: u64, n: Stage, u_stage: Option<Stage>) -> bool {
        let stars = self.star_mask();
        // (2)
        if f & stars & !g != 0 {
            return false;
        }
        // (3)
        if !self
            .elems(g)
            .any(|y| self.elems(f).all(|x| below.contains(x, y)))
        {
            return false;
        }
        for (i, u) in self.family.iter().enumerate() {
            let star = 1u64 << i;
            // (4)
            let hit = |x: Code| match u_stage {
                Some(s) => u.enumerated_by(x, s),
                None => u.contains(x),
            };
            if g & star == 0 && !self.elems(g).any(hit) {
                return false;
            }
            // (5)
            if f & star != 0 {
                for y in self.elems(f) {
                    if below
                        .preds(y)
                        .any(|x| x <= n && u.enumerated_by(x, n))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn holds(&self, staged: &mut StagedBase<'_>, a: Code, b: Code, u_stage: Option<Stage>) -> bool {
        let (f, m) = decode_mask_pair(a);
        let (g, n) = decode_mask_pair(b);
        m < n && self.related(staged.at(n), f, g, n, u_stage)
    }
}

impl Enumerate for Extension {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let mut staged = StagedBase::new(&self.base);
        let members: Vec<Code> = (0..stage).filter(|&c| self.exists(&mut staged, c)).collect();
        let mut out = PairSet::new();
        for &a in &members {
            for &b in &members {
                if self.holds(&mut staged, a, b, Some(stage)) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        let mut staged = StagedBase::new(&self.base);
        (0..stage).filter(|&c| self.exists(&mut staged, c)).collect()
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        if !self.base.is_static() || !self.family.iter().all(|u| matches!(u, SetSource::Finite(_))) {
            return None;
        }
        let mut staged = StagedBase::new(&self.base);
        Some(
            self.exists(&mut staged, a)
                && self.exists(&mut staged, b)
                && self.holds(&mut staged, a, b, None),
        )
    }

    fn label(&self) -> String {
        format!("extend({}, {} closed)", self.base.label(), self.family.len())
    }
}

/// The relation whose ideals are the ideals of the base with
/// `A = {I : I ∩ U = ∅}` added as an open set. Codes are `⟨F, m⟩` with
/// `F ⊆ ω ∪ {*}`, `*` being mask bit 0.
pub fn extend_with_closed(spec: &ExtensionSpec) -> RelationSource {
    extend_family(&spec.base, core::slice::from_ref(&spec.u_set))
}

/// As [`extend_with_closed`] for every set of `spec.family` at once, with one
/// fresh symbol per set. An empty family leaves the base unchanged.
pub fn extend_with_closed_family(spec: &ExtensionSpec) -> RelationSource {
    extend_family(&spec.base, &spec.family)
}

fn extend_family(base: &RelationSource, family: &[SetSource]) -> RelationSource {
    if family.is_empty() {
        return base.clone();
    }
    RelationSource::new(Extension {
        base: transitive_closure(base),
        family: family.to_vec(),
    })
}

/// `g(J)`: the base elements named in the codes of `J`.
pub fn extension_back(view: &IdealView, stars: u64) -> ElemSet {
    let mut out = ElemSet::new();
    for &code in view.elements() {
        let (mask, _) = decode_mask_pair(code);
        out.extend((stars..64).filter(|i| mask & (1 << i) != 0).map(|i| i - stars));
    }
    out
}

/// Code `⟨F, m⟩` of the extension carrier, with `stars` fresh symbols.
pub fn extension_code(stars_in: &[u64], elems: &ElemSet, m: u64, stars: u64) -> Option<Code> {
    let mut mask = 0u64;
    for &i in stars_in {
        mask |= 1 << i;
    }
    for &x in elems {
        let bit = x.checked_add(stars).filter(|&b| b < 64)?;
        mask |= 1 << bit;
    }
    checked_pair(mask, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("bounded census needs {bits} mask bits; the limit is {limit}")]
    TooManyBits { bits: usize, limit: usize },
    #[error(transparent)]
    Census(#[from] IdealError),
}

pub const CENSUS_MASK_BITS: usize = 10;

/// One ideal of the extension, described by the masks `F` it contains
/// (for all large enough `m`), and its image under `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub masks: ElemSet,
    pub image: ElemSet,
}

/// Bounded census of an extension: its ideals, taken with the base and
/// `U` frozen at the stage bound, and the base census they map onto.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCensus {
    pub fibers: Vec<Fiber>,
    pub base: IdealCensus,
    pub stage: Stage,
}

impl ExtensionCensus {
    /// `g` is injective and its images are exactly the base ideals.
    pub fn is_bijective(&self) -> bool {
        let images: Vec<&ElemSet> = self.fibers.iter().map(|f| &f.image).collect();
        let mut sorted = images.clone();
        sorted.sort();
        sorted.dedup();
        sorted.len() == images.len()
            && sorted.into_iter().cloned().collect::<Vec<_>>() == self.base.ideals
    }

    /// `(i, j)` with `fibers[i] ⊊ fibers[j]`: the specialization order.
    pub fn specialization(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.fibers.iter().enumerate() {
            for (j, b) in self.fibers.iter().enumerate() {
                if i != j && a.masks.is_subset(&b.masks) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// No two fibers are comparable: the extended space is discrete.
    pub fn is_discrete(&self) -> bool {
        self.specialization().is_empty()
    }
}

/// Ideals of the extension of a finite base, up to the choice of `m`.
///
/// With the base and every `U` read at `stage`, the relation on masks
/// `F ◁ G` iff `⟨F, 0⟩ ⊏ ⟨G, stage⟩` is transitive and its ideals are in
/// bijection with those of the extension.
pub fn extension_census(spec: &ExtensionSpec, stage: Stage) -> Result<ExtensionCensus, ConstructionError> {
    let ext = Extension {
        base: transitive_closure(&spec.base),
        family: spec.family.clone(),
    };
    let base = FiniteRelation::from_source(&ext.base, stage);
    let base_census = principal_census(&base)?;
    let elems: Vec<Code> = base.carrier().iter().copied().collect();
    let bits = ext.family.len() + elems.len();
    if bits > CENSUS_MASK_BITS {
        return Err(ConstructionError::TooManyBits {
            bits,
            limit: CENSUS_MASK_BITS,
        });
    }
    let k = ext.stars();
    let stars = ext.star_mask();
    let masks: Vec<u64> = (0u64..(1 << bits))
        .map(|local| {
            let mut mask = local & stars;
            for (i, &x) in elems.iter().enumerate() {
                if local & (1 << (k as usize + i)) != 0 {
                    mask |= 1 << (x + k);
                }
            }
            mask
        })
        .collect();
    let prefix = ext.base.prefix(stage);
    let mut below: BTreeMap<u64, ElemSet> = BTreeMap::new();
    let mut tops = Vec::new();
    for &g in &masks {
        let down: ElemSet = masks
            .iter()
            .copied()
            .filter(|&f| ext.related(&prefix, f, g, stage, Some(stage)))
            .collect();
        if down.contains(&g) {
            tops.push(g);
        }
        below.insert(g, down);
    }
    let mut families: Vec<ElemSet> = tops.iter().map(|g| below[g].clone()).collect();
    families.sort();
    families.dedup();
    let fibers = families
        .into_iter()
        .map(|masks| {
            let view = IdealView::Exact(masks.iter().map(|&f| pair(f, 0)).collect());
            let image = extension_back(&view, k);
            Fiber { masks, image }
        })
        .collect();
    Ok(ExtensionCensus {
        fibers,
        base: base_census,
        stage,
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
    fn sierpinski_squared_has_four_ideals() {
        let s = sierpinski().as_source();
        let p = FiniteRelation::from_source(&product(&s, &s), 0);
        assert_eq!(all_ideals(&p).unwrap().len(), 4);
        let c = FiniteRelation::from_source(&coproduct(&s, &s), 0);
        let census = all_ideals(&c).unwrap();
        assert_eq!(census.len(), 4);
        assert_eq!(census.specialization.len(), 2);
    }

    #[test]
    fn sierpinski_with_one_closed_point() {
        let spec = ExtensionSpec::single(
            sierpinski().as_source(),
            SetSource::Finite(set(&[1])),
        );
        let census = extension_census(&spec, 60).unwrap();
        assert!(census.is_bijective());
        assert!(census.is_discrete());
        // * is bit 0, base element x is bit x + 1
        let zero_star: ElemSet = [0b000, 0b001, 0b010, 0b011].into_iter().collect();
        let zero_one: ElemSet = [0b000, 0b010, 0b100, 0b110].into_iter().collect();
        let masks: Vec<&ElemSet> = census.fibers.iter().map(|f| &f.masks).collect();
        assert!(masks.contains(&&zero_star));
        assert!(masks.contains(&&zero_one));
    }

    #[test]
    fn empty_u_keeps_topology() {
        let spec = ExtensionSpec::single(sierpinski().as_source(), SetSource::Finite(ElemSet::new()));
        let census = extension_census(&spec, 60).unwrap();
        assert!(census.is_bijective());
        assert_eq!(census.specialization().len(), 1);
        // every fiber is all of P(J ∪ {*})
        for f in &census.fibers {
            let full = f.image.iter().fold(1u64, |acc, x| acc | 1 << (x + 1));
            let expected: ElemSet = (0..=full).filter(|m| m & !full == 0).collect();
            assert_eq!(f.masks, expected);
        }
    }

    #[test]
    fn extension_is_irreflexive() {
        let spec = ExtensionSpec::single(sierpinski().as_source(), SetSource::Finite(set(&[1])));
        let r = extend_with_closed(&spec);
        let p = r.enumerate_upto(60);
        assert!(!p.is_empty());
        assert!(p.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn empty_family_is_base() {
        let base = chain(3, true).as_source();
        let spec = ExtensionSpec::family(base.clone(), Vec::new());
        assert_eq!(extend_with_closed_family(&spec).enumerate_upto(5), base.enumerate_upto(5));
    }

    #[test]
    fn chain_with_two_closed_sets_is_discrete() {
        let spec = ExtensionSpec::family(
            chain(3, true).as_source(),
            Vec::from([SetSource::Finite(set(&[1])), SetSource::Finite(set(&[2]))]),
        );
        let census = extension_census(&spec, 40).unwrap();
        assert!(census.is_bijective());
        assert!(census.is_discrete());
    }
}
