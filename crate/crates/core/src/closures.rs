//! Relation transformers: closures, partial-order repair, strictification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::carrier::{decode_mask_pair, finset_from_mask};
use crate::relations::{Enumerate, Prefix, RelationSource};
use crate::{Code, ElemSet, PairSet, Stage};

/// Transitive closure of a finite set of pairs: nonempty paths only.
pub fn transitive_closure_pairs(pairs: &PairSet) -> PairSet {
    let mut succ: BTreeMap<Code, Vec<Code>> = BTreeMap::new();
    for &(a, b) in pairs {
        succ.entry(a).or_default().push(b);
    }
    let mut out = PairSet::new();
    for &start in succ.keys() {
        let mut seen = ElemSet::new();
        let mut stack: Vec<Code> = succ[&start].clone();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                if let Some(next) = succ.get(&x) {
                    stack.extend(next.iter().copied().filter(|y| !seen.contains(y)));
                }
            }
        }
        out.extend(seen.into_iter().map(|x| (start, x)));
    }
    out
}

fn with_diagonal(mut pairs: PairSet, carrier: &ElemSet) -> PairSet {
    pairs.extend(carrier.iter().map(|&a| (a, a)));
    pairs
}

struct Closure {
    inner: RelationSource,
    reflexive: bool,
}

impl Enumerate for Closure {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let closed = transitive_closure_pairs(&self.inner.enumerate_upto(stage));
        if self.reflexive {
            with_diagonal(closed, &self.inner.carrier_upto(stage))
        } else {
            closed
        }
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.inner.carrier_upto(stage)
    }

    fn is_static(&self) -> bool {
        self.inner.is_static()
    }

    fn label(&self) -> String {
        let op = if self.reflexive { "rtc" } else { "tc" };
        format!("{op}({})", self.inner.label())
    }
}

/// At each stage, the transitive closure of what `r` has enumerated.
pub fn transitive_closure(r: &RelationSource) -> RelationSource {
    RelationSource::new(Closure {
        inner: r.clone(),
        reflexive: false,
    })
}

/// As [`transitive_closure`], plus the diagonal on the stage carrier.
pub fn reflexive_transitive_closure(r: &RelationSource) -> RelationSource {
    RelationSource::new(Closure {
        inner: r.clone(),
        reflexive: true,
    })
}

struct Reflexive {
    inner: RelationSource,
}

impl Enumerate for Reflexive {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        with_diagonal(self.inner.enumerate_upto(stage), &self.inner.carrier_upto(stage))
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.inner.carrier_upto(stage)
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        if a == b {
            None
        } else {
            self.inner.decide(a, b)
        }
    }

    fn is_static(&self) -> bool {
        self.inner.is_static()
    }

    fn label(&self) -> String {
        format!("refl({})", self.inner.label())
    }
}

/// Adds `(x, x)` for every element of the stage carrier.
pub fn reflexive_closure(r: &RelationSource) -> RelationSource {
    RelationSource::new(Reflexive { inner: r.clone() })
}

// ---------------------------------------------------------------------------
// Partial-order repair

/// Bookkeeping of [`po_repair`] at a stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairLedger {
    /// First stage at which the reflexive-transitive closure showed an
    /// antisymmetry violation.
    pub frozen_after: Option<Stage>,
    /// Elements first seen at or after the freeze; they are isolated.
    pub isolated_from: ElemSet,
}

fn has_swap(pairs: &PairSet) -> bool {
    pairs
        .iter()
        .any(|&(a, b)| a != b && pairs.contains(&(b, a)))
}

struct PoRepair {
    closure: RelationSource,
}

impl PoRepair {
    /// Least `t ≤ stage` at which the closure is not antisymmetric.
    fn freeze_stage(&self, stage: Stage) -> Option<Stage> {
        if !has_swap(&self.closure.enumerate_upto(stage)) {
            return None;
        }
        let (mut lo, mut hi) = (0, stage);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if has_swap(&self.closure.enumerate_upto(mid)) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    fn frozen(&self, t: Stage) -> (PairSet, ElemSet) {
        match t.checked_sub(1) {
            Some(before) => (
                self.closure.enumerate_upto(before),
                self.closure.carrier_upto(before),
            ),
            None => (PairSet::new(), ElemSet::new()),
        }
    }

    fn ledger(&self, stage: Stage) -> RepairLedger {
        match self.freeze_stage(stage) {
            None => RepairLedger::default(),
            Some(t) => {
                let (_, before) = self.frozen(t);
                let isolated_from = self
                    .closure
                    .carrier_upto(stage)
                    .difference(&before)
                    .copied()
                    .collect();
                RepairLedger {
                    frozen_after: Some(t),
                    isolated_from,
                }
            }
        }
    }
}

impl Enumerate for PoRepair {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        match self.freeze_stage(stage) {
            None => self.closure.enumerate_upto(stage),
            Some(t) => {
                let (pairs, _) = self.frozen(t);
                with_diagonal(pairs, &self.closure.carrier_upto(stage))
            }
        }
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.closure.carrier_upto(stage)
    }

    fn label(&self) -> String {
        format!("po({})", self.closure.label())
    }
}

/// A partial order at every stage, equal to the reflexive-transitive
/// closure of `r` for as long as that closure is antisymmetric. From the
/// first stage showing a violation, the order on earlier elements is frozen
/// and every later element enters as an isolated point.
pub fn po_repair(r: &RelationSource) -> RelationSource {
    RelationSource::new(PoRepair {
        closure: reflexive_transitive_closure(r),
    })
}

pub fn po_repair_ledger(r: &RelationSource, stage: Stage) -> RepairLedger {
    PoRepair {
        closure: reflexive_transitive_closure(r),
    }
    .ledger(stage)
}

// ---------------------------------------------------------------------------
// Strictification

/// Strict order on codes `⟨F, m⟩` (see [`crate::carrier::encode_finset_pair`])
/// built from a transitive relation. The element `⟨F, m⟩` exists when `F` is
/// contained in the carrier enumerated by stage `m`; stage `s` reveals the
/// existing codes below `s`.
struct Strictify {
    base: RelationSource,
}

/// Bit mask of the elements of `carrier` below 64.
fn carrier_mask(carrier: &ElemSet) -> u64 {
    carrier
        .iter()
        .take_while(|&&x| x < 64)
        .fold(0u64, |acc, &x| acc | (1 << x))
}

pub(crate) struct StagedBase<'a> {
    base: &'a RelationSource,
    prefixes: BTreeMap<Stage, Prefix>,
}

impl<'a> StagedBase<'a> {
    pub(crate) fn new(base: &'a RelationSource) -> Self {
        StagedBase {
            base,
            prefixes: BTreeMap::new(),
        }
    }

    pub(crate) fn at(&mut self, n: Stage) -> &Prefix {
        let base = self.base;
        self.prefixes.entry(n).or_insert_with(|| base.prefix(n))
    }
}

fn mask_contains(mask: u64, x: Code) -> bool {
    x < 64 && mask & (1 << x) != 0
}

fn bits(mask: u64) -> impl Iterator<Item = Code> {
    (0..64).filter(move |&i| mask & (1 << i) != 0)
}

impl Strictify {
    fn exists(&self, staged: &mut StagedBase<'_>, code: Code) -> bool {
        let (mask, m) = decode_mask_pair(code);
        let carrier = carrier_mask(&staged.at(m).carrier);
        mask & !carrier == 0
    }

    fn holds(staged: &mut StagedBase<'_>, a: Code, b: Code) -> bool {
        let (f, m) = decode_mask_pair(a);
        let (g, n) = decode_mask_pair(b);
        if f & !g != 0 || m >= n {
            return false;
        }
        let below = staged.at(n);
        // x ≺ y with y ∈ F, x ≤ n forces x ∈ G
        for y in bits(f) {
            for x in below.preds(y) {
                if x <= n && !mask_contains(g, x) {
                    return false;
                }
            }
        }
        bits(g).any(|y| bits(f).all(|x| below.contains(x, y)))
    }
}

impl Enumerate for Strictify {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let mut staged = StagedBase::new(&self.base);
        let members: Vec<Code> = (0..stage).filter(|&c| self.exists(&mut staged, c)).collect();
        let mut out = PairSet::new();
        for &a in &members {
            for &b in &members {
                if Strictify::holds(&mut staged, a, b) {
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
        let mut staged = StagedBase::new(&self.base);
        Some(
            self.exists(&mut staged, a)
                && self.exists(&mut staged, b)
                && Strictify::holds(&mut staged, a, b),
        )
    }

    fn label(&self) -> String {
        format!("strictify({})", self.base.label())
    }
}

/// `⟨F,m⟩ ⊏ ⟨G,n⟩` iff `F ⊆ G`, `m < n`, every `x ≤ n` with `x ≺ y` for
/// some `y ∈ F` lies in `G`, and some `y ∈ G` is above all of `F`; `≺` is
/// read off the stage-`n` prefix of `r`. `r` should be transitive.
pub fn strictify(r: &RelationSource) -> RelationSource {
    RelationSource::new(Strictify { base: r.clone() })
}

/// The set `F` of a strictified code.
pub fn strict_code_set(code: Code) -> ElemSet {
    finset_from_mask(decode_mask_pair(code).0)
}
