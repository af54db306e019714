//! Stage-enumerable and finite relations, and the catalog of named families.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::carrier::{pair, unpair, Rational};
use crate::verdict::absent;
use crate::{Code, ElemSet, PairSet, Stage, Verdict};

/// A deterministic, monotone enumeration of a relation on `ω`.
///
/// Implementors must return the same set for the same stage, and the set at
/// stage `s` must be contained in the set at stage `s + 1`.
pub trait Enumerate: Send + Sync {
    fn pairs_upto(&self, stage: Stage) -> PairSet;

    /// Elements declared to be in the carrier by `stage`, beyond those
    /// mentioned by a pair.
    fn carrier_upto(&self, _stage: Stage) -> ElemSet {
        ElemSet::new()
    }

    /// Exact membership, when the relation happens to be decidable.
    fn decide(&self, _a: Code, _b: Code) -> Option<bool> {
        None
    }

    /// True when the stage has no effect on the output.
    fn is_static(&self) -> bool {
        false
    }

    fn label(&self) -> String;
}

/// A shareable handle on an [`Enumerate`] implementation.
#[derive(Clone)]
pub struct RelationSource {
    inner: Arc<dyn Enumerate>,
}

impl RelationSource {
    pub fn new(inner: impl Enumerate + 'static) -> Self {
        RelationSource {
            inner: Arc::new(inner),
        }
    }

    pub fn enumerate_upto(&self, stage: Stage) -> PairSet {
        self.inner.pairs_upto(stage)
    }

    /// Declared carrier at `stage`, together with every element mentioned
    /// by an enumerated pair.
    pub fn carrier_upto(&self, stage: Stage) -> ElemSet {
        let mut carrier = self.inner.carrier_upto(stage);
        for (a, b) in self.inner.pairs_upto(stage) {
            carrier.insert(a);
            carrier.insert(b);
        }
        carrier
    }

    pub fn decide(&self, a: Code, b: Code) -> Option<bool> {
        if self.inner.is_static() {
            return Some(self.inner.pairs_upto(0).contains(&(a, b)));
        }
        self.inner.decide(a, b)
    }

    pub fn is_static(&self) -> bool {
        self.inner.is_static()
    }

    pub fn label(&self) -> String {
        self.inner.label()
    }

    pub fn prefix(&self, stage: Stage) -> Prefix {
        let pairs = self.inner.pairs_upto(stage);
        let declared = self.inner.carrier_upto(stage);
        Prefix::build(stage, pairs, declared)
    }

    /// Whether a pair found missing from a prefix is missing for good.
    pub(crate) fn absence_is_final(&self, a: Code, b: Code) -> bool {
        self.is_static() || self.inner.decide(a, b) == Some(false)
    }
}

impl fmt::Debug for RelationSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RelationSource").field(&self.label()).finish()
    }
}

/// An enumerator given by closures, for one-off relations.
pub struct FnSource<P, C> {
    label: String,
    pairs: P,
    carrier: C,
}

impl<P, C> FnSource<P, C>
where
    P: Fn(Stage) -> PairSet + Send + Sync + 'static,
    C: Fn(Stage) -> ElemSet + Send + Sync + 'static,
{
    pub fn new(label: impl Into<String>, pairs: P, carrier: C) -> RelationSource {
        RelationSource::new(FnSource {
            label: label.into(),
            pairs,
            carrier,
        })
    }
}

impl<P, C> Enumerate for FnSource<P, C>
where
    P: Fn(Stage) -> PairSet + Send + Sync,
    C: Fn(Stage) -> ElemSet + Send + Sync,
{
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        (self.pairs)(stage)
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        (self.carrier)(stage)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// A relation whose stage-`s` pairs are the pairs of codes below `s`
/// satisfying a decidable predicate, over a decidable carrier.
pub(crate) struct Decidable<R, M> {
    pub label: String,
    pub rel: R,
    pub member: M,
}

impl<R, M> Enumerate for Decidable<R, M>
where
    R: Fn(Code, Code) -> bool + Send + Sync,
    M: Fn(Code) -> bool + Send + Sync,
{
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let carrier = self.carrier_upto(stage);
        let mut out = PairSet::new();
        for &a in &carrier {
            for &b in &carrier {
                if (self.rel)(a, b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        (0..stage).filter(|&c| (self.member)(c)).collect()
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        Some((self.member)(a) && (self.member)(b) && (self.rel)(a, b))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

pub(crate) fn decidable(
    label: impl Into<String>,
    rel: impl Fn(Code, Code) -> bool + Send + Sync + 'static,
    member: impl Fn(Code) -> bool + Send + Sync + 'static,
) -> RelationSource {
    RelationSource::new(Decidable {
        label: label.into(),
        rel,
        member,
    })
}

// ---------------------------------------------------------------------------
// Prefixes

/// The finite relation a source has enumerated by some stage, with
/// adjacency indexes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prefix {
    pub stage: Stage,
    pub pairs: PairSet,
    pub carrier: ElemSet,
    succ: BTreeMap<Code, ElemSet>,
    pred: BTreeMap<Code, ElemSet>,
}

impl Prefix {
    pub fn build(stage: Stage, pairs: PairSet, declared: ElemSet) -> Prefix {
        let mut carrier = declared;
        let mut succ: BTreeMap<Code, ElemSet> = BTreeMap::new();
        let mut pred: BTreeMap<Code, ElemSet> = BTreeMap::new();
        for &(a, b) in &pairs {
            carrier.insert(a);
            carrier.insert(b);
            succ.entry(a).or_default().insert(b);
            pred.entry(b).or_default().insert(a);
        }
        Prefix {
            stage,
            pairs,
            carrier,
            succ,
            pred,
        }
    }

    pub fn contains(&self, a: Code, b: Code) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn succs(&self, a: Code) -> impl Iterator<Item = Code> + '_ {
        self.succ.get(&a).into_iter().flatten().copied()
    }

    pub fn preds(&self, b: Code) -> impl Iterator<Item = Code> + '_ {
        self.pred.get(&b).into_iter().flatten().copied()
    }

    pub fn succ_set(&self, a: Code) -> Option<&ElemSet> {
        self.succ.get(&a)
    }

    pub fn pred_set(&self, b: Code) -> Option<&ElemSet> {
        self.pred.get(&b)
    }
}

// ---------------------------------------------------------------------------
// Finite relations

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("pair ({0}, {1}) mentions an element outside the carrier")]
    PairOutsideCarrier(Code, Code),
}

/// An explicit finite relation over a finite carrier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    carrier: ElemSet,
    pairs: PairSet,
}

impl FiniteRelation {
    pub fn new(carrier: ElemSet, pairs: PairSet) -> Result<Self, RelationError> {
        for &(a, b) in &pairs {
            if !carrier.contains(&a) || !carrier.contains(&b) {
                return Err(RelationError::PairOutsideCarrier(a, b));
            }
        }
        Ok(FiniteRelation { carrier, pairs })
    }

    /// The carrier is the set of mentioned elements.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Code, Code)>) -> Self {
        let pairs: PairSet = pairs.into_iter().collect();
        let carrier = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        FiniteRelation { carrier, pairs }
    }

    pub fn carrier(&self) -> &ElemSet {
        &self.carrier
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn contains(&self, a: Code, b: Code) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn as_source(&self) -> RelationSource {
        RelationSource::new(StaticSource {
            label: String::from("finite"),
            relation: self.clone(),
        })
    }

    pub fn labelled(&self, label: impl Into<String>) -> RelationSource {
        RelationSource::new(StaticSource {
            label: label.into(),
            relation: self.clone(),
        })
    }

    /// Snapshot of a source at a stage.
    pub fn from_source(r: &RelationSource, stage: Stage) -> Self {
        let p = r.prefix(stage);
        FiniteRelation {
            carrier: p.carrier,
            pairs: p.pairs,
        }
    }

    pub fn is_transitive(&self) -> bool {
        let p = Prefix::build(0, self.pairs.clone(), self.carrier.clone());
        self.pairs
            .iter()
            .all(|&(a, b)| p.succs(b).all(|c| p.contains(a, c)))
    }

    pub fn is_reflexive(&self) -> bool {
        self.carrier.iter().all(|&a| self.contains(a, a))
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }
}

struct StaticSource {
    label: String,
    relation: FiniteRelation,
}

impl Enumerate for StaticSource {
    fn pairs_upto(&self, _stage: Stage) -> PairSet {
        self.relation.pairs.clone()
    }

    fn carrier_upto(&self, _stage: Stage) -> ElemSet {
        self.relation.carrier.clone()
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        Some(self.relation.contains(a, b))
    }

    fn is_static(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `as_source` as a free function.
pub fn as_source(r: &FiniteRelation) -> RelationSource {
    r.as_source()
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ClassWitness {
    /// `a ≺ b` and `b ≺ c` were enumerated, `a ≺ c` is absent.
    Triple(Code, Code, Code),
    /// `a ≺ a` was enumerated.
    Loop(Code),
    /// `a ≺ b` and `b ≺ a` with `a ≠ b`.
    Swap(Code, Code),
    /// `a` is in the carrier but `a ≺ a` is absent.
    MissingLoop(Code),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationClassReport {
    pub transitive_upto: Verdict<ClassWitness>,
    pub irreflexive_upto: Verdict<ClassWitness>,
    pub antisymmetric_upto: Verdict<ClassWitness>,
    pub reflexive_upto: Verdict<ClassWitness>,
    pub stage: Stage,
}

pub fn transitivity_upto(r: &RelationSource, p: &Prefix) -> Verdict<ClassWitness> {
    let mut undecided = false;
    for &(a, b) in &p.pairs {
        for c in p.succs(b) {
            if !p.contains(a, c) {
                match absent(r.absence_is_final(a, c), ClassWitness::Triple(a, b, c)) {
                    Verdict::Unknown => undecided = true,
                    refuted => return refuted,
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

pub fn classify(r: &RelationSource, stage: Stage) -> RelationClassReport {
    let p = r.prefix(stage);

    let transitive_upto = transitivity_upto(r, &p);

    let irreflexive_upto = match p.pairs.iter().find(|(a, b)| a == b) {
        Some(&(a, _)) => Verdict::Refuted(ClassWitness::Loop(a)),
        None => Verdict::Holds,
    };

    let antisymmetric_upto = match p.pairs.iter().find(|&&(a, b)| a != b && p.contains(b, a)) {
        Some(&(a, b)) => Verdict::Refuted(ClassWitness::Swap(a.min(b), a.max(b))),
        None => Verdict::Holds,
    };

    let mut reflexive_upto = Verdict::Holds;
    for &a in &p.carrier {
        if !p.contains(a, a) {
            match absent(r.absence_is_final(a, a), ClassWitness::MissingLoop(a)) {
                Verdict::Unknown => reflexive_upto = Verdict::Unknown,
                refuted => {
                    reflexive_upto = refuted;
                    break;
                }
            }
        }
    }

    RelationClassReport {
        transitive_upto,
        irreflexive_upto,
        antisymmetric_upto,
        reflexive_upto,
        stage,
    }
}

// ---------------------------------------------------------------------------
// Catalog

/// A parameter value for a catalog family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Nat(u64),
    Bool(bool),
    Text(String),
    List(Vec<Param>),
}

pub type Params = BTreeMap<String, Param>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown relation family {name:?}; available: {}", available.join(", "))]
    UnknownName {
        name: String,
        available: Vec<&'static str>,
    },
    #[error("family {family}: parameter {param:?} {problem}")]
    BadParam {
        family: &'static str,
        param: &'static str,
        problem: String,
    },
}

pub(crate) struct ParamReader<'a> {
    pub family: &'static str,
    pub params: &'a Params,
}

impl ParamReader<'_> {
    pub(crate) fn bad(&self, param: &'static str, problem: impl Into<String>) -> CatalogError {
        CatalogError::BadParam {
            family: self.family,
            param,
            problem: problem.into(),
        }
    }

    pub fn nat(&self, key: &'static str, default: Option<u64>) -> Result<u64, CatalogError> {
        match self.params.get(key) {
            Some(Param::Nat(n)) => Ok(*n),
            Some(other) => Err(self.bad(key, format!("must be a natural number, got {other:?}"))),
            None => default.ok_or_else(|| self.bad(key, "is required")),
        }
    }

    pub fn flag(&self, key: &'static str, default: bool) -> Result<bool, CatalogError> {
        match self.params.get(key) {
            Some(Param::Bool(b)) => Ok(*b),
            Some(other) => Err(self.bad(key, format!("must be a boolean, got {other:?}"))),
            None => Ok(default),
        }
    }

    pub fn text(&self, key: &'static str, default: &str) -> Result<String, CatalogError> {
        match self.params.get(key) {
            Some(Param::Text(t)) => Ok(t.clone()),
            Some(other) => Err(self.bad(key, format!("must be a string, got {other:?}"))),
            None => Ok(default.to_string()),
        }
    }

    /// A natural number or the string `"omega"`.
    pub fn level(&self, key: &'static str) -> Result<Level, CatalogError> {
        match self.params.get(key) {
            Some(Param::Nat(n)) => Ok(Level::Finite(*n)),
            Some(Param::Text(t)) if t == "omega" => Ok(Level::Omega),
            Some(other) => Err(self.bad(key, format!("must be a number or \"omega\", got {other:?}"))),
            None => Err(self.bad(key, "is required")),
        }
    }

    pub fn nat_list(&self, key: &'static str) -> Result<Option<Vec<u64>>, CatalogError> {
        match self.params.get(key) {
            None => Ok(None),
            Some(Param::List(items)) => items
                .iter()
                .map(|p| match p {
                    Param::Nat(n) => Ok(*n),
                    other => Err(self.bad(key, format!("must list naturals, found {other:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => Err(self.bad(key, format!("must be a list, got {other:?}"))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&Param> {
        self.params.get(key)
    }
}

/// Number of layers of a `≺_ℓ` component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Level {
    Finite(u64),
    Omega,
}

impl Level {
    pub fn contains(self, m: u64) -> bool {
        match self {
            Level::Finite(l) => m < l,
            Level::Omega => true,
        }
    }

    /// Layers visible by `stage`.
    pub fn visible(self, stage: Stage) -> u64 {
        match self {
            Level::Finite(l) => l.min(stage),
            Level::Omega => stage,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(l) => write!(f, "{l}"),
            Level::Omega => f.write_str("omega"),
        }
    }
}

/// How rationals are numbered in the `≺_ℚ` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalCoding {
    /// All of `ℚ`, via the Stern–Brocot tree.
    SternBrocot,
    /// The dyadic rationals in `(0, 1)`.
    Dyadic,
}

impl RationalCoding {
    pub fn decode(self, code: Code) -> Rational {
        match self {
            RationalCoding::SternBrocot => Rational::from_code(code),
            RationalCoding::Dyadic => Rational::from_dyadic_code(code),
        }
    }

    fn parse(r: &ParamReader<'_>) -> Result<Self, CatalogError> {
        match r.text("coding", "stern-brocot")?.as_str() {
            "stern-brocot" => Ok(RationalCoding::SternBrocot),
            "dyadic" => Ok(RationalCoding::Dyadic),
            other => Err(r.bad(
                "coding",
                format!("must be \"stern-brocot\" or \"dyadic\", got {other:?}"),
            )),
        }
    }
}

/// The standard strict order of the rationals.
pub fn rationals(coding: RationalCoding) -> RelationSource {
    let label = match coding {
        RationalCoding::SternBrocot => "rationals",
        RationalCoding::Dyadic => "rationals(dyadic)",
    };
    decidable(
        label,
        move |a, b| coding.decode(a) < coding.decode(b),
        |_| true,
    )
}

/// Two-place predicate `θ(n, a, b)` parameterizing the restricted orders.
pub type Theta = Arc<dyn Fn(u64, u64, u64) -> bool + Send + Sync>;

struct Restricted {
    n: u64,
    theta: Theta,
    coding: RationalCoding,
    label: String,
}

impl Restricted {
    /// Members of `Q_n` recognized by `stage`: `q_i` with `∀a<i ∃b<stage θ(n,a,b)`.
    fn members(&self, stage: Stage) -> ElemSet {
        let mut out = ElemSet::new();
        for i in 0..stage {
            if i > 0 && !(0..stage).any(|b| (self.theta)(self.n, i - 1, b)) {
                break;
            }
            out.insert(i);
        }
        out
    }
}

impl Enumerate for Restricted {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let members = self.members(stage);
        let mut out = PairSet::new();
        for &a in &members {
            for &b in &members {
                if self.coding.decode(a) < self.coding.decode(b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.members(stage)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `<_ℚ` restricted to `Q_n = {q_i : ∀a<i ∃b θ(n,a,b)}`. Codes are the
/// indices `i` of the rational enumeration.
pub fn rationals_restricted(
    n: u64,
    theta: Theta,
    coding: RationalCoding,
    label: impl Into<String>,
) -> RelationSource {
    RelationSource::new(Restricted {
        n,
        theta,
        coding,
        label: label.into(),
    })
}

/// `(m,p) ≺_ℓ (n,q)` iff `m ≤ n` and `p < q`, coded as `pair(m, code(p))`.
pub fn levels(level: Level, coding: RationalCoding) -> RelationSource {
    RelationSource::new(Levels { level, coding })
}

struct Levels {
    level: Level,
    coding: RationalCoding,
}

impl Levels {
    fn holds(&self, a: Code, b: Code) -> bool {
        let (m, p) = unpair(a);
        let (n, q) = unpair(b);
        m <= n && self.coding.decode(p) < self.coding.decode(q)
    }
}

impl Enumerate for Levels {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let carrier = self.carrier_upto(stage);
        let mut out = PairSet::new();
        for &a in &carrier {
            for &b in &carrier {
                if self.holds(a, b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        let mut out = ElemSet::new();
        for m in 0..self.level.visible(stage) {
            for q in 0..stage {
                out.insert(pair(m, q));
            }
        }
        out
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        let in_carrier = |c| self.level.contains(unpair(c).0);
        Some(in_carrier(a) && in_carrier(b) && self.holds(a, b))
    }

    fn label(&self) -> String {
        format!("levels({})", self.level)
    }
}

pub fn chain(len: u64, reflexive: bool) -> FiniteRelation {
    let carrier: ElemSet = (0..len).collect();
    let pairs = (0..len)
        .flat_map(|i| (i..len).map(move |j| (i, j)))
        .filter(|&(i, j)| i < j || reflexive)
        .collect();
    FiniteRelation { carrier, pairs }
}

pub fn antichain(size: u64) -> FiniteRelation {
    FiniteRelation::from_pairs((0..size).map(|i| (i, i)))
}

/// The full preorder on `size` elements: every element below every other.
pub fn cycle(size: u64) -> FiniteRelation {
    FiniteRelation::from_pairs((0..size).flat_map(|i| (0..size).map(move |j| (i, j))))
}

pub fn sierpinski() -> FiniteRelation {
    FiniteRelation::from_pairs([(0, 0), (0, 1), (1, 1)])
}

/// The empty relation on `ω`; stage `s` declares the elements below `s`.
pub fn empty_on_omega() -> RelationSource {
    decidable("empty", |_, _| false, |_| true)
}

type Builder = fn(&ParamReader<'_>) -> Result<RelationSource, CatalogError>;

fn families() -> Vec<(&'static str, Builder)> {
    let mut out: Vec<(&'static str, Builder)> = Vec::from([
        ("rationals", build_rationals as Builder),
        ("rationals-restricted", build_restricted),
        ("levels", build_levels),
        ("chain", build_chain),
        ("antichain", build_antichain),
        ("cycle", build_cycle),
        ("sierpinski", |_| Ok(sierpinski().labelled("sierpinski"))),
        ("point", |_| Ok(FiniteRelation::from_pairs([(0, 0)]).labelled("point"))),
        ("empty", |_| Ok(empty_on_omega())),
    ]);
    out.extend(crate::fixtures::catalog_families());
    out
}

/// Names accepted by [`catalog`].
pub fn catalog_names() -> Vec<&'static str> {
    families().into_iter().map(|(name, _)| name).collect()
}

/// Build a named relation family.
pub fn catalog(name: &str, params: &Params) -> Result<RelationSource, CatalogError> {
    let table = families();
    let Some(&(family, build)) = table.iter().find(|(n, _)| *n == name) else {
        return Err(CatalogError::UnknownName {
            name: name.to_string(),
            available: table.iter().map(|(n, _)| *n).collect(),
        });
    };
    build(&ParamReader { family, params })
}

fn build_rationals(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    Ok(rationals(RationalCoding::parse(r)?))
}

fn build_restricted(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    let coding = RationalCoding::parse(r)?;
    let n = r.nat("n", Some(0))?;
    let kind = r.text("theta", "always-true")?;
    let theta: Theta = match kind.as_str() {
        "always-true" => Arc::new(|_, _, _| true),
        "always-false" => Arc::new(|_, _, _| false),
        "bounded" => {
            let k = r.nat("k", None)?;
            Arc::new(move |_, a, _| a < k)
        }
        other => {
            return Err(r.bad(
                "theta",
                format!("must be always-true, always-false or bounded, got {other:?}"),
            ))
        }
    };
    Ok(rationals_restricted(
        n,
        theta,
        coding,
        format!("rationals-restricted({kind})"),
    ))
}

fn build_levels(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    Ok(levels(r.level("levels")?, RationalCoding::parse(r)?))
}

fn build_chain(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    let len = r.nat("len", None)?;
    let reflexive = r.flag("reflexive", false)?;
    Ok(chain(len, reflexive).labelled(format!("chain({len})")))
}

fn build_antichain(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    let size = r.nat("size", None)?;
    Ok(antichain(size).labelled(format!("antichain({size})")))
}

fn build_cycle(r: &ParamReader<'_>) -> Result<RelationSource, CatalogError> {
    let size = r.nat("size", None)?;
    Ok(cycle(size).labelled(format!("cycle({size})")))
}

/// Every pair of `r` up to `stage` satisfies `holds`.
pub fn pointwise<F: Fn(Code, Code) -> bool>(r: &RelationSource, stage: Stage, holds: F) -> bool {
    r.enumerate_upto(stage).iter().all(|&(a, b)| holds(a, b))
}
