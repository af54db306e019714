//! Concrete presentations: tree-parameterized spaces over decorated words,
//! layered copies of `≺_ℓ` on `ℓ × ℚ` and their disjoint sums, compatible
//! antichains, and the stage machines that build copies of those sums from
//! an approximation of the underlying set.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::carrier::{pair, unpair, Rational, Symbol, TreePredicate};
use crate::relations::{
    decidable, CatalogError, Enumerate, FiniteRelation, Level, Param, ParamReader, Params, RelationSource,
};
use crate::{Code, ElemSet, PairSet, Stage, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("carrier has {size} elements, more than the bound {bound}")]
    CarrierTooLarge { size: usize, bound: usize },
}

// ---------------------------------------------------------------------------
// Tree spaces

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TreeFamily {
    /// `σ`, `σ̲`: not `T_1` exactly when `T` has an infinite path.
    T1,
    /// `σ̲`, `[σ,∞]`, `[σ,∞*]`: not Hausdorff exactly when `T` has an infinite path.
    Telophase,
    /// `(n,σ)`, `(n,σ̲)`, `(n,σ^±)`, `[n,σ]`, `[n,σ̲]`: not metrizable exactly
    /// when `T` has an infinite path.
    DoubleOrigin,
}

impl TreeFamily {
    pub fn name(self) -> &'static str {
        match self {
            TreeFamily::T1 => "tree-t1",
            TreeFamily::Telophase => "telophase",
            TreeFamily::DoubleOrigin => "double-origin",
        }
    }

    pub fn admits(self, s: &Symbol) -> bool {
        use Symbol::*;
        match self {
            TreeFamily::T1 => matches!(s, Word(_) | Under(_)),
            TreeFamily::Telophase => matches!(s, Under(_) | Inf(_) | InfStar(_)),
            TreeFamily::DoubleOrigin => {
                matches!(s, Point(..) | PointUnder(..) | PointPm(..) | Ray(..) | RayUnder(..))
            }
        }
    }
}

fn parent(w: &[u64]) -> Option<Vec<u64>> {
    (!w.is_empty()).then(|| w[..w.len() - 1].to_vec())
}

fn proper_prefixes(w: &[u64]) -> impl Iterator<Item = Vec<u64>> + '_ {
    (0..w.len()).map(move |k| w[..k].to_vec())
}

fn comparable(u: &[u64], v: &[u64]) -> bool {
    let k = u.len().min(v.len());
    u[..k] == v[..k]
}

/// A tree space over `T`. The generating pairs are those of the family; the
/// relation is their transitive closure, which is decided locally since
/// everything below a symbol lives on prefixes of its word.
#[derive(Clone, Debug)]
pub struct TreeSpace {
    family: TreeFamily,
    tree: TreePredicate,
}

impl TreeSpace {
    pub fn new(family: TreeFamily, tree: TreePredicate) -> Self {
        TreeSpace { family, tree }
    }

    pub fn family(&self) -> TreeFamily {
        self.family
    }

    pub fn tree(&self) -> &TreePredicate {
        &self.tree
    }

    /// A word whose membership check fails counts as outside `T`.
    fn outside(&self, w: &[u64]) -> bool {
        !matches!(self.tree.contains(w), Ok(true))
    }

    /// Symbols `a` with `a ≺ s` among the generating pairs.
    pub fn direct_preds(&self, s: &Symbol) -> Vec<Symbol> {
        use Symbol::*;
        if !self.family.admits(s) {
            return Vec::new();
        }
        let w = s.word();
        let up = parent(w);
        let off = self.outside(w);
        let mut out = Vec::new();
        match (self.family, s) {
            (TreeFamily::T1, Word(_)) => {
                if let Some(p) = up {
                    out.push(Word(p.clone()));
                    if off {
                        out.push(Under(p));
                    }
                }
            }
            (TreeFamily::T1, Under(_)) => {
                if let Some(p) = up {
                    out.push(Under(p));
                }
                out.push(Word(w.to_vec()));
            }
            (TreeFamily::Telophase, Inf(_)) => {
                if let Some(p) = up {
                    out.push(Inf(p.clone()));
                    if off {
                        out.push(InfStar(p));
                    }
                }
            }
            (TreeFamily::Telophase, InfStar(_)) => {
                if let Some(p) = up {
                    out.push(InfStar(p));
                }
                if off && !w.is_empty() {
                    out.push(Inf(w.to_vec()));
                }
            }
            (TreeFamily::Telophase, Under(_)) => {
                out.push(Inf(w.to_vec()));
                out.push(InfStar(w.to_vec()));
                out.push(Under(w.to_vec()));
            }
            (TreeFamily::DoubleOrigin, Ray(n, _)) => {
                for m in 0..*n {
                    out.push(Ray(m, w.to_vec()));
                    out.extend(proper_prefixes(w).map(|t| Ray(m, t)));
                }
                if off {
                    out.push(RayUnder(*n, w.to_vec()));
                }
            }
            (TreeFamily::DoubleOrigin, RayUnder(n, _)) => {
                for m in 0..*n {
                    out.push(RayUnder(m, w.to_vec()));
                    out.extend(proper_prefixes(w).map(|t| RayUnder(m, t)));
                    if off {
                        out.extend(proper_prefixes(w).map(|t| Ray(m, t)));
                    }
                }
            }
            (TreeFamily::DoubleOrigin, Point(n, _)) => {
                out.push(Ray(*n, w.to_vec()));
                out.push(Point(*n, w.to_vec()));
                out.push(PointPm(*n, w.to_vec()));
                if off {
                    out.push(PointUnder(*n, w.to_vec()));
                }
            }
            (TreeFamily::DoubleOrigin, PointUnder(n, _)) => {
                out.push(RayUnder(*n, w.to_vec()));
                out.push(PointUnder(*n, w.to_vec()));
                out.push(PointPm(*n, w.to_vec()));
                if off {
                    out.push(Point(*n, w.to_vec()));
                }
            }
            (TreeFamily::DoubleOrigin, PointPm(n, _)) => {
                out.extend(proper_prefixes(w).map(|t| PointPm(*n, t)));
            }
            _ => {}
        }
        out
    }

    /// Every `a` with `a ≺ s` in the closure.
    pub fn below(&self, s: &Symbol) -> BTreeSet<Symbol> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Symbol> = self.direct_preds(s).into();
        while let Some(x) = queue.pop_front() {
            if seen.insert(x.clone()) {
                queue.extend(self.direct_preds(&x).into_iter().filter(|y| !seen.contains(y)));
            }
        }
        seen
    }

    pub fn related(&self, a: &Symbol, b: &Symbol) -> bool {
        self.family.admits(a) && comparable(a.word(), b.word()) && self.below(b).contains(a)
    }

    /// The generators together with everything below them.
    pub fn down_closure<'a>(&self, gens: impl IntoIterator<Item = &'a Symbol>) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for g in gens {
            out.insert(g.clone());
            out.extend(self.below(g));
        }
        out
    }

    /// The first `c` with `a ≺ c` and `b ≺ c` among family symbols whose
    /// word extends the longer of the two words up to length `depth`, using
    /// letters up to one past the largest letter seen and indices up to one
    /// past the largest index seen.
    pub fn common_upper_bound(&self, a: &Symbol, b: &Symbol, depth: usize) -> Option<Symbol> {
        let base = if a.word().len() >= b.word().len() { a.word() } else { b.word() };
        let letters = a.word().iter().chain(b.word()).copied().max().map_or(1, |m| m + 1);
        let top_index = a.index().into_iter().chain(b.index()).max().unwrap_or(0) + 1;
        let mut words = Vec::from([base.to_vec()]);
        let mut layer = words.clone();
        for _ in base.len()..depth {
            let next: Vec<Vec<u64>> = layer
                .iter()
                .flat_map(|w| {
                    (0..=letters).map(move |l| {
                        let mut w = w.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
            words.extend(next.iter().cloned());
            layer = next;
        }
        for w in words {
            for c in self.symbols_on(&w, top_index) {
                if self.related(a, &c) && self.related(b, &c) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn symbols_on(&self, w: &[u64], top_index: u64) -> Vec<Symbol> {
        use Symbol::*;
        let w = w.to_vec();
        match self.family {
            TreeFamily::T1 => Vec::from([Word(w.clone()), Under(w)]),
            TreeFamily::Telophase => Vec::from([Under(w.clone()), Inf(w.clone()), InfStar(w)]),
            TreeFamily::DoubleOrigin => (0..=top_index)
                .flat_map(|n| {
                    [
                        Point(n, w.clone()),
                        PointUnder(n, w.clone()),
                        PointPm(n, w.clone()),
                        Ray(n, w.clone()),
                        RayUnder(n, w.clone()),
                    ]
                })
                .collect(),
        }
    }

    pub fn source(&self) -> RelationSource {
        RelationSource::new(self.clone())
    }

    fn decode(&self, code: Code) -> Option<Symbol> {
        Symbol::decode(code).filter(|s| self.family.admits(s))
    }
}

impl Enumerate for TreeSpace {
    /// Pairs among family symbols whose codes are below `stage`.
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        let mut out = PairSet::new();
        for b in self.carrier_upto(stage) {
            let Some(sb) = Symbol::decode(b) else { continue };
            for sa in self.below(&sb) {
                if let Ok(a) = sa.encode() {
                    if a < stage {
                        out.insert((a, b));
                    }
                }
            }
        }
        out
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        (0..stage).filter(|&c| self.decode(c).is_some()).collect()
    }

    fn decide(&self, a: Code, b: Code) -> Option<bool> {
        Some(match (self.decode(a), self.decode(b)) {
            (Some(x), Some(y)) => self.related(&x, &y),
            _ => false,
        })
    }

    fn label(&self) -> String {
        format!("{}({})", self.family.name(), self.tree.description())
    }
}

pub fn tree_space_t1(tree: TreePredicate) -> RelationSource {
    TreeSpace::new(TreeFamily::T1, tree).source()
}

pub fn tree_space_telophase(tree: TreePredicate) -> RelationSource {
    TreeSpace::new(TreeFamily::Telophase, tree).source()
}

pub fn tree_space_double_origin(tree: TreePredicate) -> RelationSource {
    TreeSpace::new(TreeFamily::DoubleOrigin, tree).source()
}

// ---------------------------------------------------------------------------
// Spectra

/// Which disjoint sum to build from a set `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum SpectrumVariant {
    /// Component `a` is a copy of `≺_{ℓ(a)}`: `ℓ(2a) = 2a + A(a)`, `ℓ(2a+1) = ω`.
    Plain,
    /// Copies of `≺_{4a+2A(a)}` beside junk copies of `≺_{4a+1}` and `≺_{4a+3}`.
    Star,
}

/// A stage table for an approximation of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    /// `A_s(a)` is entry `s` of the row for `a`, the last entry repeating.
    pub table: BTreeMap<u64, Vec<bool>>,
    /// Rows for the complement side of the star variant. Missing rows are
    /// the negation of `table`.
    pub complement: BTreeMap<u64, Vec<bool>>,
    /// Stage by which every row is declared constant.
    pub horizon: Stage,
    /// Only `a < components` get coded components.
    pub components: u64,
    /// Copies per region, and junk copies per kind, in the star variant.
    pub copies: u64,
}

impl Default for Approximation {
    fn default() -> Self {
        Approximation {
            table: BTreeMap::new(),
            complement: BTreeMap::new(),
            horizon: 0,
            components: 3,
            copies: 2,
        }
    }
}

fn row_at(row: &[bool], s: Stage) -> Option<bool> {
    let last = row.len().checked_sub(1)?;
    Some(row[(s as usize).min(last)])
}

/// First stage from which the row is constant.
fn settles_at(row: &[bool]) -> Stage {
    (1..row.len())
        .rev()
        .find(|&i| row[i] != row[i - 1])
        .unwrap_or(0) as Stage
}

/// A set `A ⊆ ω` and optionally a stage table approximating it.
#[derive(Clone)]
pub struct SpectrumSpec {
    members: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    label: String,
    pub approximation: Option<Approximation>,
}

impl core::fmt::Debug for SpectrumSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SpectrumSpec")
            .field("label", &self.label)
            .field("approximation", &self.approximation)
            .finish()
    }
}

impl SpectrumSpec {
    pub fn new(label: impl Into<String>, members: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        SpectrumSpec {
            members: Arc::new(members),
            label: label.into(),
            approximation: None,
        }
    }

    pub fn finite(members: ElemSet) -> Self {
        let label = format!("{members:?}");
        SpectrumSpec::new(label, move |a| members.contains(&a))
    }

    pub fn with_approximation(mut self, approx: Approximation) -> Self {
        self.approximation = Some(approx);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `A(a)`: the last table entry when there is a row, else membership.
    pub fn limit(&self, a: u64) -> bool {
        self.value(a, Stage::MAX)
    }

    /// `A_s(a)`.
    pub fn value(&self, a: u64, s: Stage) -> bool {
        self.approximation
            .as_ref()
            .and_then(|ap| ap.table.get(&a))
            .and_then(|row| row_at(row, s))
            .unwrap_or_else(|| (self.members)(a))
    }

    /// `Ā_s(a)`.
    pub fn complement_value(&self, a: u64, s: Stage) -> bool {
        self.approximation
            .as_ref()
            .and_then(|ap| ap.complement.get(&a))
            .and_then(|row| row_at(row, s))
            .unwrap_or_else(|| !self.value(a, s))
    }

    /// `ℓ(a)` of the plain variant.
    pub fn level_of(&self, a: u64) -> Level {
        if a.is_multiple_of(2) {
            let a = a / 2;
            Level::Finite(2 * a + self.limit(a) as u64)
        } else {
            Level::Omega
        }
    }
}

/// `⟨a, b, c⟩ = 4a + 2b + c`.
pub fn star_layers(a: u64, b: bool, c: bool) -> u64 {
    4 * a + 2 * b as u64 + c as u64
}

/// Component `c` of the star sum: `pair(a, pair(kind, copy))` with kind 0
/// for `≺_{⟨a,A(a),0⟩}`, 1 and 2 for the junk `≺_{⟨a,0,1⟩}` and `≺_{⟨a,1,1⟩}`.
fn star_level(spec: &SpectrumSpec, c: u64) -> Option<Level> {
    let (a, rest) = unpair(c);
    let (kind, _) = unpair(rest);
    let layers = match kind {
        0 => star_layers(a, spec.limit(a), false),
        1 => star_layers(a, false, true),
        2 => star_layers(a, true, true),
        _ => return None,
    };
    Some(Level::Finite(layers))
}

/// The disjoint sum, on codes `pair(c, pair(m, p))` for component `c`,
/// layer `m` and Stern–Brocot rational `p`. Stage `s` shows the codes below
/// `s`.
pub fn spectrum_relation(spec: &SpectrumSpec, variant: SpectrumVariant) -> RelationSource {
    let label = spec.label().to_string();
    let spec = spec.clone();
    let level = move |c: u64| match variant {
        SpectrumVariant::Plain => Some(spec.level_of(c)),
        SpectrumVariant::Star => star_level(&spec, c),
    };
    let level2 = level.clone();
    let member = move |x: Code| {
        let (c, mp) = unpair(x);
        level(c).is_some_and(|l| l.contains(unpair(mp).0))
    };
    let rel = move |x: Code, y: Code| {
        let (c, mp) = unpair(x);
        let (d, nq) = unpair(y);
        let (m, p) = unpair(mp);
        let (n, q) = unpair(nq);
        c == d && level2(c).is_some() && m <= n && Rational::from_code(p) < Rational::from_code(q)
    };
    let name = match variant {
        SpectrumVariant::Plain => "spectrum",
        SpectrumVariant::Star => "spectrum*",
    };
    decidable(format!("{name}({label})"), rel, member)
}

/// `≺_ℓ` on `layers × rationals`, coded `pair(m, i)` with `i` the position
/// in `rationals`.
pub fn layered_truncation(layers: u64, rationals: &[Rational]) -> FiniteRelation {
    let mut pairs = PairSet::new();
    let mut carrier = ElemSet::new();
    for m in 0..layers {
        for (i, p) in rationals.iter().enumerate() {
            carrier.insert(pair(m, i as u64));
            for n in m..layers {
                for (j, q) in rationals.iter().enumerate() {
                    if p < q {
                        pairs.insert((pair(m, i as u64), pair(n, j as u64)));
                    }
                }
            }
        }
    }
    FiniteRelation::new(carrier, pairs).expect("pairs lie in the carrier")
}

/// `{0, 1/n, ..., (n-1)/n}`.
pub fn unit_grid(n: u64) -> Vec<Rational> {
    (0..n)
        .map(|k| Rational::new(k as i64, n as i64).expect("nonzero denominator"))
        .collect()
}

/// The first `n` rationals in Stern–Brocot order.
pub fn first_rationals(n: u64) -> Vec<Rational> {
    (0..n).map(Rational::from_code).collect()
}

pub const ANTICHAIN_CARRIER_BOUND: usize = 64;

/// Every maximal compatible antichain: pairwise incomparable sets with a
/// common `≺`-lower bound, maximal among such.
pub fn antichain_census(r: &FiniteRelation) -> Result<Vec<ElemSet>, FixtureError> {
    let elems: Vec<Code> = r.carrier().iter().copied().collect();
    if elems.len() > ANTICHAIN_CARRIER_BOUND {
        return Err(FixtureError::CarrierTooLarge {
            size: elems.len(),
            bound: ANTICHAIN_CARRIER_BOUND,
        });
    }
    let n = elems.len();
    let idx = |bits: u64| (0..n).filter(move |i| bits & (1 << i) != 0);
    let mut below = Vec::with_capacity(n);
    let mut clash = Vec::with_capacity(n);
    for (i, &x) in elems.iter().enumerate() {
        let mut lower = 0u64;
        let mut comp = 1u64 << i;
        for (j, &y) in elems.iter().enumerate() {
            if r.contains(y, x) {
                lower |= 1 << j;
            }
            if r.contains(x, y) || r.contains(y, x) {
                comp |= 1 << j;
            }
        }
        below.push(lower);
        clash.push(comp);
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // Compatible antichains, grown in index order.
    let mut found: Vec<u64> = Vec::new();
    let mut stack: Vec<(u64, u64, usize)> = (0..n)
        .filter(|&i| below[i] != 0)
        .map(|i| (1u64 << i, below[i], i))
        .collect();
    while let Some((set, lower, last)) = stack.pop() {
        found.push(set);
        let blocked = idx(set).fold(0u64, |acc, i| acc | clash[i]);
        for j in last + 1..n {
            if blocked & (1 << j) == 0 && lower & below[j] != 0 {
                stack.push((set | 1 << j, lower & below[j], j));
            }
        }
    }
    let mut out: Vec<ElemSet> = found
        .iter()
        .filter(|&&set| {
            let blocked = idx(set).fold(0u64, |acc, i| acc | clash[i]);
            let lower = idx(set).fold(all, |acc, i| acc & below[i]);
            (0..n).all(|j| blocked & (1 << j) != 0 || lower & below[j] == 0)
        })
        .map(|&set| idx(set).map(|i| elems[i]).collect())
        .collect();
    out.sort();
    Ok(out)
}

/// A bijection `h` of carriers with `a ≺ b ⟺ h(a) ≺ h(b)`, if one exists.
pub fn find_isomorphism(left: &FiniteRelation, right: &FiniteRelation) -> Option<BTreeMap<Code, Code>> {
    if left.carrier().len() != right.carrier().len() || left.pairs().len() != right.pairs().len() {
        return None;
    }
    let signature = |r: &FiniteRelation, x: Code| {
        let out = r.pairs().iter().filter(|p| p.0 == x).count();
        let inn = r.pairs().iter().filter(|p| p.1 == x).count();
        (out, inn, r.contains(x, x))
    };
    let mut by_sig: BTreeMap<(usize, usize, bool), Vec<Code>> = BTreeMap::new();
    for &y in right.carrier() {
        by_sig.entry(signature(right, y)).or_default().push(y);
    }
    let mut order: Vec<(Code, (usize, usize, bool))> =
        left.carrier().iter().map(|&x| (x, signature(left, x))).collect();
    // rarest signatures first
    order.sort_by_key(|(x, s)| (by_sig.get(s).map_or(0, Vec::len), *x));
    if order.iter().any(|(_, s)| !by_sig.contains_key(s)) {
        return None;
    }

    fn extend(
        k: usize,
        order: &[(Code, (usize, usize, bool))],
        by_sig: &BTreeMap<(usize, usize, bool), Vec<Code>>,
        left: &FiniteRelation,
        right: &FiniteRelation,
        map: &mut Vec<(Code, Code)>,
        used: &mut BTreeSet<Code>,
    ) -> bool {
        let Some(&(x, sig)) = order.get(k) else {
            return true;
        };
        for &y in &by_sig[&sig] {
            if used.contains(&y) {
                continue;
            }
            let fits = map.iter().all(|&(a, b)| {
                left.contains(a, x) == right.contains(b, y) && left.contains(x, a) == right.contains(y, b)
            });
            if fits {
                map.push((x, y));
                used.insert(y);
                if extend(k + 1, order, by_sig, left, right, map, used) {
                    return true;
                }
                map.pop();
                used.remove(&y);
            }
        }
        false
    }

    let mut map = Vec::new();
    let mut used = BTreeSet::new();
    extend(0, &order, &by_sig, left, right, &mut map, &mut used).then(|| map.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Approximation copies

/// Where an element sits in its component's `≺_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Role {
    pub layer: u64,
    pub rational: Rational,
}

impl Role {
    fn below(&self, other: &Role) -> bool {
        self.layer <= other.layer && self.rational < other.rational
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ComponentKind {
    /// The copy coding `a` (plain variant).
    Coded { a: u64 },
    /// A copy of `≺_ω`.
    Omega,
    /// A copy in region `⟨a, side⟩` (star variant).
    Region { a: u64, side: bool, copy: u64 },
    /// A copy of `≺_{⟨a,i,1⟩}` (star variant).
    Junk { a: u64, i: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComponentRecord {
    pub id: usize,
    pub kind: ComponentKind,
    pub created_at: Stage,
    pub layers: Level,
    /// The approximation value the component currently follows.
    pub value: Option<bool>,
    /// Plain variant: the stage the copy was given up and left to grow as `≺_ω`.
    pub abandoned_at: Option<Stage>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ElementRecord {
    pub code: Code,
    pub component: usize,
    pub created_at: Stage,
    /// Role history, oldest first.
    pub roles: Vec<(Stage, Role)>,
}

impl ElementRecord {
    pub fn role(&self) -> &Role {
        &self.roles.last().expect("elements start with a role").1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RoleChange {
    pub stage: Stage,
    pub element: Code,
    pub component: usize,
    pub from: Role,
    pub to: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum CopyWarning {
    /// The row for `a` changes after the declared horizon.
    Unsettled { a: u64, settles_at: Stage, horizon: Stage },
    /// A one-layer copy was asked to drop to zero layers.
    CannotLower { component: usize, stage: Stage },
}

/// The copy machine after `stage` stages.
#[derive(Clone, Debug)]
pub struct CopyState {
    spec: SpectrumSpec,
    variant: SpectrumVariant,
    approx: Approximation,
    stage: Stage,
    components: Vec<ComponentRecord>,
    elements: Vec<ElementRecord>,
    members: Vec<Vec<Code>>,
    roles: Vec<BTreeMap<Role, Code>>,
    /// Plain: the live copy for each `a`.
    current: BTreeMap<u64, usize>,
    /// Star: the value each region follows.
    region_values: BTreeMap<(u64, bool), bool>,
    pairs: PairSet,
    order: Vec<(Code, Code)>,
    at: Vec<usize>,
    ledger: Vec<RoleChange>,
    warnings: Vec<CopyWarning>,
}

impl CopyState {
    pub fn new(spec: &SpectrumSpec, variant: SpectrumVariant) -> Self {
        let approx = spec.approximation.clone().unwrap_or_default();
        let warnings = approx
            .table
            .iter()
            .chain(&approx.complement)
            .filter_map(|(&a, row)| {
                let settles = settles_at(row);
                (settles > approx.horizon).then_some(CopyWarning::Unsettled {
                    a,
                    settles_at: settles,
                    horizon: approx.horizon,
                })
            })
            .collect();
        CopyState {
            spec: spec.clone(),
            variant,
            approx,
            stage: 0,
            components: Vec::new(),
            elements: Vec::new(),
            members: Vec::new(),
            roles: Vec::new(),
            current: BTreeMap::new(),
            region_values: BTreeMap::new(),
            pairs: PairSet::new(),
            order: Vec::new(),
            at: Vec::from([0]),
            ledger: Vec::new(),
            warnings,
        }
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn components(&self) -> &[ComponentRecord] {
        &self.components
    }

    pub fn elements(&self) -> &[ElementRecord] {
        &self.elements
    }

    pub fn ledger(&self) -> &[RoleChange] {
        &self.ledger
    }

    pub fn warnings(&self) -> &[CopyWarning] {
        &self.warnings
    }

    fn open(&mut self, kind: ComponentKind, layers: Level, value: Option<bool>) -> usize {
        let id = self.components.len();
        self.components.push(ComponentRecord {
            id,
            kind,
            created_at: self.stage,
            layers,
            value,
            abandoned_at: None,
        });
        self.members.push(Vec::new());
        self.roles.push(BTreeMap::new());
        id
    }

    fn add_pair(&mut self, a: Code, b: Code) {
        if self.pairs.insert((a, b)) {
            self.order.push((a, b));
        }
    }

    /// Add every pair the current roles call for between `x` and the rest
    /// of its component.
    fn relate(&mut self, x: Code) {
        let c = self.elements[x as usize].component;
        let rx = self.elements[x as usize].role().clone();
        for i in 0..self.members[c].len() {
            let y = self.members[c][i];
            let ry = self.elements[y as usize].role().clone();
            if rx.below(&ry) {
                self.add_pair(x, y);
            }
            if ry.below(&rx) {
                self.add_pair(y, x);
            }
        }
    }

    fn fill(&mut self, c: usize) {
        let layers = match self.components[c].layers {
            Level::Finite(l) => l,
            Level::Omega => self.stage + 1,
        };
        for m in 0..layers {
            for n in 0..=self.stage {
                let role = Role {
                    layer: m,
                    rational: Rational::from_code(n),
                };
                if self.roles[c].contains_key(&role) {
                    continue;
                }
                let x = self.elements.len() as Code;
                self.elements.push(ElementRecord {
                    code: x,
                    component: c,
                    created_at: self.stage,
                    roles: Vec::from([(self.stage, role.clone())]),
                });
                self.roles[c].insert(role, x);
                self.members[c].push(x);
                self.relate(x);
            }
        }
    }

    /// Move the top layer of `c` just below itself, above every rational
    /// the component has used.
    fn lower(&mut self, c: usize, top: u64) {
        if top == 0 {
            self.warnings.push(CopyWarning::CannotLower {
                component: c,
                stage: self.stage,
            });
            return;
        }
        let ceiling = self.roles[c]
            .keys()
            .map(|r| r.rational.numer().div_euclid(r.rational.denom() as i64))
            .max()
            .unwrap_or(0);
        let movers: Vec<(Role, Code)> = self.roles[c]
            .iter()
            .filter(|(r, _)| r.layer == top)
            .map(|(r, &x)| (r.clone(), x))
            .collect();
        for (k, (from, x)) in movers.iter().enumerate() {
            let to = Role {
                layer: top - 1,
                rational: Rational::integer(ceiling + 1 + k as i64),
            };
            self.roles[c].remove(from);
            self.roles[c].insert(to.clone(), *x);
            self.elements[*x as usize].roles.push((self.stage, to.clone()));
            self.ledger.push(RoleChange {
                stage: self.stage,
                element: *x,
                component: c,
                from: from.clone(),
                to,
            });
        }
        for (_, x) in movers {
            self.relate(x);
        }
    }

    fn step_plain(&mut self) {
        let s = self.stage;
        let bound = self.approx.components;
        for a in 0..s.min(bound) {
            let Some(&c) = self.current.get(&a) else { continue };
            let v = self.spec.value(a, s);
            let was = self.components[c].value.unwrap_or(v);
            if v && !was {
                self.components[c].layers = Level::Finite(2 * a + 1);
                self.components[c].value = Some(v);
            } else if was && !v {
                self.components[c].abandoned_at = Some(s);
                self.components[c].layers = Level::Omega;
                let fresh = self.open(ComponentKind::Coded { a }, Level::Finite(2 * a), Some(v));
                self.current.insert(a, fresh);
            }
        }
        if s < bound {
            let v = self.spec.value(s, s);
            let c = self.open(ComponentKind::Coded { a: s }, Level::Finite(2 * s + v as u64), Some(v));
            self.current.insert(s, c);
        }
        let omegas = self
            .components
            .iter()
            .filter(|c| c.kind == ComponentKind::Omega)
            .count() as u64;
        if omegas < bound {
            self.open(ComponentKind::Omega, Level::Omega, None);
        }
    }

    fn step_star(&mut self) {
        let s = self.stage;
        let bound = self.approx.components;
        for a in 0..bound {
            for side in [false, true] {
                let v = if side {
                    self.spec.value(a, s)
                } else {
                    self.spec.complement_value(a, s)
                };
                let copies: Vec<usize> = self
                    .components
                    .iter()
                    .filter(|c| matches!(c.kind, ComponentKind::Region { a: ca, side: cs, .. } if ca == a && cs == side))
                    .map(|c| c.id)
                    .collect();
                if let Some(&was) = self.region_values.get(&(a, side)) {
                    if v != was {
                        for &c in &copies {
                            let base = star_layers(a, side, false);
                            if !v {
                                self.lower(c, base);
                            }
                            self.components[c].layers = Level::Finite(base + v as u64);
                            self.components[c].value = Some(v);
                        }
                    }
                }
                self.region_values.insert((a, side), v);
                if (copies.len() as u64) < self.approx.copies {
                    let kind = ComponentKind::Region {
                        a,
                        side,
                        copy: copies.len() as u64,
                    };
                    self.open(kind, Level::Finite(star_layers(a, side, v)), Some(v));
                }
            }
        }
        let junk = self
            .components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Junk { .. }))
            .count() as u64;
        let kinds = 2 * bound;
        if kinds > 0 && junk < kinds * self.approx.copies {
            let k = junk % kinds;
            let (a, i) = (k / 2, k % 2 == 1);
            self.open(ComponentKind::Junk { a, i }, Level::Finite(star_layers(a, i, true)), None);
        }
    }

    pub fn step(&mut self) {
        match self.variant {
            SpectrumVariant::Plain => self.step_plain(),
            SpectrumVariant::Star => self.step_star(),
        }
        for c in 0..self.components.len() {
            self.fill(c);
        }
        self.stage += 1;
        self.at.push(self.order.len());
    }

    pub fn pairs_at(&self, stage: Stage) -> PairSet {
        self.order[..self.at[stage as usize]].iter().copied().collect()
    }

    /// Elements created before `stage`.
    pub fn carrier_at(&self, stage: Stage) -> ElemSet {
        self.elements
            .iter()
            .filter(|e| e.created_at < stage)
            .map(|e| e.code)
            .collect()
    }

    /// The relation restricted to one component.
    pub fn component_relation(&self, c: usize) -> FiniteRelation {
        let carrier: ElemSet = self.members[c].iter().copied().collect();
        let pairs = self
            .pairs
            .iter()
            .filter(|(a, b)| carrier.contains(a) && carrier.contains(b))
            .copied()
            .collect();
        FiniteRelation::new(carrier, pairs).expect("component pairs stay in the component")
    }

    pub fn audit(&self) -> CopyAudit {
        let component_of = |x: Code| self.elements[x as usize].component;
        let irreflexive = match self.pairs.iter().find(|(a, b)| a == b) {
            Some(&(a, _)) => Verdict::Refuted(a),
            None => Verdict::Holds,
        };
        let within = match self.pairs.iter().find(|&&(a, b)| component_of(a) != component_of(b)) {
            Some(&p) => Verdict::Refuted(p),
            None => Verdict::Holds,
        };
        let mut consistent = Verdict::Holds;
        'outer: for members in &self.members {
            for &x in members {
                for &y in members {
                    let want = self.elements[x as usize].role().below(self.elements[y as usize].role());
                    if want != self.pairs.contains(&(x, y)) {
                        consistent = Verdict::Refuted((x, y));
                        break 'outer;
                    }
                }
            }
        }
        let role_changes = match self.elements.iter().find(|e| {
            e.roles.len() > 2
                || e.roles
                    .windows(2)
                    .any(|w| w[1].1.layer + 1 != w[0].1.layer)
        }) {
            Some(e) => Verdict::Refuted(e.code),
            None => Verdict::Holds,
        };
        let components = self
            .components
            .iter()
            .map(|c| {
                let layers: BTreeSet<u64> = self.roles[c.id].keys().map(|r| r.layer).collect();
                ComponentSummary {
                    record: c.clone(),
                    elements: self.members[c.id].len(),
                    occupied_layers: layers.len() as u64,
                }
            })
            .collect();
        CopyAudit {
            stage: self.stage,
            irreflexive,
            within_components: within,
            roles_consistent: consistent,
            role_changes,
            changes: self.ledger.len(),
            components,
            warnings: self.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComponentSummary {
    pub record: ComponentRecord,
    pub elements: usize,
    pub occupied_layers: u64,
}

/// Checks on a copy machine's state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyAudit {
    pub stage: Stage,
    pub irreflexive: Verdict<Code>,
    pub within_components: Verdict<(Code, Code)>,
    /// The enumerated pairs are exactly those the current roles call for.
    pub roles_consistent: Verdict<(Code, Code)>,
    /// Each element changed role at most once, one layer down.
    pub role_changes: Verdict<Code>,
    pub changes: usize,
    pub components: Vec<ComponentSummary>,
    pub warnings: Vec<CopyWarning>,
}

impl CopyAudit {
    pub fn passed(&self) -> bool {
        self.irreflexive.holds()
            && self.within_components.holds()
            && self.roles_consistent.holds()
            && self.role_changes.holds()
    }
}

struct CopyShared {
    state: spin::Mutex<CopyState>,
    label: String,
}

/// A copy machine replayed on demand.
#[derive(Clone)]
pub struct CopyRun {
    shared: Arc<CopyShared>,
}

impl core::fmt::Debug for CopyRun {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_tuple("CopyRun").field(&self.shared.label).finish()
    }
}

impl CopyRun {
    pub fn new(spec: &SpectrumSpec, variant: SpectrumVariant) -> Self {
        let name = match variant {
            SpectrumVariant::Plain => "copy",
            SpectrumVariant::Star => "copy*",
        };
        CopyRun {
            shared: Arc::new(CopyShared {
                state: spin::Mutex::new(CopyState::new(spec, variant)),
                label: format!("{name}({})", spec.label()),
            }),
        }
    }

    fn with_stage<T>(&self, stage: Stage, read: impl FnOnce(&CopyState) -> T) -> T {
        let mut state = self.shared.state.lock();
        while state.stage() < stage {
            state.step();
        }
        read(&state)
    }

    /// The machine after exactly `stage` stages.
    pub fn state(&self, stage: Stage) -> CopyState {
        let current = self.with_stage(stage, |st| st.clone());
        if current.stage() == stage {
            return current;
        }
        let mut fresh = CopyState::new(&current.spec, current.variant);
        while fresh.stage() < stage {
            fresh.step();
        }
        fresh
    }

    pub fn relation(&self) -> RelationSource {
        RelationSource::new(CopySource { run: self.clone() })
    }
}

struct CopySource {
    run: CopyRun,
}

impl Enumerate for CopySource {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        self.run.with_stage(stage, |st| st.pairs_at(stage))
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        self.run.with_stage(stage, |st| st.carrier_at(stage))
    }

    fn label(&self) -> String {
        self.run.shared.label.clone()
    }
}

/// The stage-built copy of the sum for `spec`, driven by its approximation.
pub fn approximation_copy(spec: &SpectrumSpec, variant: SpectrumVariant) -> RelationSource {
    CopyRun::new(spec, variant).relation()
}

// ---------------------------------------------------------------------------
// Catalog

type Builder = fn(&ParamReader<'_>) -> Result<RelationSource, CatalogError>;

pub(crate) fn catalog_families() -> Vec<(&'static str, Builder)> {
    Vec::from([
        ("tree-t1", (|r| Ok(tree_space_t1(read_tree(r)?))) as Builder),
        ("telophase", |r| Ok(tree_space_telophase(read_tree(r)?))),
        ("double-origin", |r| Ok(tree_space_double_origin(read_tree(r)?))),
        ("spectrum", |r| {
            Ok(spectrum_relation(&read_spectrum(r)?, read_variant(r)?))
        }),
        ("spectrum-copy", |r| {
            Ok(approximation_copy(&read_spectrum(r)?, read_variant(r)?))
        }),
    ])
}

/// The copy machine a `spectrum-copy` catalog node describes, for callers
/// that want its audit as well as its relation.
pub fn copy_run_from_params(params: &Params) -> Result<CopyRun, CatalogError> {
    let r = ParamReader {
        family: "spectrum-copy",
        params,
    };
    Ok(CopyRun::new(&read_spectrum(&r)?, read_variant(&r)?))
}

fn read_tree(r: &ParamReader<'_>) -> Result<TreePredicate, CatalogError> {
    match r.text("tree", "full")?.as_str() {
        "full" => Ok(TreePredicate::full()),
        "root" => Ok(TreePredicate::root_only()),
        "depth" => Ok(TreePredicate::bounded_depth(r.nat("depth", None)? as usize)),
        "words" => {
            let words = match r.raw("words") {
                Some(Param::List(items)) => items
                    .iter()
                    .map(|w| match w {
                        Param::List(letters) => letters
                            .iter()
                            .map(|l| match l {
                                Param::Nat(n) => Some(*n),
                                _ => None,
                            })
                            .collect::<Option<Vec<u64>>>(),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>(),
                _ => None,
            };
            let words = words.ok_or_else(|| r.bad("words", "must be a list of lists of naturals"))?;
            Ok(TreePredicate::generated_by(words))
        }
        other => Err(r.bad("tree", format!("must be full, root, depth or words, got {other:?}"))),
    }
}

fn read_variant(r: &ParamReader<'_>) -> Result<SpectrumVariant, CatalogError> {
    match r.text("variant", "plain")?.as_str() {
        "plain" => Ok(SpectrumVariant::Plain),
        "star" => Ok(SpectrumVariant::Star),
        other => Err(r.bad("variant", format!("must be plain or star, got {other:?}"))),
    }
}

fn read_rows(r: &ParamReader<'_>, key: &'static str) -> Result<BTreeMap<u64, Vec<bool>>, CatalogError> {
    let bad = || r.bad(key, "must be a list of rows [a, v0, v1, ...] with values 0/1");
    let Some(raw) = r.raw(key) else {
        return Ok(BTreeMap::new());
    };
    let Param::List(rows) = raw else { return Err(bad()) };
    let mut out = BTreeMap::new();
    for row in rows {
        let Param::List(cells) = row else { return Err(bad()) };
        let Some((Param::Nat(a), values)) = cells.split_first() else {
            return Err(bad());
        };
        let values = values
            .iter()
            .map(|v| match v {
                Param::Nat(0) | Param::Bool(false) => Ok(false),
                Param::Nat(1) | Param::Bool(true) => Ok(true),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        out.insert(*a, values);
    }
    Ok(out)
}

fn read_spectrum(r: &ParamReader<'_>) -> Result<SpectrumSpec, CatalogError> {
    let members: ElemSet = r.nat_list("members")?.unwrap_or_default().into_iter().collect();
    let spec = SpectrumSpec::finite(members);
    let table = read_rows(r, "table")?;
    let complement = read_rows(r, "complement")?;
    let defaults = Approximation::default();
    let approx = Approximation {
        table,
        complement,
        horizon: r.nat("horizon", Some(defaults.horizon))?,
        components: r.nat("components", Some(defaults.components))?,
        copies: r.nat("copies", Some(defaults.copies))?,
    };
    Ok(spec.with_approximation(approx))
}
