//! A stage machine that turns a transitive relation `≺_Y` into an
//! interpolable transitive relation `≺_X` together with a partial map
//! `f: X → Y`.
//!
//! The even code `2n` stands for `n ∈ Y` and is mapped to it; the odd code
//! `2k + 1` is the dummy `w_k`. At each stage the least unsolved pair
//! `(F_n, y_n)` requiring attention gets a fresh dummy planted between `F_n`
//! and `y_n`; the least active dummy not yet replaced is given an image in
//! `Y` once an interpolant shows up; related images are lifted back to `X`;
//! and `≺_X` is closed under transitivity.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::carrier::decode_mask_pair;
use crate::relations::{Enumerate, Prefix, RelationSource};
use crate::{Code, ElemSet, PairSet, Stage, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineConfig {
    /// When set, pairs `(∅, y)` never require attention.
    pub empty_segment_ok: bool,
}

pub fn dummy_code(k: u64) -> Code {
    2 * k + 1
}

pub fn is_dummy(code: Code) -> bool {
    code % 2 == 1
}

/// `(F_n, y_n)` for the pair index `n`: `F_n` is a bit mask of `X` codes.
pub fn pair_for_index(n: u64) -> (u64, Code) {
    decode_mask_pair(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum DummyStatus {
    Active { solves: u64 },
    Replaced { solves: u64, target: Code },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DummyRecord {
    pub code: Code,
    pub status: DummyStatus,
    pub activated_at: Stage,
    pub replaced_at: Option<Stage>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Attention {
    pub pair_index: u64,
    pub f: Vec<Code>,
    pub y: Code,
    pub dummy: Code,
}

/// What one stage did.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StageRecord {
    pub stage: Stage,
    pub attended: Option<Attention>,
    /// `(dummy, z)`: the dummy now maps to `z`.
    pub replaced: Option<(Code, Code)>,
    /// New pairs from lifting related images.
    pub lifted: usize,
    /// New pairs from the transitive closure.
    pub closed: usize,
}
/// A transitive relation grown one pair at a time, remembering the order
/// pairs arrived in so any earlier stage can be read back.
#[derive(Clone, Debug, Default)]
struct Closed {
    pairs: PairSet,
    succ: BTreeMap<Code, ElemSet>,
    pred: BTreeMap<Code, ElemSet>,
    order: Vec<(Code, Code)>,
    /// The first `at[s]` entries of `order` are the relation at stage `s`.
    at: Vec<usize>,
}

impl Closed {
    fn new() -> Self {
        Closed {
            at: Vec::from([0]),
            ..Closed::default()
        }
    }

    fn contains(&self, a: Code, b: Code) -> bool {
        self.pairs.contains(&(a, b))
    }

    fn succs(&self, a: Code) -> impl Iterator<Item = Code> + '_ {
        self.succ.get(&a).into_iter().flatten().copied()
    }

    fn preds(&self, a: Code) -> impl Iterator<Item = Code> + '_ {
        self.pred.get(&a).into_iter().flatten().copied()
    }

    fn raw_insert(&mut self, a: Code, b: Code) -> bool {
        if !self.pairs.insert((a, b)) {
            return false;
        }
        self.succ.entry(a).or_default().insert(b);
        self.pred.entry(b).or_default().insert(a);
        self.order.push((a, b));
        true
    }

    /// Insert `a ≺ b` and everything transitivity then forces. Returns the
    /// number of new pairs.
    fn insert(&mut self, a: Code, b: Code) -> usize {
        if self.contains(a, b) {
            return 0;
        }
        let mut lower: Vec<Code> = self.preds(a).collect();
        lower.push(a);
        let mut upper: Vec<Code> = self.succs(b).collect();
        upper.push(b);
        let mut added = 0;
        for &p in &lower {
            // p ≺ b already puts everything above b above p
            if self.contains(p, b) {
                continue;
            }
            for &q in &upper {
                if self.raw_insert(p, q) {
                    added += 1;
                }
            }
        }
        added
    }

    fn seal(&mut self) {
        self.at.push(self.order.len());
    }

    fn at_stage(&self, stage: Stage) -> PairSet {
        self.order[..self.at[stage as usize]].iter().copied().collect()
    }
}

/// Resumable state of the machine after `stage` stages.
#[derive(Clone, Debug)]
pub struct EngineState {
    config: EngineConfig,
    stage: Stage,
    x: Closed,
    /// The transitive closure of what `Y` has enumerated.
    y: Closed,
    dummies: Vec<DummyRecord>,
    /// Replaced dummies by image.
    preimages: BTreeMap<Code, ElemSet>,
    solved: BTreeMap<u64, Code>,
    log: Vec<StageRecord>,
}

fn members(mask: u64) -> impl Iterator<Item = Code> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

impl EngineState {
    pub fn new(config: EngineConfig) -> Self {
        EngineState {
            config,
            stage: 0,
            x: Closed::new(),
            y: Closed::new(),
            dummies: Vec::new(),
            preimages: BTreeMap::new(),
            solved: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn log(&self) -> &[StageRecord] {
        &self.log
    }

    pub fn dummies(&self) -> &[DummyRecord] {
        &self.dummies
    }

    pub fn solved(&self) -> &BTreeMap<u64, Code> {
        &self.solved
    }

    fn is_active(&self, code: Code, y_carrier: &ElemSet) -> bool {
        if is_dummy(code) {
            ((code / 2) as usize) < self.dummies.len()
        } else {
            y_carrier.contains(&(code / 2))
        }
    }

    fn image(&self, code: Code) -> Option<Code> {
        if is_dummy(code) {
            match self.dummies.get((code / 2) as usize)?.status {
                DummyStatus::Replaced { target, .. } => Some(target),
                DummyStatus::Active { .. } => None,
            }
        } else {
            Some(code / 2)
        }
    }

    fn requires_attention(&self, n: u64, y_carrier: &ElemSet) -> Option<(Vec<Code>, Code)> {
        let (mask, y) = pair_for_index(n);
        if mask == 0 && self.config.empty_segment_ok {
            return None;
        }
        let f: Vec<Code> = members(mask).collect();
        let eligible = self.is_active(y, y_carrier)
            && f.iter().all(|&x| self.is_active(x, y_carrier) && self.x.contains(x, y));
        eligible.then_some((f, y))
    }

    fn preimages_of(&self, a: Code) -> Vec<Code> {
        let mut out = Vec::from([2 * a]);
        if let Some(ws) = self.preimages.get(&a) {
            out.extend(ws.iter().copied());
        }
        out
    }

    fn lift(&mut self, a: Code, b: Code, record: &mut StageRecord) {
        let from = self.preimages_of(a);
        let to = self.preimages_of(b);
        for &p in &from {
            for &q in &to {
                let before = self.x.contains(p, q);
                let added = self.x.insert(p, q);
                if !before {
                    record.lifted += 1;
                    record.closed += added - 1;
                }
            }
        }
    }

    /// Run one stage against `y`.
    pub fn step(&mut self, y: &RelationSource) -> &StageRecord {
        let s = self.stage;
        let y_now = y.carrier_upto(s);
        let mut record = StageRecord {
            stage: s,
            attended: None,
            replaced: None,
            lifted: 0,
            closed: 0,
        };

        // Substage 1: plant a dummy for the least pair needing it.
        let pending = (0..s)
            .filter(|n| !self.solved.contains_key(n))
            .find_map(|n| self.requires_attention(n, &y_now).map(|fy| (n, fy)));
        if let Some((n, (f, target))) = pending {
            let w = dummy_code(self.dummies.len() as u64);
            self.dummies.push(DummyRecord {
                code: w,
                status: DummyStatus::Active { solves: n },
                activated_at: s,
                replaced_at: None,
            });
            self.solved.insert(n, w);
            for &x in &f {
                record.closed += self.x.insert(x, w);
            }
            record.closed += self.x.insert(w, target);
            record.attended = Some(Attention {
                pair_index: n,
                f,
                y: target,
                dummy: w,
            });
        }

        // `≺_Y^{(s+1)}`, closed.
        let mut fresh = Vec::new();
        for (a, b) in y.enumerate_upto(s + 1) {
            if !self.y.contains(a, b) {
                let mark = self.y.order.len();
                self.y.insert(a, b);
                fresh.extend_from_slice(&self.y.order[mark..]);
            }
        }

        // Substage 2: look for an image for the least unreplaced dummy.
        let waiting = self
            .dummies
            .iter()
            .position(|d| matches!(d.status, DummyStatus::Active { .. }));
        if let Some(idx) = waiting {
            let DummyStatus::Active { solves } = self.dummies[idx].status else {
                unreachable!()
            };
            let (mask, yn) = pair_for_index(solves);
            let lows: Option<Vec<Code>> = members(mask).map(|x| self.image(x)).collect();
            if let (Some(lows), Some(high)) = (lows, self.image(yn)) {
                let found = self
                    .y
                    .preds(high)
                    .find(|&z| lows.iter().all(|&l| self.y.contains(l, z)));
                if let Some(z) = found {
                    let w = dummy_code(idx as u64);
                    self.dummies[idx].status = DummyStatus::Replaced { solves, target: z };
                    self.dummies[idx].replaced_at = Some(s);
                    self.preimages.entry(z).or_default().insert(w);
                    record.replaced = Some((w, z));
                    let around: Vec<(Code, Code)> = self
                        .y
                        .succs(z)
                        .map(|b| (z, b))
                        .chain(self.y.preds(z).map(|a| (a, z)))
                        .collect();
                    for (a, b) in around {
                        self.lift(a, b, &mut record);
                    }
                }
            }
        }

        // Substages 3 and 4: lift newly related images, closing as we go.
        for (a, b) in fresh {
            self.lift(a, b, &mut record);
        }

        self.stage += 1;
        self.x.seal();
        self.y.seal();
        self.log.push(record);
        self.log.last().expect("just pushed")
    }

    /// `≺_X` after `stage` stages; `stage` must not exceed [`Self::stage`].
    pub fn pairs_at(&self, stage: Stage) -> PairSet {
        self.x.at_stage(stage)
    }

    /// The closure of `≺_Y` as the machine saw it after `stage` stages.
    pub fn y_pairs_at(&self, stage: Stage) -> PairSet {
        self.y.at_stage(stage)
    }

    /// Dummies active after `stage` stages, with their status then.
    pub fn dummies_at(&self, stage: Stage) -> Vec<DummyRecord> {
        self.dummies
            .iter()
            .filter(|d| d.activated_at < stage)
            .map(|d| {
                let mut d = d.clone();
                if d.replaced_at.is_some_and(|t| t >= stage) {
                    if let DummyStatus::Replaced { solves, .. } = d.status {
                        d.status = DummyStatus::Active { solves };
                    }
                    d.replaced_at = None;
                }
                d
            })
            .collect()
    }
}

/// One stage of the machine, by value.
pub fn step(mut state: EngineState, y: &RelationSource) -> EngineState {
    state.step(y);
    state
}

// ---------------------------------------------------------------------------
// Replayable output

struct Shared {
    y: RelationSource,
    state: spin::Mutex<EngineState>,
}

impl Shared {
    fn with_stage<T>(&self, stage: Stage, read: impl FnOnce(&EngineState) -> T) -> T {
        let mut state = self.state.lock();
        while state.stage() < stage {
            state.step(&self.y);
        }
        read(&state)
    }
}

/// The machine run on a fixed input, replayed on demand to any stage.
#[derive(Clone)]
pub struct EngineOutput {
    shared: Arc<Shared>,
}

impl core::fmt::Debug for EngineOutput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_tuple("EngineOutput").field(&self.shared.y.label()).finish()
    }
}

/// Run the machine on `y`. The machine works with the transitive closure of
/// whatever `y` has enumerated.
pub fn complete(y: &RelationSource, config: EngineConfig) -> EngineOutput {
    EngineOutput {
        shared: Arc::new(Shared {
            y: y.clone(),
            state: spin::Mutex::new(EngineState::new(config)),
        }),
    }
}

/// One independent output per entry.
pub fn enumerate_domains(entries: &[RelationSource], config: EngineConfig) -> Vec<EngineOutput> {
    entries.iter().map(|y| complete(y, config)).collect()
}

struct XRelation {
    shared: Arc<Shared>,
}

impl Enumerate for XRelation {
    fn pairs_upto(&self, stage: Stage) -> PairSet {
        self.shared.with_stage(stage, |st| st.pairs_at(stage))
    }

    fn carrier_upto(&self, stage: Stage) -> ElemSet {
        x_carrier_of(&self.shared, stage)
    }

    fn label(&self) -> String {
        format!("engine({})", self.shared.y.label())
    }
}

fn x_carrier_of(shared: &Shared, stage: Stage) -> ElemSet {
    let mut out: ElemSet = shared.y.carrier_upto(stage).into_iter().map(|n| 2 * n).collect();
    shared.with_stage(stage, |st| {
        out.extend(st.dummies_at(stage).iter().map(|d| d.code));
    });
    out
}

impl EngineOutput {
    pub fn y(&self) -> &RelationSource {
        &self.shared.y
    }

    /// The closure of `≺_Y` the machine worked with after `stage` stages.
    pub fn y_closed(&self, stage: Stage) -> PairSet {
        self.shared.with_stage(stage, |st| st.y_pairs_at(stage))
    }

    pub fn x_relation(&self) -> RelationSource {
        RelationSource::new(XRelation {
            shared: self.shared.clone(),
        })
    }

    pub fn x_carrier(&self, stage: Stage) -> ElemSet {
        x_carrier_of(&self.shared, stage)
    }

    /// `f` after `stage` stages.
    pub fn f_view(&self, stage: Stage) -> BTreeMap<Code, Code> {
        let mut f: BTreeMap<Code, Code> = self
            .shared
            .y
            .carrier_upto(stage)
            .into_iter()
            .map(|n| (2 * n, n))
            .collect();
        self.shared.with_stage(stage, |st| {
            for d in st.dummies_at(stage) {
                if let DummyStatus::Replaced { target, .. } = d.status {
                    f.insert(d.code, target);
                }
            }
        });
        f
    }

    pub fn dummies(&self, stage: Stage) -> Vec<DummyRecord> {
        self.shared.with_stage(stage, |st| st.dummies_at(stage))
    }

    pub fn log(&self, stage: Stage) -> Vec<StageRecord> {
        self.shared
            .with_stage(stage, |st| st.log()[..stage as usize].to_vec())
    }

    /// A copy of the machine after `stage` stages.
    pub fn state(&self, stage: Stage) -> Option<EngineState> {
        let state = self.shared.with_stage(stage, |st| st.clone());
        (state.stage() == stage).then_some(state)
    }

    pub fn audit(&self, stage: Stage) -> EngineAudit {
        audit(self, stage)
    }
}

// ---------------------------------------------------------------------------
// Audits

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum EngineWitness {
    Intransitive(Code, Code, Code),
    /// `x ≺_X x'` but `f(x) ⊀_Y f(x')`.
    NotPreserved(Code, Code),
    /// `f(x) ≺_Y f(x')` but `x ⊀_X x'`.
    NotReflected(Code, Code),
    /// The planted dummy does not sit between its pair.
    UnsolvedPlant { pair_index: u64, dummy: Code },
    /// The dummy's image does not sit between the images of its pair.
    BadReplacement { dummy: Code, target: Code },
    /// `a ≺_X a` with `f(a) ⊀_Y f(a)`.
    Loop(Code),
}

/// Checks of the machine's invariants on the prefix after `stage` stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineAudit {
    pub stage: Stage,
    pub transitive: Verdict<EngineWitness>,
    pub biconditional: Verdict<EngineWitness>,
    pub plants: Verdict<EngineWitness>,
    pub replacements: Verdict<EngineWitness>,
    pub loops: Verdict<EngineWitness>,
    pub activated: usize,
    /// Active dummies still without an image.
    pub unreplaced: Vec<Code>,
}

impl EngineAudit {
    pub fn checks(&self) -> [(&'static str, &Verdict<EngineWitness>); 5] {
        [
            ("transitive", &self.transitive),
            ("biconditional", &self.biconditional),
            ("plants", &self.plants),
            ("replacements", &self.replacements),
            ("loops", &self.loops),
        ]
    }

    pub fn overall(&self) -> Verdict<EngineWitness> {
        self.checks()
            .into_iter()
            .fold(Verdict::Holds, |acc, (_, v)| acc.and(v.clone()))
    }
}

fn first<W>(found: Option<W>) -> Verdict<W> {
    found.map_or(Verdict::Holds, Verdict::Refuted)
}

pub fn audit(out: &EngineOutput, stage: Stage) -> EngineAudit {
    let x = Prefix::build(stage, out.x_relation().enumerate_upto(stage), ElemSet::new());
    let y = Prefix::build(stage, out.y_closed(stage), ElemSet::new());
    let f = out.f_view(stage);
    let dummies = out.dummies(stage);

    let transitive = first(x.pairs.iter().find_map(|&(a, b)| {
        x.succs(b).find(|&c| !x.contains(a, c)).map(|c| EngineWitness::Intransitive(a, b, c))
    }));

    let mut bic = None;
    'outer: for (&a, &fa) in &f {
        for (&b, &fb) in &f {
            let in_x = x.contains(a, b);
            let in_y = y.contains(fa, fb);
            if in_x && !in_y {
                bic = Some(EngineWitness::NotPreserved(a, b));
                break 'outer;
            }
            if in_y && !in_x {
                bic = Some(EngineWitness::NotReflected(a, b));
                break 'outer;
            }
        }
    }

    let plants = first(dummies.iter().find_map(|d| {
        let (DummyStatus::Active { solves } | DummyStatus::Replaced { solves, .. }) = d.status;
        let (mask, yn) = pair_for_index(solves);
        let ok = x.contains(d.code, yn)
            && (0..64)
                .filter(|i| mask & (1 << i) != 0)
                .all(|xi| x.contains(xi, d.code));
        (!ok).then_some(EngineWitness::UnsolvedPlant {
            pair_index: solves,
            dummy: d.code,
        })
    }));

    let replacements = first(dummies.iter().find_map(|d| {
        let DummyStatus::Replaced { solves, target } = d.status else {
            return None;
        };
        let (mask, yn) = pair_for_index(solves);
        let ok = f.get(&yn).is_some_and(|&fy| y.contains(target, fy))
            && (0..64)
                .filter(|i| mask & (1 << i) != 0)
                .all(|xi| f.get(&xi).is_some_and(|&fx| y.contains(fx, target)));
        (!ok).then_some(EngineWitness::BadReplacement {
            dummy: d.code,
            target,
        })
    }));

    let loops = first(x.pairs.iter().find_map(|&(a, b)| {
        if a != b {
            return None;
        }
        match f.get(&a) {
            Some(&fa) if !y.contains(fa, fa) => Some(EngineWitness::Loop(a)),
            _ => None,
        }
    }));

    let unreplaced = dummies
        .iter()
        .filter(|d| matches!(d.status, DummyStatus::Active { .. }))
        .map(|d| d.code)
        .collect();

    EngineAudit {
        stage,
        transitive,
        biconditional: first(bic),
        plants,
        replacements,
        loops,
        activated: dummies.len(),
        unreplaced,
    }
}
