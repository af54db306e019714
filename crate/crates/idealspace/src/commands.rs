//! One function per command. Each wraps a single library operation and
//! turns its result into records.

use std::collections::BTreeMap;

use idealspace_core::carrier::encode_finset_pair;
use idealspace_core::closures::{strictify, transitive_closure, transitive_closure_pairs};
use idealspace_core::constructions::extension_census;
use idealspace_core::engine::complete;
use idealspace_core::fixtures::{antichain_census, copy_run_from_params};
use idealspace_core::ideals::{
    all_ideals, check_ideal, interpolable_bounded, principal_census, strictify_back,
    strictify_forward, IdealCensus, IdealView, DEFAULT_CENSUS_BOUND,
};
use idealspace_core::morphisms::{apply_code, identity_code, mor_check};
use idealspace_core::relations::{classify, FiniteRelation};
use idealspace_core::{ElemSet, PairSet, RelationSource, Verdict};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{verdict, Outcome, Status};
use crate::spec::{build_code, extension, BuildOptions, Document, Node};
use crate::Settings;

fn relation_record(out: &mut Outcome, r: &RelationSource, stage: u64) {
    let pairs: Vec<(u64, u64)> = r.enumerate_upto(stage).into_iter().collect();
    out.push(
        "relation",
        json!({
            "label": r.label(),
            "stage": stage,
            "static": r.is_static(),
            "carrier": r.carrier_upto(stage),
            "pairs": pairs,
        }),
    );
}

pub fn show(r: &RelationSource, s: &Settings) -> Outcome {
    let mut out = Outcome::new();
    relation_record(&mut out, r, s.stage);
    out
}

pub fn closure(r: &RelationSource, s: &Settings) -> Outcome {
    let mut out = Outcome::new();
    relation_record(&mut out, &transitive_closure(r), s.stage);
    out
}

pub fn classify_cmd(r: &RelationSource, s: &Settings) -> Outcome {
    let report = classify(r, s.stage);
    let mut out = Outcome::new();
    out.push(
        "classify",
        json!({
            "label": r.label(),
            "stage": s.stage,
            "transitive": verdict(&report.transitive_upto),
            "irreflexive": verdict(&report.irreflexive_upto),
            "antisymmetric": verdict(&report.antisymmetric_upto),
            "reflexive": verdict(&report.reflexive_upto),
        }),
    );
    out.note(Status::of(&report.transitive_upto));
    out
}

fn census_of(p: &FiniteRelation) -> Result<(IdealCensus, &'static str), String> {
    if p.carrier().len() <= DEFAULT_CENSUS_BOUND {
        all_ideals(p).map(|c| (c, "exhaustive")).map_err(|e| e.to_string())
    } else {
        principal_census(p)
            .map(|c| (c, "principal"))
            .map_err(|e| format!("{e}; carriers above {DEFAULT_CENSUS_BOUND} elements need a transitive relation"))
    }
}

fn census_records(out: &mut Outcome, census: &IdealCensus) {
    for (i, ideal) in census.ideals.iter().enumerate() {
        out.push("ideal", json!({"index": i, "elements": ideal}));
    }
    out.push("specialization", json!({"edges": census.specialization}));
}

pub fn ideals(r: &RelationSource, s: &Settings) -> Outcome {
    let p = FiniteRelation::from_source(r, s.stage);
    let (census, method) = match census_of(&p) {
        Ok(c) => c,
        Err(e) => return Outcome::usage("/relation", &e),
    };
    let mut out = Outcome::new();
    census_records(&mut out, &census);
    out.push(
        "census",
        json!({
            "label": r.label(),
            "stage": s.stage,
            "exact": r.is_static(),
            "method": method,
            "count": census.len(),
        }),
    );
    out
}

/// Largest carrier on which the strictification round trip is replayed.
const ROUND_TRIP_CODES: u64 = 8;

pub fn strictify_cmd(r: &RelationSource, s: &Settings) -> Outcome {
    let base = transitive_closure(r);
    let strict = strictify(&base);
    let mut out = Outcome::new();
    relation_record(&mut out, &strict, s.stage);
    let report = classify(&strict, s.stage);
    let order = report.irreflexive_upto.clone().and(report.transitive_upto.clone());
    out.push("strict-order", json!({"stage": s.stage, "check": verdict(&order)}));
    out.note(Status::of(&order));

    let p = FiniteRelation::from_source(&base, s.stage);
    if p.carrier().iter().any(|&x| x >= ROUND_TRIP_CODES) || p.carrier().is_empty() {
        out.push(
            "round-trip",
            json!({"skipped": format!("needs a nonempty carrier inside 0..{ROUND_TRIP_CODES}")}),
        );
        return out;
    }
    let census = match census_of(&p) {
        Ok((c, _)) => c,
        Err(e) => return Outcome::usage("/relation", &e),
    };
    let mut images = BTreeMap::new();
    let mut failures = 0;
    for ideal in &census.ideals {
        let forward = match strictify_forward(&base, ideal, s.stage) {
            Ok(f) => f,
            Err(e) => return Outcome::usage("/relation", &e.to_string()),
        };
        let bound = encode_finset_pair(ideal, 2).expect("small carrier") + 1;
        let image = forward.materialize(bound);
        let back = strictify_back(&IdealView::Exact(image.clone()));
        let ok = &back == ideal && images.insert(image, ideal.clone()).is_none();
        failures += usize::from(!ok);
        out.push("round-trip", json!({"ideal": ideal, "back": back, "holds": ok}));
    }
    if failures > 0 {
        out.note(Status::Refuted);
    }
    out
}

pub fn extend(doc: &Document, opts: &BuildOptions, s: &Settings) -> Outcome {
    let spec = match extension(&doc.relation, opts) {
        Ok(Some(spec)) => spec,
        Ok(None) => return Outcome::usage(&s.relation_pointer, "extend needs an extend node"),
        Err(e) => return Outcome::usage(&e.pointer, &e.message),
    };
    let census = match extension_census(&spec, s.stage) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(&s.relation_pointer, &e.to_string()),
    };
    let mut out = Outcome::new();
    for (i, fiber) in census.fibers.iter().enumerate() {
        out.push("fiber", json!({"index": i, "masks": fiber.masks, "image": fiber.image}));
    }
    out.push("specialization", json!({"edges": census.specialization()}));
    let bijective = census.is_bijective();
    out.push(
        "extension",
        json!({
            "stage": s.stage,
            "base_ideals": census.base.len(),
            "fibers": census.fibers.len(),
            "bijective": bijective,
            "discrete": census.is_discrete(),
        }),
    );
    if !bijective {
        out.note(Status::Refuted);
    }
    out
}

pub fn interpolate(r: &RelationSource, s: &Settings) -> Outcome {
    let engine = complete(r, s.build.engine);
    let mut out = Outcome::new();
    for rec in engine.log(s.stage) {
        out.push("stage", serde_json::to_value(&rec).expect("serializable"));
    }
    let audit = engine.audit(s.stage);
    let mut fields = serde_json::Map::new();
    fields.insert("stage".into(), json!(s.stage));
    for (name, v) in audit.checks() {
        fields.insert(name.into(), verdict(v));
    }
    fields.insert("activated".into(), json!(audit.activated));
    fields.insert("unreplaced".into(), json!(audit.unreplaced));
    out.push("engine-audit", fields.into());
    out.note(Status::of(&audit.overall()));

    let gap = interpolable_bounded(&engine.x_relation(), s.bound, s.stage, s.build.engine.empty_segment_ok);
    out.push(
        "interpolable",
        json!({"bound": s.bound, "stage": s.stage, "check": verdict(&gap)}),
    );
    out.note(Status::of(&gap));
    out
}

pub fn morcheck(doc: &Document, opts: &BuildOptions, s: &Settings) -> Outcome {
    let Some(code) = &doc.code else {
        return Outcome::usage("/code", "morcheck needs a code node");
    };
    let fc = match build_code(code, opts) {
        Ok(fc) => fc,
        Err(e) => return Outcome::usage("/code", &e.message),
    };
    let report = mor_check(&fc, s.stage, s.bound);
    let mut out = Outcome::new();
    for (name, v) in report.clauses() {
        out.push("clause", json!({"name": name, "check": verdict(v)}));
    }
    let overall = report.overall();
    out.push(
        "morphism",
        json!({"stage": s.stage, "bound": s.bound, "check": verdict(&overall)}),
    );
    out.note(Status::of(&overall));
    out
}

pub fn antichains(r: &RelationSource, s: &Settings) -> Outcome {
    let p = FiniteRelation::from_source(r, s.stage);
    let census = match antichain_census(&p) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(&s.relation_pointer, &e.to_string()),
    };
    let mut out = Outcome::new();
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for a in &census {
        *sizes.entry(a.len()).or_default() += 1;
        out.push("antichain", json!({"elements": a, "size": a.len()}));
    }
    out.push(
        "antichains",
        json!({"stage": s.stage, "count": census.len(), "sizes": sizes}),
    );
    out
}

pub fn fixture(doc: &Document, s: &Settings) -> Outcome {
    let Node::Catalog { name, params } = &doc.relation else {
        return Outcome::usage(&s.relation_pointer, "fixture needs a spectrum-copy catalog node");
    };
    if name != "spectrum-copy" {
        return Outcome::usage(&s.relation_pointer, "fixture needs a spectrum-copy catalog node");
    }
    let run = match copy_run_from_params(params) {
        Ok(run) => run,
        Err(e) => return Outcome::usage(&s.relation_pointer, &e.to_string()),
    };
    let audit = run.state(s.stage).audit();
    let mut out = Outcome::new();
    for c in &audit.components {
        out.push("component", serde_json::to_value(c).expect("serializable"));
    }
    for change in run.state(s.stage).ledger() {
        out.push("role-change", serde_json::to_value(change).expect("serializable"));
    }
    for w in &audit.warnings {
        out.push("warning", serde_json::to_value(w).expect("serializable"));
    }
    out.push(
        "copy-audit",
        json!({
            "stage": audit.stage,
            "irreflexive": verdict(&audit.irreflexive),
            "within_components": verdict(&audit.within_components),
            "roles_consistent": verdict(&audit.roles_consistent),
            "role_changes": verdict(&audit.role_changes),
            "changes": audit.changes,
        }),
    );
    if !audit.passed() {
        out.note(Status::Refuted);
    }
    out
}

/// Largest sampled sub-relation in the sweep.
const SAMPLE_SIZE: usize = 7;

/// Induced sub-relation on `elems`, relabelled to `0..k` and closed.
fn induced(p: &FiniteRelation, elems: &[u64]) -> FiniteRelation {
    let pos: BTreeMap<u64, u64> = elems.iter().enumerate().map(|(i, &x)| (x, i as u64)).collect();
    let pairs: PairSet = p
        .pairs()
        .iter()
        .filter_map(|(a, b)| Some((*pos.get(a)?, *pos.get(b)?)))
        .collect();
    FiniteRelation::new((0..elems.len() as u64).collect(), transitive_closure_pairs(&pairs))
        .expect("closure stays in the carrier")
}

/// The checks one sample must pass; names of the failed ones.
fn sample_checks(q: &FiniteRelation) -> Vec<&'static str> {
    let mut failed = Vec::new();
    let Ok(census) = all_ideals(q) else {
        return Vec::from(["census"]);
    };
    if principal_census(q).map(|c| c.ideals) != Ok(census.ideals.clone()) {
        failed.push("principal");
    }
    let src = q.as_source();
    if census.ideals.iter().any(|i| check_ideal(&src, i, 0) != Verdict::Holds) {
        failed.push("axioms");
    }
    let id = identity_code(&src);
    if census
        .ideals
        .iter()
        .any(|i| apply_code(&id, &IdealView::Exact(i.clone()), 0).0.elements() != i)
    {
        failed.push("identity");
    }
    let round_trip = census.ideals.iter().all(|i| {
        strictify_forward(&src, i, 0).is_ok_and(|f| {
            let bound = encode_finset_pair(i, 2).expect("small carrier") + 1;
            &strictify_back(&IdealView::Exact(f.materialize(bound))) == i
        })
    });
    if !round_trip {
        failed.push("round-trip");
    }
    failed
}

pub fn audit(r: &RelationSource, s: &Settings) -> Outcome {
    let p = FiniteRelation::from_source(r, s.stage);
    let elems: Vec<u64> = p.carrier().iter().copied().collect();
    let mut out = Outcome::new();
    if elems.is_empty() {
        out.push("sweep", json!({"seed": s.seed, "samples": 0, "failures": 0}));
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut failures = 0;
    for index in 0..s.bound {
        let k = rng.gen_range(1..=elems.len().min(SAMPLE_SIZE));
        let mut picked: Vec<u64> = sample(&mut rng, elems.len(), k).into_iter().map(|i| elems[i]).collect();
        picked.sort_unstable();
        let failed = sample_checks(&induced(&p, &picked));
        failures += usize::from(!failed.is_empty());
        let elements: ElemSet = picked.iter().copied().collect();
        out.push(
            "sample",
            json!({"index": index, "elements": elements, "failed": failed}),
        );
    }
    out.push(
        "sweep",
        json!({"seed": s.seed, "stage": s.stage, "samples": s.bound, "failures": failures}),
    );
    if failures > 0 {
        out.note(Status::Refuted);
    }
    out
}
