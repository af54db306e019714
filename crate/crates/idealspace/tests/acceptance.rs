//! Acceptance criteria 1 to 9. Runs sequentially so the timings mean
//! something, prints one PASS/FAIL line per criterion, and exits nonzero if
//! any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use idealspace::{run_text, Command, Format, RunConfig};
use idealspace_core::carrier::{encode_finset_pair, unpair, Symbol, TreePredicate};
use idealspace_core::closures::{strictify, transitive_closure_pairs};
use idealspace_core::constructions::{extension_census, ExtensionSpec, SetSource};
use idealspace_core::engine::{complete, DummyStatus, EngineConfig};
use idealspace_core::fixtures::{
    antichain_census, find_isomorphism, first_rationals, layered_truncation, unit_grid, Approximation,
    ComponentKind, CopyRun, SpectrumSpec, SpectrumVariant, TreeFamily, TreeSpace,
};
use idealspace_core::ideals::{all_ideals, interpolable_bounded, strictify_back, strictify_forward, IdealView};
use idealspace_core::morphisms::{apply_code, compose, graph_code, identity_code, FunctionCode};
use idealspace_core::relations::{chain, classify, rationals, sierpinski, FiniteRelation, RationalCoding};
use idealspace_core::{ElemSet, PairSet, Verdict};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_relation(rng: &mut ChaCha8Rng, max: u64) -> FiniteRelation {
    let n = rng.gen_range(1..=max);
    let density = rng.gen_range(0.05..0.5);
    let mut pairs = PairSet::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                pairs.insert((a, b));
            }
        }
    }
    FiniteRelation::new((0..n).collect(), pairs).unwrap()
}

fn random_preorder(rng: &mut ChaCha8Rng, max: u64) -> FiniteRelation {
    let r = random_relation(rng, max);
    let mut pairs = r.pairs().clone();
    pairs.extend(r.carrier().iter().map(|&x| (x, x)));
    FiniteRelation::new(r.carrier().clone(), transitive_closure_pairs(&pairs)).unwrap()
}

/// Nonempty directed lower sets, enumerated as the distinct downward
/// closures of all subsets.
fn ideal_oracle(r: &FiniteRelation) -> Vec<ElemSet> {
    let elems: Vec<u64> = r.carrier().iter().copied().collect();
    let mut lower_sets = BTreeSet::new();
    for bits in 1u32..(1 << elems.len()) {
        let mut set: ElemSet = (0..elems.len()).filter(|i| bits & (1 << i) != 0).map(|i| elems[i]).collect();
        loop {
            let grown: ElemSet = r
                .pairs()
                .iter()
                .filter(|(_, b)| set.contains(b))
                .map(|&(a, _)| a)
                .collect();
            let before = set.len();
            set.extend(grown);
            if set.len() == before {
                break;
            }
        }
        lower_sets.insert(set);
    }
    lower_sets
        .into_iter()
        .filter(|s| {
            s.iter()
                .all(|&a| s.iter().all(|&b| s.iter().any(|&c| r.contains(a, c) && r.contains(b, c))))
        })
        .collect()
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut total = 0;
    for i in 0..200 {
        // raw relations have few ideals; mix in closed ones and preorders
        let r = match i % 3 {
            0 => random_relation(&mut rng, 10),
            1 => {
                let r = random_relation(&mut rng, 10);
                FiniteRelation::new(r.carrier().clone(), transitive_closure_pairs(r.pairs())).unwrap()
            }
            _ => random_preorder(&mut rng, 10),
        };
        let census = all_ideals(&r).map_err(|e| e.to_string())?;
        ensure(census.ideals == ideal_oracle(&r), format!("relation {i} disagrees: {:?}", r.pairs()))?;
        total += census.len();
    }
    Ok(format!("200 relations, {total} ideals, census equals the oracle"))
}

/// The first `count` codes of the strictified carrier and the stage that shows them.
fn strict_prefix(strict: &idealspace_core::RelationSource, count: usize) -> Option<(ElemSet, u64)> {
    let mut stage = 64;
    while stage <= 1 << 13 {
        let carrier = strict.carrier_upto(stage);
        if carrier.len() >= count {
            return Some((carrier.into_iter().take(count).collect(), stage));
        }
        stage *= 2;
    }
    None
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    let mut ideals = 0;
    while done < 50 {
        let r = random_relation(&mut rng, 6);
        let r = FiniteRelation::new(r.carrier().clone(), transitive_closure_pairs(r.pairs())).unwrap();
        let census = all_ideals(&r).map_err(|e| e.to_string())?;
        if census.is_empty() {
            continue;
        }
        let src = r.as_source();
        let mut images = BTreeSet::new();
        for ideal in &census.ideals {
            let f = strictify_forward(&src, ideal, 0).map_err(|e| e.to_string())?;
            let image = f.materialize(encode_finset_pair(ideal, 2).unwrap() + 1);
            let back = strictify_back(&IdealView::Exact(image.clone()));
            ensure(&back == ideal, format!("g(f({ideal:?})) = {back:?}"))?;
            ensure(images.insert(image), format!("f is not injective at {ideal:?}"))?;
        }
        let strict = strictify(&src);
        let (first, stage) = strict_prefix(&strict, 60).ok_or("fewer than 60 strictified codes")?;
        let pairs: PairSet = strict
            .enumerate_upto(stage)
            .into_iter()
            .filter(|(a, b)| first.contains(a) && first.contains(b))
            .collect();
        let order = FiniteRelation::new(first, pairs).unwrap();
        let report = classify(&order.as_source(), 0);
        ensure(
            report.irreflexive_upto.holds() && report.transitive_upto.holds(),
            format!("strictification of {:?} is not a strict order", r.pairs()),
        )?;
        ensure(
            order.pairs().iter().all(|&(a, b)| unpair(a).1 < unpair(b).1),
            "a strict pair does not raise m",
        )?;
        ideals += census.len();
        done += 1;
    }
    Ok(format!("50 relations, {ideals} ideals round-trip; first 60 strict codes form a strict order"))
}

fn criterion_3() -> Check {
    let spec = ExtensionSpec::single(sierpinski().as_source(), SetSource::Finite([1].into()));
    let census = extension_census(&spec, 60).map_err(|e| e.to_string())?;
    ensure(census.base.len() == 2, format!("base census has {} ideals", census.base.len()))?;
    ensure(census.is_bijective(), "g is not a bijection onto the base census")?;
    ensure(census.fibers.len() == 2 && census.is_discrete(), "fibers are comparable")?;
    Ok("2 fibers onto 2 base ideals, incomparable".into())
}

fn criterion_4() -> Check {
    let out = complete(&rationals(RationalCoding::Dyadic), EngineConfig::default());
    let audit = out.audit(300);
    ensure(audit.transitive.holds(), format!("x-relation: {:?}", audit.transitive))?;
    let gap = interpolable_bounded(&out.x_relation(), 40, 300, false);
    ensure(gap.holds(), format!("interpolable_bounded(40): {gap:?}"))?;
    ensure(audit.biconditional.holds(), format!("biconditional: {:?}", audit.biconditional))?;
    ensure(audit.overall().holds(), format!("audit: {:?}", audit.overall()))?;
    let early: Vec<_> = out.dummies(300).into_iter().filter(|d| d.activated_at < 100).collect();
    let late = early
        .iter()
        .filter(|d| !matches!(d.status, DummyStatus::Replaced { .. }) || d.replaced_at.is_none_or(|s| s >= 300))
        .count();
    ensure(late == 0, format!("{late} dummies from before stage 100 unreplaced"))?;
    Ok(format!("{} dummies by stage 100, all replaced; {} overall", early.len(), audit.activated))
}

fn criterion_5() -> Check {
    let out = complete(&chain(2, false).as_source(), EngineConfig::default());
    let audit = out.audit(300);
    ensure(!audit.unreplaced.is_empty(), "every dummy was replaced")?;
    ensure(audit.overall().holds(), format!("audit: {:?}", audit.overall()))?;
    let x = out.x_relation();
    let gap = interpolable_bounded(&x, 3, 300, false);
    ensure(gap.holds(), format!("interpolable_bounded(3): {gap:?}"))?;
    let wider: Vec<&str> = [5, 10]
        .into_iter()
        .map(|b| interpolable_bounded(&x, b, 300, false).tag())
        .collect();
    ensure(!wider.contains(&"refuted"), "refuted at a wider bound")?;
    Ok(format!(
        "{} dummies never replaced; interpolable at bound 3 (bounds 5, 10: {})",
        audit.unreplaced.len(),
        wider.join(", ")
    ))
}

/// Five sample infinite words, cut at `len`.
fn sample_words(len: usize) -> Vec<Vec<u64>> {
    let gens: [fn(usize) -> u64; 5] = [|_| 0, |_| 1, |i| (i % 2) as u64, |i| i as u64, |i| (i * i % 3) as u64];
    gens.iter().map(|g| (0..len).map(g).collect()).collect()
}

fn on_short_words(set: &BTreeSet<Symbol>, d: usize) -> BTreeSet<Symbol> {
    set.iter()
        .filter(|s| matches!(s, Symbol::Word(w) | Symbol::Under(w) if w.len() < d))
        .cloned()
        .collect()
}

fn criterion_6() -> Check {
    let full = TreeSpace::new(TreeFamily::T1, TreePredicate::full());
    let root = TreeSpace::new(TreeFamily::T1, TreePredicate::root_only());
    for x in sample_words(6) {
        for d in 1..=6 {
            let words: Vec<Symbol> = (0..=d).map(|k| Symbol::Word(x[..k].to_vec())).collect();
            let unders: Vec<Symbol> = (0..=d).map(|k| Symbol::Under(x[..k].to_vec())).collect();
            let (j, i) = (full.down_closure(&words), full.down_closure(&unders));
            ensure(j.is_subset(&i) && j != i, format!("full tree, {x:?} depth {d}: J not strictly inside I"))?;
            let (j, i) = (root.down_closure(&words), root.down_closure(&unders));
            ensure(
                on_short_words(&j, d) == on_short_words(&i, d),
                format!("root tree, {x:?} depth {d}: closures differ"),
            )?;
        }
    }
    let telophase = TreeSpace::new(TreeFamily::Telophase, TreePredicate::full());
    let double = TreeSpace::new(TreeFamily::DoubleOrigin, TreePredicate::full());
    let mut bounds = 0;
    for x in sample_words(3) {
        for k in 0..=3 {
            for j in 0..=3 {
                let (a, b) = (Symbol::Inf(x[..k].to_vec()), Symbol::InfStar(x[..j].to_vec()));
                ensure(
                    telophase.common_upper_bound(&a, &b, 5).is_some(),
                    format!("telophase: no bound for {a:?}, {b:?}"),
                )?;
                bounds += 1;
            }
            for n in 0..3 {
                let (a, b) = (Symbol::Ray(n, x[..k].to_vec()), Symbol::RayUnder(n, x[..k].to_vec()));
                ensure(
                    double.common_upper_bound(&a, &b, 4).is_none(),
                    format!("double origin: {a:?}, {b:?} have a common bound"),
                )?;
            }
        }
    }
    Ok(format!("5 words at depths 1-6; {bounds} telophase bounds; double origin separated"))
}

fn criterion_7() -> Check {
    let grid = layered_truncation(3, &unit_grid(8));
    let census = antichain_census(&grid).map_err(|e| e.to_string())?;
    ensure(!census.is_empty() && census.iter().all(|a| a.len() == 3), "an antichain is not of size 3")?;

    // a' = 1 with A(1) flipping 0 -> 1 at stage 5: ℓ(2) goes from 2 to 3 layers
    let mut table = BTreeMap::new();
    table.insert(1u64, vec![false, false, false, false, false, true]);
    let approx = Approximation { table, horizon: 10, components: 2, ..Default::default() };
    let run = CopyRun::new(&SpectrumSpec::finite(ElemSet::new()).with_approximation(approx), SpectrumVariant::Plain);
    let layers_at = |stage: u64| -> Result<Vec<u64>, String> {
        let state = run.state(stage);
        ensure(state.audit().passed(), format!("plain copy audit fails at stage {stage}"))?;
        let c = state
            .components()
            .iter()
            .find(|c| c.kind == ComponentKind::Coded { a: 1 } && c.abandoned_at.is_none())
            .ok_or("no live copy for a = 1")?
            .id;
        let rel = state.component_relation(c);
        Ok((1..=4)
            .filter(|&l| find_isomorphism(&rel, &layered_truncation(l, &first_rationals(stage))).is_some())
            .collect())
    };
    let before = layers_at(5)?;
    ensure(before == [2], format!("before the flip the copy matches {before:?} layers"))?;
    for stage in [6, 10] {
        let after = layers_at(stage)?;
        ensure(after == [3], format!("after the flip, stage {stage} matches {after:?} layers"))?;
    }

    let mut table = BTreeMap::new();
    table.insert(0u64, vec![true, true, true, true, true, false, true, true, false]);
    let approx = Approximation { table, horizon: 10, components: 1, copies: 2, ..Default::default() };
    let star = CopyRun::new(&SpectrumSpec::finite(ElemSet::new()).with_approximation(approx), SpectrumVariant::Star);
    let audit = star.state(12).audit();
    ensure(audit.passed(), format!("star copy audit: {:?}", audit.role_changes))?;
    ensure(audit.changes > 0, "no role changes happened")?;
    Ok(format!(
        "{} antichains of size 3; copy matches 2 layers before and 3 after the flip; {} role changes, none repeated",
        census.len(),
        audit.changes
    ))
}

fn random_code(rng: &mut ChaCha8Rng, p: &FiniteRelation, q: &FiniteRelation) -> FunctionCode {
    let pairs = p
        .carrier()
        .iter()
        .flat_map(|&a| q.carrier().iter().map(move |&b| (a, b)))
        .filter(|_| rng.gen_bool(0.3))
        .collect::<Vec<_>>();
    FunctionCode::new(FiniteRelation::from_pairs(pairs).as_source(), p.as_source(), q.as_source())
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let p = random_preorder(&mut rng, 6);
        let id = identity_code(&p.as_source());
        for ideal in all_ideals(&p).map_err(|e| e.to_string())?.ideals {
            let (image, _) = apply_code(&id, &IdealView::Exact(ideal.clone()), 0);
            ensure(image.elements() == &ideal, format!("identity moves {ideal:?} on preorder {i}"))?;
        }
    }
    for i in 0..10 {
        let (p, q, s) = (random_preorder(&mut rng, 5), random_preorder(&mut rng, 5), random_preorder(&mut rng, 5));
        let (r1, r2) = (random_code(&mut rng, &p, &q), random_code(&mut rng, &q, &s));
        let both = compose(&r1, &r2);
        for ideal in all_ideals(&p).map_err(|e| e.to_string())?.ideals {
            let view = IdealView::Exact(ideal);
            let direct = apply_code(&both, &view, 0).0;
            let stepwise = apply_code(&r2, &apply_code(&r1, &view, 0).0, 0).0;
            ensure(direct.elements() == stepwise.elements(), format!("composition law fails on instance {i}"))?;
        }
    }
    for i in 0..10 {
        let p = random_preorder(&mut rng, 6);
        let mut targets: Vec<u64> = (100..100 + p.carrier().len() as u64).collect();
        targets.shuffle(&mut rng);
        let map: BTreeMap<u64, u64> = p.carrier().iter().copied().zip(targets).collect();
        let q = FiniteRelation::new(
            map.values().copied().collect(),
            p.pairs().iter().map(|(a, b)| (map[a], map[b])).collect(),
        )
        .unwrap();
        let f = graph_code(&map, &p.as_source(), &q.as_source(), 0).map_err(|e| e.to_string())?;
        for ideal in all_ideals(&p).map_err(|e| e.to_string())?.ideals {
            let (image, verdict) = apply_code(&f, &IdealView::Exact(ideal.clone()), 0);
            ensure(verdict == Verdict::Holds, format!("image is not an ideal on bijection {i}"))?;
            for &x in p.carrier() {
                ensure(
                    image.elements().contains(&map[&x]) == ideal.contains(&x),
                    format!("membership law fails at {x} on bijection {i}"),
                )?;
            }
        }
    }
    Ok("identity on 20 preorders; composition on 10; membership on 10 relabellings".into())
}

fn criterion_9() -> Check {
    let specs = [
        (Command::Interpolate, r#"{"catalog": {"name": "rationals", "params": {"coding": "dyadic"}}}"#, 150),
        (Command::Interpolate, r#"{"catalog": {"name": "chain", "params": {"len": 2}}}"#, 150),
        (
            Command::Fixture,
            r#"{"catalog": {"name": "spectrum-copy", "params": {"table": [[1, 0, 0, 1, 0]], "horizon": 5}}}"#,
            12,
        ),
        (
            Command::Fixture,
            r#"{"catalog": {"name": "spectrum-copy", "params": {"variant": "star", "table": [[0, 1, 1, 0, 1]], "horizon": 5}}}"#,
            12,
        ),
    ];
    let mut bytes = 0;
    for (command, text, stage) in specs {
        let mut config = RunConfig::new("inline", command);
        config.format = Format::Machine;
        config.stage = Some(stage);
        config.bound = Some(8);
        let first = run_text(&config, text).render(Format::Machine);
        let second = run_text(&config, text).render(Format::Machine);
        ensure(first == second, format!("{command:?} output differs between replays"))?;
        bytes += first.len();
    }
    let y = rationals(RationalCoding::Dyadic);
    let (a, b) = (complete(&y, EngineConfig::default()), complete(&y, EngineConfig::default()));
    ensure(a.log(200) == b.log(200), "engine logs differ")?;
    ensure(
        a.x_relation().enumerate_upto(120) == b.x_relation().enumerate_upto(120),
        "engine relations differ",
    )?;
    Ok(format!("4 machine runs replayed identically ({bytes} bytes); engine logs agree"))
}

fn main() {
    let criteria: [(fn() -> Check, u64); 9] = [
        (criterion_1, 10),
        (criterion_2, 30),
        (criterion_3, 10),
        (criterion_4, 60),
        (criterion_5, 30),
        (criterion_6, 30),
        (criterion_7, 30),
        (criterion_8, 30),
        (criterion_9, 60),
    ];
    let mut failed = 0;
    for (i, (check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(limit) => Err(format!("{detail}; over the {limit} s limit")),
            other => other,
        };
        let secs = took.as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS ({secs:.2} s, limit {limit} s) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({secs:.2} s, limit {limit} s) {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
