//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Random corpora are seeded, so every run is identical.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use aifm::arena::{subarena, InitializedArena, Player};
use aifm::chain::evaluate_plain;
use aifm::characterize::{check_monotony, check_selectivity, counterexample_discounted, WitnessFamily};
use aifm::construct::{cover_witness, mealy_to_memoryless, product_arena, strategy_across_split, Coverage};
use aifm::fixtures;
use aifm::iso::isomorphic;
use aifm::memory::{m_max, skeleton_product, trivial_skeleton, MemorySkeleton};
use aifm::objective::Objective;
use aifm::random::{self, ArenaSpec, Owners, Rng64};
use aifm::rational::{int, ratio, Rational};
use aifm::solve::{
    best_mealy_values, check_ne, check_sp, cross_mix_check, enumerate_memoryless_ne, enumerate_memoryless_optimal,
    mdp_solve_with_memory, memoryless_count, refine_to_sp, synthesize_ne_edge_induction, DeviationClass,
    SolveOptions, SynthOptions,
};
use aifm::strategy::Profile;
use aifm::{Error, Result};

use rand::Rng;

const CAP: u64 = 2_000_000;
/// Largest number of memoryless profiles of a product instance kept in the
/// two-player corpora; larger draws are redrawn.
const PROFILE_LIMIT: u128 = 1 << 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn colors() -> Vec<Rational> {
    vec![int(0), int(1), int(2)]
}

fn mmax() -> MemorySkeleton {
    m_max(&colors()).unwrap()
}

fn spec(owners: Owners, deterministic: bool) -> ArenaSpec {
    ArenaSpec { deterministic, ..ArenaSpec::small(colors(), owners) }
}

fn covered(a: &InitializedArena, k: &MemorySkeleton) -> Result<bool> {
    Ok(matches!(cover_witness(a, k)?, Coverage::Covered(_)))
}

fn c1_weak_parity_values() -> Result<Outcome> {
    let fx = fixtures::weak_parity();
    let opts = SolveOptions::with_cap(CAP);
    let (_, with_max) = mdp_solve_with_memory(&fx, &mmax(), &Objective::WeakParity, Player::One, opts)?;
    let (_, trivial) = mdp_solve_with_memory(&fx, &trivial_skeleton(&colors()), &Objective::WeakParity, Player::One, opts)?;
    outcome(
        with_max.value == ratio(3, 4) && trivial.value == ratio(1, 2),
        format!("m_max {} trivial {}", with_max.value, trivial.value),
    )
}

fn counter_skeleton(n: usize, cycle: bool) -> MemorySkeleton {
    let states: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let update = (0..n)
        .map(|i| {
            let next = if i + 1 < n { i + 1 } else if cycle { 0 } else { i };
            (i.to_string(), BTreeMap::from([(int(1), next.to_string())]))
        })
        .collect();
    MemorySkeleton::new(vec![int(1)], states, "0", &update).unwrap()
}

fn c2_discounted_counterexample() -> Result<Outcome> {
    let half = ratio(1, 2);
    let (_, r) = counterexample_discounted(&trivial_skeleton(&[int(1)]), &half, CAP)?;
    let mut pass = r.optimal == ratio(3, 4) && r.mealy_best == ratio(1, 2);
    let mut detail = format!("trivial {} vs {}", r.optimal, r.mealy_best);
    for k in [m_max(&[int(1)])?, counter_skeleton(2, true), counter_skeleton(3, false)] {
        let (a, r) = counterexample_discounted(&k, &half, CAP)?;
        pass &= r.gap > int(0) && a.arena().validate().is_empty();
        detail += &format!("; |K|={} (n,m)=({},{}) gap {}", k.len(), r.shape.n, r.shape.m, r.gap);
    }
    outcome(pass, detail)
}

fn corpus(seed: u64, n: usize) -> Vec<(InitializedArena, MemorySkeleton, MemorySkeleton)> {
    let mut rng = random::rng(seed);
    let spec = spec(Owners::Both, false);
    (0..n)
        .map(|_| {
            let a = random::arena(&mut rng, &spec);
            let k1 = random::skeleton(&mut rng, &colors(), 3);
            let k2 = random::skeleton(&mut rng, &colors(), 3);
            (a, k1, k2)
        })
        .collect()
}

fn c3_products_are_covered() -> Result<Outcome> {
    let (mut failures, mut covered_count) = (0, 0);
    for (a, k, _) in corpus(3, 200) {
        let (p, _) = product_arena(&a, &k)?;
        if !covered(&p, &k)? {
            failures += 1;
        }
        if covered(&a, &k)? {
            covered_count += 1;
            if isomorphic(&a, &p)?.is_none() {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("200 pairs, {covered_count} covered, {failures} failures"))
}

fn c4_cover_of_product_skeleton() -> Result<Outcome> {
    let mut failures = 0;
    let mut both = 0;
    for (a, k1, k2) in corpus(3, 200) {
        let lhs = covered(&a, &k1)? && covered(&a, &k2)?;
        let rhs = covered(&a, &skeleton_product(&k1, &k2)?)?;
        both += lhs as usize;
        failures += (lhs != rhs) as usize;
    }
    outcome(failures == 0, format!("200 triples, {both} covered by both, {failures} failures"))
}

fn c5_transfer_invariance() -> Result<Outcome> {
    let mut rng = random::rng(5);
    let spec = spec(Owners::Both, false);
    let mut failures = 0;
    for i in 0..200 {
        let objective = if i % 2 == 0 { Objective::WeakParity } else { Objective::disc_expect(ratio(1, 2))? };
        let a = random::arena(&mut rng, &spec);
        let k = random::skeleton(&mut rng, &colors(), 3);
        let p1 = random::mealy(&mut rng, a.arena(), Player::One, &k);
        let p2 = random::mealy(&mut rng, a.arena(), Player::Two, &k);
        let base = evaluate_plain(&a, &Profile::new(p1.clone(), p2.clone()), &objective)?;

        let (prod, _, q1) = mealy_to_memoryless(&a, &p1)?;
        let (_, _, q2) = mealy_to_memoryless(&a, &p2)?;
        let on_product = evaluate_plain(&prod, &Profile::memoryless(q1, q2), &objective)?;

        let names: Vec<String> = a.arena().states().iter().map(|s| s.name.clone()).collect();
        let t = &names[rng.gen_range(0..names.len())];
        let seed = a.arena().state(a.arena().id(t)?).actions[0].name.clone();
        let (sp, _, r1, initial) = strategy_across_split(&a, t, &p1, &seed)?;
        let (_, _, r2, _) = strategy_across_split(&a, t, &p2, &seed)?;
        let split = sp.with_initial(&initial)?;
        let on_split = evaluate_plain(&split, &Profile::new(r1, r2), &objective)?;
        // The split lists its initial states in its own order; match them by name.
        let by_name: BTreeMap<String, Rational> = split.initial_names().into_iter().zip(on_split).collect();
        let on_split: Vec<Rational> = initial.iter().map(|s| by_name[s].clone()).collect();

        if base != on_product || base != on_split {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 triples, {failures} failures"))
}

/// Random two-player weak-parity arenas, producted with m_max, with both
/// players having a choice and at most `PROFILE_LIMIT` memoryless profiles.
fn two_player_products(seed: u64, n: usize) -> Result<(Vec<InitializedArena>, usize)> {
    let mut rng = random::rng(seed);
    let spec = spec(Owners::Both, false);
    let (mut out, mut drawn) = (Vec::new(), 0);
    while out.len() < n {
        drawn += 1;
        let a = random::arena(&mut rng, &spec);
        let (p, _) = product_arena(&a, &mmax())?;
        if !p.has_choice(Player::One) || !p.has_choice(Player::Two) {
            continue;
        }
        if memoryless_count(&p, Player::One) * memoryless_count(&p, Player::Two) > PROFILE_LIMIT {
            continue;
        }
        out.push(p);
    }
    Ok((out, drawn))
}

fn c6_c7_edge_induction() -> Result<(Outcome, Outcome)> {
    let wp = Objective::WeakParity;
    let (instances, drawn) = two_player_products(6, 100)?;
    let mut failures = 0;
    let (mut mixed, mut mix_failures) = (0, 0);
    for p in &instances {
        let s = synthesize_ne_edge_induction(p, &wp, SynthOptions { cap: CAP, budget: 64 })?;
        let holds = check_ne(p, &wp, &s.profile(), &DeviationClass::Memoryless, CAP)?.holds;
        let table = enumerate_memoryless_ne(p, &wp, CAP)?;
        let values: Vec<Rational> = s.values.iter().map(|(_, v)| v.clone()).collect();
        if !holds || table.maxmin != table.minmax || values != table.maxmin {
            failures += 1;
        }
        if table.equilibria.len() >= 2 {
            mixed += 1;
            let eqs: Vec<Profile> = table.equilibria.iter().take(4).map(|&(i, j)| table.profile(i, j)).collect();
            for x in 0..eqs.len() {
                for y in x + 1..eqs.len() {
                    match cross_mix_check(p, &wp, &eqs[x], &eqs[y], &DeviationClass::Memoryless, CAP) {
                        Ok(v) if v.holds => {}
                        _ => mix_failures += 1,
                    }
                }
            }
        }
    }
    Ok((
        Outcome {
            pass: failures == 0,
            detail: format!("100 instances ({drawn} drawn, profile limit {PROFILE_LIMIT}), {failures} failures"),
        },
        Outcome { pass: mix_failures == 0, detail: format!("{mixed} instances with several equilibria, {mix_failures} failures") },
    ))
}

fn c8_subgame_perfect_refinement() -> Result<Outcome> {
    let wp = Objective::WeakParity;
    let k = mmax();
    let (fig, _) = product_arena(&fixtures::weak_parity(), &k)?;
    let mut rng = random::rng(8);
    let spec = spec(Owners::Both, false);
    let mut instances = vec![fig];
    while instances.len() < 51 {
        let (p, _) = product_arena(&random::arena(&mut rng, &spec), &k)?;
        if memoryless_count(&p, Player::One) * memoryless_count(&p, Player::Two) <= PROFILE_LIMIT {
            instances.push(p);
        }
    }
    let (mut failures, mut extended) = (0, 0);
    for p in &instances {
        let ok = match refine_to_sp(p, &k, &wp, SynthOptions { cap: CAP, budget: 64 }) {
            Ok(r) => {
                extended += (r.iterations > 0) as usize;
                r.iterations as u128 <= r.bound && check_sp(p, &k, &wp, &r.profile(), CAP)?.verdict.holds
            }
            Err(Error::HypothesisFailed(_)) => false,
            Err(e) => return Err(e),
        };
        failures += !ok as usize;
    }
    outcome(failures == 0, format!("51 instances, {extended} needed prefixes, {failures} failures"))
}

fn c9_deterministic_memoryless() -> Result<Outcome> {
    let wp = Objective::WeakParity;
    let mut rng = random::rng(9);
    let spec = spec(Owners::OnePlayer(Player::One), true);
    let mut failures = 0;
    for _ in 0..200 {
        let a = random::arena(&mut rng, &spec);
        let ml = enumerate_memoryless_optimal(&a, Player::One, &wp, &wp.initial_context(), SolveOptions::with_cap(CAP))?;
        let ml: Vec<Rational> = ml.per_initial.into_iter().map(|(_, v)| v).collect();
        let mealy = best_mealy_values(&a, Player::One, &mmax(), &wp, &wp.initial_context(), CAP)?;
        failures += (ml != mealy) as usize;
    }
    outcome(failures == 0, format!("200 arenas, {failures} failures"))
}

fn refinement(rng: &mut Rng64) -> MemorySkeleton {
    random::skeleton(rng, &colors(), 3)
}

fn c10_stochastic_max_memory() -> Result<Outcome> {
    let wp = Objective::WeakParity;
    let ctx = wp.initial_context();
    let mut rng = random::rng(10);
    let spec = spec(Owners::OnePlayer(Player::One), false);
    let (mut failures, mut redrawn) = (0, 0);
    for _ in 0..100 {
        let a = random::arena(&mut rng, &spec);
        let base = best_mealy_values(&a, Player::One, &mmax(), &wp, &ctx, CAP)?;
        let mut done = 0;
        while done < 3 {
            let k = skeleton_product(&mmax(), &refinement(&mut rng))?;
            match best_mealy_values(&a, Player::One, &k, &wp, &ctx, CAP) {
                Ok(v) => {
                    failures += (v != base) as usize;
                    done += 1;
                }
                Err(Error::EnumerationCapExceeded { .. }) => redrawn += 1,
                Err(e) => return Err(e),
            }
        }
    }
    outcome(failures == 0, format!("100 arenas x 3 refinements ({redrawn} redrawn over the cap), {failures} failures"))
}

fn branch(a: &InitializedArena, state: &str, action: &str) -> Result<InitializedArena> {
    let keep = BTreeMap::from([(state.to_string(), BTreeSet::from([action.to_string()]))]);
    Ok(subarena(a, &keep)?.from_state(state)?)
}

fn c11_characterization() -> Result<Outcome> {
    let wp = Objective::WeakParity;
    let k = mmax();
    let fx = fixtures::weak_parity();
    let (a, b) = (branch(&fx, "s2", "a")?, branch(&fx, "s2", "b")?);
    let mut pass = true;
    let mut detail = Vec::new();
    for m in ["0", "1"] {
        let w = WitnessFamily::representative(&k, m)?;
        let v = check_monotony(&wp, &k, [(&a, "s2"), (&b, "s2")], &w, &k, CAP)?;
        pass &= v.holds;
        detail.push(format!("monotony m={m} {}", v.holds));
        let s = check_selectivity(&wp, &k, [(&a, "s2"), (&b, "s2")], &w, &k, CAP)?;
        pass &= s.holds;
        detail.push(format!("selectivity m={m} {}", s.holds));
    }
    let w1 = WitnessFamily::new(&k, "1", vec![vec![int(1)]], "")?;
    let s = check_selectivity(&wp, &k, [(&a, "s2"), (&b, "s2")], &w1, &k, CAP)?;
    pass &= s.holds && s.values[0].best[0] == ratio(1, 2);

    let fd = fixtures::discounted();
    let (a, b) = (branch(&fd, "s2", "a")?, branch(&fd, "s2", "b")?);
    let kt = trivial_skeleton(&[int(1)]);
    let obj = Objective::disc_threshold(ratio(1, 2), int(0))?;
    let w = WitnessFamily::new(&kt, "init", vec![vec![], vec![int(1)]], "")?;
    let eval = trivial_skeleton(&fd.arena().colors());
    let v = check_monotony(&obj, &kt, [(&a, "s2"), (&b, "s2")], &w, &eval, CAP)?;
    pass &= !v.holds && v.counterexample.is_some();
    detail.push(format!("discounted monotony {} counterexample {:?}", v.holds, v.counterexample.is_some()));
    outcome(pass, detail.join(", "))
}

fn report(id: &str, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = run();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = pass && in_time;
    let timing = match limit {
        Some(l) => format!("{:.2}s, limit {}s", elapsed.as_secs_f64(), l.as_secs()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!("{} {id:>2} {name}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut all = true;
    all &= report("1", "weak parity values", secs(1), c1_weak_parity_values);
    all &= report("2", "discounted counterexample", secs(5), c2_discounted_counterexample);
    all &= report("3", "products are covered", secs(20), c3_products_are_covered);
    all &= report("4", "cover by skeleton product", None, c4_cover_of_product_skeleton);
    all &= report("5", "transfer invariance", None, c5_transfer_invariance);
    let mut c7 = None;
    all &= report("6", "edge-induction equilibria", secs(60), || {
        let (c6, mixing) = c6_c7_edge_induction()?;
        c7 = Some(mixing);
        Ok(c6)
    });
    all &= report("7", "cross-mixed equilibria", None, || {
        c7.ok_or_else(|| Error::Input("the criterion 6 corpus did not run".to_string()))
    });
    all &= report("8", "subgame-perfect refinement", None, c8_subgame_perfect_refinement);
    all &= report("9", "deterministic memoryless", None, c9_deterministic_memoryless);
    all &= report("10", "stochastic max memory", None, c10_stochastic_max_memory);
    all &= report("11", "characterization checkers", None, c11_characterization);
    if !all {
        std::process::exit(1);
    }
}
