//! Bounded checkers for monotony and selectivity, the discounted-threshold
//! counterexample to finite memory, and a sampler for the mixing property.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arena::{merge, Action, Arena, Color, InitializedArena, Player};
use crate::chain::evaluate_plain;
use crate::construct::product_arena;
use crate::memory::{m_max, MemorySkeleton};
use crate::objective::Objective;
use crate::rational::{self, int, pow, Rational};
use crate::solve::{best_mealy_values, enumerate_memoryless_optimal, SolveOptions};
use crate::strategy::{MemorylessStrategy, Profile};
use crate::{word_string, Error};

/// Finitely many words, all read by the skeleton to the same memory state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFamily {
    pub memory: String,
    pub words: Vec<Vec<Color>>,
    pub note: String,
}

impl WitnessFamily {
    pub fn new(k: &MemorySkeleton, memory: &str, words: Vec<Vec<Color>>, note: impl Into<String>) -> Result<Self, Error> {
        let m = k.state_id(memory)?;
        for w in &words {
            let found = k.run(w)?;
            if found != m {
                return Err(Error::InvalidWitnessWord {
                    word: word_string(w),
                    found: k.state_name(found).to_string(),
                    expected: memory.to_string(),
                });
            }
        }
        Ok(WitnessFamily { memory: memory.to_string(), words, note: note.into() })
    }

    /// The shortest word reaching `memory`, first in color order.
    pub fn representative(k: &MemorySkeleton, memory: &str) -> Result<Self, Error> {
        let m = k.state_id(memory)?;
        let w = k.representative_word(k.initial(), m).ok_or_else(|| {
            Error::Input(format!("memory state {memory} is unreachable from the initial state"))
        })?;
        Self::new(k, memory, vec![w], "shortest representative")
    }
}

/// The evaluation skeleton used when none is given: `m_max` for weak
/// parity, nothing for the other families.
pub fn default_eval_skeleton(objective: &Objective, colors: &[Color]) -> Option<MemorySkeleton> {
    match objective {
        Objective::WeakParity => m_max(colors).ok(),
        _ => None,
    }
}

/// Best value P1 can reach from `state` once `word` has been read, using
/// memory `eval` on top of the arena.
pub fn best_after(
    a: &InitializedArena,
    state: &str,
    eval: &MemorySkeleton,
    objective: &Objective,
    word: &[Color],
    cap: u64,
) -> Result<Rational, Error> {
    let from = a.from_state(state)?;
    let eval = eval.with_self_loops(&from.arena().colors());
    let (prod, _) = product_arena(&from, &eval)?;
    let ctx = objective.shift(&objective.initial_context(), word);
    let r = enumerate_memoryless_optimal(&prod, Player::One, objective, &ctx, SolveOptions::with_cap(cap))?;
    Ok(r.per_initial[0].1.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordValues {
    #[serde(serialize_with = "ser_word")]
    pub word: Vec<Color>,
    #[serde(serialize_with = "ser_rats")]
    pub best: Vec<Rational>,
}

fn ser_word<S: serde::Serializer>(w: &[Color], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&word_string(w))
}

fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

fn ser_opt_word<S: serde::Serializer>(w: &Option<Vec<Color>>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) => s.serialize_some(&word_string(w)),
        None => s.serialize_none(),
    }
}

fn ser_opt_pair<S: serde::Serializer>(w: &Option<(Vec<Color>, Vec<Color>)>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some((a, b)) => s.serialize_some(&[word_string(a), word_string(b)]),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonyVerdict {
    pub holds: bool,
    /// The branch (1 or 2) that is at least as good after every word.
    pub dominant: Option<u8>,
    /// `best[0]`, `best[1]`: best values of the two branches after each word.
    pub values: Vec<WordValues>,
    /// A word after which branch 2 is strictly better, and one after which
    /// branch 1 is.
    #[serde(serialize_with = "ser_opt_pair")]
    pub counterexample: Option<(Vec<Color>, Vec<Color>)>,
}

/// Whether one of the two continuations is uniformly at least as good
/// after every word of `family`.
pub fn check_monotony(
    objective: &Objective,
    k: &MemorySkeleton,
    branches: [(&InitializedArena, &str); 2],
    family: &WitnessFamily,
    eval: &MemorySkeleton,
    cap: u64,
) -> Result<MonotonyVerdict, Error> {
    let family = WitnessFamily::new(k, &family.memory, family.words.clone(), family.note.clone())?;
    for (a, _) in branches {
        if !a.is_one_player(Player::One) {
            return Err(Error::NotOnePlayer(Player::One));
        }
    }
    let mut values = Vec::new();
    for w in &family.words {
        let best = branches
            .iter()
            .map(|(a, s)| best_after(a, s, eval, objective, w, cap))
            .collect::<Result<Vec<_>, _>>()?;
        values.push(WordValues { word: w.clone(), best });
    }
    let second_better = values.iter().find(|v| v.best[1] > v.best[0]);
    let first_better = values.iter().find(|v| v.best[0] > v.best[1]);
    Ok(match (second_better, first_better) {
        (None, _) => MonotonyVerdict { holds: true, dominant: Some(1), values, counterexample: None },
        (Some(_), None) => MonotonyVerdict { holds: true, dominant: Some(2), values, counterexample: None },
        (Some(x), Some(y)) => {
            let pair = (x.word.clone(), y.word.clone());
            MonotonyVerdict { holds: false, dominant: None, values, counterexample: Some(pair) }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectivityVerdict {
    pub holds: bool,
    /// Name of the merged state.
    pub merged_state: String,
    /// `best[0]`: merged arena, `best[1]`, `best[2]`: the two branches.
    pub values: Vec<WordValues>,
    /// A word after which the merged arena beats both branches.
    #[serde(serialize_with = "ser_opt_word")]
    pub counterexample: Option<Vec<Color>>,
}

/// `a` started at `state`, with every state name prefixed and the actions of
/// `state` prefixed when `rename_actions` is set.
fn prefixed(a: &InitializedArena, state: &str, prefix: &str, rename_actions: bool) -> Result<InitializedArena, Error> {
    let from = a.from_state(state)?;
    let src = from.arena();
    let mut out = Arena::new();
    for st in src.states() {
        out.add_state(format!("{prefix}{}", st.name), st.owner)?;
    }
    for (id, st) in src.states().iter().enumerate() {
        for x in &st.actions {
            let name = if rename_actions && st.name == state { format!("{prefix}{}", x.name) } else { x.name.clone() };
            out.push_action(id, Action { name, ..x.clone() });
        }
    }
    Ok(InitializedArena::new(out, &[format!("{prefix}{state}")])?)
}

fn check_cycles(a: &InitializedArena, state: &str, k: &MemorySkeleton, m: usize) -> Result<(), Error> {
    let from = a.from_state(state)?;
    let bad = crate::memory::cycle_class_violations(&from, state, k, m)?;
    if let Some(&found) = bad.first() {
        return Err(Error::CyclePreconditionViolated {
            state: state.to_string(),
            memory: k.state_name(found).to_string(),
            expected: k.state_name(m).to_string(),
        });
    }
    Ok(())
}

/// Whether offering both continuations at once (merging the two states)
/// never beats the better of the two, after every word of `family`.
pub fn check_selectivity(
    objective: &Objective,
    k: &MemorySkeleton,
    branches: [(&InitializedArena, &str); 2],
    family: &WitnessFamily,
    eval: &MemorySkeleton,
    cap: u64,
) -> Result<SelectivityVerdict, Error> {
    let family = WitnessFamily::new(k, &family.memory, family.words.clone(), family.note.clone())?;
    let m = k.state_id(&family.memory)?;
    for (a, s) in branches {
        if !a.is_one_player(Player::One) {
            return Err(Error::NotOnePlayer(Player::One));
        }
        check_cycles(a, s, k, m)?;
    }
    let [(a1, s1), (a2, s2)] = branches;
    let left = prefixed(a1, s1, "L.", false)?;
    let (l1, l2) = (a1.from_state(s1)?, a2.from_state(s2)?);
    let t1 = l1.arena().state(l1.arena().id(s1)?);
    let t2 = l2.arena().state(l2.arena().id(s2)?);
    let clash = t2.actions.iter().any(|x| t1.action_index(&x.name).is_some());
    let right = prefixed(a2, s2, "R.", clash)?;
    let (merged, t) = merge(&left, &format!("L.{s1}"), &right, &format!("R.{s2}"))?;
    let merged = InitializedArena::new(merged, &[t.as_str()])?;
    let mut values = Vec::new();
    for w in &family.words {
        let best = vec![
            best_after(&merged, &t, eval, objective, w, cap)?,
            best_after(a1, s1, eval, objective, w, cap)?,
            best_after(a2, s2, eval, objective, w, cap)?,
        ];
        values.push(WordValues { word: w.clone(), best });
    }
    let counterexample = values
        .iter()
        .find(|v| v.best[0] > v.best[1] && v.best[0] > v.best[2])
        .map(|v| v.word.clone());
    Ok(SelectivityVerdict { holds: counterexample.is_none(), merged_state: t, values, counterexample })
}

/// Shape of the discounted-threshold counterexample for one skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleShape {
    /// `run(1ⁿ) = run(1ᵐ)` with `n < m` minimal.
    pub n: usize,
    pub m: usize,
    pub lambda: Rational,
    /// Color of the action `b` at `s2`.
    pub c_b: Rational,
    /// Color of the losing half of action `a`.
    pub c_l: Rational,
    /// Saturating counter of ones, enough to tell the two paths apart.
    pub counter: MemorySkeleton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub shape: CounterexampleShape,
    pub objective: Objective,
    /// Best value with the counter memory.
    pub optimal: Rational,
    /// Best value of Mealy strategies on the given skeleton.
    pub mealy_best: Rational,
    pub gap: Rational,
}

fn geometric(lambda: &Rational, m: usize) -> Rational {
    (0..m as i64).map(|i| pow(lambda, i)).sum()
}

fn first_repeat(k: &MemorySkeleton, prefix: &[Color], one: &Color) -> Result<(usize, usize), Error> {
    let mut seen = Vec::new();
    let mut word = prefix.to_vec();
    loop {
        let s = k.run(&word)?;
        if let Some(n) = seen.iter().position(|&x| x == s) {
            return Ok((n, seen.len()));
        }
        seen.push(s);
        word.push(one.clone());
    }
}

/// The arena where P1 must tell `1ⁿ` from `1ᵐ` at `s2` to win with
/// probability 3/4 while Mealy strategies on `k` cannot.
///
/// ```text
/// s1 --go--> ½ 1ⁿ-path, ½ 1ᵐ-path --> s2
/// s2 --b, c_b--> sink
/// s2 --a, 0--> ½ g --0--> sink, ½ l --c_l--> sink     (sink: 0-loop)
/// ```
pub fn counterexample_arena(k: &MemorySkeleton, lambda: &Rational) -> Result<(InitializedArena, CounterexampleShape), Error> {
    Objective::disc_threshold(lambda.clone(), Rational::zero())?;
    let one = int(1);
    let zero = Rational::zero();
    k.letter(&one)?;
    // Look for the repeat among the words read before s2: with n = 0 the
    // path colors are 0·1ᵐ, otherwise 1ⁿ and 1ᵐ.
    let k0 = k.with_self_loops(&[zero.clone()]);
    let (mut n, mut m) = first_repeat(&k0, &[], &one)?;
    if n == 0 && k0.run(&[zero.clone()])? != k0.run(&[vec![zero.clone()], vec![one.clone(); m]].concat())? {
        // Memory reads the 0 of the first action: require a 1 first.
        let (n1, m1) = first_repeat(&k0, &[one.clone()], &one)?;
        n = n1 + 1;
        m = m1 + 1;
    }
    let sum = geometric(lambda, m);
    let c_b = -pow(lambda, -(m as i64)) * &sum;
    let c_l = -pow(lambda, -(m as i64 + 1)) * (Rational::one() + &sum);

    let mut a = Arena::new();
    let mut add = |name: String| a.add_state(name, Player::One).map(|_| ());
    add("s1".into())?;
    let short = n.saturating_sub(1);
    let long = if n == 0 { m } else { m - 1 };
    for i in 1..=short {
        add(format!("p{i}"))?;
    }
    for i in 1..=long {
        add(format!("q{i}"))?;
    }
    for s in ["s2", "g", "l", "sink"] {
        add(s.into())?;
    }
    let half = rational::ratio(1, 2);
    let head = |prefix: &str, len: usize| if len == 0 { "s2".to_string() } else { format!("{prefix}1") };
    let first_color = if n == 0 { zero.clone() } else { one.clone() };
    a.add_action("s1", "go", first_color, &[(&head("p", short), half.clone()), (&head("q", long), half.clone())])?;
    for (prefix, len) in [("p", short), ("q", long)] {
        for i in 1..=len {
            let next = if i == len { "s2".to_string() } else { format!("{prefix}{}", i + 1) };
            a.add_action(&format!("{prefix}{i}"), "go", one.clone(), &[(&next, Rational::one())])?;
        }
    }
    a.add_action("s2", "a", zero.clone(), &[("g", half.clone()), ("l", half)])?;
    a.add_action("s2", "b", c_b.clone(), &[("sink", Rational::one())])?;
    a.add_action("g", "go", zero.clone(), &[("sink", Rational::one())])?;
    a.add_action("l", "go", c_l.clone(), &[("sink", Rational::one())])?;
    a.add_action("sink", "loop", zero, &[("sink", Rational::one())])?;
    let arena = InitializedArena::new(a, &["s1"])?;

    let counter = ones_counter(&arena.arena().colors(), m);
    Ok((arena, CounterexampleShape { n, m, lambda: lambda.clone(), c_b, c_l, counter }))
}

/// Counts ones up to `max`, ignoring every other color.
fn ones_counter(colors: &[Color], max: usize) -> MemorySkeleton {
    let one = int(1);
    let update = (0..=max)
        .map(|i| colors.iter().map(|c| if *c == one { (i + 1).min(max) } else { i }).collect())
        .collect();
    MemorySkeleton::from_table(colors.to_vec(), (0..=max).map(|i| i.to_string()).collect(), 0, update)
}

/// Builds the counterexample for `k` and measures the gap between the
/// counter memory and Mealy strategies on `k`.
pub fn counterexample_discounted(
    k: &MemorySkeleton,
    lambda: &Rational,
    cap: u64,
) -> Result<(InitializedArena, CounterexampleReport), Error> {
    let (arena, shape) = counterexample_arena(k, lambda)?;
    let objective = Objective::disc_threshold(lambda.clone(), Rational::zero())?;
    let ctx = objective.initial_context();
    let colors = arena.arena().colors();
    let optimal = best_mealy_values(&arena, Player::One, &shape.counter, &objective, &ctx, cap)?.remove(0);
    let kk = k.with_self_loops(&colors);
    let mealy_best = best_mealy_values(&arena, Player::One, &kk, &objective, &ctx, cap)?.remove(0);
    let gap = &optimal - &mealy_best;
    Ok((arena, CounterexampleReport { shape, objective, optimal, mealy_best, gap }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixingVerdict {
    pub holds: bool,
    pub samples: usize,
    pub counterexample: Option<String>,
}

/// A single-strategy arena whose value under `objective` is `value`, with
/// its root state named `root`; states are added to `a`.
fn gadget(a: &mut Arena, objective: &Objective, root: &str, value: &Rational) -> Result<(), Error> {
    let one = Rational::one();
    let st = |a: &mut Arena, s: String| a.add_state(s, Player::One).map(|_| ());
    let (win, lose) = (format!("{root}.win"), format!("{root}.lose"));
    let split = |v: &Rational| -> Vec<(&str, Rational)> {
        let mut d = Vec::new();
        if !v.is_zero() {
            d.push((win.as_str(), v.clone()));
        }
        if *v != one {
            d.push((lose.as_str(), &one - v));
        }
        d
    };
    match objective {
        Objective::WeakParity | Objective::Reach(_) => {
            let (wc, lc) = match objective {
                Objective::WeakParity => (int(2), int(1)),
                Objective::Reach(t) => (t.clone(), if *t == int(0) { int(1) } else { int(0) }),
                _ => unreachable!(),
            };
            st(a, root.to_string())?;
            st(a, win.clone())?;
            st(a, lose.clone())?;
            let go = if matches!(objective, Objective::WeakParity) { int(0) } else { lc.clone() };
            a.add_action(root, "go", go, &split(value))?;
            a.add_action(&win, "loop", wc, &[(win.as_str(), one.clone())])?;
            a.add_action(&lose, "loop", lc, &[(lose.as_str(), one.clone())])?;
        }
        Objective::DiscExpect(lambda) => {
            // Constant color c from the root on: value c / (1 − λ).
            st(a, root.to_string())?;
            let c = value * (&one - lambda);
            a.add_action(root, "loop", c, &[(root, one.clone())])?;
        }
        Objective::DiscThreshold { lambda, threshold } => {
            // Color c then 0 forever; the combining root delays it by one step.
            st(a, root.to_string())?;
            st(a, win.clone())?;
            let c = if value.is_zero() { threshold - &one } else { threshold.clone() } / lambda;
            a.add_action(root, "go", c, &[(win.as_str(), one.clone())])?;
            a.add_action(&win, "loop", int(0), &[(win.as_str(), one.clone())])?;
        }
    }
    Ok(())
}

/// Value of the arena combining `parts` (weight, value) with one random move.
pub fn combined_value(objective: &Objective, parts: &[(Rational, Rational)]) -> Result<Rational, Error> {
    let mut a = Arena::new();
    a.add_state("root", Player::One)?;
    let names: Vec<String> = (0..parts.len()).map(|i| format!("c{i}")).collect();
    for (name, (_, v)) in names.iter().zip(parts) {
        gadget(&mut a, objective, name, v)?;
    }
    let dist: Vec<(&str, Rational)> = names.iter().map(String::as_str).zip(parts.iter().map(|(p, _)| p.clone())).collect();
    let root_color = match objective {
        Objective::Reach(t) if t.is_zero() => int(1),
        _ => int(0),
    };
    a.add_action("root", "mix", root_color, &dist)?;
    let a = InitializedArena::new(a, &["root"])?;
    let profile = Profile::memoryless(MemorylessStrategy::new(Player::One), MemorylessStrategy::new(Player::Two));
    Ok(evaluate_plain(&a, &profile, objective)?.remove(0))
}

/// Samples convex combinations of outcome values, improves components and
/// checks that the combined value never decreases.
pub fn mixing_useless_sample(objective: &Objective, samples: usize, seed: u64) -> Result<MixingVerdict, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let binary = matches!(objective, Objective::DiscThreshold { .. });
    let lambda_scale = match objective {
        Objective::DiscExpect(l) => l.clone(),
        _ => Rational::one(),
    };
    let draw = |rng: &mut ChaCha8Rng| -> Rational {
        if binary {
            int(rng.gen_range(0..2))
        } else if matches!(objective, Objective::DiscExpect(_)) {
            rational::ratio(rng.gen_range(-8..9), 4)
        } else {
            rational::ratio(rng.gen_range(0..5), 4)
        }
    };
    for i in 0..samples {
        let n = rng.gen_range(1..5);
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..5)).collect();
        let total: i64 = weights.iter().sum();
        let parts: Vec<(Rational, Rational)> =
            weights.iter().map(|&w| (rational::ratio(w, total), draw(&mut rng))).collect();
        let improved: Vec<(Rational, Rational)> = parts
            .iter()
            .map(|(p, v)| {
                let up = draw(&mut rng);
                (p.clone(), if up > *v { up } else { v.clone() })
            })
            .collect();
        let before = combined_value(objective, &parts)?;
        let after = combined_value(objective, &improved)?;
        // The root step scales expected discounted sums by λ.
        let expected: Rational = parts.iter().map(|(p, v)| p * v).sum::<Rational>() * &lambda_scale;
        if after < before || before != expected {
            return Ok(MixingVerdict {
                holds: false,
                samples: i + 1,
                counterexample: Some(format!(
                    "sample {i}: combined {} before, {} after improving components",
                    rational::format(&before),
                    rational::format(&after)
                )),
            });
        }
    }
    Ok(MixingVerdict { holds: true, samples, counterexample: None })
}
