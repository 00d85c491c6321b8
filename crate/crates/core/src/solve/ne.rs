//! Nash equilibria: checking, synthesis by induction on the number of
//! choices, the lift to finite memory, and exhaustive enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::enumerate::{best_response, enumerate_memoryless_optimal, DeviationClass, SolveOptions, SolveReport, Space};
use super::{Counterexample, Verdict};
use crate::arena::{split, subarena, InitializedArena, Player};
use crate::chain::{chain_values, induce_chain, Compiled};
use crate::construct::{
    fix_strategy, memoryless_to_mealy, product_arena, split_projection,
};
use crate::memory::{skeleton_product, trivial_skeleton, MemorySkeleton};
use crate::objective::{improves, Context, Objective};
use crate::rational::Rational;
use crate::strategy::{MealyStrategy, MemorylessStrategy, Profile, Strategy};
use crate::Error;

pub const DEFAULT_BUDGET: usize = 32;

fn profile_values(a: &InitializedArena, profile: &Profile, objective: &Objective, ctx: &Context) -> Result<Vec<Rational>, Error> {
    objective.check_colors(&a.arena().colors())?;
    chain_values(&induce_chain(a, profile)?, objective, ctx)
}

/// Checks that no player gains by deviating within `class`, from any
/// initial state, with the objective read under `ctx`.
pub fn check_ne_at(
    a: &InitializedArena,
    objective: &Objective,
    ctx: &Context,
    profile: &Profile,
    class: &DeviationClass,
    cap: u64,
) -> Result<Verdict, Error> {
    let before = profile_values(a, profile, objective, ctx)?;
    let names = a.initial_names();
    let mut checked = 0;
    for player in [Player::One, Player::Two] {
        let opponent = profile.get(player.opponent());
        let best = best_response(a, player, opponent, class, objective, ctx, cap)?;
        checked += best.enumerated;
        for (i, (_, value, strategy)) in best.per_initial.into_iter().enumerate() {
            if improves(player, &value, &before[i]) {
                return Ok(Verdict {
                    holds: false,
                    counterexample: Some(Counterexample {
                        player,
                        state: names[i].clone(),
                        context: ctx.clone(),
                        deviation: strategy,
                        before: before[i].clone(),
                        after: value,
                    }),
                    checked,
                });
            }
        }
    }
    Ok(Verdict::holds(checked))
}

pub fn check_ne(
    a: &InitializedArena,
    objective: &Objective,
    profile: &Profile,
    class: &DeviationClass,
    cap: u64,
) -> Result<Verdict, Error> {
    check_ne_at(a, objective, &objective.initial_context(), profile, class, cap)
}

/// Checks that both cross combinations of two equilibria are equilibria.
pub fn cross_mix_check(
    a: &InitializedArena,
    objective: &Objective,
    ne_a: &Profile,
    ne_b: &Profile,
    class: &DeviationClass,
    cap: u64,
) -> Result<Verdict, Error> {
    if !check_ne(a, objective, ne_a, class, cap)?.holds {
        return Err(Error::InputNotNE("first"));
    }
    if !check_ne(a, objective, ne_b, class, cap)?.holds {
        return Err(Error::InputNotNE("second"));
    }
    let mut checked = 0;
    for mixed in [Profile::new(ne_a.p1.clone(), ne_b.p2.clone()), Profile::new(ne_b.p1.clone(), ne_a.p2.clone())] {
        let v = check_ne(a, objective, &mixed, class, cap)?;
        checked += v.checked;
        if !v.holds {
            return Ok(Verdict { checked, ..v });
        }
    }
    Ok(Verdict::holds(checked))
}

/// Solves the one-player arena `a ⊗ k` and reads the optimal strategy back
/// as a Mealy strategy on `k`.
pub fn mdp_solve_with_memory(
    a: &InitializedArena,
    k: &MemorySkeleton,
    objective: &Objective,
    player: Player,
    opts: SolveOptions,
) -> Result<(MealyStrategy, SolveReport), Error> {
    let (prod, map) = product_arena(a, k)?;
    let mut report = enumerate_memoryless_optimal(&prod, player, objective, &objective.initial_context(), opts)?;
    for (name, _) in &mut report.per_initial {
        *name = map.forward[name.as_str()].0.clone();
    }
    let mealy = memoryless_to_mealy(a.arena(), &map, &report.witness, k);
    Ok((mealy, report))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum TraceStep {
    /// No choice left: the unique profile.
    Base,
    /// Only `player` has choices: the oracle solves its arena.
    OnePlayer { player: Player, uniform: bool },
    /// Split on `t`, owned by `player`, keeping `a_star` there.
    Split { player: Player, t: String, a_star: String, uniform: bool },
    MemoHit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub depth: usize,
    pub choices: usize,
    #[serde(flatten)]
    pub step: TraceStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub cap: u64,
    pub budget: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { cap: super::default_cap(), budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeSynthesis {
    pub p1: MemorylessStrategy,
    pub p2: MemorylessStrategy,
    /// Value of the profile from each initial state.
    pub values: Vec<(String, Rational)>,
    pub trace: Vec<TraceEntry>,
    /// Oracle calls on arenas where no single strategy was optimal from
    /// every initial state.
    pub non_uniform: usize,
}

impl NeSynthesis {
    pub fn profile(&self) -> Profile {
        Profile::memoryless(self.p1.clone(), self.p2.clone())
    }
}

type MemoKey = (Vec<(String, Vec<String>)>, Vec<String>);

fn memo_key(a: &InitializedArena) -> MemoKey {
    let states = a
        .arena()
        .states()
        .iter()
        .map(|s| (s.name.clone(), s.actions.iter().map(|x| x.name.clone()).collect()))
        .collect();
    (states, a.initial_names())
}

struct Synth<'a> {
    objective: &'a Objective,
    ctx: Context,
    cap: u64,
    memo: HashMap<MemoKey, (MemorylessStrategy, MemorylessStrategy)>,
    trace: Vec<TraceEntry>,
    non_uniform: usize,
}

impl Synth<'_> {
    fn oracle(&mut self, a: &InitializedArena, player: Player) -> Result<SolveReport, Error> {
        let r = enumerate_memoryless_optimal(a, player, self.objective, &self.ctx, SolveOptions::with_cap(self.cap))?;
        if !r.uniform {
            self.non_uniform += 1;
        }
        Ok(r)
    }

    fn log(&mut self, depth: usize, a: &InitializedArena, step: TraceStep) {
        self.trace.push(TraceEntry { depth, choices: a.choice_count(), step });
    }

    fn solve(&mut self, a: &InitializedArena, depth: usize) -> Result<(MemorylessStrategy, MemorylessStrategy), Error> {
        let key = memo_key(a);
        if let Some(hit) = self.memo.get(&key) {
            let hit = hit.clone();
            self.log(depth, a, TraceStep::MemoHit);
            return Ok(hit);
        }
        let arena = a.arena();
        let out = if a.choice_count() == 0 {
            self.log(depth, a, TraceStep::Base);
            (MemorylessStrategy::first_actions(arena, Player::One), MemorylessStrategy::first_actions(arena, Player::Two))
        } else if !a.has_choice(Player::One) || !a.has_choice(Player::Two) {
            let player = if a.has_choice(Player::One) { Player::One } else { Player::Two };
            let r = self.oracle(a, player)?;
            self.log(depth, a, TraceStep::OnePlayer { player, uniform: r.uniform });
            let fixed = MemorylessStrategy::first_actions(arena, player.opponent());
            let own = r.witness.restricted_to(arena);
            match player {
                Player::One => (own, fixed),
                Player::Two => (fixed, own),
            }
        } else {
            let p1 = self.pass(a, Player::One, depth)?;
            let p2 = self.pass(a, Player::Two, depth)?;
            (p1, p2)
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// One half of the inductive step: an equilibrium whose `player` part
    /// is memoryless, obtained by splitting on a state of `player`.
    fn pass(&mut self, a: &InitializedArena, player: Player, depth: usize) -> Result<MemorylessStrategy, Error> {
        let arena = a.arena();
        let t = arena
            .states()
            .iter()
            .filter(|s| s.owner == player && s.actions.len() >= 2)
            .map(|s| s.name.as_str())
            .min()
            .expect("player has a choice")
            .to_string();
        let tid = arena.id(&t)?;
        let mut sub = BTreeMap::new();
        for x in &arena.state(tid).actions {
            let keep = BTreeMap::from([(t.clone(), BTreeSet::from([x.name.clone()]))]);
            let ax = subarena(a, &keep)?;
            sub.insert(x.name.clone(), self.solve(&ax, depth + 1)?);
        }
        let pick = |s: &(MemorylessStrategy, MemorylessStrategy), p: Player| match p {
            Player::One => s.0.clone(),
            Player::Two => s.1.clone(),
        };

        let other = player.opponent();
        let (sp, labels) = split(a, &t)?;
        let mut union = MemorylessStrategy::new(other);
        for (name, label) in &labels {
            let Some(x) = &label.action else { continue };
            let st = arena.state(arena.id(&label.base)?);
            if st.owner != other {
                continue;
            }
            let chosen = pick(&sub[x], other);
            let act = chosen.get(&label.base).unwrap_or(&st.actions[0].name).to_string();
            union.choice.insert(name.clone(), act);
        }
        let fixed = fix_strategy(&sp, &union)?;
        let r = self.oracle(&fixed, player)?;
        let a_star = r.witness.get(&t).unwrap_or(&arena.state(tid).actions[0].name).to_string();
        self.log(depth, a, TraceStep::Split { player, t: t.clone(), a_star: a_star.clone(), uniform: r.uniform });

        // The split strategy of `player`: a* at t, the sub-solution for x on copy x.
        let mut own = MemorylessStrategy::new(player).with(&t, &a_star);
        for (name, label) in &labels {
            let Some(x) = &label.action else { continue };
            let st = arena.state(arena.id(&label.base)?);
            if st.owner == player {
                let chosen = pick(&sub[x], player);
                own.choice.insert(name.clone(), chosen.get(&label.base).unwrap_or(&st.actions[0].name).to_string());
            }
        }
        let k = trivial_skeleton(&sp.arena().colors());
        let union = MealyStrategy::from_memoryless(sp.arena(), &union, k);
        Ok(split_projection(arena, &t, &labels, &own, &union, &a_star)?.owner)
    }
}

/// A pure memoryless equilibrium of `a`, built by induction on the number
/// of choices with the one-player oracle at the leaves.
pub fn synthesize_ne_edge_induction(
    a: &InitializedArena,
    objective: &Objective,
    opts: SynthOptions,
) -> Result<NeSynthesis, Error> {
    objective.check_colors(&a.arena().colors())?;
    let choices = a.choice_count();
    if choices > opts.budget {
        return Err(Error::RecursionBudgetExceeded { choices, budget: opts.budget });
    }
    let mut s = Synth {
        objective,
        ctx: objective.initial_context(),
        cap: opts.cap,
        memo: HashMap::new(),
        trace: Vec::new(),
        non_uniform: 0,
    };
    let (p1, p2) = s.solve(a, 0)?;
    let profile = Profile::memoryless(p1.clone(), p2.clone());
    let values = profile_values(a, &profile, objective, &s.ctx)?;
    Ok(NeSynthesis {
        p1,
        p2,
        values: a.initial_names().into_iter().zip(values).collect(),
        trace: s.trace,
        non_uniform: s.non_uniform,
    })
}

/// What to do when a sampled hypothesis of the lift fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisPolicy {
    #[default]
    Warn,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LiftOptions {
    pub synth: SynthOptions,
    pub policy: HypothesisPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    pub skeleton: MemorySkeleton,
    pub p1: MealyStrategy,
    pub p2: MealyStrategy,
    pub values: Vec<(String, Rational)>,
    pub product_states: usize,
    pub synthesis: NeSynthesis,
    pub warnings: Vec<String>,
}

impl LiftReport {
    pub fn profile(&self) -> Profile {
        Profile::new(self.p1.clone(), self.p2.clone())
    }
}

/// An equilibrium of Mealy strategies on `k1 ⊗ k2`: synthesis on the
/// product arena, read back on `a`.
pub fn lift_two_player(
    a: &InitializedArena,
    k1: &MemorySkeleton,
    k2: &MemorySkeleton,
    objective: &Objective,
    opts: LiftOptions,
) -> Result<LiftReport, Error> {
    let k = skeleton_product(k1, k2)?;
    let (prod, map) = product_arena(a, &k)?;
    let synthesis = synthesize_ne_edge_induction(&prod, objective, opts.synth)?;
    let mut warnings = Vec::new();
    if synthesis.non_uniform > 0 {
        warnings.push(format!(
            "{} one-player arenas had no strategy optimal from every initial state",
            synthesis.non_uniform
        ));
    }
    let check = check_ne(&prod, objective, &synthesis.profile(), &DeviationClass::Memoryless, opts.synth.cap)?;
    if !check.holds {
        warnings.push("synthesized profile fails the equilibrium check on the product".to_string());
    }
    if opts.policy == HypothesisPolicy::Abort && !warnings.is_empty() {
        return Err(Error::HypothesisFailed(warnings.join("; ")));
    }
    let p1 = memoryless_to_mealy(a.arena(), &map, &synthesis.p1, &k);
    let p2 = memoryless_to_mealy(a.arena(), &map, &synthesis.p2, &k);
    let profile = Profile::new(p1.clone(), p2.clone());
    let values = profile_values(a, &profile, objective, &objective.initial_context())?;
    Ok(LiftReport {
        skeleton: k,
        p1,
        p2,
        values: a.initial_names().into_iter().zip(values).collect(),
        product_states: prod.arena().len(),
        synthesis,
        warnings,
    })
}

/// Values of all pure memoryless profiles, indexed `[σ1][σ2][initial]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeTable {
    pub p1: Vec<MemorylessStrategy>,
    pub p2: Vec<MemorylessStrategy>,
    pub values: Vec<Vec<Vec<Rational>>>,
    /// Index pairs of the profiles that are equilibria.
    pub equilibria: Vec<(usize, usize)>,
    pub maxmin: Vec<Rational>,
    pub minmax: Vec<Rational>,
}

impl NeTable {
    pub fn profile(&self, i: usize, j: usize) -> Profile {
        Profile::memoryless(self.p1[i].clone(), self.p2[j].clone())
    }
}

fn memoryless_of(s: Strategy) -> MemorylessStrategy {
    match s {
        Strategy::Memoryless(m) => m,
        _ => unreachable!("memoryless space"),
    }
}

/// Every pure memoryless profile, evaluated; `cap` bounds the number of profiles.
pub fn enumerate_memoryless_ne(a: &InitializedArena, objective: &Objective, cap: u64) -> Result<NeTable, Error> {
    objective.check_colors(&a.arena().colors())?;
    let ctx = objective.initial_context();
    let s1 = Space::memoryless(a, Player::One);
    let s2 = Space::memoryless(a, Player::Two);
    let count = s1.count.saturating_mul(s2.count);
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { count, cap });
    }
    let (n1, n2) = (s1.count as u64, s2.count as u64);
    let compiled = Compiled::of(a);
    let machines2: Vec<_> = (0..n2).map(|j| s2.machine(j)).collect();
    let values: Vec<Vec<Vec<Rational>>> = (0..n1)
        .into_par_iter()
        .map(|i| {
            let m1 = s1.machine(i);
            machines2.iter().map(|m2| chain_values(&compiled.chain(&m1, m2)?, objective, &ctx)).collect()
        })
        .collect::<Result<_, Error>>()?;
    let inits = a.initial().len();
    let (n1, n2) = (n1 as usize, n2 as usize);
    let row_min: Vec<Vec<&Rational>> =
        (0..n1).map(|i| (0..inits).map(|q| (0..n2).map(|j| &values[i][j][q]).min().unwrap()).collect()).collect();
    let col_max: Vec<Vec<&Rational>> =
        (0..n2).map(|j| (0..inits).map(|q| (0..n1).map(|i| &values[i][j][q]).max().unwrap()).collect()).collect();
    let mut equilibria = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if (0..inits).all(|q| values[i][j][q] == *row_min[i][q] && values[i][j][q] == *col_max[j][q]) {
                equilibria.push((i, j));
            }
        }
    }
    let maxmin = (0..inits).map(|q| (0..n1).map(|i| row_min[i][q]).max().unwrap().clone()).collect();
    let minmax = (0..inits).map(|q| (0..n2).map(|j| col_max[j][q]).min().unwrap().clone()).collect();
    Ok(NeTable {
        p1: (0..n1 as u64).map(|i| memoryless_of(s1.strategy(a, i))).collect(),
        p2: (0..n2 as u64).map(|j| memoryless_of(s2.strategy(a, j))).collect(),
        values,
        equilibria,
        maxmin,
        minmax,
    })
}
