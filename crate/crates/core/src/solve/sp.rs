//! Subgame perfection on arenas covered by a skeleton, and the refinement
//! loop that reaches it by prefixing histories.

use std::collections::{BTreeMap, VecDeque};

use super::enumerate::{enumerate_memoryless_optimal, memoryless_count, DeviationClass, SolveOptions};
use super::ne::{check_ne, check_ne_at, synthesize_ne_edge_induction, SynthOptions};
use super::{SolveMode, Verdict};
use crate::arena::{prefix_extend, Color, InitializedArena, Player};
use crate::construct::{cover_witness, mealy_on_covered, memoryless_on_covered, CoverWitness, Coverage};
use crate::memory::MemorySkeleton;
use crate::objective::{Context, ContextClasses, Objective};
use crate::strategy::{MealyStrategy, MemorylessStrategy, Profile, Strategy};
use crate::Error;

pub const SOUNDNESS_NOTE: &str = "the value of a continuation depends on the history only through the \
objective context it reaches and, the arena being covered, the memory state it reaches; checking one \
history per reachable (state, context) pair therefore covers every history";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpReport {
    pub verdict: Verdict,
    /// Reachable (state, context) pairs with a shortest history color word reaching each.
    pub pairs: Vec<(String, Context, Vec<Color>)>,
    /// First pair, in order of history length, where some player can improve.
    pub violation: Option<(String, Context, Vec<Color>)>,
    pub note: &'static str,
}

fn witness_of(a: &InitializedArena, k: &MemorySkeleton) -> Result<CoverWitness, Error> {
    match cover_witness(a, k)? {
        Coverage::Covered(w) => Ok(w),
        Coverage::Conflict(c) => Err(Error::CoverabilityRequired(c.state)),
    }
}

fn as_memoryless(a: &InitializedArena, w: &CoverWitness, s: &Strategy) -> Result<MemorylessStrategy, Error> {
    match s {
        Strategy::Memoryless(m) => Ok(m.clone()),
        Strategy::Mealy(m) => Ok(mealy_on_covered(a.arena(), w, m)),
        Strategy::SplitTracking(_) => {
            Err(Error::Input("subgame perfection is checked for memoryless or Mealy strategies".to_string()))
        }
    }
}

/// Reachable (state, context) pairs, in breadth-first order from the
/// initial states with the initial context.
fn context_pairs(a: &InitializedArena, objective: &Objective) -> Vec<(usize, Context, Vec<Color>)> {
    let arena = a.arena();
    let mut seen = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    for &s in a.initial() {
        let key = (s, objective.initial_context());
        if seen.insert(key.clone(), ()).is_none() {
            queue.push_back((key, Vec::new()));
        }
    }
    while let Some(((s, ctx), word)) = queue.pop_front() {
        for x in &arena.state(s).actions {
            let next = objective.step(&ctx, &x.color);
            for (t, _) in &x.dist {
                let key = (*t, next.clone());
                if seen.insert(key.clone(), ()).is_none() {
                    let mut w: Vec<Color> = word.clone();
                    w.push(x.color.clone());
                    queue.push_back((key, w));
                }
            }
        }
        out.push((s, ctx, word));
    }
    out
}

/// Checks that `profile` is an equilibrium after every history of `a`,
/// against memoryless deviations on `a`.
pub fn check_sp(
    a: &InitializedArena,
    k: &MemorySkeleton,
    objective: &Objective,
    profile: &Profile,
    cap: u64,
) -> Result<SpReport, Error> {
    if let ContextClasses::Unbounded = objective.context_classes(&a.arena().colors()) {
        return Err(Error::UnsupportedContextEnumeration(objective.clone()));
    }
    objective.check_colors(&a.arena().colors())?;
    let w = witness_of(a, k)?;
    let profile = Profile::memoryless(as_memoryless(a, &w, &profile.p1)?, as_memoryless(a, &w, &profile.p2)?);
    let pairs = context_pairs(a, objective);
    let mut checked = 0;
    let named: Vec<(String, Context, Vec<Color>)> =
        pairs.iter().map(|(s, c, word)| (a.arena().name(*s).to_string(), c.clone(), word.clone())).collect();
    for (state, ctx, word) in &named {
        let from = a.from_state(state)?;
        let v = check_ne_at(&from, objective, ctx, &profile, &DeviationClass::Memoryless, cap)?;
        checked += v.checked;
        if !v.holds {
            return Ok(SpReport {
                verdict: Verdict { checked, ..v },
                violation: Some((state.clone(), ctx.clone(), word.clone())),
                pairs: named.clone(),
                note: SOUNDNESS_NOTE,
            });
        }
    }
    Ok(SpReport { verdict: Verdict::holds(checked), pairs: named, violation: None, note: SOUNDNESS_NOTE })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineIteration {
    pub profile: Profile,
    /// The pair where the profile was not optimal, and the head of the
    /// chain added for it; `None` on the last iteration.
    pub violation: Option<(String, Context, Vec<Color>)>,
    pub head: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineReport {
    pub mode: SolveMode,
    pub p1: MealyStrategy,
    pub p2: MealyStrategy,
    /// The same profile as memoryless strategies on `a`.
    pub memoryless: Profile,
    /// Number of prefix extensions performed.
    pub iterations: usize,
    /// Number of pure memoryless profiles of `a`.
    pub bound: u128,
    pub log: Vec<RefineIteration>,
}

impl RefineReport {
    pub fn profile(&self) -> Profile {
        Profile::new(self.p1.clone(), self.p2.clone())
    }
}

fn solve_round(
    cur: &InitializedArena,
    objective: &Objective,
    opts: SynthOptions,
) -> Result<(SolveMode, MemorylessStrategy, MemorylessStrategy), Error> {
    let arena = cur.arena();
    let ctx = objective.initial_context();
    let one_player = |player: Player| -> Result<MemorylessStrategy, Error> {
        let r = enumerate_memoryless_optimal(cur, player, objective, &ctx, SolveOptions::with_cap(opts.cap))?;
        if !r.uniform {
            return Err(Error::HypothesisFailed(format!(
                "no memoryless strategy of {player} is optimal from every initial state"
            )));
        }
        Ok(r.witness)
    };
    if !cur.has_choice(Player::Two) {
        Ok((SolveMode::OptimalP1, one_player(Player::One)?, MemorylessStrategy::first_actions(arena, Player::Two)))
    } else if !cur.has_choice(Player::One) {
        Ok((SolveMode::OptimalP2, MemorylessStrategy::first_actions(arena, Player::One), one_player(Player::Two)?))
    } else {
        let s = synthesize_ne_edge_induction(cur, objective, opts)?;
        if !check_ne(cur, objective, &s.profile(), &DeviationClass::Memoryless, opts.cap)?.holds {
            return Err(Error::HypothesisFailed("synthesized profile is not an equilibrium".to_string()));
        }
        Ok((SolveMode::Equilibrium, s.p1, s.p2))
    }
}

/// Solves, checks subgame perfection and, while some (state, context) pair
/// is suboptimal, adds a chain reading a history to it as a new initial
/// state and solves again.
pub fn refine_to_sp(
    a: &InitializedArena,
    k: &MemorySkeleton,
    objective: &Objective,
    opts: SynthOptions,
) -> Result<RefineReport, Error> {
    if let ContextClasses::Unbounded = objective.context_classes(&a.arena().colors()) {
        return Err(Error::UnsupportedContextEnumeration(objective.clone()));
    }
    let witness = witness_of(a, k)?;
    let bound = memoryless_count(a, Player::One).saturating_mul(memoryless_count(a, Player::Two));
    let mut cur = a.clone();
    let mut log = Vec::new();
    loop {
        let (mode, s1, s2) = solve_round(&cur, objective, opts)?;
        let (s1, s2) = (s1.restricted_to(a.arena()), s2.restricted_to(a.arena()));
        let profile = Profile::memoryless(s1.clone(), s2.clone());
        let report = check_sp(a, k, objective, &profile, opts.cap)?;
        match report.violation {
            None => {
                log.push(RefineIteration { profile: profile.clone(), violation: None, head: None });
                let iterations = log.len() - 1;
                return Ok(RefineReport {
                    mode,
                    p1: memoryless_on_covered(a.arena(), &witness, &s1, k),
                    p2: memoryless_on_covered(a.arena(), &witness, &s2, k),
                    memoryless: profile,
                    iterations,
                    bound,
                    log,
                });
            }
            Some((state, ctx, word)) => {
                if word.is_empty() {
                    return Err(Error::HypothesisFailed(format!("solution is not optimal from initial state {state}")));
                }
                if log.len() as u128 >= bound {
                    return Err(Error::HypothesisFailed(format!("no subgame perfect profile after {bound} rounds")));
                }
                let (next, head) = prefix_extend(&cur, &word, &state)?;
                log.push(RefineIteration { profile, violation: Some((state, ctx, word)), head: Some(head) });
                cur = next;
            }
        }
    }
}
