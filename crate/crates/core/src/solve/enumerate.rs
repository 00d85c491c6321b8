//! Exhaustive enumeration of pure strategies of one player against a fixed
//! opponent, evaluated exactly and in parallel.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::arena::{InitializedArena, Player, StateId};
use crate::chain::{chain_values, Compiled};
use crate::memory::MemorySkeleton;
use crate::objective::{preference, Context, Objective};
use crate::rational::Rational;
use crate::strategy::{MealyStrategy, MemorylessStrategy, Machine, Strategy, NONE};
use crate::Error;

pub const DEFAULT_CAP: u64 = 2_000_000;

/// Enumeration cap: `AIFM_CAP` if set to a number, the default otherwise.
pub fn default_cap() -> u64 {
    std::env::var("AIFM_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// The strategies a player may deviate to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviationClass {
    Memoryless,
    /// Pure strategies based on the given skeleton.
    Mealy(MemorySkeleton),
}

/// A finite strategy space, enumerated in lexicographic order: slots are
/// sorted by state name (then memory state), actions by declaration order,
/// and the first slot is the most significant digit.
#[derive(Debug, Clone)]
pub(crate) struct Space {
    pub player: Player,
    slots: Vec<(StateId, usize)>,
    radices: Vec<u32>,
    pub count: u128,
    template: Machine,
    skeleton: Option<MemorySkeleton>,
}

impl Space {
    pub fn new(a: &InitializedArena, player: Player, class: &DeviationClass) -> Result<Space, Error> {
        match class {
            DeviationClass::Memoryless => Ok(Space::memoryless(a, player)),
            DeviationClass::Mealy(k) => Space::mealy(a, player, k),
        }
    }

    pub fn memoryless(a: &InitializedArena, player: Player) -> Space {
        let arena = a.arena();
        let mut choice = vec![NONE; arena.len()];
        let mut slots = Vec::new();
        for (id, st) in arena.states().iter().enumerate() {
            if st.owner == player {
                choice[id] = 0;
                if st.actions.len() > 1 {
                    slots.push((id, 0));
                }
            }
        }
        slots.sort_by(|x, y| arena.name(x.0).cmp(arena.name(y.0)));
        let template = Machine::from_choices(player, choice, crate::strategy::Pairs::new(arena).total);
        Space::finish(a, player, slots, template, None)
    }

    pub fn mealy(a: &InitializedArena, player: Player, k: &MemorySkeleton) -> Result<Space, Error> {
        let arena = a.arena();
        let empty = MealyStrategy { player, skeleton: k.clone(), next: Default::default() };
        let mut template = Machine::mealy(arena, &empty)?;
        // Only (state, memory) pairs reachable in the product matter.
        let mut seen = vec![vec![false; k.len()]; arena.len()];
        let mut stack: Vec<(StateId, usize)> = a.initial().iter().map(|&s| (s, k.initial())).collect();
        for &(s, m) in &stack {
            seen[s][m] = true;
        }
        while let Some((s, m)) = stack.pop() {
            for x in &arena.state(s).actions {
                let m2 = k.step(m, &x.color)?;
                for (t, _) in &x.dist {
                    if !seen[*t][m2] {
                        seen[*t][m2] = true;
                        stack.push((*t, m2));
                    }
                }
            }
        }
        let mut slots = Vec::new();
        for (id, st) in arena.states().iter().enumerate() {
            if st.owner != player {
                continue;
            }
            for m in 0..k.len() {
                template.choice[id * k.len() + m] = 0;
                if st.actions.len() > 1 && seen[id][m] {
                    slots.push((id, m));
                }
            }
        }
        slots.sort_by(|x, y| arena.name(x.0).cmp(arena.name(y.0)).then(x.1.cmp(&y.1)));
        Ok(Space::finish(a, player, slots, template, Some(k.clone())))
    }

    fn finish(
        a: &InitializedArena,
        player: Player,
        slots: Vec<(StateId, usize)>,
        template: Machine,
        skeleton: Option<MemorySkeleton>,
    ) -> Space {
        let radices: Vec<u32> = slots.iter().map(|&(s, _)| a.arena().state(s).actions.len() as u32).collect();
        let count = radices.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
        Space { player, slots, radices, count, template, skeleton }
    }

    pub fn check_cap(&self, cap: u64) -> Result<(), Error> {
        if self.count > cap as u128 {
            return Err(Error::EnumerationCapExceeded { count: self.count, cap });
        }
        Ok(())
    }

    fn digits(&self, mut index: u64) -> Vec<u32> {
        let mut digits = vec![0u32; self.slots.len()];
        for i in (0..self.slots.len()).rev() {
            let r = self.radices[i] as u64;
            digits[i] = (index % r) as u32;
            index /= r;
        }
        digits
    }

    pub fn machine(&self, index: u64) -> Machine {
        let mut m = self.template.clone();
        for (&(s, mem), d) in self.slots.iter().zip(self.digits(index)) {
            m.choice[s * m.mems + mem] = d;
        }
        m
    }

    pub fn strategy(&self, a: &InitializedArena, index: u64) -> Strategy {
        let arena = a.arena();
        let machine = self.machine(index);
        match &self.skeleton {
            None => {
                let mut s = MemorylessStrategy::new(self.player);
                for (id, st) in arena.states().iter().enumerate() {
                    if st.owner == self.player {
                        s.choice.insert(st.name.clone(), st.actions[machine.choice[id] as usize].name.clone());
                    }
                }
                Strategy::Memoryless(s)
            }
            Some(k) => {
                let mut next = std::collections::BTreeMap::new();
                for (id, st) in arena.states().iter().enumerate() {
                    if st.owner != self.player {
                        continue;
                    }
                    let row = (0..k.len())
                        .map(|m| {
                            let x = machine.choice[id * k.len() + m] as usize;
                            (k.state_name(m).to_string(), st.actions[x].name.clone())
                        })
                        .collect();
                    next.insert(st.name.clone(), row);
                }
                Strategy::Mealy(MealyStrategy { player: self.player, skeleton: k.clone(), next })
            }
        }
    }
}

/// Values of every enumerated strategy at one initial state are compared
/// from the enumerating player's point of view; ties keep the smaller index.
#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    /// Per initial state: best value and the first index attaining it.
    pub best: Vec<(Rational, u64)>,
    /// Best worst-case value over the initial states, and its first index.
    pub robust: (Rational, u64),
    pub count: u64,
}

fn worst(player: Player, values: &[Rational]) -> Rational {
    values
        .iter()
        .min_by(|a, b| preference(player, a, b))
        .cloned()
        .expect("at least one initial state")
}

fn pick(player: Player, a: (Rational, u64), b: (Rational, u64)) -> (Rational, u64) {
    match preference(player, &a.0, &b.0) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

pub(crate) struct Enumerator<'a> {
    pub compiled: Compiled<'a>,
    pub space: Space,
    pub opponent: Machine,
    pub objective: &'a Objective,
    pub ctx: &'a Context,
}

impl<'a> Enumerator<'a> {
    pub fn new(
        a: &'a InitializedArena,
        space: Space,
        opponent: &Strategy,
        objective: &'a Objective,
        ctx: &'a Context,
    ) -> Result<Self, Error> {
        objective.check_colors(&a.arena().colors())?;
        let opponent = opponent.compile(a.arena())?;
        Ok(Enumerator { compiled: Compiled::of(a), space, opponent, objective, ctx })
    }

    pub fn values(&self, index: u64) -> Result<Vec<Rational>, Error> {
        let own = self.space.machine(index);
        let chain = match self.space.player {
            Player::One => self.compiled.chain(&own, &self.opponent)?,
            Player::Two => self.compiled.chain(&self.opponent, &own)?,
        };
        chain_values(&chain, self.objective, self.ctx)
    }

    pub fn sweep(&self, cap: u64) -> Result<Sweep, Error> {
        self.space.check_cap(cap)?;
        let count = self.space.count as u64;
        let player = self.space.player;
        let reduced = (0..count)
            .into_par_iter()
            .map(|i| {
                let v = self.values(i)?;
                Ok(Sweep { robust: (worst(player, &v), i), best: v.into_iter().map(|x| (x, i)).collect(), count: 1 })
            })
            .try_reduce_with(|x: Sweep, y: Sweep| {
                Ok(Sweep {
                    best: x.best.into_iter().zip(y.best).map(|(p, q)| pick(player, p, q)).collect(),
                    robust: pick(player, x.robust, y.robust),
                    count: x.count + y.count,
                })
            });
        reduced.expect("a strategy space is never empty")
    }

    /// First index attaining `best` at every initial state.
    pub fn first_uniform(&self, sweep: &Sweep) -> Result<Option<u64>, Error> {
        let first = sweep.best[0].1;
        if sweep.best.iter().all(|(_, i)| *i == first) {
            return Ok(Some(first));
        }
        let start = sweep.best.iter().map(|(_, i)| *i).max().expect("initial states");
        let found = (start..sweep.count)
            .into_par_iter()
            .map(|i| self.values(i).map(|v| v.iter().zip(&sweep.best).all(|(x, (b, _))| x == b).then_some(i)))
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            None => Ok(None),
            Some(r) => r,
        }
    }

    /// Values of all strategies in enumeration order.
    pub fn table(&self, cap: u64) -> Result<Vec<Vec<Rational>>, Error> {
        self.space.check_cap(cap)?;
        (0..self.space.count as u64).into_par_iter().map(|i| self.values(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub cap: u64,
    pub keep_table: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cap: default_cap(), keep_table: false }
    }
}

impl SolveOptions {
    pub fn with_cap(cap: u64) -> Self {
        SolveOptions { cap, keep_table: false }
    }
}

/// Outcome of the one-player oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub player: Player,
    /// Worst-case value of the witness over the initial states; the best such
    /// value over all strategies.
    pub value: Rational,
    /// Optimal value at each initial state.
    pub per_initial: Vec<(String, Rational)>,
    /// Whether one strategy is optimal from every initial state at once.
    pub uniform: bool,
    pub witness: MemorylessStrategy,
    pub enumerated: u128,
    pub table: Option<Vec<(MemorylessStrategy, Vec<Rational>)>>,
}

impl SolveReport {
    pub fn value_at(&self, state: &str) -> Option<&Rational> {
        self.per_initial.iter().find(|(s, _)| s == state).map(|(_, v)| v)
    }
}

fn memoryless(s: Strategy) -> MemorylessStrategy {
    match s {
        Strategy::Memoryless(m) => m,
        _ => unreachable!("memoryless space"),
    }
}

/// Evaluates every pure memoryless strategy of `player` on a one-player
/// arena and returns an optimal one; when some strategy is optimal from all
/// initial states at once it is preferred, first in lexicographic order.
pub fn enumerate_memoryless_optimal(
    a: &InitializedArena,
    player: Player,
    objective: &Objective,
    ctx: &Context,
    opts: SolveOptions,
) -> Result<SolveReport, Error> {
    if !a.is_one_player(player) {
        return Err(Error::NotOnePlayer(player));
    }
    let opponent = Strategy::Memoryless(MemorylessStrategy::new(player.opponent()));
    let e = Enumerator::new(a, Space::memoryless(a, player), &opponent, objective, ctx)?;
    let sweep = e.sweep(opts.cap)?;
    let uniform = e.first_uniform(&sweep)?;
    let index = uniform.unwrap_or(sweep.robust.1);
    let table = if opts.keep_table {
        let rows = e.table(opts.cap)?;
        Some(rows.into_iter().enumerate().map(|(i, v)| (memoryless(e.space.strategy(a, i as u64)), v)).collect())
    } else {
        None
    };
    Ok(SolveReport {
        player,
        value: sweep.robust.0.clone(),
        per_initial: a.initial_names().into_iter().zip(sweep.best.iter().map(|(v, _)| v.clone())).collect(),
        uniform: uniform.is_some(),
        witness: memoryless(e.space.strategy(a, index)),
        enumerated: e.space.count,
        table,
    })
}

/// Best values `player` can reach against the fixed opponent in `profile`,
/// per initial state, with a strategy attaining each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub per_initial: Vec<(String, Rational, Strategy)>,
    pub enumerated: u128,
}

pub fn best_response(
    a: &InitializedArena,
    player: Player,
    opponent: &Strategy,
    class: &DeviationClass,
    objective: &Objective,
    ctx: &Context,
    cap: u64,
) -> Result<BestResponse, Error> {
    let space = Space::new(a, player, class)?;
    let e = Enumerator::new(a, space, opponent, objective, ctx)?;
    let sweep = e.sweep(cap)?;
    let per_initial = a
        .initial_names()
        .into_iter()
        .zip(sweep.best)
        .map(|(s, (v, i))| (s, v, e.space.strategy(a, i)))
        .collect();
    Ok(BestResponse { per_initial, enumerated: e.space.count })
}

/// Best value of `player` over strategies based on `k`, per initial state,
/// on a one-player arena.
pub fn best_mealy_values(
    a: &InitializedArena,
    player: Player,
    k: &MemorySkeleton,
    objective: &Objective,
    ctx: &Context,
    cap: u64,
) -> Result<Vec<Rational>, Error> {
    if !a.is_one_player(player) {
        return Err(Error::NotOnePlayer(player));
    }
    let opponent = Strategy::Memoryless(MemorylessStrategy::new(player.opponent()));
    let r = best_response(a, player, &opponent, &DeviationClass::Mealy(k.clone()), objective, ctx, cap)?;
    Ok(r.per_initial.into_iter().map(|(_, v, _)| v).collect())
}

/// Number of pure memoryless strategies of `player`.
pub fn memoryless_count(a: &InitializedArena, player: Player) -> u128 {
    Space::memoryless(a, player).count
}
