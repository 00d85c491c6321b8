//! Pure strategies and their compiled form.
//!
//! Memory is updated with the color of every transition, whoever owns the
//! state it leaves.

use std::collections::BTreeMap;

use crate::arena::{split_copy_name, Arena, Player, StateId};
use crate::memory::MemorySkeleton;
use crate::Error;

/// Pure memoryless strategy. States with a single action need not be listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemorylessStrategy {
    pub player: Player,
    pub choice: BTreeMap<String, String>,
}

impl MemorylessStrategy {
    pub fn new(player: Player) -> Self {
        MemorylessStrategy { player, choice: BTreeMap::new() }
    }

    /// The strategy playing the first action everywhere.
    pub fn first_actions(arena: &Arena, player: Player) -> Self {
        let choice = arena
            .states()
            .iter()
            .filter(|s| s.owner == player)
            .map(|s| (s.name.clone(), s.actions[0].name.clone()))
            .collect();
        MemorylessStrategy { player, choice }
    }

    pub fn with(mut self, state: &str, action: &str) -> Self {
        self.choice.insert(state.to_string(), action.to_string());
        self
    }

    pub fn get(&self, state: &str) -> Option<&str> {
        self.choice.get(state).map(String::as_str)
    }

    /// Action played at `state`, defaulting to the only action of a choice-free state.
    pub fn action_at<'a>(&'a self, arena: &'a Arena, state: StateId) -> Option<&'a str> {
        let st = arena.state(state);
        self.get(&st.name).or_else(|| (st.actions.len() == 1).then(|| st.actions[0].name.as_str()))
    }

    /// Keeps only the states of `arena` owned by the player, filling in single actions.
    pub fn restricted_to(&self, arena: &Arena) -> Self {
        let mut choice = BTreeMap::new();
        for (id, s) in arena.states().iter().enumerate() {
            if s.owner == self.player {
                if let Some(x) = self.action_at(arena, id) {
                    choice.insert(s.name.clone(), x.to_string());
                }
            }
        }
        MemorylessStrategy { player: self.player, choice }
    }
}

/// Pure finite-memory strategy: a skeleton plus `next[state][memory] = action`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyStrategy {
    pub player: Player,
    pub skeleton: MemorySkeleton,
    pub next: BTreeMap<String, BTreeMap<String, String>>,
}

impl MealyStrategy {
    /// A memoryless strategy seen as a Mealy strategy on `skeleton`.
    pub fn from_memoryless(arena: &Arena, sigma: &MemorylessStrategy, skeleton: MemorySkeleton) -> Self {
        let mut next = BTreeMap::new();
        for (id, s) in arena.states().iter().enumerate() {
            if s.owner != sigma.player {
                continue;
            }
            if let Some(x) = sigma.action_at(arena, id) {
                let row = skeleton.states().iter().map(|m| (m.clone(), x.to_string())).collect();
                next.insert(s.name.clone(), row);
            }
        }
        MealyStrategy { player: sigma.player, skeleton, next }
    }

    pub fn action(&self, state: &str, memory: &str) -> Option<&str> {
        self.next.get(state).and_then(|row| row.get(memory)).map(String::as_str)
    }
}

/// A strategy on an arena obtained by playing a strategy of its split on `t`:
/// the memory additionally records the last action taken at `t`, starting
/// from `seed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTrackingStrategy {
    pub t: String,
    pub seed: String,
    /// Strategy on the split arena.
    pub inner: MealyStrategy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Memoryless(MemorylessStrategy),
    Mealy(MealyStrategy),
    SplitTracking(SplitTrackingStrategy),
}

impl Strategy {
    pub fn player(&self) -> Player {
        match self {
            Strategy::Memoryless(s) => s.player,
            Strategy::Mealy(s) => s.player,
            Strategy::SplitTracking(s) => s.inner.player,
        }
    }

    pub(crate) fn compile(&self, arena: &Arena) -> Result<Machine, Error> {
        match self {
            Strategy::Memoryless(s) => Machine::memoryless(arena, s),
            Strategy::Mealy(s) => Machine::mealy(arena, s),
            Strategy::SplitTracking(s) => Machine::split_tracking(arena, s),
        }
    }
}

impl From<MemorylessStrategy> for Strategy {
    fn from(s: MemorylessStrategy) -> Self {
        Strategy::Memoryless(s)
    }
}

impl From<MealyStrategy> for Strategy {
    fn from(s: MealyStrategy) -> Self {
        Strategy::Mealy(s)
    }
}

impl From<SplitTrackingStrategy> for Strategy {
    fn from(s: SplitTrackingStrategy) -> Self {
        Strategy::SplitTracking(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub p1: Strategy,
    pub p2: Strategy,
}

impl Profile {
    pub fn new(p1: impl Into<Strategy>, p2: impl Into<Strategy>) -> Self {
        Profile { p1: p1.into(), p2: p2.into() }
    }

    pub fn memoryless(p1: MemorylessStrategy, p2: MemorylessStrategy) -> Self {
        Profile::new(p1, p2)
    }

    pub fn get(&self, player: Player) -> &Strategy {
        match player {
            Player::One => &self.p1,
            Player::Two => &self.p2,
        }
    }

    /// `self` with `player`'s strategy replaced.
    pub fn with(&self, player: Player, s: Strategy) -> Profile {
        let mut out = self.clone();
        match player {
            Player::One => out.p1 = s,
            Player::Two => out.p2 = s,
        }
        out
    }
}

/// `(state, action)` pairs numbered consecutively.
#[derive(Debug, Clone)]
pub(crate) struct Pairs {
    pub base: Vec<usize>,
    pub total: usize,
}

impl Pairs {
    pub fn new(arena: &Arena) -> Self {
        let mut base = Vec::with_capacity(arena.len());
        let mut total = 0;
        for s in arena.states() {
            base.push(total);
            total += s.actions.len();
        }
        Pairs { base, total }
    }

    pub fn id(&self, state: StateId, action: usize) -> usize {
        self.base[state] + action
    }
}

pub(crate) const NONE: u32 = u32::MAX;

/// A strategy compiled against one arena: a choice table and a memory
/// update table over `(state, action)` pairs.
#[derive(Debug, Clone)]
pub(crate) struct Machine {
    pub player: Player,
    pub mems: usize,
    pub init: u32,
    /// `choice[s * mems + m]`, `NONE` where undefined.
    pub choice: Vec<u32>,
    /// `update[m * pairs + pair]`; empty for a single memory state.
    pub update: Vec<u32>,
    pub pairs: usize,
    pub mem_names: Vec<String>,
}

impl Machine {
    #[inline]
    pub fn action(&self, s: StateId, m: u32) -> u32 {
        self.choice[s * self.mems + m as usize]
    }

    #[inline]
    pub fn step(&self, m: u32, pair: usize) -> u32 {
        if self.update.is_empty() {
            0
        } else {
            self.update[m as usize * self.pairs + pair]
        }
    }

    /// Memoryless machine from a raw choice vector (one entry per state).
    pub fn from_choices(player: Player, choice: Vec<u32>, pairs: usize) -> Machine {
        Machine { player, mems: 1, init: 0, choice, update: Vec::new(), pairs, mem_names: vec!["-".into()] }
    }

    pub fn memoryless(arena: &Arena, s: &MemorylessStrategy) -> Result<Machine, Error> {
        let mut choice = vec![NONE; arena.len()];
        for (id, st) in arena.states().iter().enumerate() {
            if st.owner != s.player {
                continue;
            }
            choice[id] = match s.get(&st.name) {
                Some(x) => lookup(arena, s.player, id, x)?,
                None if st.actions.len() == 1 => 0,
                None => NONE,
            };
        }
        Ok(Machine::from_choices(s.player, choice, Pairs::new(arena).total))
    }

    /// Memory update table of `k` over the pairs of `arena`.
    fn skeleton_update(arena: &Arena, k: &MemorySkeleton) -> Result<(Vec<u32>, usize), Error> {
        let pairs = Pairs::new(arena);
        let mut letters = Vec::with_capacity(pairs.total);
        for st in arena.states() {
            for x in &st.actions {
                letters.push(k.letter(&x.color)?);
            }
        }
        let mut update = Vec::with_capacity(k.len() * pairs.total);
        for m in 0..k.len() {
            update.extend(letters.iter().map(|&l| k.step_letter(m, l) as u32));
        }
        Ok((update, pairs.total))
    }

    pub fn mealy(arena: &Arena, s: &MealyStrategy) -> Result<Machine, Error> {
        let k = &s.skeleton;
        let (update, pairs) = Self::skeleton_update(arena, k)?;
        let mems = k.len();
        let mut choice = vec![NONE; arena.len() * mems];
        for (id, st) in arena.states().iter().enumerate() {
            if st.owner != s.player {
                continue;
            }
            for m in 0..mems {
                choice[id * mems + m] = match s.action(&st.name, k.state_name(m)) {
                    Some(x) => lookup(arena, s.player, id, x)?,
                    None if st.actions.len() == 1 => 0,
                    None => NONE,
                };
            }
        }
        Ok(Machine {
            player: s.player,
            mems,
            init: k.initial() as u32,
            choice,
            update,
            pairs,
            mem_names: k.states().to_vec(),
        })
    }

    pub fn split_tracking(arena: &Arena, s: &SplitTrackingStrategy) -> Result<Machine, Error> {
        let k = &s.inner.skeleton;
        let player = s.inner.player;
        let tid = arena.id(&s.t)?;
        let t_actions: Vec<&str> = arena.state(tid).actions.iter().map(|x| x.name.as_str()).collect();
        let seed = t_actions
            .iter()
            .position(|x| *x == s.seed)
            .ok_or_else(|| Error::UnknownAction { player, state: s.t.clone(), action: s.seed.clone() })?;
        let nx = t_actions.len();
        let (kupdate, pairs) = Self::skeleton_update(arena, k)?;
        let pair_ids = Pairs::new(arena);
        let mems = k.len() * nx;
        let mem = |m: usize, x: usize| m * nx + x;
        let mut update = vec![0u32; mems * pairs];
        for m in 0..k.len() {
            for x in 0..nx {
                for (id, st) in arena.states().iter().enumerate() {
                    for a in 0..st.actions.len() {
                        let p = pair_ids.id(id, a);
                        let m2 = kupdate[m * pairs + p] as usize;
                        let x2 = if id == tid { a } else { x };
                        update[mem(m, x) * pairs + p] = mem(m2, x2) as u32;
                    }
                }
            }
        }
        let mut choice = vec![NONE; arena.len() * mems];
        for (id, st) in arena.states().iter().enumerate() {
            if st.owner != player {
                continue;
            }
            for m in 0..k.len() {
                for (x, xname) in t_actions.iter().enumerate() {
                    let copy = if id == tid { st.name.clone() } else { split_copy_name(&st.name, xname) };
                    choice[id * mems + mem(m, x)] = match s.inner.action(&copy, k.state_name(m)) {
                        Some(a) => lookup(arena, player, id, a)?,
                        None if st.actions.len() == 1 => 0,
                        None => NONE,
                    };
                }
            }
        }
        let mut mem_names = Vec::with_capacity(mems);
        for m in 0..k.len() {
            for x in &t_actions {
                mem_names.push(format!("({},{x})", k.state_name(m)));
            }
        }
        Ok(Machine { player, mems, init: mem(k.initial(), seed) as u32, choice, update, pairs, mem_names })
    }
}

fn lookup(arena: &Arena, player: Player, state: StateId, action: &str) -> Result<u32, Error> {
    let st = arena.state(state);
    st.action_index(action).map(|i| i as u32).ok_or_else(|| Error::UnknownAction {
        player,
        state: st.name.clone(),
        action: action.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::memory::m_max;
    use crate::rational::int;

    #[test]
    fn memoryless_defaults_single_actions() {
        let fx = fixtures::weak_parity();
        let a = fx.arena();
        let m = Machine::memoryless(a, &MemorylessStrategy::new(Player::One).with("s2", "b")).unwrap();
        assert_eq!(m.action(a.id("s2").unwrap(), 0), 1);
        assert_eq!(m.action(a.id("s1").unwrap(), 0), 0);
        let m = Machine::memoryless(a, &MemorylessStrategy::new(Player::One)).unwrap();
        assert_eq!(m.action(a.id("s2").unwrap(), 0), NONE);
        let bad = Machine::memoryless(a, &MemorylessStrategy::new(Player::One).with("s2", "c"));
        assert!(matches!(bad, Err(Error::UnknownAction { .. })));
    }

    #[test]
    fn mealy_tables() {
        let fx = fixtures::weak_parity();
        let a = fx.arena();
        let k = m_max(&[int(0), int(1), int(2)]).unwrap();
        let mut next = BTreeMap::new();
        next.insert("s2".to_string(), BTreeMap::from([("0".to_string(), "a".to_string()), ("1".to_string(), "b".to_string())]));
        let sigma = MealyStrategy { player: Player::One, skeleton: k, next };
        let m = Machine::mealy(a, &sigma).unwrap();
        let s2 = a.id("s2").unwrap();
        assert_eq!(m.action(s2, 0), 0);
        assert_eq!(m.action(s2, 1), 1);
        assert_eq!(m.action(s2, 2), NONE);
        let pairs = Pairs::new(a);
        let u1 = a.id("u1").unwrap();
        assert_eq!(m.step(0, pairs.id(u1, 0)), 1);
    }

    #[test]
    fn restriction_fills_single_actions() {
        let fx = fixtures::weak_parity();
        let s = MemorylessStrategy::new(Player::One).with("s2", "a").with("ghost", "x").restricted_to(fx.arena());
        assert_eq!(s.choice.len(), fx.arena().len());
        assert_eq!(s.get("s2"), Some("a"));
        assert_eq!(s.get("ghost"), None);
    }
}
