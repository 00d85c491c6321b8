//! Isomorphism of initialized arenas by backtracking search.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::arena::{Action, ArenaError, InitializedArena, StateId};
use crate::rational::Rational;

pub const DEFAULT_STATE_CAP: usize = 12;

/// State bijection plus one action bijection per state, all by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub states: BTreeMap<String, String>,
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

type Signature = (u8, bool, Vec<(Rational, Vec<Rational>)>);

fn signature(a: &InitializedArena, s: StateId) -> Signature {
    let st = a.arena().state(s);
    let mut acts: Vec<(Rational, Vec<Rational>)> = st
        .actions
        .iter()
        .map(|x| {
            let mut probs: Vec<Rational> = x.dist.iter().map(|(_, p)| p.clone()).collect();
            probs.sort();
            (x.color.clone(), probs)
        })
        .collect();
    acts.sort();
    (st.owner.number(), a.initial().contains(&s), acts)
}

/// Searches for a witness that `a1` and `a2` are isomorphic.
pub fn isomorphic(a1: &InitializedArena, a2: &InitializedArena) -> Result<Option<IsoWitness>, ArenaError> {
    isomorphic_with_cap(a1, a2, DEFAULT_STATE_CAP)
}

pub fn isomorphic_with_cap(
    a1: &InitializedArena,
    a2: &InitializedArena,
    cap: usize,
) -> Result<Option<IsoWitness>, ArenaError> {
    let n = a1.arena().len();
    for a in [a1, a2] {
        if a.arena().len() > cap {
            return Err(ArenaError::SizeLimitExceeded { states: a.arena().len(), cap });
        }
    }
    if n != a2.arena().len() || a1.initial().len() != a2.initial().len() {
        return Ok(None);
    }
    let sig1: Vec<Signature> = (0..n).map(|s| signature(a1, s)).collect();
    let sig2: Vec<Signature> = (0..n).map(|s| signature(a2, s)).collect();
    let mut search = Search { a1, a2, order: bfs_order(a1), sig1, sig2, map: vec![None; n], used: vec![false; n] };
    if !search.extend(0) {
        return Ok(None);
    }
    let map: Vec<StateId> = search.map.iter().map(|m| m.expect("complete")).collect();
    let mut witness = IsoWitness { states: BTreeMap::new(), actions: BTreeMap::new() };
    for s in 0..n {
        let (st1, st2) = (a1.arena().state(s), a2.arena().state(map[s]));
        witness.states.insert(st1.name.clone(), st2.name.clone());
        let pairs = match_actions(&st1.actions, &st2.actions, &map).expect("checked during search");
        let names = pairs
            .into_iter()
            .map(|(x, y)| (st1.actions[x].name.clone(), st2.actions[y].name.clone()))
            .collect();
        witness.actions.insert(st1.name.clone(), names);
    }
    Ok(Some(witness))
}

fn bfs_order(a: &InitializedArena) -> Vec<StateId> {
    let n = a.arena().len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<StateId> = a.initial().iter().copied().collect();
    for &s in a.initial() {
        seen[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for x in &a.arena().state(s).actions {
            for (t, _) in &x.dist {
                if !seen[*t] {
                    seen[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
    }
    order
}

/// Pairs actions with equal color and equal distribution under `map`.
fn match_actions(xs: &[Action], ys: &[Action], map: &[StateId]) -> Option<Vec<(usize, usize)>> {
    if xs.len() != ys.len() {
        return None;
    }
    let key = |a: &Action, f: &dyn Fn(StateId) -> StateId| {
        let mut d: Vec<(StateId, Rational)> = a.dist.iter().map(|(t, p)| (f(*t), p.clone())).collect();
        d.sort();
        (a.color.clone(), d)
    };
    let mut taken = vec![false; ys.len()];
    let mut pairs = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let kx = key(x, &|t| map[t]);
        let j = (0..ys.len()).find(|&j| !taken[j] && key(&ys[j], &|t| t) == kx)?;
        taken[j] = true;
        pairs.push((i, j));
    }
    Some(pairs)
}

struct Search<'a> {
    a1: &'a InitializedArena,
    a2: &'a InitializedArena,
    order: Vec<StateId>,
    sig1: Vec<Signature>,
    sig2: Vec<Signature>,
    map: Vec<Option<StateId>>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let s = self.order[depth];
        for cand in 0..self.map.len() {
            if self.used[cand] || self.sig1[s] != self.sig2[cand] {
                continue;
            }
            self.map[s] = Some(cand);
            self.used[cand] = true;
            if self.consistent() && self.extend(depth + 1) {
                return true;
            }
            self.map[s] = None;
            self.used[cand] = false;
        }
        false
    }

    /// Checks every mapped state whose successors are all mapped.
    fn consistent(&self) -> bool {
        let full: Vec<StateId> = self.map.iter().map(|m| m.unwrap_or(usize::MAX)).collect();
        for (s, image) in self.map.iter().enumerate() {
            let Some(image) = image else { continue };
            let st = self.a1.arena().state(s);
            if st.actions.iter().any(|x| x.dist.iter().any(|(t, _)| self.map[*t].is_none())) {
                continue;
            }
            if match_actions(&st.actions, &self.a2.arena().state(*image).actions, &full).is_none() {
                return false;
            }
        }
        true
    }
}
