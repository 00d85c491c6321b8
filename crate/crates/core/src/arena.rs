//! Colored stochastic turn-based arenas and their structural operations.
//!
//! States and actions are identified by name; indices are only used
//! internally and are renumbered freely (pruning keeps the original order of
//! the surviving states).

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

pub type Color = Rational;
pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

impl Serialize for Player {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Player {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Player::from_number(n).ok_or_else(|| serde::de::Error::custom(format!("owner must be 1 or 2, got {n}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArenaError {
    #[error("invalid arena: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown action {action:?} at state {state:?}")]
    UnknownAction { state: String, action: String },
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("state {0:?} would have no action left")]
    EmptyActionSet(String),
    #[error("an initialized arena needs at least one initial state")]
    EmptyInitial,
    #[error("cannot merge {0:?} and {1:?}: different owners")]
    OwnerMismatch(String, String),
    #[error("cannot merge: action {0:?} exists at both merged states")]
    ActionNameClash(String),
    #[error("state name {0:?} is used by both arenas")]
    NameClash(String),
    #[error("prefix word must be non-empty")]
    EmptyWord,
    #[error("isomorphism search limited to {cap} states, arena has {states}")]
    SizeLimitExceeded { states: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub color: Color,
    /// Successor distribution as `(target, probability)` pairs.
    pub dist: Vec<(StateId, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub owner: Player,
    pub actions: Vec<Action>,
}

impl State {
    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }
}

/// A finite arena. Construction does not validate; see [`Arena::validate`]
/// and [`InitializedArena::new`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Arena {
    states: Vec<State>,
    index: HashMap<String, StateId>,
}

impl Arena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>, owner: Player) -> Result<StateId, ArenaError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(ArenaError::DuplicateState(name));
        }
        let id = self.states.len();
        self.index.insert(name.clone(), id);
        self.states.push(State { name, owner, actions: Vec::new() });
        Ok(id)
    }

    /// Adds an action whose distribution refers to already-declared states by name.
    pub fn add_action(
        &mut self,
        state: &str,
        name: impl Into<String>,
        color: Color,
        dist: &[(&str, Rational)],
    ) -> Result<(), ArenaError> {
        let sid = self.id(state)?;
        let dist = dist
            .iter()
            .map(|(target, p)| Ok((self.id(target)?, p.clone())))
            .collect::<Result<Vec<_>, ArenaError>>()?;
        self.states[sid].actions.push(Action { name: name.into(), color, dist });
        Ok(())
    }

    pub fn push_action(&mut self, state: StateId, action: Action) {
        self.states[state].actions.push(action);
    }

    pub fn id(&self, name: &str) -> Result<StateId, ArenaError> {
        self.index.get(name).copied().ok_or_else(|| ArenaError::UnknownState(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn name(&self, id: StateId) -> &str {
        &self.states[id].name
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Distinct colors used by the arena, sorted.
    pub fn colors(&self) -> Vec<Color> {
        let set: BTreeSet<&Color> = self.states.iter().flat_map(|s| s.actions.iter().map(|a| &a.color)).collect();
        set.into_iter().cloned().collect()
    }

    /// Every violated arena invariant, named with its state and action.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for state in &self.states {
            if state.actions.is_empty() {
                out.push(format!("blocking state {}", state.name));
            }
            let mut seen = BTreeSet::new();
            for action in &state.actions {
                if !seen.insert(action.name.as_str()) {
                    out.push(format!("duplicate action {} at {}", action.name, state.name));
                }
                if action.dist.is_empty() {
                    out.push(format!("empty distribution at {}/{}", state.name, action.name));
                    continue;
                }
                let mut targets = BTreeSet::new();
                for (t, p) in &action.dist {
                    if *t >= self.states.len() {
                        out.push(format!("dangling target at {}/{}", state.name, action.name));
                    } else if !targets.insert(*t) {
                        out.push(format!("repeated target {} at {}/{}", self.states[*t].name, state.name, action.name));
                    }
                    if !p.is_positive() || *p > Rational::one() {
                        out.push(format!(
                            "probability {} outside (0,1] at {}/{}",
                            rational::format(p),
                            state.name,
                            action.name
                        ));
                    }
                }
                let sum: Rational = action.dist.iter().map(|(_, p)| p.clone()).sum();
                if !sum.is_one() {
                    out.push(format!(
                        "distribution sum ≠ 1 at {}/{} (sum {})",
                        state.name,
                        action.name,
                        rational::format(&sum)
                    ));
                }
            }
        }
        out
    }

    /// Copy with every state renamed by `f`.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> Arena {
        let states: Vec<State> = self.states.iter().map(|s| State { name: f(&s.name), ..s.clone() }).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect();
        Arena { states, index }
    }

    fn from_states(states: Vec<State>) -> Result<Arena, ArenaError> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.name.clone(), i).is_some() {
                return Err(ArenaError::NameClash(s.name.clone()));
            }
        }
        Ok(Arena { states, index })
    }

    fn reachable_from(&self, roots: &[StateId]) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &r in roots {
            if !seen[r] {
                seen[r] = true;
                queue.push_back(r);
            }
        }
        while let Some(s) = queue.pop_front() {
            for a in &self.states[s].actions {
                for (t, _) in &a.dist {
                    if !seen[*t] {
                        seen[*t] = true;
                        queue.push_back(*t);
                    }
                }
            }
        }
        seen
    }
}

/// Number of choices: `Σ_s |A(s)| − |S|`.
pub fn choice_count(arena: &Arena) -> usize {
    arena.states.iter().map(|s| s.actions.len()).sum::<usize>() - arena.states.len()
}

/// An arena together with its initial states; every state is reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitializedArena {
    arena: Arena,
    initial: Vec<StateId>,
}

impl InitializedArena {
    /// Validates `arena` and prunes every state unreachable from `initial`.
    pub fn new<S: AsRef<str>>(arena: Arena, initial: &[S]) -> Result<Self, ArenaError> {
        let ids = initial.iter().map(|s| arena.id(s.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Self::from_ids(arena, ids)
    }

    pub fn from_ids(arena: Arena, initial: Vec<StateId>) -> Result<Self, ArenaError> {
        if initial.is_empty() {
            return Err(ArenaError::EmptyInitial);
        }
        let diags = arena.validate();
        if !diags.is_empty() {
            return Err(ArenaError::Invalid(diags));
        }
        let keep = arena.reachable_from(&initial);
        let mut remap = vec![usize::MAX; arena.len()];
        let mut states = Vec::new();
        for (i, s) in arena.states.iter().enumerate() {
            if keep[i] {
                remap[i] = states.len();
                states.push(s.clone());
            }
        }
        for s in &mut states {
            for a in &mut s.actions {
                for (t, _) in &mut a.dist {
                    *t = remap[*t];
                }
            }
        }
        let mut initial: Vec<StateId> = initial.into_iter().map(|i| remap[i]).collect();
        initial.sort_unstable();
        initial.dedup();
        Ok(InitializedArena { arena: Arena::from_states(states)?, initial })
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn initial_names(&self) -> Vec<String> {
        self.initial.iter().map(|&i| self.arena.name(i).to_string()).collect()
    }

    /// The same arena started from `state` only.
    pub fn from_state(&self, state: &str) -> Result<InitializedArena, ArenaError> {
        InitializedArena::new(self.arena.clone(), &[state])
    }

    pub fn with_initial<S: AsRef<str>>(&self, initial: &[S]) -> Result<InitializedArena, ArenaError> {
        InitializedArena::new(self.arena.clone(), initial)
    }

    pub fn choice_count(&self) -> usize {
        choice_count(&self.arena)
    }

    /// True when `player`'s opponent has exactly one action everywhere.
    pub fn is_one_player(&self, player: Player) -> bool {
        self.arena.states.iter().all(|s| s.owner == player || s.actions.len() == 1)
    }

    pub fn has_choice(&self, player: Player) -> bool {
        self.arena.states.iter().any(|s| s.owner == player && s.actions.len() >= 2)
    }
}

/// Restricts the available actions. States absent from `keep` keep all actions.
pub fn subarena(
    a: &InitializedArena,
    keep: &BTreeMap<String, BTreeSet<String>>,
) -> Result<InitializedArena, ArenaError> {
    let mut states = a.arena.states.clone();
    for (state, allowed) in keep {
        let sid = a.arena.id(state)?;
        for name in allowed {
            if a.arena.states[sid].action_index(name).is_none() {
                return Err(ArenaError::UnknownAction { state: state.clone(), action: name.clone() });
            }
        }
        states[sid].actions.retain(|x| allowed.contains(&x.name));
        if states[sid].actions.is_empty() {
            return Err(ArenaError::EmptyActionSet(state.clone()));
        }
    }
    InitializedArena::from_ids(Arena::from_states(states)?, a.initial.clone())
}

/// Adds a fresh chain of P1 states reading `word` and leading to `target`;
/// the chain head joins the initial states. Returns the head's name.
pub fn prefix_extend(
    a: &InitializedArena,
    word: &[Color],
    target: &str,
) -> Result<(InitializedArena, String), ArenaError> {
    if word.is_empty() {
        return Err(ArenaError::EmptyWord);
    }
    let target_id = a.arena.id(target)?;
    let mut tag = 0usize;
    let names = loop {
        let names: Vec<String> = (0..word.len()).map(|i| format!("{target}.w{tag}.{i}")).collect();
        if names.iter().all(|n| a.arena.get(n).is_none()) {
            break names;
        }
        tag += 1;
    };
    let mut arena = a.arena.clone();
    let first = arena.len();
    for name in &names {
        arena.add_state(name.clone(), Player::One)?;
    }
    for (i, color) in word.iter().enumerate() {
        let next = if i + 1 < word.len() { first + i + 1 } else { target_id };
        arena.push_action(
            first + i,
            Action { name: "next".to_string(), color: color.clone(), dist: vec![(next, Rational::one())] },
        );
    }
    let mut initial = a.initial.clone();
    initial.push(first);
    let out = InitializedArena::from_ids(arena, initial)?;
    Ok((out, names[0].clone()))
}

/// Merges `(a1, s1)` and `(a2, s2)` into one arena where the state `t`
/// carries the actions of both; transitions into `s1` or `s2` go to `t`.
pub fn merge(
    a1: &InitializedArena,
    s1: &str,
    a2: &InitializedArena,
    s2: &str,
) -> Result<(Arena, String), ArenaError> {
    let id1 = a1.arena.id(s1)?;
    let id2 = a2.arena.id(s2)?;
    let (st1, st2) = (&a1.arena.states[id1], &a2.arena.states[id2]);
    if st1.owner != st2.owner {
        return Err(ArenaError::OwnerMismatch(s1.to_string(), s2.to_string()));
    }
    for s in &a2.arena.states {
        if a1.arena.get(&s.name).is_some() {
            return Err(ArenaError::NameClash(s.name.clone()));
        }
    }
    for x in &st2.actions {
        if st1.action_index(&x.name).is_some() {
            return Err(ArenaError::ActionNameClash(x.name.clone()));
        }
    }
    let mut t_name = format!("{s1}+{s2}");
    while a1.arena.get(&t_name).is_some() || a2.arena.get(&t_name).is_some() {
        t_name.push('\'');
    }

    // Layout: a1's states, then a2's; s1's slot becomes t and s2's slot is dropped.
    let n1 = a1.arena.len();
    let map1 = |s: StateId| s;
    let map2 = |s: StateId| -> StateId {
        if s == id2 {
            id1
        } else if s < id2 {
            n1 + s
        } else {
            n1 + s - 1
        }
    };
    let mut states = Vec::with_capacity(n1 + a2.arena.len() - 1);
    for s in &a1.arena.states {
        states.push(relabel_state(s, &map1));
    }
    for (i, s) in a2.arena.states.iter().enumerate() {
        if i != id2 {
            states.push(relabel_state(s, &map2));
        }
    }
    let extra: Vec<Action> = st2.actions.iter().map(|x| relabel_action(x, &map2)).collect();
    states[id1].actions.extend(extra);
    states[id1].name = t_name.clone();
    Ok((Arena::from_states(states)?, t_name))
}

fn relabel_action(a: &Action, f: &impl Fn(StateId) -> StateId) -> Action {
    Action { name: a.name.clone(), color: a.color.clone(), dist: a.dist.iter().map(|(t, p)| (f(*t), p.clone())).collect() }
}

fn relabel_state(s: &State, f: &impl Fn(StateId) -> StateId) -> State {
    State { name: s.name.clone(), owner: s.owner, actions: s.actions.iter().map(|a| relabel_action(a, f)).collect() }
}

/// Provenance of a state of a split arena: the base state and, except for
/// the split state itself, the action of `t` whose copy it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitLabel {
    pub base: String,
    pub action: Option<String>,
}

pub type SplitLabeling = BTreeMap<String, SplitLabel>;

pub fn split_copy_name(state: &str, action: &str) -> String {
    format!("{state}^{action}")
}

/// Splits on `t`: one copy of every other state per action of `t`, so that
/// the current copy records the last action taken at `t`.
pub fn split(a: &InitializedArena, t: &str) -> Result<(InitializedArena, SplitLabeling), ArenaError> {
    let tid = a.arena.id(t)?;
    let n = a.arena.len();
    let t_actions = &a.arena.states[tid].actions;
    let k = t_actions.len();
    // Index layout: t first, then copy x (x = 0..k) of every state except t.
    let others: Vec<StateId> = (0..n).filter(|&s| s != tid).collect();
    let mut pos = vec![0usize; n];
    for (j, &s) in others.iter().enumerate() {
        pos[s] = j;
    }
    let id_in = |copy: usize, s: StateId| -> StateId {
        if s == tid {
            0
        } else {
            1 + copy * others.len() + pos[s]
        }
    };

    let mut states = Vec::with_capacity(1 + k * others.len());
    let mut labels = SplitLabeling::new();
    let t_state = &a.arena.states[tid];
    states.push(State {
        name: t_state.name.clone(),
        owner: t_state.owner,
        actions: t_actions.iter().enumerate().map(|(x, act)| relabel_action(act, &|s| id_in(x, s))).collect(),
    });
    labels.insert(t_state.name.clone(), SplitLabel { base: t_state.name.clone(), action: None });
    for (x, act) in t_actions.iter().enumerate() {
        for &s in &others {
            let base = &a.arena.states[s];
            let name = split_copy_name(&base.name, &act.name);
            labels.insert(name.clone(), SplitLabel { base: base.name.clone(), action: Some(act.name.clone()) });
            states.push(State {
                name,
                owner: base.owner,
                actions: base.actions.iter().map(|b| relabel_action(b, &|s2| id_in(x, s2))).collect(),
            });
        }
    }
    let mut initial = Vec::new();
    for x in 0..k {
        for &s in &a.initial {
            initial.push(id_in(x, s));
        }
    }
    let out = InitializedArena::from_ids(Arena::from_states(states)?, initial)?;
    labels.retain(|name, _| out.arena.get(name).is_some());
    Ok((out, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn one_loop(name: &str, action: &str) -> InitializedArena {
        let mut a = Arena::new();
        a.add_state(name, Player::One).unwrap();
        a.add_action(name, action, int(0), &[(name, int(1))]).unwrap();
        InitializedArena::new(a, &[name]).unwrap()
    }

    #[test]
    fn validate_reports_blocking_and_bad_sums() {
        let mut a = Arena::new();
        a.add_state("s", Player::One).unwrap();
        assert_eq!(a.validate(), vec!["blocking state s".to_string()]);

        a.add_state("u", Player::One).unwrap();
        a.add_action("u", "x", int(0), &[("s", ratio(1, 2)), ("u", ratio(1, 3))]).unwrap();
        let diags = a.validate();
        assert!(diags.iter().any(|d| d.starts_with("distribution sum ≠ 1 at u/x")));
        assert!(fixtures::weak_parity().arena().validate().is_empty());
    }

    #[test]
    fn initialized_arena_prunes_unreachable_states() {
        let mut a = Arena::new();
        a.add_state("s", Player::One).unwrap();
        a.add_state("orphan", Player::Two).unwrap();
        a.add_action("s", "x", int(0), &[("s", int(1))]).unwrap();
        a.add_action("orphan", "y", int(0), &[("s", int(1))]).unwrap();
        let ia = InitializedArena::new(a, &["s"]).unwrap();
        assert_eq!(ia.arena().len(), 1);
        assert!(ia.arena().get("orphan").is_none());
    }

    #[test]
    fn choice_count_of_fixture_and_subarena() {
        let fx = fixtures::weak_parity();
        assert_eq!(fx.choice_count(), 1);
        let keep = BTreeMap::from([("s2".to_string(), BTreeSet::from(["b".to_string()]))]);
        let sub = subarena(&fx, &keep).unwrap();
        assert_eq!(sub.choice_count(), 0);
        // the a-branch sink is no longer reachable
        assert!(sub.arena().get("r").is_none());
        assert_eq!(one_loop("z", "x").choice_count(), 0);
    }

    #[test]
    fn subarena_rejects_empty_sets() {
        let fx = fixtures::weak_parity();
        let keep = BTreeMap::from([("s2".to_string(), BTreeSet::new())]);
        assert_eq!(subarena(&fx, &keep), Err(ArenaError::EmptyActionSet("s2".into())));
        let keep = BTreeMap::from([("s2".to_string(), BTreeSet::from(["a".to_string()]))]);
        let sub = subarena(&fx, &keep).unwrap();
        assert_eq!(sub.arena().state(sub.arena().id("s2").unwrap()).actions.len(), 1);
    }

    #[test]
    fn prefix_extension_adds_a_chain() {
        let fx = fixtures::weak_parity();
        let (ext, head) = prefix_extend(&fx, &[int(0), int(1)], "s2").unwrap();
        assert_eq!(ext.arena().len(), fx.arena().len() + 2);
        assert_eq!(ext.choice_count(), fx.choice_count());
        let h = ext.arena().id(&head).unwrap();
        assert!(ext.initial().contains(&h));
        let first = &ext.arena().state(h).actions[0];
        assert_eq!(first.color, int(0));
        let second = &ext.arena().state(first.dist[0].0).actions[0];
        assert_eq!(second.color, int(1));
        assert_eq!(ext.arena().name(second.dist[0].0), "s2");
        for s in fx.arena().states() {
            let old = ext.arena().state(ext.arena().id(&s.name).unwrap());
            assert_eq!(old.actions.len(), s.actions.len());
        }
        assert_eq!(prefix_extend(&fx, &[], "s2").unwrap_err(), ArenaError::EmptyWord);
    }

    #[test]
    fn merge_two_loops() {
        let (m, t) = merge(&one_loop("p", "x"), "p", &one_loop("q", "y"), "q").unwrap();
        assert_eq!(m.len(), 1);
        let st = m.state(m.id(&t).unwrap());
        assert_eq!(st.actions.len(), 2);
        assert!(st.actions.iter().all(|a| a.dist == vec![(0, int(1))]));
        assert!(matches!(
            merge(&one_loop("p", "x"), "p", &one_loop("q", "x"), "q"),
            Err(ArenaError::ActionNameClash(_))
        ));
        let mut other = Arena::new();
        other.add_state("q", Player::Two).unwrap();
        other.add_action("q", "y", int(0), &[("q", int(1))]).unwrap();
        let other = InitializedArena::new(other, &["q"]).unwrap();
        assert!(matches!(merge(&one_loop("p", "x"), "p", &other, "q"), Err(ArenaError::OwnerMismatch(..))));
    }

    #[test]
    fn split_on_single_action_state_keeps_size() {
        let fx = fixtures::weak_parity();
        let (sp, labels) = split(&fx, "s1").unwrap();
        assert_eq!(sp.arena().len(), fx.arena().len());
        assert_eq!(sp.choice_count(), fx.choice_count());
        assert_eq!(labels.len(), sp.arena().len());
    }

    #[test]
    fn split_of_fixture_on_choice_state() {
        let fx = fixtures::weak_parity();
        let (sp, labels) = split(&fx, "s2").unwrap();
        // s1,u0,u1 reachable in both copies; copy a keeps r; copy b keeps v1,v2,q.
        let names: BTreeSet<&str> = sp.arena().states().iter().map(|s| s.name.as_str()).collect();
        let expected = ["s2", "s1^a", "u0^a", "u1^a", "r^a", "s1^b", "u0^b", "u1^b", "v1^b", "v2^b", "q^b"];
        assert_eq!(names, expected.into_iter().collect::<BTreeSet<_>>());
        assert_eq!(sp.choice_count(), fx.choice_count());
        for s in sp.arena().states() {
            let base = fx.arena().state(fx.arena().id(&labels[&s.name].base).unwrap());
            assert_eq!(base.owner, s.owner);
            let c1: Vec<_> = base.actions.iter().map(|a| &a.color).collect();
            let c2: Vec<_> = s.actions.iter().map(|a| &a.color).collect();
            assert_eq!(c1, c2);
        }
    }
}
