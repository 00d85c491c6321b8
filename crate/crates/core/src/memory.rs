//! Memory skeletons: complete deterministic automata over a finite color alphabet.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::arena::{Color, InitializedArena};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MemoryError {
    #[error("skeletons have different alphabets")]
    AlphabetMismatch,
    #[error("color {} is not in the skeleton alphabet", rational::format(.0))]
    ColorNotInAlphabet(Color),
    #[error("color {} is not a non-negative integer", rational::format(.0))]
    NonIntegerColor(Color),
    #[error("unknown memory state {0:?}")]
    UnknownState(String),
    #[error("duplicate memory state {0:?}")]
    DuplicateState(String),
    #[error("update undefined for memory state {state:?} and color {color}")]
    IncompleteUpdate { state: String, color: String },
    #[error("a skeleton needs at least one memory state")]
    Empty,
}

/// `(M, m_init, α_upd)` restricted to an explicit alphabet.
///
/// Only memory states reachable from the initial one are kept; the initial
/// state always has index 0 after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorySkeleton {
    alphabet: Vec<Color>,
    letter: HashMap<Color, usize>,
    states: Vec<String>,
    initial: usize,
    /// `update[m][c]` with `c` an index into `alphabet`.
    update: Vec<Vec<usize>>,
}

impl MemorySkeleton {
    /// Builds a skeleton from named states and a total update table.
    pub fn new(
        alphabet: Vec<Color>,
        states: Vec<String>,
        initial: &str,
        update: &BTreeMap<String, BTreeMap<Color, String>>,
    ) -> Result<Self, MemoryError> {
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(MemoryError::DuplicateState(s.clone()));
            }
        }
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| MemoryError::UnknownState(name.to_string()));
        let init = lookup(initial)?;
        let mut table = Vec::with_capacity(states.len());
        for s in &states {
            let row = update.get(s);
            let mut out = Vec::with_capacity(alphabet.len());
            for c in &alphabet {
                let target = row.and_then(|r| r.get(c)).ok_or_else(|| MemoryError::IncompleteUpdate {
                    state: s.clone(),
                    color: rational::format(c),
                })?;
                out.push(lookup(target)?);
            }
            table.push(out);
        }
        Ok(Self::from_table(alphabet, states, init, table))
    }

    /// Builds from index tables, pruning unreachable states and moving the initial state to index 0.
    pub(crate) fn from_table(alphabet: Vec<Color>, states: Vec<String>, initial: usize, update: Vec<Vec<usize>>) -> Self {
        let mut order = vec![initial];
        let mut remap = vec![usize::MAX; states.len()];
        remap[initial] = 0;
        let mut queue = VecDeque::from([initial]);
        while let Some(m) = queue.pop_front() {
            for &n in &update[m] {
                if remap[n] == usize::MAX {
                    remap[n] = order.len();
                    order.push(n);
                    queue.push_back(n);
                }
            }
        }
        let letter = alphabet.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        MemorySkeleton {
            letter,
            states: order.iter().map(|&m| states[m].clone()).collect(),
            initial: 0,
            update: order.iter().map(|&m| update[m].iter().map(|&n| remap[n]).collect()).collect(),
            alphabet,
        }
    }

    pub fn alphabet(&self) -> &[Color] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_name(&self, m: usize) -> &str {
        &self.states[m]
    }

    pub fn state_id(&self, name: &str) -> Result<usize, MemoryError> {
        self.states.iter().position(|s| s == name).ok_or_else(|| MemoryError::UnknownState(name.to_string()))
    }

    pub fn letter(&self, color: &Color) -> Result<usize, MemoryError> {
        self.letter.get(color).copied().ok_or_else(|| MemoryError::ColorNotInAlphabet(color.clone()))
    }

    pub fn step(&self, m: usize, color: &Color) -> Result<usize, MemoryError> {
        Ok(self.update[m][self.letter(color)?])
    }

    pub(crate) fn step_letter(&self, m: usize, letter: usize) -> usize {
        self.update[m][letter]
    }

    pub fn run_from(&self, m: usize, word: &[Color]) -> Result<usize, MemoryError> {
        word.iter().try_fold(m, |m, c| self.step(m, c))
    }

    /// `α̂_upd(m_init, word)`.
    pub fn run(&self, word: &[Color]) -> Result<usize, MemoryError> {
        self.run_from(self.initial, word)
    }

    /// Shortest word leading from `from` to `to`; among shortest words the
    /// first in alphabet order.
    pub fn representative_word(&self, from: usize, to: usize) -> Option<Vec<Color>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(m) = queue.pop_front() {
            if m == to {
                let mut word = Vec::new();
                let mut cur = m;
                while let Some((prev, c)) = parent[cur] {
                    word.push(self.alphabet[c].clone());
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            for (c, &n) in self.update[m].iter().enumerate() {
                if !seen[n] {
                    seen[n] = true;
                    parent[n] = Some((m, c));
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Same skeleton over a larger alphabet; the new colors leave memory unchanged.
    pub fn with_self_loops(&self, colors: &[Color]) -> MemorySkeleton {
        let mut alphabet = self.alphabet.clone();
        alphabet.extend(colors.iter().filter(|c| !self.letter.contains_key(c)).cloned());
        alphabet.sort();
        alphabet.dedup();
        let update = (0..self.len())
            .map(|m| {
                alphabet
                    .iter()
                    .map(|c| self.letter.get(c).map_or(m, |&l| self.update[m][l]))
                    .collect()
            })
            .collect();
        Self::from_table(alphabet, self.states.clone(), self.initial, update)
    }

    /// Structural equality up to renaming of memory states.
    pub fn is_isomorphic(&self, other: &MemorySkeleton) -> bool {
        if self.alphabet != other.alphabet || self.len() != other.len() {
            return false;
        }
        let mut map = vec![usize::MAX; self.len()];
        map[self.initial] = other.initial;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(m) = queue.pop_front() {
            for c in 0..self.alphabet.len() {
                let (a, b) = (self.update[m][c], other.update[map[m]][c]);
                if map[a] == usize::MAX {
                    map[a] = b;
                    queue.push_back(a);
                } else if map[a] != b {
                    return false;
                }
            }
        }
        let mut image = map.clone();
        image.sort_unstable();
        image.dedup();
        image.len() == self.len()
    }
}

/// One memory state reading every color as a self-loop.
pub fn trivial_skeleton(alphabet: &[Color]) -> MemorySkeleton {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let row = vec![0; alphabet.len()];
    MemorySkeleton::from_table(alphabet, vec!["init".to_string()], 0, vec![row])
}

/// Remembers the greatest color seen: states `{0} ∪ colors`, update `max`.
pub fn m_max(colors: &[Color]) -> Result<MemorySkeleton, MemoryError> {
    for c in colors {
        if rational::as_natural(c).is_none() {
            return Err(MemoryError::NonIntegerColor(c.clone()));
        }
    }
    let mut alphabet = colors.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let mut values = alphabet.clone();
    values.push(rational::int(0));
    values.sort();
    values.dedup();
    let update = values
        .iter()
        .map(|m| {
            alphabet
                .iter()
                .map(|c| values.iter().position(|v| v == std::cmp::max(m, c)).expect("max is a state"))
                .collect()
        })
        .collect();
    let names = values.iter().map(rational::format).collect();
    Ok(MemorySkeleton::from_table(alphabet, names, 0, update))
}

/// Reachable part of the synchronized product, named `(m1,m2)`.
pub fn skeleton_product(k1: &MemorySkeleton, k2: &MemorySkeleton) -> Result<MemorySkeleton, MemoryError> {
    if k1.alphabet != k2.alphabet {
        return Err(MemoryError::AlphabetMismatch);
    }
    let n2 = k2.len();
    let pair = |a: usize, b: usize| a * n2 + b;
    let states = (0..k1.len())
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", k1.states[a], k2.states[b]))
        .collect();
    let update = (0..k1.len())
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .map(|(a, b)| (0..k1.alphabet.len()).map(|c| pair(k1.update[a][c], k2.update[b][c])).collect())
        .collect();
    Ok(MemorySkeleton::from_table(k1.alphabet.clone(), states, pair(k1.initial, k2.initial), update))
}

/// Memory states other than `m` reached at `state` when `arena` is started at
/// `state` with memory `m`, in discovery order.
pub fn cycle_class_violations(
    arena: &InitializedArena,
    state: &str,
    k: &MemorySkeleton,
    m: usize,
) -> Result<Vec<usize>, crate::Error> {
    let a = arena.arena();
    let start = a.id(state)?;
    let mut seen = vec![vec![false; k.len()]; a.len()];
    seen[start][m] = true;
    let mut queue = VecDeque::from([(start, m)]);
    let mut bad = Vec::new();
    while let Some((s, mem)) = queue.pop_front() {
        if s == start && mem != m {
            bad.push(mem);
        }
        for act in &a.state(s).actions {
            let next = k.step(mem, &act.color)?;
            for (t, _) in &act.dist {
                if !seen[*t][next] {
                    seen[*t][next] = true;
                    queue.push_back((*t, next));
                }
            }
        }
    }
    Ok(bad)
}

/// True iff every return to `state` from `(state, m)` happens with memory `m`.
pub fn cycle_class_check(
    arena: &InitializedArena,
    state: &str,
    k: &MemorySkeleton,
    m: usize,
) -> Result<bool, crate::Error> {
    Ok(cycle_class_violations(arena, state, k, m)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{Arena, Player};
    use crate::rational::int;
    use proptest::prelude::*;

    fn colors(cs: &[i64]) -> Vec<Color> {
        cs.iter().map(|&c| int(c)).collect()
    }

    fn parity_counter() -> MemorySkeleton {
        // counts 1s modulo 2, ignores 0
        let update = BTreeMap::from([
            ("e".to_string(), BTreeMap::from([(int(0), "e".to_string()), (int(1), "o".to_string())])),
            ("o".to_string(), BTreeMap::from([(int(0), "o".to_string()), (int(1), "e".to_string())])),
        ]);
        MemorySkeleton::new(colors(&[0, 1]), vec!["e".into(), "o".into()], "e", &update).unwrap()
    }

    #[test]
    fn trivial_has_one_state() {
        let k = trivial_skeleton(&colors(&[0, 1]));
        assert_eq!(k.len(), 1);
        assert_eq!(k.run(&colors(&[1, 0, 1, 1])).unwrap(), 0);
        assert_eq!(k.representative_word(0, 0), Some(vec![]));
    }

    #[test]
    fn m_max_runs_running_maximum() {
        let k = m_max(&colors(&[0, 1, 2])).unwrap();
        assert_eq!(k.states(), &["0", "1", "2"]);
        assert_eq!(k.state_name(k.run(&colors(&[1, 0, 2])).unwrap()), "2");
        assert_eq!(k.state_name(k.run(&colors(&[1, 2, 1])).unwrap()), "2");
        assert_eq!(k.run(&[]).unwrap(), 0);
        assert_eq!(k.representative_word(0, k.state_id("2").unwrap()), Some(colors(&[2])));
        assert_eq!(k.representative_word(0, 0), Some(vec![]));
        assert_eq!(k.representative_word(k.state_id("2").unwrap(), 0), None);
        assert_eq!(m_max(&[crate::rational::ratio(1, 2)]), Err(MemoryError::NonIntegerColor(crate::rational::ratio(1, 2))));
        assert_eq!(k.run(&colors(&[3])), Err(MemoryError::ColorNotInAlphabet(int(3))));
    }

    #[test]
    fn products() {
        let t = trivial_skeleton(&colors(&[0, 1]));
        let p = parity_counter();
        assert!(skeleton_product(&t, &p).unwrap().is_isomorphic(&p));
        assert!(skeleton_product(&p, &t).unwrap().is_isomorphic(&p));
        let mm = m_max(&colors(&[0, 1])).unwrap();
        let mm2 = skeleton_product(&mm, &mm).unwrap();
        assert_eq!(mm2.states(), &["(0,0)", "(1,1)"]);
        assert!(mm2.is_isomorphic(&mm));
        assert!(!p.is_isomorphic(&mm));
        let other = trivial_skeleton(&colors(&[0, 2]));
        assert_eq!(skeleton_product(&t, &other), Err(MemoryError::AlphabetMismatch));
        let pm = skeleton_product(&p, &mm).unwrap();
        let w = colors(&[0, 1, 1, 0, 1]);
        let name = pm.state_name(pm.run(&w).unwrap()).to_string();
        assert_eq!(name, format!("({},{})", p.state_name(p.run(&w).unwrap()), mm.state_name(mm.run(&w).unwrap())));
    }

    #[test]
    fn product_is_associative_up_to_isomorphism() {
        let p = parity_counter();
        let mm = m_max(&colors(&[0, 1])).unwrap();
        let t = trivial_skeleton(&colors(&[0, 1]));
        let left = skeleton_product(&skeleton_product(&p, &mm).unwrap(), &t).unwrap();
        let right = skeleton_product(&p, &skeleton_product(&mm, &t).unwrap()).unwrap();
        assert!(left.is_isomorphic(&right));
    }

    #[test]
    fn new_rejects_incomplete_tables() {
        let update = BTreeMap::from([("e".to_string(), BTreeMap::from([(int(0), "e".to_string())]))]);
        let err = MemorySkeleton::new(colors(&[0, 1]), vec!["e".into()], "e", &update).unwrap_err();
        assert!(matches!(err, MemoryError::IncompleteUpdate { .. }));
    }

    fn cyclic(color: i64) -> InitializedArena {
        let mut a = Arena::new();
        a.add_state("s", Player::One).unwrap();
        a.add_action("s", "x", int(color), &[("s", int(1))]).unwrap();
        InitializedArena::new(a, &["s"]).unwrap()
    }

    #[test]
    fn cycle_classes() {
        let mm = m_max(&colors(&[0, 1, 2])).unwrap();
        let t = trivial_skeleton(&colors(&[0, 1, 2]));
        assert!(cycle_class_check(&cyclic(2), "s", &t, 0).unwrap());
        assert!(cycle_class_check(&cyclic(0), "s", &mm, 0).unwrap());
        assert!(!cycle_class_check(&cyclic(2), "s", &mm, mm.state_id("1").unwrap()).unwrap());
    }

    proptest! {
        #[test]
        fn run_is_a_monoid_action(u in proptest::collection::vec(0i64..3, 0..8), v in proptest::collection::vec(0i64..3, 0..8)) {
            let mm = m_max(&colors(&[0, 1, 2])).unwrap();
            let p = skeleton_product(&mm, &trivial_skeleton(&colors(&[0, 1, 2]))).unwrap();
            for k in [&mm, &p] {
                let (u, v) = (colors(&u), colors(&v));
                let uv: Vec<Color> = u.iter().chain(v.iter()).cloned().collect();
                prop_assert_eq!(k.run(&uv).unwrap(), k.run_from(k.run(&u).unwrap(), &v).unwrap());
            }
        }

        #[test]
        fn m_max_is_monotone(w in proptest::collection::vec(0i64..3, 0..10)) {
            let mm = m_max(&colors(&[0, 1, 2])).unwrap();
            let w = colors(&w);
            let mut prev = int(0);
            for i in 0..=w.len() {
                let cur = rational::parse(mm.state_name(mm.run(&w[..i]).unwrap())).unwrap();
                prop_assert!(prev <= cur);
                prev = cur;
            }
        }
    }
}
