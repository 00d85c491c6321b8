//! Products with skeletons, coverability, and strategy transfers between an
//! arena and its product or its split.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::arena::{split_copy_name, Action, Arena, InitializedArena, SplitLabeling, StateId};
use crate::memory::MemorySkeleton;
use crate::rational;
use crate::strategy::{MealyStrategy, MemorylessStrategy, SplitTrackingStrategy};
use crate::Error;

pub fn product_state_name(state: &str, memory: &str) -> String {
    format!("({state},{memory})")
}

/// Product state name → `(base state, memory state)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductMap {
    pub forward: BTreeMap<String, (String, String)>,
}

/// Product of `a` with `k`: states are the `(s, m)` pairs reachable from
/// `initial × {m_init}`; actions and colors are those of `s`.
pub fn product_arena(a: &InitializedArena, k: &MemorySkeleton) -> Result<(InitializedArena, ProductMap), Error> {
    let base = a.arena();
    let letters: Vec<Vec<usize>> = base
        .states()
        .iter()
        .map(|s| s.actions.iter().map(|x| k.letter(&x.color)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let mut index: BTreeMap<(StateId, usize), StateId> = BTreeMap::new();
    let mut order: Vec<(StateId, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    for &s in a.initial() {
        if let std::collections::btree_map::Entry::Vacant(e) = index.entry((s, k.initial())) {
            e.insert(order.len());
            order.push((s, k.initial()));
            queue.push_back((s, k.initial()));
        }
    }
    while let Some((s, m)) = queue.pop_front() {
        for (xi, x) in base.state(s).actions.iter().enumerate() {
            let m2 = k.step_letter(m, letters[s][xi]);
            for (t, _) in &x.dist {
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry((*t, m2)) {
                    e.insert(order.len());
                    order.push((*t, m2));
                    queue.push_back((*t, m2));
                }
            }
        }
    }
    let mut out = Arena::new();
    let mut forward = BTreeMap::new();
    for &(s, m) in &order {
        let st = base.state(s);
        let name = product_state_name(&st.name, k.state_name(m));
        out.add_state(name.clone(), st.owner)?;
        forward.insert(name, (st.name.clone(), k.state_name(m).to_string()));
    }
    for (id, &(s, m)) in order.iter().enumerate() {
        for (xi, x) in base.state(s).actions.iter().enumerate() {
            let m2 = k.step_letter(m, letters[s][xi]);
            let dist = x.dist.iter().map(|(t, p)| (index[&(*t, m2)], p.clone())).collect();
            out.push_action(id, Action { name: x.name.clone(), color: x.color.clone(), dist });
        }
    }
    let initial = a.initial().iter().map(|&s| index[&(s, k.initial())]).collect();
    Ok((InitializedArena::from_ids(out, initial)?, ProductMap { forward }))
}

/// Assignment of a memory state to every arena state, by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverWitness {
    pub assignment: BTreeMap<String, String>,
}

/// How a memory state was forced on a state: from an initial state, or
/// through a transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub memory: String,
    /// `None` for an initial state; otherwise `(source, action, color)`.
    pub via: Option<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverConflict {
    pub state: String,
    pub first: Derivation,
    pub second: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Coverage {
    Covered(CoverWitness),
    Conflict(CoverConflict),
}

impl Coverage {
    pub fn witness(&self) -> Option<&CoverWitness> {
        match self {
            Coverage::Covered(w) => Some(w),
            Coverage::Conflict(_) => None,
        }
    }
}

/// Decides whether `a` is covered by `k` by propagating memory states
/// forward from the initial states, which all get `m_init`.
pub fn cover_witness(a: &InitializedArena, k: &MemorySkeleton) -> Result<Coverage, Error> {
    let base = a.arena();
    let mut assigned: Vec<Option<(usize, Derivation)>> = vec![None; base.len()];
    let mut queue = VecDeque::new();
    for &s in a.initial() {
        assigned[s] = Some((k.initial(), Derivation { memory: k.state_name(k.initial()).to_string(), via: None }));
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        let m = assigned[s].as_ref().expect("queued states are assigned").0;
        let st = base.state(s);
        for x in &st.actions {
            let m2 = k.step(m, &x.color)?;
            for (t, _) in &x.dist {
                let derivation = Derivation {
                    memory: k.state_name(m2).to_string(),
                    via: Some((st.name.clone(), x.name.clone(), rational::format(&x.color))),
                };
                match &assigned[*t] {
                    None => {
                        assigned[*t] = Some((m2, derivation));
                        queue.push_back(*t);
                    }
                    Some((prev, first)) if *prev != m2 => {
                        return Ok(Coverage::Conflict(CoverConflict {
                            state: base.name(*t).to_string(),
                            first: first.clone(),
                            second: derivation,
                        }));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let assignment = assigned
        .into_iter()
        .enumerate()
        .map(|(s, m)| (base.name(s).to_string(), k.state_name(m.expect("all states reachable").0).to_string()))
        .collect();
    Ok(Coverage::Covered(CoverWitness { assignment }))
}

/// A Mealy strategy on `a` as a memoryless strategy on `a ⊗ skeleton`.
pub fn mealy_to_memoryless(
    a: &InitializedArena,
    sigma: &MealyStrategy,
) -> Result<(InitializedArena, ProductMap, MemorylessStrategy), Error> {
    let (prod, map) = product_arena(a, &sigma.skeleton)?;
    let mut choice = BTreeMap::new();
    for st in prod.arena().states() {
        if st.owner != sigma.player {
            continue;
        }
        let (s, m) = &map.forward[&st.name];
        if let Some(x) = sigma.action(s, m) {
            choice.insert(st.name.clone(), x.to_string());
        }
    }
    Ok((prod, map, MemorylessStrategy { player: sigma.player, choice }))
}

/// A memoryless strategy on a product as a Mealy strategy on `k`. Pairs
/// absent from the product play the state's first action.
pub fn memoryless_to_mealy(
    base: &Arena,
    map: &ProductMap,
    tau: &MemorylessStrategy,
    k: &MemorySkeleton,
) -> MealyStrategy {
    let mut next: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for st in base.states() {
        if st.owner != tau.player {
            continue;
        }
        let row = k
            .states()
            .iter()
            .map(|m| {
                let x = tau
                    .get(&product_state_name(&st.name, m))
                    .filter(|_| map.forward.contains_key(&product_state_name(&st.name, m)))
                    .unwrap_or(&st.actions[0].name);
                (m.clone(), x.to_string())
            })
            .collect();
        next.insert(st.name.clone(), row);
    }
    MealyStrategy { player: tau.player, skeleton: k.clone(), next }
}

/// A Mealy strategy on `a` as the corresponding strategy on the split on
/// `t`. The split already records the last action taken at `t` in its
/// states, so the skeleton is unchanged and `next(s^x, m) = next(s, m)`.
/// The result is meant to be played from the `seed` copies of the initial
/// states, which are returned alongside.
pub fn strategy_across_split(
    a: &InitializedArena,
    t: &str,
    sigma: &MealyStrategy,
    seed: &str,
) -> Result<(InitializedArena, SplitLabeling, MealyStrategy, Vec<String>), Error> {
    let tid = a.arena().id(t)?;
    if a.arena().state(tid).action_index(seed).is_none() {
        return Err(Error::UnknownAction { player: a.arena().state(tid).owner, state: t.to_string(), action: seed.to_string() });
    }
    let (sp, labels) = crate::arena::split(a, t)?;
    let mut next = BTreeMap::new();
    for (name, label) in &labels {
        if let Some(row) = sigma.next.get(&label.base) {
            next.insert(name.clone(), row.clone());
        }
    }
    let initial = a
        .initial_names()
        .iter()
        .map(|s| if s == t { s.clone() } else { split_copy_name(s, seed) })
        .filter(|s| sp.arena().get(s).is_some())
        .collect();
    Ok((sp, labels, MealyStrategy { player: sigma.player, skeleton: sigma.skeleton.clone(), next }, initial))
}

/// Same as [`strategy_across_split`] for memoryless strategies.
pub fn memoryless_across_split(
    labels: &SplitLabeling,
    sigma: &MemorylessStrategy,
) -> MemorylessStrategy {
    let mut choice = BTreeMap::new();
    for (name, label) in labels {
        if let Some(x) = sigma.get(&label.base) {
            choice.insert(name.clone(), x.to_string());
        }
    }
    MemorylessStrategy { player: sigma.player, choice }
}

/// Strategies on the base arena obtained from a profile on its split on `t`
/// where the `t` owner's strategy is memoryless and plays `a_star` at `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitProjection {
    /// Memoryless: plays as in the `a_star` copy.
    pub owner: MemorylessStrategy,
    /// Plays as in the copy of the last action taken at `t`.
    pub other: SplitTrackingStrategy,
}

pub fn split_projection(
    base: &Arena,
    t: &str,
    labels: &SplitLabeling,
    owner: &MemorylessStrategy,
    other: &MealyStrategy,
    a_star: &str,
) -> Result<SplitProjection, Error> {
    let found = owner.get(t).unwrap_or_default();
    if found != a_star {
        return Err(Error::SeedMismatch { expected: a_star.to_string(), found: found.to_string() });
    }
    let copies: BTreeMap<&str, &str> = labels
        .iter()
        .filter(|(_, l)| l.action.as_deref() == Some(a_star))
        .map(|(name, l)| (l.base.as_str(), name.as_str()))
        .collect();
    let mut choice = BTreeMap::new();
    for st in base.states() {
        if st.owner != owner.player {
            continue;
        }
        let x = if st.name == t { Some(a_star) } else { copies.get(st.name.as_str()).and_then(|c| owner.get(c)) };
        choice.insert(st.name.clone(), x.unwrap_or(&st.actions[0].name).to_string());
    }
    Ok(SplitProjection {
        owner: MemorylessStrategy { player: owner.player, choice },
        other: SplitTrackingStrategy { t: t.to_string(), seed: a_star.to_string(), inner: other.clone() },
    })
}

/// The unique strategy on a choice-free part, or the restriction of `a` to
/// the choices of `sigma` at the states it lists.
pub fn fix_strategy(a: &InitializedArena, sigma: &MemorylessStrategy) -> Result<InitializedArena, Error> {
    let mut keep = BTreeMap::new();
    for st in a.arena().states() {
        if st.owner == sigma.player {
            if let Some(x) = sigma.get(&st.name) {
                keep.insert(st.name.clone(), std::collections::BTreeSet::from([x.to_string()]));
            }
        }
    }
    Ok(crate::arena::subarena(a, &keep)?)
}

/// The memoryless strategy on `a` equivalent to a Mealy strategy on a
/// skeleton covering `a`.
pub fn mealy_on_covered(
    a: &Arena,
    witness: &CoverWitness,
    sigma: &MealyStrategy,
) -> MemorylessStrategy {
    let mut choice = BTreeMap::new();
    for st in a.states() {
        if st.owner != sigma.player {
            continue;
        }
        if let Some(x) = witness.assignment.get(&st.name).and_then(|m| sigma.action(&st.name, m)) {
            choice.insert(st.name.clone(), x.to_string());
        }
    }
    MemorylessStrategy { player: sigma.player, choice }
}

/// A memoryless strategy on an arena covered by `k` as a Mealy strategy on `k`.
pub fn memoryless_on_covered(
    a: &Arena,
    witness: &CoverWitness,
    tau: &MemorylessStrategy,
    k: &MemorySkeleton,
) -> MealyStrategy {
    let mut next: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (id, st) in a.states().iter().enumerate() {
        if st.owner != tau.player {
            continue;
        }
        let here = tau.action_at(a, id).unwrap_or(&st.actions[0].name);
        let mem = &witness.assignment[&st.name];
        let row = k
            .states()
            .iter()
            .map(|m| (m.clone(), if m == mem { here } else { st.actions[0].name.as_str() }.to_string()))
            .collect();
        next.insert(st.name.clone(), row);
    }
    MealyStrategy { player: tau.player, skeleton: k.clone(), next }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Player;
    use crate::rational::Rational;
    use crate::chain::evaluate_plain;
    use crate::fixtures;
    use crate::iso::{isomorphic, isomorphic_with_cap};
    use crate::memory::{m_max, trivial_skeleton};
    use crate::objective::Objective;
    use crate::rational::{int, ratio};
    use crate::strategy::Profile;

    fn colors() -> Vec<Rational> {
        vec![int(0), int(1), int(2)]
    }

    fn fig3_mealy() -> MealyStrategy {
        let k = m_max(&colors()).unwrap();
        let mut next = BTreeMap::new();
        next.insert(
            "s2".to_string(),
            BTreeMap::from([
                ("0".to_string(), "a".to_string()),
                ("1".to_string(), "b".to_string()),
                ("2".to_string(), "a".to_string()),
            ]),
        );
        MealyStrategy { player: Player::One, skeleton: k, next }
    }

    #[test]
    fn product_with_trivial_is_isomorphic() {
        let fx = fixtures::weak_parity();
        let (p, _) = product_arena(&fx, &trivial_skeleton(&colors())).unwrap();
        assert!(isomorphic(&fx, &p).unwrap().is_some());
    }

    #[test]
    fn product_with_mmax_splits_s2() {
        let fx = fixtures::weak_parity();
        let (p, map) = product_arena(&fx, &m_max(&colors()).unwrap()).unwrap();
        assert!(p.arena().get("(s2,0)").is_some());
        assert!(p.arena().get("(s2,1)").is_some());
        assert_eq!(map.forward["(s2,1)"], ("s2".to_string(), "1".to_string()));
        assert!(p.arena().validate().is_empty());
        let cov = cover_witness(&p, &m_max(&colors()).unwrap()).unwrap();
        let w = cov.witness().expect("products are covered");
        for (name, (_, m)) in &map.forward {
            assert_eq!(&w.assignment[name], m);
        }
    }

    #[test]
    fn product_rejects_foreign_colors() {
        let fx = fixtures::weak_parity();
        assert!(product_arena(&fx, &trivial_skeleton(&[int(0)])).is_err());
    }

    #[test]
    fn cover_conflict_at_s2() {
        let fx = fixtures::weak_parity();
        match cover_witness(&fx, &m_max(&colors()).unwrap()).unwrap() {
            Coverage::Conflict(c) => {
                assert_eq!(c.state, "s2");
                assert_ne!(c.first.memory, c.second.memory);
            }
            other => panic!("expected conflict, got {other:?}"),
        }
        let triv = cover_witness(&fx, &trivial_skeleton(&colors())).unwrap();
        assert!(triv.witness().unwrap().assignment.values().all(|m| m == "init"));
    }

    #[test]
    fn mealy_round_trip_preserves_value() {
        let fx = fixtures::weak_parity();
        let sigma = fig3_mealy();
        let (prod, map, tau) = mealy_to_memoryless(&fx, &sigma).unwrap();
        assert_eq!(tau.get("(s2,0)"), Some("a"));
        assert_eq!(tau.get("(s2,1)"), Some("b"));
        let wp = Objective::WeakParity;
        let none = MemorylessStrategy::new(Player::Two);
        let base_value = evaluate_plain(&fx, &Profile::new(sigma.clone(), none.clone()), &wp).unwrap();
        let prod_value = evaluate_plain(&prod, &Profile::new(tau.clone(), none), &wp).unwrap();
        assert_eq!(base_value, vec![ratio(3, 4)]);
        assert_eq!(base_value, prod_value);
        let back = memoryless_to_mealy(fx.arena(), &map, &tau, &sigma.skeleton);
        assert_eq!(back.action("s2", "0"), Some("a"));
        assert_eq!(back.action("s2", "1"), Some("b"));
        // (s2,2) is unreachable: first action.
        assert_eq!(back.action("s2", "2"), Some("a"));
    }

    #[test]
    fn memoryless_on_trivial_round_trips() {
        let fx = fixtures::weak_parity();
        let k = trivial_skeleton(&colors());
        let sigma = MemorylessStrategy::new(Player::One).with("s2", "b");
        let mealy = MealyStrategy::from_memoryless(fx.arena(), &sigma, k.clone());
        let (_, map, tau) = mealy_to_memoryless(&fx, &mealy).unwrap();
        assert_eq!(tau.get("(s2,init)"), Some("b"));
        let back = memoryless_to_mealy(fx.arena(), &map, &tau, &k);
        assert_eq!(back, mealy);
    }

    #[test]
    fn split_transfer_preserves_values() {
        let fx = fixtures::weak_parity();
        let wp = Objective::WeakParity;
        let none = MemorylessStrategy::new(Player::Two);
        for seed in ["a", "b"] {
            let sigma = fig3_mealy();
            let (sp, _, moved, initial) = strategy_across_split(&fx, "s2", &sigma, seed).unwrap();
            let start = sp.with_initial(&initial).unwrap();
            let v = evaluate_plain(&start, &Profile::new(moved, none.clone()), &wp).unwrap();
            assert_eq!(v, vec![ratio(3, 4)]);
        }
        assert!(strategy_across_split(&fx, "s2", &fig3_mealy(), "c").is_err());
    }

    #[test]
    fn projection_checks_seed() {
        let (sp, labels) = crate::arena::split(&fixtures::split_left(), "t").unwrap();
        let sigma = MemorylessStrategy::first_actions(sp.arena(), Player::One);
        let other = MealyStrategy::from_memoryless(
            sp.arena(),
            &MemorylessStrategy::first_actions(sp.arena(), Player::Two),
            trivial_skeleton(&[int(0)]),
        );
        let base = fixtures::split_left();
        let proj = split_projection(base.arena(), "t", &labels, &sigma, &other, "a").unwrap();
        assert_eq!(proj.owner.get("t"), Some("a"));
        let err = split_projection(base.arena(), "t", &labels, &sigma, &other, "b").unwrap_err();
        assert!(matches!(err, Error::SeedMismatch { .. }));
    }

    #[test]
    fn covered_arena_is_isomorphic_to_its_product() {
        let fx = fixtures::weak_parity();
        let k = m_max(&colors()).unwrap();
        let (p, _) = product_arena(&fx, &k).unwrap();
        let (pp, _) = product_arena(&p, &k).unwrap();
        assert!(isomorphic_with_cap(&p, &pp, 16).unwrap().is_some());
    }
}
