//! Seeded generators for small arenas, skeletons and strategies.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::arena::{Arena, Color, InitializedArena, Player};
use crate::memory::MemorySkeleton;
use crate::rational::{int, ratio, Rational};
use crate::strategy::{MealyStrategy, MemorylessStrategy};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Who owns the states of a generated arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owners {
    Only(Player),
    /// Both players own states; those of the other player have one action.
    OnePlayer(Player),
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArenaSpec {
    pub max_states: usize,
    pub max_actions: usize,
    pub colors: Vec<Color>,
    pub owners: Owners,
    /// Every action goes to a single successor.
    pub deterministic: bool,
}

impl ArenaSpec {
    pub fn small(colors: Vec<Color>, owners: Owners) -> Self {
        ArenaSpec { max_states: 4, max_actions: 2, colors, owners, deterministic: false }
    }
}

pub fn weak_parity_colors() -> Vec<Color> {
    vec![int(0), int(1), int(2)]
}

fn distribution(rng: &mut Rng64, n: usize, deterministic: bool) -> Vec<(usize, Rational)> {
    let shapes: &[&[(i64, i64)]] = if deterministic {
        &[&[(1, 1)]]
    } else {
        &[&[(1, 1)], &[(1, 2), (1, 2)], &[(1, 3), (2, 3)]]
    };
    let shape = shapes[rng.gen_range(0..shapes.len())];
    let shape = if shape.len() > n { &[(1, 1)][..] } else { shape };
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    shape.iter().zip(targets).map(|(&(p, q), t)| (t, ratio(p, q))).collect()
}

/// A random initialized arena with states `s0, s1, …`, started from `s0`
/// and possibly one more state.
pub fn arena(rng: &mut Rng64, spec: &ArenaSpec) -> InitializedArena {
    let n = rng.gen_range(1..=spec.max_states);
    let mut a = Arena::new();
    let mut owners = Vec::with_capacity(n);
    for i in 0..n {
        let owner = match spec.owners {
            Owners::Only(p) => p,
            Owners::OnePlayer(_) | Owners::Both => {
                if rng.gen_bool(0.5) {
                    Player::One
                } else {
                    Player::Two
                }
            }
        };
        owners.push(owner);
        a.add_state(format!("s{i}"), owner).expect("fresh name");
    }
    for (i, &owner) in owners.iter().enumerate() {
        let single = matches!(spec.owners, Owners::OnePlayer(p) if p != owner);
        let k = if single { 1 } else { rng.gen_range(1..=spec.max_actions) };
        for j in 0..k {
            let color = spec.colors[rng.gen_range(0..spec.colors.len())].clone();
            let dist = distribution(rng, n, spec.deterministic);
            let dist: Vec<(String, Rational)> = dist.into_iter().map(|(t, p)| (format!("s{t}"), p)).collect();
            let dist: Vec<(&str, Rational)> = dist.iter().map(|(t, p)| (t.as_str(), p.clone())).collect();
            a.add_action(&format!("s{i}"), format!("a{j}"), color, &dist).expect("declared states");
        }
    }
    let mut initial = vec!["s0".to_string()];
    if n > 1 && rng.gen_bool(0.3) {
        initial.push(format!("s{}", rng.gen_range(1..n)));
    }
    InitializedArena::new(a, &initial).expect("valid random arena")
}

/// A random complete skeleton over `alphabet` with at most `max_states`
/// states (`m0` initial); unreachable states are dropped.
pub fn skeleton(rng: &mut Rng64, alphabet: &[Color], max_states: usize) -> MemorySkeleton {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let n = rng.gen_range(1..=max_states);
    let update = (0..n).map(|_| alphabet.iter().map(|_| rng.gen_range(0..n)).collect()).collect();
    MemorySkeleton::from_table(alphabet, (0..n).map(|i| format!("m{i}")).collect(), 0, update)
}

pub fn memoryless(rng: &mut Rng64, a: &Arena, player: Player) -> MemorylessStrategy {
    let choice = a
        .states()
        .iter()
        .filter(|s| s.owner == player)
        .map(|s| (s.name.clone(), s.actions[rng.gen_range(0..s.actions.len())].name.clone()))
        .collect();
    MemorylessStrategy { player, choice }
}

pub fn mealy(rng: &mut Rng64, a: &Arena, player: Player, k: &MemorySkeleton) -> MealyStrategy {
    let mut next = BTreeMap::new();
    for s in a.states().iter().filter(|s| s.owner == player) {
        let row = k
            .states()
            .iter()
            .map(|m| (m.clone(), s.actions[rng.gen_range(0..s.actions.len())].name.clone()))
            .collect();
        next.insert(s.name.clone(), row);
    }
    MealyStrategy { player, skeleton: k.clone(), next }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded() {
        let spec = ArenaSpec::small(weak_parity_colors(), Owners::Both);
        let a = arena(&mut rng(5), &spec);
        let b = arena(&mut rng(5), &spec);
        assert_eq!(a, b);
    }

    #[test]
    fn respects_the_spec() {
        let mut r = rng(11);
        for _ in 0..200 {
            let spec = ArenaSpec { deterministic: true, ..ArenaSpec::small(weak_parity_colors(), Owners::OnePlayer(Player::One)) };
            let a = arena(&mut r, &spec);
            assert!(a.arena().len() <= 4);
            assert!(a.is_one_player(Player::One));
            assert!(a.arena().states().iter().all(|s| s.actions.iter().all(|x| x.dist.len() == 1)));
            let k = skeleton(&mut r, &weak_parity_colors(), 3);
            assert!(k.len() <= 3);
        }
    }
}
