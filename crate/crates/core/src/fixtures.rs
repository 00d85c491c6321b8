//! Regression fixtures: the weak-parity memory example, the discounted
//! threshold counterexample and the split example.
//!
//! Colors live on (state, action) pairs, so a figure that colors the
//! individual branches of a random transition is encoded with one
//! intermediate single-action state per branch.

use crate::arena::{Arena, InitializedArena, Player};
use crate::characterize;
use crate::memory::trivial_skeleton;
use crate::rational::{int, ratio};

pub const NAMES: &[&str] = &["fig3", "fig4", "split-left", "split-right"];

/// One-player weak-parity arena where the best strategy must remember the
/// largest color seen: take the risky action `b` only after color 1.
///
/// ```text
/// s1 --0--> {1/2 u0, 1/2 u1};  u0 --0--> s2;  u1 --1--> s2
/// s2 --a,0--> r (0-loop)
/// s2 --b,0--> {1/2 v1, 1/2 v2};  v1 --1--> q;  v2 --2--> q (0-loop)
/// ```
pub fn weak_parity() -> InitializedArena {
    let mut a = Arena::new();
    for s in ["s1", "u0", "u1", "s2", "r", "v1", "v2", "q"] {
        a.add_state(s, Player::One).expect("fresh name");
    }
    let half = || ratio(1, 2);
    let mut add = |s: &str, x: &str, c: i64, dist: Vec<(&str, _)>| {
        a.add_action(s, x, int(c), &dist).expect("declared states");
    };
    add("s1", "go", 0, vec![("u0", half()), ("u1", half())]);
    add("u0", "go", 0, vec![("s2", int(1))]);
    add("u1", "go", 1, vec![("s2", int(1))]);
    add("s2", "a", 0, vec![("r", int(1))]);
    add("s2", "b", 0, vec![("v1", half()), ("v2", half())]);
    add("r", "loop", 0, vec![("r", int(1))]);
    add("v1", "go", 1, vec![("q", int(1))]);
    add("v2", "go", 2, vec![("q", int(1))]);
    add("q", "loop", 0, vec![("q", int(1))]);
    InitializedArena::new(a, &["s1"]).expect("valid fixture")
}

/// The discounted-threshold counterexample for the one-state skeleton, `λ = 1/2`.
pub fn discounted() -> InitializedArena {
    characterize::counterexample_arena(&trivial_skeleton(&[int(1)]), &ratio(1, 2))
        .expect("trivial skeleton always yields a counterexample")
        .0
}

/// Arena with a P1 state `t` offering `a` (random) and `b`, before splitting.
pub fn split_left() -> InitializedArena {
    let mut a = Arena::new();
    a.add_state("t", Player::One).unwrap();
    a.add_state("r", Player::One).unwrap();
    a.add_state("s", Player::Two).unwrap();
    let z = int(0);
    a.add_action("t", "a", z.clone(), &[("r", ratio(1, 2)), ("s", ratio(1, 2))]).unwrap();
    a.add_action("t", "b", z.clone(), &[("s", int(1))]).unwrap();
    a.add_action("r", "loop", z.clone(), &[("r", int(1))]).unwrap();
    a.add_action("s", "up", z.clone(), &[("r", int(1))]).unwrap();
    a.add_action("s", "back", z, &[("t", int(1))]).unwrap();
    InitializedArena::new(a, &["t", "s"]).unwrap()
}

/// The split of [`split_left`] on `t`, drawn by hand.
pub fn split_right() -> InitializedArena {
    let mut a = Arena::new();
    a.add_state("T", Player::One).unwrap();
    for c in ["A", "B"] {
        a.add_state(format!("R{c}"), Player::One).unwrap();
        a.add_state(format!("S{c}"), Player::Two).unwrap();
    }
    let z = int(0);
    a.add_action("T", "a", z.clone(), &[("RA", ratio(1, 2)), ("SA", ratio(1, 2))]).unwrap();
    a.add_action("T", "b", z.clone(), &[("SB", int(1))]).unwrap();
    for c in ["A", "B"] {
        let (r, s) = (format!("R{c}"), format!("S{c}"));
        a.add_action(&r, "loop", z.clone(), &[(&r, int(1))]).unwrap();
        a.add_action(&s, "up", z.clone(), &[(&r, int(1))]).unwrap();
        a.add_action(&s, "back", z.clone(), &[("T", int(1))]).unwrap();
    }
    InitializedArena::new(a, &["T", "SA", "SB"]).unwrap()
}

pub fn by_name(name: &str) -> Option<InitializedArena> {
    match name {
        "fig3" | "weak-parity" => Some(weak_parity()),
        "fig4" | "discounted" => Some(discounted()),
        "split-left" => Some(split_left()),
        "split-right" => Some(split_right()),
        _ => None,
    }
}
