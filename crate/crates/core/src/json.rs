//! JSON forms of arenas, skeletons and strategies. Every rational is a
//! `"p/q"` string; floats are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, InitializedArena, Player};
use crate::memory::MemorySkeleton;
use crate::rational::{self, RatStr};
use crate::strategy::{MealyStrategy, MemorylessStrategy, Profile, Strategy};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub name: String,
    pub owner: Player,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionJson {
    pub name: String,
    pub color: RatStr,
    pub dist: Vec<(String, RatStr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaJson {
    pub states: Vec<StateJson>,
    pub actions: BTreeMap<String, Vec<ActionJson>>,
    pub initial: Vec<String>,
}

impl ArenaJson {
    pub fn from_arena(a: &InitializedArena) -> Self {
        let arena = a.arena();
        let states = arena.states().iter().map(|s| StateJson { name: s.name.clone(), owner: s.owner }).collect();
        let actions = arena
            .states()
            .iter()
            .map(|s| {
                let list = s
                    .actions
                    .iter()
                    .map(|x| ActionJson {
                        name: x.name.clone(),
                        color: RatStr(x.color.clone()),
                        dist: x.dist.iter().map(|(t, p)| (arena.name(*t).to_string(), RatStr(p.clone()))).collect(),
                    })
                    .collect();
                (s.name.clone(), list)
            })
            .collect();
        ArenaJson { states, actions, initial: a.initial_names() }
    }

    pub fn to_arena(&self) -> Result<InitializedArena, Error> {
        let mut arena = Arena::new();
        for s in &self.states {
            arena.add_state(s.name.clone(), s.owner)?;
        }
        for name in self.actions.keys() {
            arena.id(name)?;
        }
        for s in &self.states {
            for x in self.actions.get(&s.name).into_iter().flatten() {
                let dist: Vec<(&str, _)> = x.dist.iter().map(|(t, p)| (t.as_str(), p.0.clone())).collect();
                arena.add_action(&s.name, x.name.clone(), x.color.0.clone(), &dist)?;
            }
        }
        Ok(InitializedArena::new(arena, &self.initial)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonJson {
    pub alphabet: Vec<RatStr>,
    pub states: Vec<String>,
    pub initial: String,
    /// `update[state][color] = state`, colors written as `"p/q"`.
    pub update: BTreeMap<String, BTreeMap<String, String>>,
}

impl SkeletonJson {
    pub fn from_skeleton(k: &MemorySkeleton) -> Self {
        let mut update = BTreeMap::new();
        for (m, name) in k.states().iter().enumerate() {
            let row = k
                .alphabet()
                .iter()
                .map(|c| {
                    let next = k.step(m, c).expect("alphabet color");
                    (rational::format(c), k.state_name(next).to_string())
                })
                .collect();
            update.insert(name.clone(), row);
        }
        SkeletonJson {
            alphabet: k.alphabet().iter().cloned().map(RatStr).collect(),
            states: k.states().to_vec(),
            initial: k.state_name(k.initial()).to_string(),
            update,
        }
    }

    pub fn to_skeleton(&self) -> Result<MemorySkeleton, Error> {
        let mut update = BTreeMap::new();
        for (state, row) in &self.update {
            let mut parsed = BTreeMap::new();
            for (c, next) in row {
                let c = rational::parse(c).map_err(|e| Error::Input(e.to_string()))?;
                parsed.insert(c, next.clone());
            }
            update.insert(state.clone(), parsed);
        }
        let alphabet = self.alphabet.iter().map(|c| c.0.clone()).collect();
        Ok(MemorySkeleton::new(alphabet, self.states.clone(), &self.initial, &update)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyJson {
    Mealy(MealyJson),
    Memoryless(MemorylessJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorylessJson {
    pub player: Player,
    pub choice: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MealyJson {
    pub player: Player,
    pub skeleton: SkeletonJson,
    pub next: BTreeMap<String, BTreeMap<String, String>>,
}

impl StrategyJson {
    pub fn from_strategy(s: &Strategy) -> Result<Self, Error> {
        Ok(match s {
            Strategy::Memoryless(m) => StrategyJson::Memoryless(MemorylessJson { player: m.player, choice: m.choice.clone() }),
            Strategy::Mealy(m) => StrategyJson::Mealy(MealyJson {
                player: m.player,
                skeleton: SkeletonJson::from_skeleton(&m.skeleton),
                next: m.next.clone(),
            }),
            Strategy::SplitTracking(_) => {
                return Err(Error::Input("split-tracking strategies have no JSON form".to_string()))
            }
        })
    }

    pub fn to_strategy(&self) -> Result<Strategy, Error> {
        Ok(match self {
            StrategyJson::Memoryless(m) => {
                Strategy::Memoryless(MemorylessStrategy { player: m.player, choice: m.choice.clone() })
            }
            StrategyJson::Mealy(m) => Strategy::Mealy(MealyStrategy {
                player: m.player,
                skeleton: m.skeleton.to_skeleton()?,
                next: m.next.clone(),
            }),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub p1: StrategyJson,
    pub p2: StrategyJson,
}

impl ProfileJson {
    pub fn from_profile(p: &Profile) -> Result<Self, Error> {
        Ok(ProfileJson { p1: StrategyJson::from_strategy(&p.p1)?, p2: StrategyJson::from_strategy(&p.p2)? })
    }

    pub fn to_profile(&self) -> Result<Profile, Error> {
        let (p1, p2) = (self.p1.to_strategy()?, self.p2.to_strategy()?);
        if p1.player() != Player::One || p2.player() != Player::Two {
            return Err(Error::Input("profile strategies must belong to P1 and P2 in order".to_string()));
        }
        Ok(Profile { p1, p2 })
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

pub fn parse_arena(text: &str) -> Result<InitializedArena, Error> {
    parse_json::<ArenaJson>(text)?.to_arena()
}

pub fn parse_skeleton(text: &str) -> Result<MemorySkeleton, Error> {
    parse_json::<SkeletonJson>(text)?.to_skeleton()
}

pub fn parse_strategy(text: &str) -> Result<Strategy, Error> {
    parse_json::<StrategyJson>(text)?.to_strategy()
}

pub fn parse_profile(text: &str) -> Result<Profile, Error> {
    parse_json::<ProfileJson>(text)?.to_profile()
}

pub fn arena_to_string(a: &InitializedArena) -> String {
    serde_json::to_string_pretty(&ArenaJson::from_arena(a)).expect("serializable")
}

pub fn skeleton_to_string(k: &MemorySkeleton) -> String {
    serde_json::to_string_pretty(&SkeletonJson::from_skeleton(k)).expect("serializable")
}
