//! Exact-arithmetic toolkit for stochastic turn-based zero-sum games with
//! colored actions: memory skeletons, arena constructions, exact evaluation
//! of induced Markov chains, and strategy synthesis by enumeration.
//!
//! Every probability, color and value is an exact rational. Preferences are
//! value-representable: P1 maximizes one exact value per outcome
//! distribution and P2 minimizes it, so comparing sets of achievable
//! distributions reduces to comparing best values.

pub mod arena;
pub mod characterize;
pub mod chain;
pub mod cli;
pub mod construct;
pub mod fixtures;
pub mod iso;
pub mod json;
mod linalg;
pub mod memory;
pub mod objective;
pub mod random;
pub mod rational;
mod scc;
pub mod solve;
pub mod strategy;

use arena::{ArenaError, Color, Player};
use memory::MemoryError;

pub use arena::{Arena, InitializedArena};
pub use memory::MemorySkeleton;
pub use objective::{Context, Objective};
pub use rational::Rational;
pub use strategy::{MealyStrategy, MemorylessStrategy, Profile, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error("strategy of {player} has no action at state {state} (memory {memory})")]
    PartialStrategy { player: Player, state: String, memory: String },
    #[error("strategy of {player} names action {action} unknown at state {state}")]
    UnknownAction { player: Player, state: String, action: String },
    #[error("state {state} is not owned by {player}")]
    NotOwner { player: Player, state: String },
    #[error("color {} is not a non-negative integer", rational::format(.0))]
    NonIntegerColor(Color),
    #[error("invalid objective: {0}")]
    InvalidObjective(String),
    #[error("values of different objective families are incomparable")]
    FamilyMismatch,
    #[error("induced chain outside the supported fragment: {0}")]
    UnsupportedChainShape(String),
    #[error("{count} strategies to enumerate exceed the cap of {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },
    #[error("arena is not a one-player arena of {0}")]
    NotOnePlayer(Player),
    #[error("choice count {choices} exceeds the recursion budget of {budget}")]
    RecursionBudgetExceeded { choices: usize, budget: usize },
    #[error("context classes are unbounded for {0}")]
    UnsupportedContextEnumeration(Objective),
    #[error("arena is not covered by the skeleton (conflict at state {0})")]
    CoverabilityRequired(String),
    #[error("strategy plays {found} at the split state, expected {expected}")]
    SeedMismatch { expected: String, found: String },
    #[error("input profile {0} is not a Nash equilibrium")]
    InputNotNE(&'static str),
    #[error("cycle precondition fails at {state}: memory {memory} is reached instead of {expected}")]
    CyclePreconditionViolated { state: String, memory: String, expected: String },
    #[error("word {word} is read to memory {found}, expected {expected}")]
    InvalidWitnessWord { word: String, found: String, expected: String },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn word_string(word: &[Color]) -> String {
    word.iter().map(rational::format).collect::<Vec<_>>().join(" ")
}
