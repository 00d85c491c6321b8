//! Strategy synthesis and verification by exhaustive enumeration of pure
//! strategies, with exact evaluation of every candidate.

mod enumerate;
mod ne;
mod sp;

use serde::Serialize;

use crate::arena::Player;
use crate::objective::Context;
use crate::rational::Rational;
use crate::strategy::Strategy;

pub use enumerate::{
    best_mealy_values, best_response, default_cap, enumerate_memoryless_optimal, memoryless_count, BestResponse,
    DeviationClass, SolveOptions, SolveReport, DEFAULT_CAP,
};
pub use ne::{
    check_ne, check_ne_at, cross_mix_check, enumerate_memoryless_ne, lift_two_player, mdp_solve_with_memory,
    synthesize_ne_edge_induction, HypothesisPolicy, LiftOptions, LiftReport, NeSynthesis, NeTable, SynthOptions,
    TraceEntry, TraceStep, DEFAULT_BUDGET,
};
pub use sp::{check_sp, refine_to_sp, RefineIteration, RefineReport, SpReport, SOUNDNESS_NOTE};

/// A strictly profitable deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub player: Player,
    /// State the play starts from.
    pub state: String,
    pub context: Context,
    pub deviation: Strategy,
    pub before: Rational,
    pub after: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Number of deviations evaluated.
    pub checked: u128,
}

impl Verdict {
    pub(crate) fn holds(checked: u128) -> Verdict {
        Verdict { holds: true, counterexample: None, checked }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// One-player arena of P1: the oracle alone.
    OptimalP1,
    OptimalP2,
    /// Two-player arena: equilibrium synthesis.
    Equilibrium,
}
