//! Nash equilibria: deviations, the outcome characterization through
//! coalition games, a construction heuristic, and an exhaustive oracle.

mod brute;
mod check;
mod deviation;
mod heuristic;

pub use brute::{brute_force_ne, brute_force_ne_with, candidate_plays, NeOutcome, OracleOptions};
pub use check::{check_ne_outcome, Check, NashCertificate, NashContext, Punishment};
pub use deviation::{enumerate_deviations, Deviation};
pub use heuristic::{construct_ne_heuristic, individual_strategies, FailureReport, HeuristicOutcome};

use crate::game::GameError;
use crate::transforms::TransformError;
use crate::zerosum::ZeroSumError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NashError {
    #[error("the game is not action-visible")]
    NotActionVisible,
    #[error("the game is not turn-based; turnify it first")]
    NotTurnBased,
    #[error("the play never reaches a target")]
    NoTarget,
    #[error("enumeration budget of {0} exceeded")]
    Budget(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    ZeroSum(#[from] ZeroSumError),
}
