//! Constructions that derive one game from another.

mod bound;
mod coalition;
mod nonneg;
mod turnify;

pub use bound::{bound_below_certificate, Bound, BoundCertificate};
pub use coalition::{coalition_game, coalition_game_at, CoalitionGame, CoalitionNode};
pub use nonneg::{lift_strategy, project_strategy, to_nonnegative, AugmentedVertex, NonNegGame};
pub use turnify::{turnify_round_robin, turnify_with, TurnGame};

use crate::game::{GameError, PlayerId};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("player {0} is not bounded below; no finite certificate")]
    Unbounded(PlayerId),
    #[error("the game is not action-visible")]
    NotActionVisible,
    #[error("order must be a permutation of all players")]
    BadOrder,
    #[error(transparent)]
    Game(#[from] GameError),
}
