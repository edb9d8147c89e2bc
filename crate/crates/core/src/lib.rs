//! Solver library for concurrent multi-player min-cost reachability games.
//!
//! The crate covers the game model ([`game`]), game transformations
//! ([`transforms`]), two-player zero-sum solving ([`zerosum`]), Nash
//! equilibrium checking and construction ([`nash`]), and a micro-grid task
//! scheduling application ([`microgrid`]). File formats live in [`io`].

pub mod cost;
pub mod fixtures;
pub mod game;
pub mod io;
pub mod microgrid;
pub mod nash;
pub mod transforms;
pub mod zerosum;

pub use cost::{ExtCost, Weight};
pub use game::{
    ActionId, ConcurrentGame, FinitePlay, GameBuilder, GameError, PlayerId, Play, Strategy,
    StrategyProfile, VertexId, Violation,
};
