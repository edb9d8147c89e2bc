use std::collections::BTreeSet;

use rayon::prelude::*;

use super::deviation::{deviations_along, steps};
use super::{Deviation, NashError};
use crate::cost::ExtCost;
use crate::game::{
    cost_of_play, is_action_visible, total_payoff, ActionId, ConcurrentGame, Play, PlayerId,
    VertexId,
};
use crate::transforms::{coalition_game_at, CoalitionGame};
use crate::zerosum::{solve, Method, Side, ValueMap};

/// One instance of the inequality
/// `cost_i(π) <= TP_i(π') + value(G_{i,π'})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub deviation: Deviation,
    pub lhs: ExtCost,
    pub deviation_payoff: ExtCost,
    pub retaliation: ExtCost,
    pub holds: bool,
}

impl Check {
    pub fn rhs(&self) -> ExtCost {
        self.deviation_payoff
            .checked_add(self.retaliation)
            .unwrap_or(ExtCost::PosInf)
    }
}

/// Positional strategy of the coalition against `player`: at each listed
/// vertex, the action of every other player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Punishment {
    pub player: PlayerId,
    pub moves: Vec<(VertexId, Vec<(PlayerId, ActionId)>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashCertificate {
    pub play: Play,
    pub costs: Vec<ExtCost>,
    pub checks: Vec<Check>,
    pub punishment: Vec<Punishment>,
    pub valid: bool,
}

impl NashCertificate {
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Coalition games of every player, solved once and shared by every check.
#[derive(Clone, Debug)]
pub struct NashContext<'g> {
    game: &'g ConcurrentGame,
    coalitions: Vec<(CoalitionGame, ValueMap)>,
}

impl<'g> NashContext<'g> {
    pub fn new(game: &'g ConcurrentGame) -> Result<Self, NashError> {
        if !is_action_visible(game) {
            return Err(NashError::NotActionVisible);
        }
        let root = game.initial().unwrap_or(VertexId(0));
        let coalitions = game
            .players()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|i| {
                let cg = coalition_game_at(game, i, root)?;
                let vm = solve(&cg.zs, Method::Auto)?;
                Ok((cg, vm))
            })
            .collect::<Result<Vec<_>, NashError>>()?;
        Ok(NashContext { game, coalitions })
    }

    pub fn game(&self) -> &'g ConcurrentGame {
        self.game
    }

    pub fn coalition(&self, i: PlayerId) -> &(CoalitionGame, ValueMap) {
        &self.coalitions[i.0]
    }

    /// `value(G_{i,π})` for any `π` ending at `v`.
    pub fn value(&self, i: PlayerId, v: VertexId) -> ExtCost {
        self.coalitions[i.0].1.at(v.0)
    }

    /// Checks every deviation of the play. Finite plays must reach a
    /// target; lassos avoiding targets cost `+∞` to everybody.
    pub fn check(&self, play: &Play) -> Result<NashCertificate, NashError> {
        let game = self.game;
        play.check(game)?;
        let (seq, reached) = steps(game, play);
        if !reached && matches!(play, Play::Finite(_)) {
            return Err(NashError::NoTarget);
        }
        let costs = game
            .players()
            .map(|p| cost_of_play(game, p, play))
            .collect::<Result<Vec<_>, _>>()?;
        let mut checks = Vec::new();
        for d in deviations_along(game, &seq) {
            let i = d.player;
            let payoff = ExtCost::Finite(total_payoff(game, i, &d.prefix)?);
            let retaliation = self.value(i, d.new_vertex);
            let lhs = costs[i.0];
            let rhs = payoff.checked_add(retaliation).unwrap_or(ExtCost::PosInf);
            checks.push(Check {
                deviation: d,
                lhs,
                deviation_payoff: payoff,
                retaliation,
                holds: lhs <= rhs,
            });
        }
        let valid = checks.iter().all(|c| c.holds);
        Ok(NashCertificate {
            play: play.clone(),
            costs,
            checks,
            punishment: Vec::new(),
            valid,
        })
    }

    /// Coalition moves at every Max vertex reachable after the player's
    /// deviations in the certificate.
    pub fn attach_punishment(&self, cert: &mut NashCertificate) {
        let game = self.game;
        cert.punishment = game
            .players()
            .filter_map(|i| {
                let starts: Vec<VertexId> = cert
                    .checks
                    .iter()
                    .filter(|c| c.deviation.player == i)
                    .map(|c| c.deviation.new_vertex)
                    .collect();
                if starts.is_empty() {
                    return None;
                }
                let (cg, vm) = &self.coalitions[i.0];
                let mut seen = vec![false; game.num_vertices()];
                let mut stack = starts;
                let mut region = BTreeSet::new();
                while let Some(v) = stack.pop() {
                    if std::mem::replace(&mut seen[v.0], true) || game.is_target(v) {
                        continue;
                    }
                    region.insert(v);
                    stack.extend(game.successors(v));
                }
                let moves = region
                    .into_iter()
                    .filter(|&v| cg.zs.owner[v.0] == Side::Max)
                    .filter_map(|v| {
                        let acts = cg.max_actions(game, vm, v)?;
                        let relevant = acts
                            .iter()
                            .any(|&(p, _)| game.legal(v, p).len() > 1);
                        relevant.then_some((v, acts))
                    })
                    .collect();
                Some(Punishment { player: i, moves })
            })
            .collect();
    }
}

/// Checks the play against every coalition game; see [`NashContext`].
pub fn check_ne_outcome(game: &ConcurrentGame, play: &Play) -> Result<NashCertificate, NashError> {
    NashContext::new(game)?.check(play)
}
