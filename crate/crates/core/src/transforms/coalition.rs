use std::collections::BTreeMap;

use super::TransformError;
use crate::game::{
    is_action_visible, ActionId, ActionProfile, ConcurrentGame, FinitePlay, PlayerId, VertexId,
};
use crate::zerosum::{Side, ValueMap, ZeroSumGame};

/// A vertex of the coalition game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoalitionNode {
    Vertex(VertexId),
    /// The coalition has committed its actions at `vertex`; the entry of
    /// the minimizing player is a placeholder.
    Committed { vertex: VertexId, others: ActionProfile },
}

/// Player `i` (Min) against the coalition of everyone else (Max), which
/// chooses first. Vertex `k < |V|` of `zs` is original vertex `k`.
#[derive(Clone, Debug)]
pub struct CoalitionGame {
    pub player: PlayerId,
    pub zs: ZeroSumGame,
    pub nodes: Vec<CoalitionNode>,
}

/// The coalition game rooted at the last vertex of `prefix`. Payoffs start
/// from 0 there.
pub fn coalition_game(
    game: &ConcurrentGame,
    i: PlayerId,
    prefix: &FinitePlay,
) -> Result<CoalitionGame, TransformError> {
    coalition_game_at(game, i, prefix.last())
}

pub fn coalition_game_at(
    game: &ConcurrentGame,
    i: PlayerId,
    root: VertexId,
) -> Result<CoalitionGame, TransformError> {
    game.check_player(i)?;
    if !is_action_visible(game) {
        return Err(TransformError::NotActionVisible);
    }
    let mut zs = ZeroSumGame::new(root.0);
    let mut nodes = Vec::with_capacity(game.num_vertices());
    let kinds: Vec<Shape> = game.vertices().map(|v| shape(game, i, v)).collect();
    for v in game.vertices() {
        let side = match kinds[v.0] {
            Shape::MinDirect => Side::Min,
            _ => Side::Max,
        };
        zs.add_vertex(game.vertex_name(v), side, game.is_target(v));
        nodes.push(CoalitionNode::Vertex(v));
    }
    for v in game.vertices() {
        if game.is_target(v) {
            continue;
        }
        match kinds[v.0] {
            Shape::MinDirect | Shape::MaxDirect => {
                for to in game.successors(v) {
                    zs.add_edge(v.0, to.0, game.weight(i, v, to).expect("edge"));
                }
            }
            Shape::Concurrent => {
                let mut groups: BTreeMap<ActionProfile, Vec<VertexId>> = BTreeMap::new();
                for (mut profile, to) in game.moves(v) {
                    profile[i.0] = ActionId(usize::MAX);
                    groups.entry(profile).or_default().push(to);
                }
                for (others, tos) in groups {
                    let label: Vec<&str> = game
                        .players()
                        .filter(|&p| p != i)
                        .map(|p| game.action_name(p, others[p.0]))
                        .collect();
                    let c = zs.add_vertex(
                        format!("{}/{}", game.vertex_name(v), label.join(",")),
                        Side::Min,
                        false,
                    );
                    nodes.push(CoalitionNode::Committed { vertex: v, others });
                    zs.add_edge(v.0, c, 0);
                    for to in tos {
                        zs.add_edge(c, to.0, game.weight(i, v, to).expect("edge"));
                    }
                }
            }
        }
    }
    Ok(CoalitionGame {
        player: i,
        zs,
        nodes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    /// The successor depends on player i's action only.
    MinDirect,
    /// The successor does not depend on player i's action.
    MaxDirect,
    Concurrent,
}

fn shape(game: &ConcurrentGame, i: PlayerId, v: VertexId) -> Shape {
    let mut by_own: BTreeMap<ActionId, VertexId> = BTreeMap::new();
    let mut by_others: BTreeMap<ActionProfile, VertexId> = BTreeMap::new();
    let mut own_decides = true;
    let mut others_decide = true;
    for (mut profile, to) in game.moves(v) {
        own_decides &= *by_own.entry(profile[i.0]).or_insert(to) == to;
        profile[i.0] = ActionId(usize::MAX);
        others_decide &= *by_others.entry(profile).or_insert(to) == to;
    }
    if own_decides {
        Shape::MinDirect
    } else if others_decide {
        Shape::MaxDirect
    } else {
        Shape::Concurrent
    }
}

impl CoalitionGame {
    pub fn with_root(&self, root: VertexId) -> ZeroSumGame {
        let mut zs = self.zs.clone();
        zs.initial = root.0;
        zs
    }

    /// Player `i`'s action at an original Min vertex under the solved
    /// choice.
    pub fn min_action(&self, game: &ConcurrentGame, vm: &ValueMap, v: VertexId) -> Option<ActionId> {
        if self.zs.target[v.0] || self.zs.owner[v.0] != Side::Min {
            return None;
        }
        let to = VertexId(vm.choice[v.0]?);
        game.profiles_to(v, to).first().map(|p| p[self.player.0])
    }

    /// The coalition's joint action at an original Max vertex, as
    /// `(player, action)` pairs for every other player.
    pub fn max_actions(
        &self,
        game: &ConcurrentGame,
        vm: &ValueMap,
        v: VertexId,
    ) -> Option<Vec<(PlayerId, ActionId)>> {
        if self.zs.target[v.0] || self.zs.owner[v.0] != Side::Max {
            return None;
        }
        let c = vm.choice[v.0]?;
        let profile = match &self.nodes[c] {
            CoalitionNode::Committed { others, .. } => others.clone(),
            CoalitionNode::Vertex(to) => game.profiles_to(v, *to).first()?.clone(),
        };
        Some(
            game.players()
                .filter(|&p| p != self.player)
                .map(|p| (p, profile[p.0]))
                .collect(),
        )
    }
}
