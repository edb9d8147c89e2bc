use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{BoundCertificate, TransformError};
use crate::cost::Weight;
use crate::game::{ConcurrentGame, FinitePlay, GameBuilder, PlayerId, Strategy, VertexId};

/// A vertex of the non-negative game: an original vertex with the negative
/// part of the running payoff, or the fresh sink target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AugmentedVertex {
    State { base: VertexId, debt: Weight },
    Sink,
}

/// The game `G'` where one player's weights are all non-negative.
#[derive(Clone, Debug)]
pub struct NonNegGame {
    pub game: ConcurrentGame,
    pub player: PlayerId,
    pub bound: Weight,
    pub states: Vec<AugmentedVertex>,
    index: HashMap<(VertexId, Weight), VertexId>,
    sink: VertexId,
}

impl NonNegGame {
    pub fn vertex_of(&self, base: VertexId, debt: Weight) -> Option<VertexId> {
        self.index.get(&(base, debt)).copied()
    }

    pub fn state(&self, v: VertexId) -> AugmentedVertex {
        self.states[v.0]
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn base(&self, v: VertexId) -> Option<VertexId> {
        match self.states[v.0] {
            AugmentedVertex::State { base, .. } => Some(base),
            AugmentedVertex::Sink => None,
        }
    }

    /// Drops sink visits and forgets the debt component.
    pub fn project_history(&self, h: &[VertexId]) -> Vec<VertexId> {
        h.iter().filter_map(|&v| self.base(v)).collect()
    }

    pub fn project_play(&self, play: &FinitePlay) -> FinitePlay {
        FinitePlay::new(self.project_history(play.vertices())).expect("plays start at a state")
    }

    /// The unique history of `G'` from `(h[0], 0)` projecting onto `h`.
    /// Repetitions of an original target map to the sink.
    pub fn lift_history(&self, h: &[VertexId]) -> Option<Vec<VertexId>> {
        let mut cur = self.vertex_of(*h.first()?, 0)?;
        let mut out = vec![cur];
        for &next in &h[1..] {
            cur = self
                .game
                .successors(cur)
                .find(|&s| self.base(s) == Some(next))
                .or_else(|| self.game.successors(cur).find(|&s| s == self.sink))?;
            out.push(cur);
        }
        Some(out)
    }
}

/// Builds `G'` for the certificate's player.
///
/// From `(v, c)` an edge `v -> v'` of weight `w` leads to
/// `(v', min(0, c + w))` with player weight `max(0, c + w)`; other players
/// keep their weights. An original target `(t, c)` has a single edge to the
/// sink with player weight `b + c` and 0 for the others. Costs of the
/// player shift by exactly `+b`.
pub fn to_nonnegative(
    game: &ConcurrentGame,
    cert: &BoundCertificate,
) -> Result<NonNegGame, TransformError> {
    let i = cert.player;
    game.check_player(i)?;
    let b = cert.finite().ok_or(TransformError::Unbounded(i))?;
    let n = game.num_players();

    let mut states: Vec<AugmentedVertex> = Vec::new();
    let mut index: HashMap<(VertexId, Weight), VertexId> = HashMap::new();
    let mut queue = VecDeque::new();
    let intern = |base: VertexId,
                  debt: Weight,
                  states: &mut Vec<AugmentedVertex>,
                  index: &mut HashMap<(VertexId, Weight), VertexId>,
                  queue: &mut VecDeque<VertexId>| {
        *index.entry((base, debt)).or_insert_with(|| {
            states.push(AugmentedVertex::State { base, debt });
            let id = VertexId(states.len() - 1);
            queue.push_back(id);
            id
        })
    };
    for v in game.reachable_from(cert.initial) {
        intern(v, 0, &mut states, &mut index, &mut queue);
    }
    let mut transitions: Vec<(VertexId, VertexId, Vec<Weight>, Weight)> = Vec::new();
    while let Some(x) = queue.pop_front() {
        let AugmentedVertex::State { base, debt } = states[x.0] else {
            continue;
        };
        debug_assert!(debt >= -b && debt <= 0);
        if game.is_target(base) {
            continue;
        }
        for e in game.out_edges(base) {
            let c = debt + e.weights[i.0];
            let to = intern(e.to, c.min(0), &mut states, &mut index, &mut queue);
            let mut w = e.weights.clone();
            w[i.0] = c.max(0);
            transitions.push((x, to, w, c));
        }
    }

    let mut gb = GameBuilder::new();
    for p in game.players() {
        let id = gb.player(game.player_name(p));
        for a in game.action_names(p) {
            gb.action(id, a);
        }
    }
    for s in &states {
        let AugmentedVertex::State { base, debt } = *s else {
            unreachable!()
        };
        gb.vertex(format!("({},{})", game.vertex_name(base), debt), false);
    }
    let sink = gb.vertex("#sink", true);
    states.push(AugmentedVertex::Sink);
    for (from, to, w, _) in &transitions {
        gb.edge(*from, *to, w.clone());
    }
    for (x, s) in states.iter().enumerate() {
        let AugmentedVertex::State { base, debt } = *s else {
            continue;
        };
        let x = VertexId(x);
        if game.is_target(base) {
            let mut w = vec![0; n];
            w[i.0] = b + debt;
            gb.edge(x, sink, w);
            for (profile, _) in game.moves(base) {
                gb.add_move(x, profile, sink);
            }
            continue;
        }
        for (profile, to) in game.moves(base) {
            let c = debt + game.weight(i, base, to).expect("next lands on an edge");
            gb.add_move(x, profile, index[&(to, c.min(0))]);
        }
    }
    if let Some(v0) = index.get(&(cert.initial, 0)) {
        gb.set_initial(*v0);
    }
    let built = gb.build()?;
    Ok(NonNegGame {
        game: built,
        player: i,
        bound: b,
        states,
        index,
        sink,
    })
}

/// `σ̄(π̄) = σ(π)`: a strategy of `G` played on `G'`.
pub fn lift_strategy(gp: &Arc<NonNegGame>, s: Strategy) -> Strategy {
    let gp = Arc::clone(gp);
    Strategy::Derived(Arc::new(move |h: &[VertexId]| {
        s.decide(&gp.project_history(h))
    }))
}

/// `σ*(π) = σ(π̄)`: a strategy of `G'` played on `G`.
pub fn project_strategy(gp: &Arc<NonNegGame>, s: Strategy) -> Strategy {
    let gp = Arc::clone(gp);
    Strategy::Derived(Arc::new(move |h: &[VertexId]| {
        gp.lift_history(h).and_then(|l| s.decide(&l))
    }))
}
