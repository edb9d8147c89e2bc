use std::collections::{HashMap, HashSet};

use super::TransformError;
use crate::game::{
    ActionId, ConcurrentGame, FinitePlay, GameBuilder, PlayerId, VertexId, WAIT,
};

/// A turn-based game obtained by splitting every concurrent step into
/// sequential choices.
///
/// Original vertices keep their ids; intermediate vertices come after them.
#[derive(Clone, Debug)]
pub struct TurnGame {
    pub game: ConcurrentGame,
    /// Original vertex whose step each vertex belongs to.
    pub home: Vec<VertexId>,
    /// Actions fixed so far at intermediate vertices, `(player, action)`.
    pub partial: Vec<Vec<(PlayerId, ActionId)>>,
    original_len: usize,
}

impl TurnGame {
    pub fn is_original(&self, v: VertexId) -> bool {
        v.0 < self.original_len
    }

    /// Keeps only the original vertices of a play.
    pub fn project_play(&self, play: &FinitePlay) -> FinitePlay {
        FinitePlay::new(
            play.vertices()
                .iter()
                .copied()
                .filter(|&v| self.is_original(v))
                .collect(),
        )
        .expect("plays start at an original vertex")
    }
}

/// Same player order at every vertex.
pub fn turnify_round_robin(
    game: &ConcurrentGame,
    order: &[PlayerId],
) -> Result<TurnGame, TransformError> {
    turnify_with(game, |_| order.to_vec())
}

/// Players move one after another in `order_at(v)`, each seeing earlier
/// choices. Intermediate edges weigh 0; the last choice carries the weights
/// of the original edge. Players with a single legal action at `v` are
/// skipped.
pub fn turnify_with(
    game: &ConcurrentGame,
    order_at: impl Fn(VertexId) -> Vec<PlayerId>,
) -> Result<TurnGame, TransformError> {
    let n = game.num_players();
    let mut b = GameBuilder::new();
    for p in game.players() {
        let id = b.player(game.player_name(p));
        for a in game.action_names(p) {
            b.action(id, a);
        }
    }
    let wait: Vec<ActionId> = game.players().map(|p| b.action(p, WAIT)).collect();
    let original_len = game.num_vertices();
    let mut home = Vec::with_capacity(original_len);
    let mut partial = Vec::with_capacity(original_len);
    for v in game.vertices() {
        b.vertex(game.vertex_name(v), game.is_target(v));
        home.push(v);
        partial.push(Vec::new());
    }
    if let Some(v) = game.initial() {
        b.set_initial(v);
    }
    let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut add_edge = |b: &mut GameBuilder, from: VertexId, to: VertexId, w: Vec<i64>| {
        if edges.insert((from, to)) {
            b.edge(from, to, w);
        }
    };

    for v in game.vertices() {
        if game.is_target(v) {
            continue;
        }
        let order = order_at(v);
        let mut sorted = order.clone();
        sorted.sort();
        if sorted != game.players().collect::<Vec<_>>() {
            return Err(TransformError::BadOrder);
        }
        let movers: Vec<PlayerId> = order
            .into_iter()
            .filter(|&p| game.legal(v, p).len() > 1)
            .collect();
        if movers.len() <= 1 {
            for (profile, to) in game.moves(v) {
                let w = game.edge(v, to).expect("edge").weights.clone();
                add_edge(&mut b, v, to, w);
                b.add_move(v, profile, to);
            }
            continue;
        }
        let mut nodes: HashMap<Vec<ActionId>, VertexId> = HashMap::new();
        nodes.insert(Vec::new(), v);
        let mut frontier = vec![Vec::<ActionId>::new()];
        for (k, &mover) in movers.iter().enumerate() {
            let last = k + 1 == movers.len();
            let mut next_frontier = Vec::new();
            for chosen in frontier {
                let node = nodes[&chosen];
                for &a in game.legal(v, mover) {
                    let mut ext = chosen.clone();
                    ext.push(a);
                    let mut mv = wait.clone();
                    mv[mover.0] = a;
                    let to = if last {
                        let mut full: Vec<ActionId> =
                            game.players().map(|p| game.legal(v, p)[0]).collect();
                        for (j, &p) in movers.iter().enumerate() {
                            full[p.0] = ext[j];
                        }
                        let to = game.next(v, &full).expect("legal profile");
                        let w = game.edge(v, to).expect("edge").weights.clone();
                        add_edge(&mut b, node, to, w);
                        to
                    } else {
                        let label: Vec<&str> = movers
                            .iter()
                            .zip(&ext)
                            .map(|(&p, &x)| game.action_name(p, x))
                            .collect();
                        let id = b.vertex(
                            format!("{}|{}", game.vertex_name(v), label.join(",")),
                            false,
                        );
                        home.push(v);
                        partial.push(movers.iter().copied().zip(ext.iter().copied()).collect());
                        nodes.insert(ext.clone(), id);
                        next_frontier.push(ext);
                        add_edge(&mut b, node, id, vec![0; n]);
                        id
                    };
                    b.add_move(node, mv, to);
                }
            }
            frontier = next_frontier;
        }
    }
    Ok(TurnGame {
        game: b.build()?,
        home,
        partial,
        original_len,
    })
}
