use std::collections::HashMap;

use super::instance::GridError;
use crate::cost::Weight;
use crate::game::{
    ConcurrentGame, FinitePlay, GameBuilder, GameError, PlayerId, StrategyProfile, VertexId,
};

/// A game where each player pays a surcharge on its first departure from a
/// prescribed profile. Vertex `k` is `states[k] = (base vertex, flags)`,
/// bit `i` of the flags recording that player `i` has deviated.
#[derive(Clone, Debug)]
pub struct PenalizedGame {
    pub game: ConcurrentGame,
    pub states: Vec<(VertexId, u64)>,
    index: HashMap<(VertexId, u64), VertexId>,
    pub penalties: Vec<Weight>,
}

impl PenalizedGame {
    pub fn vertex_of(&self, base: VertexId, flags: u64) -> Option<VertexId> {
        self.index.get(&(base, flags)).copied()
    }

    /// The play of the base game with no deviation recorded.
    pub fn lift_compliant(&self, play: &FinitePlay) -> Option<FinitePlay> {
        let vs = play
            .vertices()
            .iter()
            .map(|&v| self.vertex_of(v, 0))
            .collect::<Option<Vec<_>>>()?;
        FinitePlay::new(vs).ok()
    }

    pub fn project(&self, play: &FinitePlay) -> FinitePlay {
        FinitePlay::new(play.vertices().iter().map(|v| self.states[v.0].0).collect())
            .expect("non-empty")
    }

    /// Players whose penalty is negative, for whom the surcharge rewards
    /// deviating.
    pub fn negative_penalties(&self) -> Vec<PlayerId> {
        self.penalties
            .iter()
            .enumerate()
            .filter(|(_, &p)| p < 0)
            .map(|(i, _)| PlayerId(i))
            .collect()
    }
}

/// Adds `penalties[i]` to player `i`'s weight on the first move where its
/// action differs from `profile`. Strategies are read positionally; a
/// player with one legal action never deviates.
pub fn build_penalized_game(
    game: &ConcurrentGame,
    profile: &StrategyProfile,
    penalties: &[Weight],
) -> Result<PenalizedGame, GridError> {
    let n = game.num_players();
    if profile.0.len() != n || penalties.len() != n {
        return Err(GameError::ProfileArity {
            expected: n,
            found: profile.0.len().min(penalties.len()),
        }
        .into());
    }
    let start = game.initial().unwrap_or(VertexId(0));
    let mut b = GameBuilder::new();
    for p in game.players() {
        let id = b.player(game.player_name(p));
        for a in game.action_names(p) {
            b.action(id, a);
        }
    }
    let mut states = vec![(start, 0u64)];
    let mut index = HashMap::from([((start, 0u64), VertexId(0))]);
    b.vertex(label(game, start, 0), game.is_target(start));
    b.set_initial(VertexId(0));
    let mut k = 0;
    while k < states.len() {
        let (v, flags) = states[k];
        let from = VertexId(k);
        k += 1;
        if game.is_target(v) {
            continue;
        }
        let mut prescribed = Vec::with_capacity(n);
        for p in game.players() {
            let legal = game.legal(v, p);
            prescribed.push(if legal.len() == 1 {
                legal[0]
            } else {
                profile.0[p.0]
                    .decide(&[v])
                    .ok_or_else(|| GameError::StrategyUndefined {
                        player: p,
                        vertex: game.vertex_name(v).to_string(),
                    })?
            });
        }
        let mut seen = HashMap::new();
        for (mv, to) in game.moves(v) {
            let mut next_flags = flags;
            for p in 0..n {
                if mv[p] != prescribed[p] {
                    next_flags |= 1 << p;
                }
            }
            let key = (to, next_flags);
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    let t = b.vertex(label(game, to, next_flags), game.is_target(to));
                    index.insert(key, t);
                    states.push(key);
                    t
                }
            };
            if seen.insert(target, ()).is_none() {
                let mut w = game.edge(v, to).expect("edge").weights.clone();
                for (p, wp) in w.iter_mut().enumerate() {
                    if (next_flags & !flags) >> p & 1 == 1 {
                        *wp += penalties[p];
                    }
                }
                b.edge(from, target, w);
            }
            b.add_move(from, mv, target);
        }
    }
    Ok(PenalizedGame {
        game: b.build()?,
        states,
        index,
        penalties: penalties.to_vec(),
    })
}

fn label(game: &ConcurrentGame, v: VertexId, flags: u64) -> String {
    if flags == 0 {
        game.vertex_name(v).to_string()
    } else {
        format!("{}!{flags:b}", game.vertex_name(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, P1, P2};
    use crate::game::{cost_of_play, outcome, total_payoff, Play, Strategy};
    use crate::transforms::turnify_round_robin;

    fn fig1_turn() -> (ConcurrentGame, StrategyProfile) {
        let g = turnify_round_robin(&fixtures::fig1(), &[P1, P2]).unwrap().game;
        let s = g.vertex_by_name("s").unwrap();
        let sa = g.vertex_by_name("s|a").unwrap();
        let sb = g.vertex_by_name("s|b").unwrap();
        let p1 = Strategy::from_successors(&g, P1, &[(s, sa)]).unwrap();
        let taa = g.vertex_by_name("t_aa").unwrap();
        let tbb = g.vertex_by_name("t_bb").unwrap();
        let p2 = Strategy::from_successors(&g, P2, &[(sa, taa), (sb, tbb)]).unwrap();
        (g, StrategyProfile(vec![p1, p2]))
    }

    #[test]
    fn compliant_outcome_is_not_penalized() {
        let (g, prof) = fig1_turn();
        let pg = build_penalized_game(&g, &prof, &[5, 7]).unwrap();
        let out = outcome(&pg.game, VertexId(0), &prof_on(&pg, &g, &prof), 10).unwrap();
        let base = pg.project(&out.play);
        for p in [P1, P2] {
            assert_eq!(
                total_payoff(&pg.game, p, &out.play).unwrap(),
                total_payoff(&g, p, &base).unwrap()
            );
        }
    }

    fn prof_on(pg: &PenalizedGame, g: &ConcurrentGame, prof: &StrategyProfile) -> StrategyProfile {
        StrategyProfile(
            prof.0
                .iter()
                .enumerate()
                .map(|(p, s)| {
                    Strategy::Positional(
                        pg.states
                            .iter()
                            .map(|&(v, _)| {
                                let a = s.decide(&[v])?;
                                pg.game.action_by_name(PlayerId(p), g.action_name(PlayerId(p), a))
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn single_deviation_pays_once() {
        let (g, prof) = fig1_turn();
        let pg = build_penalized_game(&g, &prof, &[5, 7]).unwrap();
        // player 1 plays b instead of a
        let names = ["s", "s|b!1", "t_bb!1"];
        let play = FinitePlay::from_names(&pg.game, &names).unwrap();
        let base = pg.project(&play);
        let c1 = cost_of_play(&pg.game, P1, &Play::Finite(play.clone())).unwrap();
        let b1 = total_payoff(&g, P1, &base).unwrap();
        assert_eq!(c1.finite(), Some(b1 + 5));
        let c2 = cost_of_play(&pg.game, P2, &Play::Finite(play)).unwrap();
        assert_eq!(c2.finite(), Some(total_payoff(&g, P2, &base).unwrap()));
        let both = FinitePlay::from_names(&pg.game, &["s", "s|b!1", "t_ba!11"]).unwrap();
        assert_eq!(
            total_payoff(&pg.game, P2, &both).unwrap(),
            total_payoff(&g, P2, &pg.project(&both)).unwrap() + 7
        );
    }

    #[test]
    fn undefined_strategy_is_an_error() {
        let (g, mut prof) = fig1_turn();
        prof.0[1] = Strategy::Positional(vec![None; g.num_vertices()]);
        assert!(matches!(
            build_penalized_game(&g, &prof, &[1, 1]),
            Err(GridError::Game(GameError::StrategyUndefined { .. }))
        ));
        assert!(build_penalized_game(&g, &prof, &[-1]).is_err());
    }
}
