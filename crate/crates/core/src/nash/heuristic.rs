use super::brute::candidate_plays;
use super::{NashCertificate, NashContext, NashError};
use crate::game::{
    is_turn_based, outcome, ConcurrentGame, FinitePlay, Play, Strategy, StrategyProfile, VertexId,
};

/// Why no certificate was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureReport {
    /// The outcome of the players' individually optimal strategies, with its
    /// failing checks.
    pub outcome: NashCertificate,
    /// Every other candidate play within the horizon, each failing.
    pub candidates: Vec<NashCertificate>,
    /// The candidate enumeration hit its budget.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeuristicOutcome {
    Found(NashCertificate),
    Failed(FailureReport),
}

const CANDIDATE_BUDGET: usize = 4096;

/// Builds an equilibrium from each player's cost-minimizing strategy
/// against the coalition of the others.
///
/// Each player plays its Min choices in its own coalition game; the
/// resulting outcome (at most `|V|` steps) is checked deviation by
/// deviation, and on success the coalition strategies are attached as
/// punishments. Otherwise the candidate plays of at most `horizon` edges
/// (default `|V|`) are checked in turn; the first valid one is returned,
/// or every failure is reported.
pub fn construct_ne_heuristic(
    game: &ConcurrentGame,
    start: VertexId,
    horizon: Option<usize>,
) -> Result<HeuristicOutcome, NashError> {
    is_turn_based(game).ok_or(NashError::NotTurnBased)?;
    let ctx = NashContext::new(game)?;
    let strategies = individual_strategies(&ctx)?;
    let n = game.num_vertices();
    let out = outcome(game, start, &strategies, n)?;
    let play = if out.reached_target {
        Play::Finite(out.play)
    } else {
        as_lasso(out.play)
    };
    let mut cert = ctx.check(&play)?;
    if cert.valid {
        ctx.attach_punishment(&mut cert);
        return Ok(HeuristicOutcome::Found(cert));
    }

    let (plays, truncated) = match candidate_plays(game, start, horizon.unwrap_or(n), true, CANDIDATE_BUDGET) {
        Ok(p) => (p, false),
        Err(NashError::Budget(_)) => (
            candidate_plays(game, start, n.min(horizon.unwrap_or(n)), false, CANDIDATE_BUDGET)
                .unwrap_or_default(),
            true,
        ),
        Err(e) => return Err(e),
    };
    let mut candidates = Vec::new();
    for p in plays {
        if p == play {
            continue;
        }
        let mut c = ctx.check(&p)?;
        if c.valid {
            ctx.attach_punishment(&mut c);
            return Ok(HeuristicOutcome::Found(c));
        }
        candidates.push(c);
    }
    Ok(HeuristicOutcome::Failed(FailureReport {
        outcome: cert,
        candidates,
        truncated,
    }))
}

/// Every player's Min choices in its own coalition game, at the vertices it
/// owns with more than one action.
pub fn individual_strategies(ctx: &NashContext) -> Result<StrategyProfile, NashError> {
    let game = ctx.game();
    let owners = is_turn_based(game).ok_or(NashError::NotTurnBased)?;
    Ok(StrategyProfile(
        game.players()
            .map(|i| {
                let (cg, vm) = ctx.coalition(i);
                Strategy::Positional(
                    game.vertices()
                        .map(|v| {
                            if owners[v.0] == i && game.legal(v, i).len() > 1 {
                                cg.min_action(game, vm, v)
                            } else {
                                None
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    ))
}

/// A positional outcome that misses the target repeats a vertex; cut it
/// into prefix and cycle.
fn as_lasso(play: FinitePlay) -> Play {
    let vs = play.into_vec();
    for (k, v) in vs.iter().enumerate() {
        if let Some(j) = vs[..k].iter().position(|u| u == v) {
            return Play::Lasso {
                prefix: vs[..j].to_vec(),
                cycle: vs[j..k].to_vec(),
            };
        }
    }
    unreachable!("an outcome longer than |V| repeats a vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, random_turn_based, P1, P2};
    use crate::nash::brute_force_ne;
    use crate::transforms::turnify_round_robin;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fig2_fails_everywhere() {
        let g = fixtures::fig2();
        let a = g.vertex_by_name("A").unwrap();
        match construct_ne_heuristic(&g, a, Some(5)).unwrap() {
            HeuristicOutcome::Failed(r) => {
                assert!(!r.outcome.valid);
                assert!(r.candidates.iter().all(|c| !c.valid));
                assert!(r.candidates.len() >= 3);
            }
            HeuristicOutcome::Found(c) => panic!("unexpected certificate {c:?}"),
        }
    }

    #[test]
    fn fig1_turnified_has_a_certificate() {
        let g = fixtures::fig1();
        let t = turnify_round_robin(&g, &[P1, P2]).unwrap();
        let s = t.game.vertex_by_name("s").unwrap();
        match construct_ne_heuristic(&t.game, s, None).unwrap() {
            HeuristicOutcome::Found(c) => {
                assert!(c.valid);
                assert!(!brute_force_ne(&t.game, s, 3).unwrap().is_empty());
            }
            HeuristicOutcome::Failed(r) => panic!("{r:?}"),
        }
    }

    #[test]
    fn concurrent_game_is_rejected() {
        let g = fixtures::fig1();
        assert_eq!(
            construct_ne_heuristic(&g, VertexId(0), None),
            Err(NashError::NotTurnBased)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn certificates_are_oracle_equilibria(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_turn_based(&mut rng, 6, 2, 3, true);
            let v0 = g.initial().unwrap();
            if let HeuristicOutcome::Found(c) = construct_ne_heuristic(&g, v0, None).unwrap() {
                let oracle = brute_force_ne(&g, v0, 6).unwrap();
                prop_assert!(oracle.iter().any(|o| o.play == c.play));
            }
        }
    }
}
