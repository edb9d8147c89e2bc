use std::collections::HashSet;

use super::deviation::{deviations_along, steps};
use super::NashError;
use crate::cost::{ExtCost, Weight};
use crate::game::{
    cost_of_play, is_action_visible, total_payoff, ActionId, ConcurrentGame, FinitePlay, Play,
    PlayerId, VertexId,
};

/// An equilibrium outcome found by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeOutcome {
    pub play: Play,
    pub costs: Vec<ExtCost>,
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Maximum number of edges of a candidate play.
    pub horizon: usize,
    /// Also consider lassos that never reach a target.
    pub include_lassos: bool,
    /// Maximum number of candidate plays and of punishing strategies per
    /// player.
    pub budget: usize,
    /// Punishing strategies are positional over these classes (one class per
    /// vertex when absent). Vertices of a class must share their action
    /// sets.
    pub class: Option<Vec<usize>>,
}

impl OracleOptions {
    pub fn new(horizon: usize) -> Self {
        OracleOptions {
            horizon,
            include_lassos: true,
            budget: 1 << 16,
            class: None,
        }
    }
}

/// Every walk from `start` with at most `horizon` edges that stops at its
/// first target, plus (optionally) every lasso closed within the horizon,
/// in depth-first order without duplicates.
pub fn candidate_plays(
    game: &ConcurrentGame,
    start: VertexId,
    horizon: usize,
    include_lassos: bool,
    budget: usize,
) -> Result<Vec<Play>, NashError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut path = vec![start];
    walk(game, &mut path, horizon, include_lassos, budget, &mut out, &mut seen)?;
    Ok(out)
}

fn walk(
    game: &ConcurrentGame,
    path: &mut Vec<VertexId>,
    horizon: usize,
    lassos: bool,
    budget: usize,
    out: &mut Vec<Play>,
    seen: &mut HashSet<Play>,
) -> Result<(), NashError> {
    let v = *path.last().expect("non-empty");
    if game.is_target(v) {
        out.push(Play::Finite(FinitePlay::new(path.clone())?));
        return check_budget(out.len(), budget);
    }
    for u in game.successors(v) {
        if lassos {
            if let Some(j) = path.iter().rposition(|&x| x == u) {
                let lasso = Play::Lasso {
                    prefix: path[..j].to_vec(),
                    cycle: path[j..].to_vec(),
                }
                .normalized();
                if seen.insert(lasso.clone()) {
                    out.push(lasso);
                    check_budget(out.len(), budget)?;
                }
            }
        }
        if path.len() <= horizon {
            path.push(u);
            walk(game, path, horizon, lassos, budget, out, seen)?;
            path.pop();
        }
    }
    Ok(())
}

fn check_budget(n: usize, budget: usize) -> Result<(), NashError> {
    if n > budget {
        Err(NashError::Budget(budget))
    } else {
        Ok(())
    }
}

/// Pure equilibrium outcomes from `start` by definition, for testing.
pub fn brute_force_ne(
    game: &ConcurrentGame,
    start: VertexId,
    horizon: usize,
) -> Result<Vec<NeOutcome>, NashError> {
    brute_force_ne_with(game, start, &OracleOptions::new(horizon))
}

/// A play is an equilibrium outcome iff, for every player, some positional
/// strategy of the other players makes every deviation from the play
/// unprofitable once they switch to it. The deviator's best reply against
/// a fixed strategy is a shortest-path problem (Bellman-Ford). Candidate
/// punishing strategies are enumerated exhaustively.
pub fn brute_force_ne_with(
    game: &ConcurrentGame,
    start: VertexId,
    opts: &OracleOptions,
) -> Result<Vec<NeOutcome>, NashError> {
    if !is_action_visible(game) {
        return Err(NashError::NotActionVisible);
    }
    let region = game.reachable_from(start);
    let class: Vec<usize> = opts
        .class
        .clone()
        .unwrap_or_else(|| (0..game.num_vertices()).collect());
    let replies: Vec<Vec<Vec<ExtCost>>> = game
        .players()
        .map(|i| best_replies(game, i, &region, &class, opts.budget))
        .collect::<Result<_, _>>()?;

    let mut found = Vec::new();
    for play in candidate_plays(game, start, opts.horizon, opts.include_lassos, opts.budget)? {
        let costs = game
            .players()
            .map(|p| cost_of_play(game, p, &play))
            .collect::<Result<Vec<_>, _>>()?;
        let (seq, _) = steps(game, &play);
        let devs = deviations_along(game, &seq);
        let mut ok = true;
        for i in game.players() {
            let mine: Vec<(ExtCost, VertexId)> = devs
                .iter()
                .filter(|d| d.player == i)
                .map(|d| Ok((ExtCost::Finite(total_payoff(game, i, &d.prefix)?), d.new_vertex)))
                .collect::<Result<_, NashError>>()?;
            if mine.is_empty() {
                continue;
            }
            let deterred = replies[i.0].iter().any(|dist| {
                mine.iter().all(|&(paid, to)| {
                    costs[i.0] <= paid.checked_add(dist[to.0]).unwrap_or(ExtCost::PosInf)
                })
            });
            if !deterred {
                ok = false;
                break;
            }
        }
        if ok {
            found.push(NeOutcome { play, costs });
        }
    }
    Ok(found)
}

/// For each positional strategy of the players other than `i`, the least
/// cost `i` can secure from every vertex.
fn best_replies(
    game: &ConcurrentGame,
    i: PlayerId,
    region: &[VertexId],
    class: &[usize],
    budget: usize,
) -> Result<Vec<Vec<ExtCost>>, NashError> {
    let others: Vec<PlayerId> = game.players().filter(|&p| p != i).collect();
    // one representative vertex per class with a real choice
    let mut reps: Vec<(usize, VertexId)> = Vec::new();
    for &v in region {
        if game.is_target(v) || reps.iter().any(|r| r.0 == class[v.0]) {
            continue;
        }
        if others.iter().any(|&p| game.legal(v, p).len() > 1) {
            reps.push((class[v.0], v));
        }
    }
    let options: Vec<Vec<Vec<ActionId>>> = reps
        .iter()
        .map(|&(_, v)| joint_actions(game, v, &others))
        .collect();
    let mut total: usize = 1;
    for o in &options {
        total = total.saturating_mul(o.len());
        if total > budget {
            return Err(NashError::Budget(budget));
        }
    }
    let mut out = Vec::with_capacity(total);
    let mut pick = vec![0usize; reps.len()];
    loop {
        let chosen = |v: VertexId| -> Option<&Vec<ActionId>> {
            reps.iter()
                .position(|r| r.0 == class[v.0])
                .map(|k| &options[k][pick[k]])
        };
        let mut succ: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); game.num_vertices()];
        for &v in region {
            if game.is_target(v) {
                continue;
            }
            for &a in game.legal(v, i) {
                let mut profile: Vec<ActionId> =
                    game.players().map(|p| game.legal(v, p)[0]).collect();
                if let Some(joint) = chosen(v) {
                    for (k, &p) in others.iter().enumerate() {
                        profile[p.0] = joint[k];
                    }
                }
                profile[i.0] = a;
                let to = game
                    .next(v, &profile)
                    .expect("vertices of a class share their action sets");
                succ[v.0].push((to.0, game.weight(i, v, to).expect("edge")));
            }
        }
        out.push(shortest(game, region, &succ));
        let mut k = 0;
        loop {
            if k == reps.len() {
                return Ok(out);
            }
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn joint_actions(game: &ConcurrentGame, v: VertexId, others: &[PlayerId]) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    for &p in others {
        let mut grown = Vec::new();
        for prefix in &out {
            for &a in game.legal(v, p) {
                let mut x = prefix.clone();
                x.push(a);
                grown.push(x);
            }
        }
        out = grown;
    }
    out
}

fn shortest(game: &ConcurrentGame, region: &[VertexId], succ: &[Vec<(usize, Weight)>]) -> Vec<ExtCost> {
    let n = region.len();
    let mut d: Vec<ExtCost> = (0..game.num_vertices())
        .map(|v| {
            if game.is_target(VertexId(v)) {
                ExtCost::ZERO
            } else {
                ExtCost::PosInf
            }
        })
        .collect();
    for round in 0..2 * n + 1 {
        let mut changed = false;
        for &v in region {
            if game.is_target(v) {
                continue;
            }
            let c = succ[v.0]
                .iter()
                .map(|&(u, w)| d[u] + w)
                .min()
                .unwrap_or(ExtCost::PosInf);
            if c < d[v.0] {
                d[v.0] = if round >= n { ExtCost::NegInf } else { c };
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, P1};

    #[test]
    fn fig1_has_no_equilibrium() {
        let g = fixtures::fig1();
        assert!(brute_force_ne(&g, g.initial().unwrap(), 3).unwrap().is_empty());
    }

    #[test]
    fn single_edge() {
        let mut b = crate::GameBuilder::new();
        let p = b.player("P1");
        let v = b.owned_vertex("v", p);
        let t = b.vertex("t", true);
        b.edge(v, t, vec![5]);
        let g = b.build().unwrap();
        let ne = brute_force_ne(&g, v, 4).unwrap();
        assert_eq!(ne.len(), 1);
        assert_eq!(ne[0].costs, vec![ExtCost::Finite(5)]);
    }

    #[test]
    fn example2_has_none_at_any_horizon() {
        let g = fixtures::example2();
        for h in 1..10 {
            assert!(brute_force_ne(&g, g.initial().unwrap(), h).unwrap().is_empty());
        }
    }

    #[test]
    fn fig2_has_none() {
        let g = fixtures::fig2();
        assert!(brute_force_ne(&g, g.initial().unwrap(), 8).unwrap().is_empty());
    }

    #[test]
    fn candidates_on_fig2() {
        let g = fixtures::fig2();
        let plays = candidate_plays(&g, g.initial().unwrap(), 3, true, 100).unwrap();
        let names: Vec<Vec<String>> = plays
            .iter()
            .map(|p| p.unrolled().iter().map(|&v| g.vertex_name(v).to_string()).collect())
            .collect();
        assert!(names.contains(&vec!["A".into(), "C".into()]));
        assert!(names.contains(&vec!["A".into(), "B".into(), "A".into(), "C".into()]));
        assert_eq!(plays.iter().filter(|p| matches!(p, Play::Lasso { .. })).count(), 1);
        assert!(matches!(
            candidate_plays(&g, g.initial().unwrap(), 30, true, 10),
            Err(NashError::Budget(10))
        ));
        let _ = P1;
    }
}
