use serde::{Deserialize, Serialize};

use crate::cost::Weight;
use crate::game::{ConcurrentGame, PlayerId, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Every finite play from the initial region has payoff `>= -b`.
    Finite(Weight),
    /// A reachable cycle with negative total weight, listed from its
    /// smallest vertex; the edge back to the first vertex is implicit.
    Unbounded { cycle: Vec<VertexId> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub player: PlayerId,
    pub initial: VertexId,
    pub bound: Bound,
}

impl BoundCertificate {
    pub fn finite(&self) -> Option<Weight> {
        match self.bound {
            Bound::Finite(b) => Some(b),
            Bound::Unbounded { .. } => None,
        }
    }
}

/// Smallest `b >= 0` such that every finite play inside the region reachable
/// from `initial` has player payoff at least `-b`.
///
/// Plays may start anywhere in that region, not only at `initial`: the
/// non-negative construction tracks the payoff of play suffixes, so those
/// must be bounded too. Bellman-Ford from a virtual source attached to every
/// reachable vertex; a relaxation in round `|R|` exposes a negative cycle.
pub fn bound_below_certificate(
    game: &ConcurrentGame,
    player: PlayerId,
    initial: VertexId,
) -> BoundCertificate {
    let region = game.reachable_from(initial);
    let n = game.num_vertices();
    let mut dist: Vec<Weight> = vec![0; n];
    let mut pred: Vec<Option<VertexId>> = vec![None; n];
    let mut last_updated = None;
    for _ in 0..=region.len() {
        last_updated = None;
        for &v in &region {
            for e in game.out_edges(v) {
                let cand = dist[v.0] + e.weights[player.0];
                if cand < dist[e.to.0] {
                    dist[e.to.0] = cand;
                    pred[e.to.0] = Some(v);
                    last_updated = Some(e.to);
                }
            }
        }
        if last_updated.is_none() {
            break;
        }
    }
    let bound = match last_updated {
        None => Bound::Finite(-region.iter().map(|v| dist[v.0]).min().unwrap_or(0)),
        Some(mut x) => {
            for _ in 0..region.len() {
                x = pred[x.0].expect("updated vertex has a predecessor");
            }
            let start = x;
            let mut cycle = vec![start];
            let mut cur = pred[start.0].expect("on cycle");
            while cur != start {
                cycle.push(cur);
                cur = pred[cur.0].expect("on cycle");
            }
            cycle.reverse();
            let k = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
            cycle.rotate_left(k);
            Bound::Unbounded { cycle }
        }
    };
    BoundCertificate {
        player,
        initial,
        bound,
    }
}
