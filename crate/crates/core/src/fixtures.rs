//! Small reference games used in documentation and tests.

use rand::Rng;

use crate::cost::Weight;
use crate::game::{ConcurrentGame, GameBuilder, PlayerId, VertexId};
use crate::zerosum::{Side, ZeroSumGame};

/// Two players pick `a` or `b` at `s`; each profile leads to its own
/// target. Player 1 pays 1 when the actions match, player 2 pays 1 when
/// they differ. No pure equilibrium exists.
pub fn fig1_builder() -> GameBuilder {
    let mut b = GameBuilder::new();
    let p1 = b.player("P1");
    let p2 = b.player("P2");
    let s = b.vertex("s", false);
    b.set_initial(s);
    for x in ["a", "b"] {
        for y in ["a", "b"] {
            let t = b.vertex(format!("t_{x}{y}"), true);
            let w = if x == y { vec![1, 0] } else { vec![0, 1] };
            b.edge(s, t, w);
            let ax = b.action(p1, x);
            let ay = b.action(p2, y);
            b.add_move(s, vec![ax, ay], t);
        }
    }
    b
}

pub fn fig1() -> ConcurrentGame {
    fig1_builder().build().expect("well-formed")
}

/// Turn-based two-player game: `A` and the target `C` belong to player 1,
/// `B` to player 2. Looping lowers the other player's cost.
pub fn fig2_builder() -> GameBuilder {
    let mut b = GameBuilder::new();
    let p1 = b.player("P1");
    let p2 = b.player("P2");
    let a = b.owned_vertex("A", p1);
    let bv = b.owned_vertex("B", p2);
    let c = b.vertex("C", true);
    b.set_initial(a);
    b.edge(a, bv, vec![0, -1]);
    b.edge(a, c, vec![0, -1]);
    b.edge(bv, a, vec![-1, 0]);
    b.edge(bv, c, vec![-1, 0]);
    b
}

pub fn fig2() -> ConcurrentGame {
    fig2_builder().build().expect("well-formed")
}

/// One player at `v1` may loop (weight -1) or move to the target `v2`
/// (weight -1). Every strategy is beaten by looping once more.
pub fn example2_builder() -> GameBuilder {
    let mut b = GameBuilder::new();
    let p = b.player("P1");
    let v1 = b.owned_vertex("v1", p);
    let v2 = b.vertex("v2", true);
    b.set_initial(v1);
    b.edge(v1, v1, vec![-1]);
    b.edge(v1, v2, vec![-1]);
    b
}

pub fn example2() -> ConcurrentGame {
    example2_builder().build().expect("well-formed")
}

/// Chain `v0 -(-2)-> v1 -(+3)-> t` for one player.
pub fn chain() -> ConcurrentGame {
    let mut b = GameBuilder::new();
    let p = b.player("P1");
    let v0 = b.owned_vertex("v0", p);
    let v1 = b.owned_vertex("v1", p);
    let t = b.vertex("t", true);
    b.set_initial(v0);
    b.edge(v0, v1, vec![-2]);
    b.edge(v1, t, vec![3]);
    b.build().expect("well-formed")
}

pub const P1: PlayerId = PlayerId(0);
pub const P2: PlayerId = PlayerId(1);

/// Random zero-sum game with `n` vertices (the last one a target) and
/// weights in `[-wmax, wmax]`. When `acyclic`, edges only go to higher
/// indices.
pub fn random_zero_sum<R: Rng>(rng: &mut R, n: usize, wmax: Weight, acyclic: bool) -> ZeroSumGame {
    let n = n.max(2);
    let mut zs = ZeroSumGame::new(0);
    for v in 0..n {
        let owner = if rng.gen_bool(0.5) { Side::Min } else { Side::Max };
        zs.add_vertex(format!("v{v}"), owner, v == n - 1);
    }
    for v in 0..n - 1 {
        let degree = rng.gen_range(1..=3);
        for _ in 0..degree {
            let to = if acyclic {
                rng.gen_range(v + 1..n)
            } else {
                rng.gen_range(0..n)
            };
            zs.add_edge(v, to, rng.gen_range(-wmax..=wmax));
        }
    }
    zs
}

/// Random turn-based game: `nv` vertices, the last one a target, every
/// other vertex owned by a random player with 1 to 3 successors. Weights
/// per player in `[-wmax, wmax]`.
pub fn random_turn_based<R: Rng>(
    rng: &mut R,
    nv: usize,
    players: usize,
    wmax: Weight,
    acyclic: bool,
) -> ConcurrentGame {
    let nv = nv.max(2);
    let mut b = GameBuilder::new();
    let ps: Vec<PlayerId> = (0..players).map(|p| b.player(format!("P{}", p + 1))).collect();
    let vs: Vec<VertexId> = (0..nv)
        .map(|v| {
            if v == nv - 1 {
                b.vertex(format!("v{v}"), true)
            } else {
                b.owned_vertex(format!("v{v}"), ps[rng.gen_range(0..players)])
            }
        })
        .collect();
    b.set_initial(vs[0]);
    for v in 0..nv - 1 {
        let degree = rng.gen_range(1..=3);
        let mut seen = Vec::new();
        for _ in 0..degree {
            let to = if acyclic {
                rng.gen_range(v + 1..nv)
            } else {
                rng.gen_range(0..nv)
            };
            if seen.contains(&to) {
                continue;
            }
            seen.push(to);
            let w: Vec<Weight> = (0..players).map(|_| rng.gen_range(-wmax..=wmax)).collect();
            b.edge(vs[v], vs[to], w);
        }
    }
    b.build().expect("generated game is well-formed")
}
