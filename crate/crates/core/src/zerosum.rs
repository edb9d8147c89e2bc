//! Two-player zero-sum turn-based min-cost reachability games.
//!
//! Min wants to reach a target cheaply, Max wants to prevent it or make it
//! expensive. Values live in `Z ∪ {-∞, +∞}`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::cost::{ExtCost, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Min,
    Max,
}

/// Turn-based zero-sum game with a single weight function.
///
/// Targets have no outgoing moves of interest; their value is 0.
#[derive(Clone, Debug)]
pub struct ZeroSumGame {
    pub names: Vec<String>,
    pub owner: Vec<Side>,
    pub target: Vec<bool>,
    /// `(successor, weight)`, sorted by successor.
    pub succ: Vec<Vec<(usize, Weight)>>,
    pub initial: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ZeroSumError {
    #[error("cycle through non-target vertex `{0}`; backward induction needs a DAG")]
    Cyclic(String),
    #[error("vertex `{0}` has no successor")]
    Deadlock(String),
}

impl ZeroSumGame {
    pub fn new(initial: usize) -> Self {
        ZeroSumGame {
            names: Vec::new(),
            owner: Vec::new(),
            target: Vec::new(),
            succ: Vec::new(),
            initial,
        }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, owner: Side, target: bool) -> usize {
        self.names.push(name.into());
        self.owner.push(owner);
        self.target.push(target);
        self.succ.push(Vec::new());
        self.names.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, w: Weight) {
        let list = &mut self.succ[from];
        match list.binary_search_by_key(&to, |e| e.0) {
            Ok(_) => {}
            Err(pos) => list.insert(pos, (to, w)),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn max_abs_weight(&self) -> Weight {
        self.succ
            .iter()
            .flatten()
            .map(|&(_, w)| w.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn check(&self) -> Result<(), ZeroSumError> {
        for v in 0..self.len() {
            if !self.target[v] && self.succ[v].is_empty() {
                return Err(ZeroSumError::Deadlock(self.names[v].clone()));
            }
        }
        Ok(())
    }

    pub fn is_acyclic(&self) -> bool {
        topological_order(self).is_ok()
    }
}

/// Values and a positional choice (successor) per non-target vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueMap {
    pub values: Vec<ExtCost>,
    pub choice: Vec<Option<usize>>,
}

impl ValueMap {
    pub fn at(&self, v: usize) -> ExtCost {
        self.values[v]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Backward,
    Iterate,
}

fn topological_order(zs: &ZeroSumGame) -> Result<Vec<usize>, ZeroSumError> {
    let n = zs.len();
    let mut indeg = vec![0usize; n];
    for v in 0..n {
        if zs.target[v] {
            continue;
        }
        for &(u, _) in &zs.succ[v] {
            if !zs.target[u] {
                indeg[u] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| !zs.target[v] && indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(u, _) in &zs.succ[v] {
            if !zs.target[u] {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    queue.push_back(u);
                }
            }
        }
    }
    let inner = (0..n).filter(|&v| !zs.target[v]).count();
    if order.len() < inner {
        let stuck = (0..n)
            .find(|&v| !zs.target[v] && indeg[v] > 0)
            .expect("some vertex left");
        return Err(ZeroSumError::Cyclic(zs.names[stuck].clone()));
    }
    Ok(order)
}

fn pick(side: Side, options: impl Iterator<Item = (usize, ExtCost)>) -> (ExtCost, Option<usize>) {
    let mut best: Option<(ExtCost, usize)> = None;
    for (u, c) in options {
        let better = match (best, side) {
            (None, _) => true,
            (Some((b, _)), Side::Min) => c < b,
            (Some((b, _)), Side::Max) => c > b,
        };
        if better {
            best = Some((c, u));
        }
    }
    match best {
        Some((c, u)) => (c, Some(u)),
        None => (ExtCost::PosInf, None),
    }
}

/// Backward induction on a game whose non-target part is acyclic.
pub fn solve_acyclic(zs: &ZeroSumGame) -> Result<ValueMap, ZeroSumError> {
    zs.check()?;
    let order = topological_order(zs)?;
    let n = zs.len();
    let mut values = vec![ExtCost::PosInf; n];
    let mut choice = vec![None; n];
    for v in 0..n {
        if zs.target[v] {
            values[v] = ExtCost::ZERO;
        }
    }
    for &v in order.iter().rev() {
        let (c, u) = pick(
            zs.owner[v],
            zs.succ[v].iter().map(|&(u, w)| (u, values[u] + w)),
        );
        values[v] = c;
        choice[v] = u;
    }
    Ok(ValueMap { values, choice })
}

/// Jacobi value iteration from `+∞` (0 on targets) down to the fixpoint.
///
/// A value below `-(|V|-1)·W` can only come from a negative cycle Min can
/// afford, so it is classified `-∞`. Min's choice prefers successors whose
/// value settled in an earlier sweep, which keeps Min's positional strategy
/// moving towards the target when it can.
pub fn solve_value_iteration(zs: &ZeroSumGame) -> ValueMap {
    let n = zs.len();
    let bound = (n.saturating_sub(1) as Weight).saturating_mul(zs.max_abs_weight());
    let mut x: Vec<ExtCost> = (0..n)
        .map(|v| {
            if zs.target[v] {
                ExtCost::ZERO
            } else {
                ExtCost::PosInf
            }
        })
        .collect();
    let mut rank = vec![0usize; n];
    let mut sweep = 0usize;
    loop {
        sweep += 1;
        let mut changed = false;
        let mut next = x.clone();
        for v in 0..n {
            if zs.target[v] || zs.succ[v].is_empty() {
                continue;
            }
            let (mut c, _) = pick(zs.owner[v], zs.succ[v].iter().map(|&(u, w)| (u, x[u] + w)));
            if let ExtCost::Finite(f) = c {
                if f < -bound {
                    c = ExtCost::NegInf;
                }
            }
            debug_assert!(c <= x[v], "value iteration must not increase");
            if c != x[v] {
                next[v] = c;
                rank[v] = sweep;
                changed = true;
            }
        }
        x = next;
        if !changed {
            break;
        }
    }
    let choice = (0..n)
        .map(|v| {
            if zs.target[v] || zs.succ[v].is_empty() {
                return None;
            }
            let succ = &zs.succ[v];
            match zs.owner[v] {
                Side::Max => pick(Side::Max, succ.iter().map(|&(u, w)| (u, x[u] + w))).1,
                Side::Min => {
                    let optimal = |&&(u, w): &&(usize, Weight)| x[u] + w == x[v];
                    succ.iter()
                        .filter(optimal)
                        .find(|&&(u, _)| x[v].is_finite() && (zs.target[u] || rank[u] < rank[v]))
                        .or_else(|| succ.iter().find(optimal))
                        .map(|&(u, _)| u)
                        .or(Some(succ[0].0))
                }
            }
        })
        .collect();
    ValueMap { values: x, choice }
}

pub fn solve(zs: &ZeroSumGame, method: Method) -> Result<ValueMap, ZeroSumError> {
    match method {
        Method::Backward => solve_acyclic(zs),
        Method::Iterate => {
            zs.check()?;
            Ok(solve_value_iteration(zs))
        }
        Method::Auto => match solve_acyclic(zs) {
            Err(ZeroSumError::Cyclic(_)) => Ok(solve_value_iteration(zs)),
            other => other,
        },
    }
}

/// Value at the initial vertex.
pub fn value(zs: &ZeroSumGame) -> Result<ExtCost, ZeroSumError> {
    Ok(solve(zs, Method::Auto)?.at(zs.initial))
}

/// Reference values by exhaustion, for testing.
///
/// Max has positional optimal strategies, so the value is the pointwise
/// maximum, over all positional Max strategies, of Min's shortest distance
/// to a target (Bellman-Ford, `-∞` behind a reachable negative cycle).
/// Returns `None` when there are more than `budget` Max strategies.
pub fn brute_force_values(zs: &ZeroSumGame, budget: usize) -> Option<Vec<ExtCost>> {
    let n = zs.len();
    let max_vertices: Vec<usize> = (0..n)
        .filter(|&v| !zs.target[v] && zs.owner[v] == Side::Max && !zs.succ[v].is_empty())
        .collect();
    let mut count: usize = 1;
    for &v in &max_vertices {
        count = count.checked_mul(zs.succ[v].len())?;
        if count > budget {
            return None;
        }
    }
    let mut best = vec![ExtCost::NegInf; n];
    let mut pick = vec![0usize; max_vertices.len()];
    loop {
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        for (k, &v) in max_vertices.iter().enumerate() {
            fixed[v] = Some(pick[k]);
        }
        let dist = min_distances(zs, &fixed);
        for v in 0..n {
            best[v] = best[v].max(dist[v]);
        }
        let mut k = 0;
        loop {
            if k == max_vertices.len() {
                return Some(best);
            }
            pick[k] += 1;
            if pick[k] < zs.succ[max_vertices[k]].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn min_distances(zs: &ZeroSumGame, fixed: &[Option<usize>]) -> Vec<ExtCost> {
    let n = zs.len();
    let mut d: Vec<ExtCost> = (0..n)
        .map(|v| if zs.target[v] { ExtCost::ZERO } else { ExtCost::PosInf })
        .collect();
    let relax = |d: &Vec<ExtCost>, v: usize| -> ExtCost {
        let edges: &[(usize, Weight)] = match fixed[v] {
            Some(k) => &zs.succ[v][k..=k],
            None => &zs.succ[v],
        };
        edges
            .iter()
            .map(|&(u, w)| d[u] + w)
            .min()
            .unwrap_or(ExtCost::PosInf)
    };
    for round in 0..2 * n {
        for v in 0..n {
            if zs.target[v] {
                continue;
            }
            let c = relax(&d, v);
            if c < d[v] {
                d[v] = if round + 1 >= n { ExtCost::NegInf } else { c };
            }
        }
    }
    d
}
