//! Concurrent min-cost reachability games: structure, plays, payoffs,
//! strategies and outcomes.
//!
//! A game is assembled with a [`GameBuilder`], checked with
//! [`validate_game`], and frozen into a [`ConcurrentGame`]. Action sets are
//! declared per vertex: at every vertex each player has a non-empty list of
//! legal actions and `next` is defined on their full product. Turn-based
//! vertices can be declared with an owner, in which case the owner's actions
//! are named after the successors and every other player only has the
//! `-` (wait) action.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cost::{ExtCost, Weight};

/// Name of the single action non-owners play at turn-based vertices and
/// everyone plays at targets.
pub const WAIT: &str = "-";

/// Zero-based player index. Displayed one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlayerId(pub usize);

impl PlayerId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn from_one_based(n: usize) -> Option<PlayerId> {
        n.checked_sub(1).map(PlayerId)
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Index into a player's action symbol table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One action per player.
pub type ActionProfile = Vec<ActionId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    /// One weight per player.
    pub weights: Vec<Weight>,
}

/// A broken well-formedness rule, naming the offending vertex or edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    NoPlayers,
    DuplicateVertex { vertex: String },
    DeadlockAt { vertex: String },
    NextOffEdge { vertex: String, profile: Vec<String>, to: String },
    MissingMove { vertex: String, profile: Vec<String> },
    DuplicateMove { vertex: String, profile: Vec<String> },
    ProfileArity { vertex: String, expected: usize, found: usize },
    UnknownAction { vertex: String, player: usize, action: usize },
    WeightArity { from: String, to: String, expected: usize, found: usize },
    DuplicateEdge { from: String, to: String },
    OwnedVertexWithMoves { vertex: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoPlayers => write!(f, "game has no players"),
            DuplicateVertex { vertex } => write!(f, "vertex `{vertex}` declared twice"),
            DeadlockAt { vertex } => write!(f, "vertex `{vertex}` has no successor"),
            NextOffEdge { vertex, profile, to } => write!(
                f,
                "next(`{vertex}`, ({})) = `{to}` is not an edge",
                profile.join(",")
            ),
            MissingMove { vertex, profile } => {
                write!(f, "next(`{vertex}`, ({})) is undefined", profile.join(","))
            }
            DuplicateMove { vertex, profile } => {
                write!(f, "next(`{vertex}`, ({})) defined twice", profile.join(","))
            }
            ProfileArity {
                vertex,
                expected,
                found,
            } => write!(
                f,
                "move at `{vertex}` has {found} actions, expected {expected}"
            ),
            UnknownAction {
                vertex,
                player,
                action,
            } => write!(
                f,
                "move at `{vertex}` uses unknown action #{action} of player {}",
                player + 1
            ),
            WeightArity {
                from,
                to,
                expected,
                found,
            } => write!(
                f,
                "edge `{from}`->`{to}` has {found} weights, expected {expected}"
            ),
            DuplicateEdge { from, to } => write!(f, "edge `{from}`->`{to}` declared twice"),
            OwnedVertexWithMoves { vertex } => write!(
                f,
                "vertex `{vertex}` has an owner and explicit moves; use one or the other"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("game is not well-formed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("unknown player {0}")]
    UnknownPlayer(usize),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("a play needs at least one vertex")]
    EmptyPlay,
    #[error("not a play: no edge from `{from}` to `{to}`")]
    NotAPlay { from: String, to: String },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("strategy of player {player} is undefined at `{vertex}`")]
    StrategyUndefined { player: PlayerId, vertex: String },
    #[error("strategy of player {player} picks an illegal action at `{vertex}`")]
    IllegalAction { player: PlayerId, vertex: String },
    #[error("expected {expected} strategies, got {found}")]
    ProfileArity { expected: usize, found: usize },
}

#[derive(Clone, Debug)]
struct VertexDecl {
    name: String,
    target: bool,
    owner: Option<PlayerId>,
}

/// Mutable description of a game; see [`validate_game`].
#[derive(Clone, Debug, Default)]
pub struct GameBuilder {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    action_index: Vec<HashMap<String, ActionId>>,
    vertices: Vec<VertexDecl>,
    initial: Option<VertexId>,
    edges: Vec<Edge>,
    moves: Vec<(VertexId, ActionProfile, VertexId)>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn player(&mut self, name: impl Into<String>) -> PlayerId {
        self.players.push(name.into());
        self.actions.push(Vec::new());
        self.action_index.push(HashMap::new());
        PlayerId(self.players.len() - 1)
    }

    /// Interns an action symbol in the player's table.
    pub fn action(&mut self, player: PlayerId, name: &str) -> ActionId {
        if let Some(&a) = self.action_index[player.0].get(name) {
            return a;
        }
        let id = ActionId(self.actions[player.0].len());
        self.actions[player.0].push(name.to_string());
        self.action_index[player.0].insert(name.to_string(), id);
        id
    }

    pub fn vertex(&mut self, name: impl Into<String>, target: bool) -> VertexId {
        self.vertices.push(VertexDecl {
            name: name.into(),
            target,
            owner: None,
        });
        VertexId(self.vertices.len() - 1)
    }

    /// A non-target vertex whose successor is chosen by `owner` alone. Moves
    /// are derived from its outgoing edges.
    pub fn owned_vertex(&mut self, name: impl Into<String>, owner: PlayerId) -> VertexId {
        self.vertices.push(VertexDecl {
            name: name.into(),
            target: false,
            owner: Some(owner),
        });
        VertexId(self.vertices.len() - 1)
    }

    pub fn edge(&mut self, from: VertexId, to: VertexId, weights: impl Into<Vec<Weight>>) {
        self.edges.push(Edge {
            from,
            to,
            weights: weights.into(),
        });
    }

    pub fn add_move(&mut self, from: VertexId, profile: ActionProfile, to: VertexId) {
        self.moves.push((from, profile, to));
    }

    pub fn set_initial(&mut self, v: VertexId) {
        self.initial = Some(v);
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    fn vname(&self, v: VertexId) -> String {
        self.vertices[v.0].name.clone()
    }

    fn profile_names(&self, profile: &[ActionId]) -> Vec<String> {
        profile
            .iter()
            .enumerate()
            .map(|(p, a)| {
                self.actions
                    .get(p)
                    .and_then(|t| t.get(a.0))
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", a.0))
            })
            .collect()
    }

    /// Moves of every non-target vertex, with owned vertices expanded.
    /// Action symbols needed by the expansion are interned on a clone.
    fn resolved(&self) -> (GameBuilder, Vec<Vec<(ActionProfile, VertexId)>>) {
        let mut b = self.clone();
        let n = b.players.len();
        let mut per_vertex: Vec<Vec<(ActionProfile, VertexId)>> = vec![Vec::new(); b.vertices.len()];
        for (v, profile, to) in &self.moves {
            per_vertex[v.0].push((profile.clone(), *to));
        }
        let edges = self.edges.clone();
        for e in &edges {
            let decl = &self.vertices[e.from.0];
            if decl.target {
                continue;
            }
            if let Some(owner) = decl.owner {
                let to_name = self.vertices[e.to.0].name.clone();
                let profile: ActionProfile = (0..n)
                    .map(|p| {
                        if p == owner.0 {
                            b.action(owner, &to_name)
                        } else {
                            b.action(PlayerId(p), WAIT)
                        }
                    })
                    .collect();
                per_vertex[e.from.0].push((profile, e.to));
            }
        }
        (b, per_vertex)
    }

    /// Checks every well-formedness rule; an empty list means `build` succeeds.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.players.len();
        if n == 0 {
            out.push(Violation::NoPlayers);
            return out;
        }
        let mut seen_names = HashSet::new();
        for decl in &self.vertices {
            if !seen_names.insert(decl.name.as_str()) {
                out.push(Violation::DuplicateVertex {
                    vertex: decl.name.clone(),
                });
            }
        }
        let mut edge_set = HashSet::new();
        for e in &self.edges {
            if self.vertices[e.from.0].target {
                continue;
            }
            if e.weights.len() != n {
                out.push(Violation::WeightArity {
                    from: self.vname(e.from),
                    to: self.vname(e.to),
                    expected: n,
                    found: e.weights.len(),
                });
            }
            if !edge_set.insert((e.from, e.to)) {
                out.push(Violation::DuplicateEdge {
                    from: self.vname(e.from),
                    to: self.vname(e.to),
                });
            }
        }
        let (resolved, per_vertex) = self.resolved();
        let explicit: HashSet<VertexId> = self.moves.iter().map(|m| m.0).collect();
        for (vi, decl) in self.vertices.iter().enumerate() {
            if decl.target {
                continue;
            }
            let v = VertexId(vi);
            if decl.owner.is_some() && explicit.contains(&v) {
                out.push(Violation::OwnedVertexWithMoves {
                    vertex: decl.name.clone(),
                });
                continue;
            }
            let moves = &per_vertex[vi];
            if moves.is_empty() {
                out.push(Violation::DeadlockAt {
                    vertex: decl.name.clone(),
                });
                continue;
            }
            let mut legal: Vec<Vec<ActionId>> = vec![Vec::new(); n];
            let mut arity_ok = true;
            for (profile, to) in moves {
                if profile.len() != n {
                    out.push(Violation::ProfileArity {
                        vertex: decl.name.clone(),
                        expected: n,
                        found: profile.len(),
                    });
                    arity_ok = false;
                    continue;
                }
                for (p, a) in profile.iter().enumerate() {
                    if a.0 >= resolved.actions[p].len() {
                        out.push(Violation::UnknownAction {
                            vertex: decl.name.clone(),
                            player: p,
                            action: a.0,
                        });
                        arity_ok = false;
                    } else if !legal[p].contains(a) {
                        legal[p].push(*a);
                    }
                }
                if !edge_set.contains(&(v, *to)) {
                    out.push(Violation::NextOffEdge {
                        vertex: decl.name.clone(),
                        profile: resolved.profile_names(profile),
                        to: self.vname(*to),
                    });
                }
            }
            if !arity_ok {
                continue;
            }
            let mut defined: HashMap<&[ActionId], usize> = HashMap::new();
            for (profile, _) in moves {
                *defined.entry(profile.as_slice()).or_default() += 1;
            }
            for l in legal.iter_mut() {
                l.sort();
            }
            for profile in product(&legal) {
                match defined.get(profile.as_slice()) {
                    None => out.push(Violation::MissingMove {
                        vertex: decl.name.clone(),
                        profile: resolved.profile_names(&profile),
                    }),
                    Some(&c) if c > 1 => out.push(Violation::DuplicateMove {
                        vertex: decl.name.clone(),
                        profile: resolved.profile_names(&profile),
                    }),
                    _ => {}
                }
            }
        }
        out
    }

    /// Normalizes targets (single zero-weight self-loop, everyone waits) and
    /// freezes the game, or reports every violation.
    pub fn build(self) -> Result<ConcurrentGame, GameError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        let (mut b, per_vertex) = self.resolved();
        let n = b.players.len();
        let nv = b.vertices.len();
        let wait: Vec<ActionId> = (0..n).map(|p| b.action(PlayerId(p), WAIT)).collect();

        let mut edges: Vec<Edge> = Vec::with_capacity(b.edges.len());
        for e in &b.edges {
            if !b.vertices[e.from.0].target {
                edges.push(e.clone());
            }
        }
        for (vi, decl) in b.vertices.iter().enumerate() {
            if decl.target {
                edges.push(Edge {
                    from: VertexId(vi),
                    to: VertexId(vi),
                    weights: vec![0; n],
                });
            }
        }

        let mut legal = Vec::with_capacity(nv);
        let mut next = Vec::with_capacity(nv);
        for (vi, decl) in b.vertices.iter().enumerate() {
            if decl.target {
                legal.push(wait.iter().map(|&a| vec![a]).collect::<Vec<_>>());
                next.push(vec![VertexId(vi)]);
                continue;
            }
            let moves = &per_vertex[vi];
            let mut l: Vec<Vec<ActionId>> = vec![Vec::new(); n];
            for (profile, _) in moves {
                for (p, a) in profile.iter().enumerate() {
                    if !l[p].contains(a) {
                        l[p].push(*a);
                    }
                }
            }
            for x in l.iter_mut() {
                x.sort();
            }
            let layout = ProfileLayout::new(&l);
            let mut table = vec![VertexId(usize::MAX); layout.count];
            for (profile, to) in moves {
                let idx = layout.index_of(&l, profile).expect("validated profile");
                table[idx] = *to;
            }
            legal.push(l);
            next.push(table);
        }
        Ok(ConcurrentGame::assemble(
            b.players, b.actions, b.vertices, b.initial, edges, legal, next,
        ))
    }
}

/// Checks a game description against every structural rule: deadlock
/// freedom, `next` landing on edges, complete and unambiguous `next`
/// tables, and per-player weights on every edge. Targets are exempt since
/// they are normalized on build.
pub fn validate_game(game: &GameBuilder) -> Vec<Violation> {
    game.violations()
}

/// Cartesian product in lexicographic order, first player most significant.
fn product(sets: &[Vec<ActionId>]) -> Vec<ActionProfile> {
    let mut out = vec![Vec::with_capacity(sets.len())];
    for set in sets {
        let mut grown = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for a in set {
                let mut p = prefix.clone();
                p.push(*a);
                grown.push(p);
            }
        }
        out = grown;
    }
    out
}

struct ProfileLayout {
    strides: Vec<usize>,
    count: usize,
}

impl ProfileLayout {
    fn new(legal: &[Vec<ActionId>]) -> Self {
        let mut strides = vec![0; legal.len()];
        let mut acc = 1;
        for p in (0..legal.len()).rev() {
            strides[p] = acc;
            acc *= legal[p].len();
        }
        ProfileLayout {
            strides,
            count: acc,
        }
    }

    fn index_of(&self, legal: &[Vec<ActionId>], profile: &[ActionId]) -> Option<usize> {
        let mut idx = 0;
        for (p, a) in profile.iter().enumerate() {
            let pos = legal[p].binary_search(a).ok()?;
            idx += pos * self.strides[p];
        }
        Some(idx)
    }
}

#[derive(Clone, Debug)]
struct VertexInfo {
    name: String,
    target: bool,
}

/// A validated concurrent MCR game. Immutable once built.
#[derive(Clone, Debug)]
pub struct ConcurrentGame {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    vertices: Vec<VertexInfo>,
    by_name: HashMap<String, VertexId>,
    initial: Option<VertexId>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<usize>>,
    edge_index: HashMap<(VertexId, VertexId), usize>,
    legal: Vec<Vec<Vec<ActionId>>>,
    strides: Vec<Vec<usize>>,
    next: Vec<Vec<VertexId>>,
}

impl ConcurrentGame {
    fn assemble(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        decls: Vec<VertexDecl>,
        initial: Option<VertexId>,
        mut edges: Vec<Edge>,
        legal: Vec<Vec<Vec<ActionId>>>,
        next: Vec<Vec<VertexId>>,
    ) -> Self {
        edges.sort_by_key(|e| (e.from, e.to));
        let mut out_edges = vec![Vec::new(); decls.len()];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from.0].push(i);
            edge_index.insert((e.from, e.to), i);
        }
        let strides = legal
            .iter()
            .map(|l: &Vec<Vec<ActionId>>| ProfileLayout::new(l).strides)
            .collect();
        let by_name = decls
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.clone(), VertexId(i)))
            .collect();
        let vertices = decls
            .into_iter()
            .map(|d| VertexInfo {
                name: d.name,
                target: d.target,
            })
            .collect();
        ConcurrentGame {
            players,
            actions,
            vertices,
            by_name,
            initial,
            edges,
            out_edges,
            edge_index,
            legal,
            strides,
            next,
        }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (0..self.players.len()).map(PlayerId)
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p.0]
    }

    pub fn check_player(&self, p: PlayerId) -> Result<(), GameError> {
        if p.0 < self.players.len() {
            Ok(())
        } else {
            Err(GameError::UnknownPlayer(p.0 + 1))
        }
    }

    pub fn action_names(&self, p: PlayerId) -> &[String] {
        &self.actions[p.0]
    }

    pub fn action_name(&self, p: PlayerId, a: ActionId) -> &str {
        &self.actions[p.0][a.0]
    }

    pub fn action_by_name(&self, p: PlayerId, name: &str) -> Option<ActionId> {
        self.actions[p.0]
            .iter()
            .position(|s| s == name)
            .map(ActionId)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn is_target(&self, v: VertexId) -> bool {
        self.vertices[v.0].target
    }

    pub fn initial(&self) -> Option<VertexId> {
        self.initial
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, from: VertexId, to: VertexId) -> Option<&Edge> {
        self.edge_index.get(&(from, to)).map(|&i| &self.edges[i])
    }

    pub fn weight(&self, p: PlayerId, from: VertexId, to: VertexId) -> Option<Weight> {
        self.edge(from, to).map(|e| e.weights[p.0])
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.out_edges[v.0].iter().map(move |&i| &self.edges[i])
    }

    /// Successors by edge, in increasing vertex order.
    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_edges(v).map(|e| e.to)
    }

    pub fn legal(&self, v: VertexId, p: PlayerId) -> &[ActionId] {
        &self.legal[v.0][p.0]
    }

    pub fn profile_count(&self, v: VertexId) -> usize {
        self.next[v.0].len()
    }

    pub fn profile_at(&self, v: VertexId, idx: usize) -> ActionProfile {
        let legal = &self.legal[v.0];
        let strides = &self.strides[v.0];
        (0..legal.len())
            .map(|p| legal[p][(idx / strides[p]) % legal[p].len()])
            .collect()
    }

    pub fn profile_index(&self, v: VertexId, profile: &[ActionId]) -> Option<usize> {
        if profile.len() != self.players.len() {
            return None;
        }
        let legal = &self.legal[v.0];
        let mut idx = 0;
        for (p, a) in profile.iter().enumerate() {
            let pos = legal[p].binary_search(a).ok()?;
            idx += pos * self.strides[v.0][p];
        }
        Some(idx)
    }

    /// `next(v, profile)`, or `None` when some action is illegal at `v`.
    pub fn next(&self, v: VertexId, profile: &[ActionId]) -> Option<VertexId> {
        self.profile_index(v, profile).map(|i| self.next[v.0][i])
    }

    pub fn next_at(&self, v: VertexId, idx: usize) -> VertexId {
        self.next[v.0][idx]
    }

    /// All `(profile, successor)` pairs at `v` in profile order.
    pub fn moves(&self, v: VertexId) -> impl Iterator<Item = (ActionProfile, VertexId)> + '_ {
        (0..self.profile_count(v)).map(move |i| (self.profile_at(v, i), self.next[v.0][i]))
    }

    /// Profiles leading from `v` to `to`.
    pub fn profiles_to(&self, v: VertexId, to: VertexId) -> Vec<ActionProfile> {
        (0..self.profile_count(v))
            .filter(|&i| self.next[v.0][i] == to)
            .map(|i| self.profile_at(v, i))
            .collect()
    }

    pub fn profile_names(&self, profile: &[ActionId]) -> Vec<String> {
        profile
            .iter()
            .enumerate()
            .map(|(p, a)| self.actions[p][a.0].clone())
            .collect()
    }

    /// Vertices reachable from `from` along edges, in BFS order.
    pub fn reachable_from(&self, from: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.num_vertices()];
        let mut order = vec![from];
        seen[from.0] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in self.successors(v) {
                if !seen[w.0] {
                    seen[w.0] = true;
                    order.push(w);
                }
            }
        }
        order
    }

    /// Rebuilds a mutable description with identical vertices, actions and
    /// moves; used by constructions that derive new games.
    pub fn to_builder(&self) -> GameBuilder {
        let mut b = GameBuilder::new();
        for (p, name) in self.players.iter().enumerate() {
            let id = b.player(name.clone());
            for a in &self.actions[p] {
                b.action(id, a);
            }
        }
        for info in &self.vertices {
            b.vertex(info.name.clone(), info.target);
        }
        if let Some(v) = self.initial {
            b.set_initial(v);
        }
        for e in &self.edges {
            if !self.is_target(e.from) {
                b.edge(e.from, e.to, e.weights.clone());
            }
        }
        for v in self.vertices() {
            if self.is_target(v) {
                continue;
            }
            for (profile, to) in self.moves(v) {
                b.add_move(v, profile, to);
            }
        }
        b
    }
}

/// A non-empty finite sequence of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePlay(Vec<VertexId>);

impl FinitePlay {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, GameError> {
        if vertices.is_empty() {
            return Err(GameError::EmptyPlay);
        }
        Ok(FinitePlay(vertices))
    }

    pub fn single(v: VertexId) -> Self {
        FinitePlay(vec![v])
    }

    /// Builds a play from vertex names.
    pub fn from_names(game: &ConcurrentGame, names: &[&str]) -> Result<Self, GameError> {
        let vs = names
            .iter()
            .map(|n| {
                game.vertex_by_name(n)
                    .ok_or_else(|| GameError::UnknownVertex(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let play = FinitePlay::new(vs)?;
        play.check(game)?;
        Ok(play)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn first(&self) -> VertexId {
        self.0[0]
    }

    pub fn last(&self) -> VertexId {
        *self.0.last().expect("non-empty")
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn push(&mut self, v: VertexId) {
        self.0.push(v);
    }

    /// The prefix `v_0 … v_k`.
    pub fn prefix(&self, k: usize) -> FinitePlay {
        FinitePlay(self.0[..=k].to_vec())
    }

    pub fn first_target(&self, game: &ConcurrentGame) -> Option<usize> {
        self.0.iter().position(|&v| game.is_target(v))
    }

    /// Consecutive vertices must be joined by edges.
    pub fn check(&self, game: &ConcurrentGame) -> Result<(), GameError> {
        for w in self.0.windows(2) {
            if game.edge(w[0], w[1]).is_none() {
                return Err(GameError::NotAPlay {
                    from: game.vertex_name(w[0]).to_string(),
                    to: game.vertex_name(w[1]).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn names(&self, game: &ConcurrentGame) -> Vec<String> {
        self.0
            .iter()
            .map(|&v| game.vertex_name(v).to_string())
            .collect()
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }
}

/// A finite play, or an infinite play `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Play {
    Finite(FinitePlay),
    Lasso {
        prefix: Vec<VertexId>,
        cycle: Vec<VertexId>,
    },
}

impl Play {
    /// Canonical form of a lasso: primitive cycle, shortest prefix.
    pub fn normalized(self) -> Play {
        let Play::Lasso { mut prefix, mut cycle } = self else {
            return self;
        };
        let n = cycle.len();
        if let Some(p) = (1..=n).find(|&p| n % p == 0 && (p..n).all(|k| cycle[k] == cycle[k - p])) {
            cycle.truncate(p);
        }
        while !prefix.is_empty() && prefix.last() == cycle.last() {
            prefix.pop();
            cycle.rotate_right(1);
        }
        Play::Lasso { prefix, cycle }
    }

    /// The vertices of the prefix followed by one pass of the cycle.
    pub fn unrolled(&self) -> Vec<VertexId> {
        match self {
            Play::Finite(p) => p.vertices().to_vec(),
            Play::Lasso { prefix, cycle } => prefix.iter().chain(cycle).copied().collect(),
        }
    }

    pub fn check(&self, game: &ConcurrentGame) -> Result<(), GameError> {
        match self {
            Play::Finite(p) => p.check(game),
            Play::Lasso { cycle, .. } => {
                if cycle.is_empty() {
                    return Err(GameError::EmptyPlay);
                }
                let mut seq = self.unrolled();
                seq.push(cycle[0]);
                FinitePlay(seq).check(game)
            }
        }
    }
}

impl From<FinitePlay> for Play {
    fn from(p: FinitePlay) -> Self {
        Play::Finite(p)
    }
}

/// Sum of the player's weights along the play; 0 for a single vertex.
pub fn total_payoff(
    game: &ConcurrentGame,
    player: PlayerId,
    play: &FinitePlay,
) -> Result<Weight, GameError> {
    game.check_player(player)?;
    let mut sum = 0;
    for w in play.vertices().windows(2) {
        sum += game.weight(player, w[0], w[1]).ok_or_else(|| GameError::NotAPlay {
            from: game.vertex_name(w[0]).to_string(),
            to: game.vertex_name(w[1]).to_string(),
        })?;
    }
    Ok(sum)
}

/// Total payoff up to the first target, or `+∞` when no target is visited.
pub fn cost_of_play(
    game: &ConcurrentGame,
    player: PlayerId,
    play: &Play,
) -> Result<ExtCost, GameError> {
    game.check_player(player)?;
    play.check(game)?;
    let seq = play.unrolled();
    match seq.iter().position(|&v| game.is_target(v)) {
        None => Ok(ExtCost::PosInf),
        Some(k) => {
            let prefix = FinitePlay(seq[..=k].to_vec());
            Ok(ExtCost::Finite(total_payoff(game, player, &prefix)?))
        }
    }
}

/// A player's strategy: maps a history (ending at the current vertex) to an
/// action.
#[derive(Clone)]
pub enum Strategy {
    /// One action per vertex.
    Positional(Vec<Option<ActionId>>),
    /// Exact histories first, then the per-vertex default.
    Tabular {
        table: HashMap<Vec<VertexId>, ActionId>,
        default: Vec<Option<ActionId>>,
    },
    /// Computed from the history, e.g. the image of a strategy through a
    /// game transformation.
    Derived(Arc<dyn Fn(&[VertexId]) -> Option<ActionId> + Send + Sync>),
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Positional(m) => f.debug_tuple("Positional").field(m).finish(),
            Strategy::Tabular { table, default } => f
                .debug_struct("Tabular")
                .field("table", table)
                .field("default", default)
                .finish(),
            Strategy::Derived(_) => f.write_str("Derived(..)"),
        }
    }
}

impl Strategy {
    pub fn decide(&self, history: &[VertexId]) -> Option<ActionId> {
        let v = *history.last()?;
        match self {
            Strategy::Positional(m) => m.get(v.0).copied().flatten(),
            Strategy::Tabular { table, default } => table
                .get(history)
                .copied()
                .or_else(|| default.get(v.0).copied().flatten()),
            Strategy::Derived(f) => f(history),
        }
    }

    /// Positional strategy for a turn-based player given as successor
    /// choices: at each listed vertex, the player's action leading there.
    pub fn from_successors(
        game: &ConcurrentGame,
        player: PlayerId,
        choices: &[(VertexId, VertexId)],
    ) -> Result<Strategy, GameError> {
        let mut map = vec![None; game.num_vertices()];
        for &(v, to) in choices {
            let profiles = game.profiles_to(v, to);
            let a = profiles.first().map(|p| p[player.0]).ok_or_else(|| {
                GameError::NotAPlay {
                    from: game.vertex_name(v).to_string(),
                    to: game.vertex_name(to).to_string(),
                }
            })?;
            map[v.0] = Some(a);
        }
        Ok(Strategy::Positional(map))
    }
}

/// One strategy per player.
#[derive(Clone, Debug)]
pub struct StrategyProfile(pub Vec<Strategy>);

/// The play produced by a strategy profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub play: FinitePlay,
    pub reached_target: bool,
}

/// Unfolds `profile` from `start` until the first target or `horizon` steps.
///
/// A player with a single legal action at a vertex needs no decision there.
pub fn outcome(
    game: &ConcurrentGame,
    start: VertexId,
    profile: &StrategyProfile,
    horizon: usize,
) -> Result<Outcome, GameError> {
    if horizon == 0 {
        return Err(GameError::ZeroHorizon);
    }
    if profile.0.len() != game.num_players() {
        return Err(GameError::ProfileArity {
            expected: game.num_players(),
            found: profile.0.len(),
        });
    }
    let mut history = vec![start];
    loop {
        let v = *history.last().expect("non-empty");
        if game.is_target(v) {
            return Ok(Outcome {
                play: FinitePlay(history),
                reached_target: true,
            });
        }
        if history.len() > horizon {
            return Ok(Outcome {
                play: FinitePlay(history),
                reached_target: false,
            });
        }
        let actions = joint_decision(game, &history, profile)?;
        let to = game.next(v, &actions).expect("legal actions");
        history.push(to);
    }
}

fn joint_decision(
    game: &ConcurrentGame,
    history: &[VertexId],
    profile: &StrategyProfile,
) -> Result<ActionProfile, GameError> {
    let v = *history.last().expect("non-empty");
    game.players()
        .map(|p| {
            let legal = game.legal(v, p);
            if legal.len() == 1 {
                return Ok(legal[0]);
            }
            let a = profile.0[p.0]
                .decide(history)
                .ok_or_else(|| GameError::StrategyUndefined {
                    player: p,
                    vertex: game.vertex_name(v).to_string(),
                })?;
            if legal.contains(&a) {
                Ok(a)
            } else {
                Err(GameError::IllegalAction {
                    player: p,
                    vertex: game.vertex_name(v).to_string(),
                })
            }
        })
        .collect()
}

/// The owner of each vertex when the game is turn-based.
///
/// A vertex belongs to a player when fixing that player's action fixes the
/// successor; vertices with a single successor belong to every player and
/// are attributed to the lowest index.
pub fn is_turn_based(game: &ConcurrentGame) -> Option<Vec<PlayerId>> {
    game.vertices().map(|v| owner_of(game, v)).collect()
}

pub fn owner_of(game: &ConcurrentGame, v: VertexId) -> Option<PlayerId> {
    game.players().find(|&p| {
        let mut seen: HashMap<ActionId, VertexId> = HashMap::new();
        game.moves(v)
            .all(|(profile, to)| *seen.entry(profile[p.0]).or_insert(to) == to)
    })
}

/// True when, from every vertex, distinct action profiles lead to distinct
/// successors, so every move reveals the actions played.
pub fn is_action_visible(game: &ConcurrentGame) -> bool {
    game.vertices().all(|v| {
        let mut seen = HashSet::new();
        (0..game.profile_count(v)).all(|i| seen.insert(game.next_at(v, i)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig2_is_well_formed_and_turn_based() {
        let b = fixtures::fig2_builder();
        assert_eq!(validate_game(&b), vec![]);
        let g = b.build().unwrap();
        let owners = is_turn_based(&g).unwrap();
        let a = g.vertex_by_name("A").unwrap();
        let bv = g.vertex_by_name("B").unwrap();
        let c = g.vertex_by_name("C").unwrap();
        assert_eq!(owners[a.0], PlayerId(0));
        assert_eq!(owners[bv.0], PlayerId(1));
        assert_eq!(owners[c.0], PlayerId(0));
        assert!(is_action_visible(&g));
    }

    #[test]
    fn deadlock_is_reported() {
        let mut b = GameBuilder::new();
        let p = b.player("P1");
        let a = b.action(p, "go");
        let v = b.vertex("v", false);
        let w = b.vertex("w", false);
        let t = b.vertex("t", true);
        b.edge(v, t, vec![1]);
        b.add_move(v, vec![a], t);
        let _ = w;
        assert_eq!(
            validate_game(&b),
            vec![Violation::DeadlockAt {
                vertex: "w".into()
            }]
        );
        assert!(matches!(b.build(), Err(GameError::Invalid(_))));
    }

    #[test]
    fn next_off_edge_is_reported() {
        let mut b = GameBuilder::new();
        let p = b.player("P1");
        let a = b.action(p, "go");
        let v = b.vertex("v", false);
        let t = b.vertex("t", true);
        let u = b.vertex("u", true);
        b.edge(v, t, vec![0]);
        b.add_move(v, vec![a], u);
        assert_eq!(
            validate_game(&b),
            vec![Violation::NextOffEdge {
                vertex: "v".into(),
                profile: vec!["go".into()],
                to: "u".into()
            }]
        );
    }

    #[test]
    fn incomplete_next_table_is_reported() {
        let mut b = GameBuilder::new();
        let p1 = b.player("P1");
        let p2 = b.player("P2");
        let a1 = b.action(p1, "a");
        let b1 = b.action(p1, "b");
        let a2 = b.action(p2, "a");
        let b2 = b.action(p2, "b");
        let s = b.vertex("s", false);
        let t = b.vertex("t", true);
        b.edge(s, t, vec![0, 0]);
        b.add_move(s, vec![a1, a2], t);
        b.add_move(s, vec![b1, b2], t);
        let v = validate_game(&b);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| matches!(x, Violation::MissingMove { .. })));
    }

    #[test]
    fn targets_are_normalized() {
        let mut b = GameBuilder::new();
        let p = b.player("P1");
        let v = b.owned_vertex("v", p);
        let t = b.vertex("t", true);
        b.edge(v, t, vec![3]);
        b.edge(t, v, vec![-9]);
        let g = b.build().unwrap();
        let out: Vec<_> = g.out_edges(t).collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].to, t);
        assert_eq!(out[0].weights, vec![0]);
        assert_eq!(g.profile_count(t), 1);
    }

    #[test]
    fn payoffs_on_fig2() {
        let g = fixtures::fig2();
        let p1 = PlayerId(0);
        let p2 = PlayerId(1);
        let aba = FinitePlay::from_names(&g, &["A", "B", "A"]).unwrap();
        assert_eq!(total_payoff(&g, p1, &aba).unwrap(), -1);
        let abc = FinitePlay::from_names(&g, &["A", "B", "C"]).unwrap();
        assert_eq!(total_payoff(&g, p2, &abc).unwrap(), -1);
        let single = FinitePlay::from_names(&g, &["B"]).unwrap();
        assert_eq!(total_payoff(&g, p1, &single).unwrap(), 0);
        assert_eq!(
            total_payoff(&g, PlayerId(5), &single),
            Err(GameError::UnknownPlayer(6))
        );
    }

    #[test]
    fn costs_on_fig2() {
        let g = fixtures::fig2();
        let a = g.vertex_by_name("A").unwrap();
        let b = g.vertex_by_name("B").unwrap();
        let c = g.vertex_by_name("C").unwrap();
        let p1 = PlayerId(0);
        let looping = Play::Lasso {
            prefix: vec![],
            cycle: vec![a, b],
        };
        assert_eq!(cost_of_play(&g, p1, &looping).unwrap(), ExtCost::PosInf);
        let ac = Play::Lasso {
            prefix: vec![a],
            cycle: vec![c],
        };
        assert_eq!(cost_of_play(&g, p1, &ac).unwrap(), ExtCost::ZERO);
        let at_target = Play::Finite(FinitePlay::single(c));
        assert_eq!(cost_of_play(&g, p1, &at_target).unwrap(), ExtCost::ZERO);
        let bad = Play::Finite(FinitePlay::new(vec![c, a]).unwrap());
        assert!(cost_of_play(&g, p1, &bad).is_err());
    }

    #[test]
    fn lasso_normal_form() {
        let v = |i| VertexId(i);
        let l = Play::Lasso {
            prefix: vec![v(0), v(1), v(2)],
            cycle: vec![v(1), v(2), v(1), v(2)],
        };
        assert_eq!(
            l.normalized(),
            Play::Lasso {
                prefix: vec![v(0)],
                cycle: vec![v(1), v(2)]
            }
        );
    }

    #[test]
    fn fig1_outcome_and_shape() {
        let g = fixtures::fig1();
        let s = g.vertex_by_name("s").unwrap();
        let a1 = g.action_by_name(PlayerId(0), "a").unwrap();
        let a2 = g.action_by_name(PlayerId(1), "a").unwrap();
        let mut m1 = vec![None; g.num_vertices()];
        m1[s.0] = Some(a1);
        let mut m2 = vec![None; g.num_vertices()];
        m2[s.0] = Some(a2);
        let profile = StrategyProfile(vec![Strategy::Positional(m1), Strategy::Positional(m2)]);
        let out = outcome(&g, s, &profile, 10).unwrap();
        assert!(out.reached_target);
        assert_eq!(out.play.names(&g), vec!["s", "t_aa"]);
        assert!(is_turn_based(&g).is_none());
        assert!(is_action_visible(&g));
    }

    #[test]
    fn example2_loop_never_reaches() {
        let g = fixtures::example2();
        let v1 = g.vertex_by_name("v1").unwrap();
        let stay = Strategy::from_successors(&g, PlayerId(0), &[(v1, v1)]).unwrap();
        let out = outcome(&g, v1, &StrategyProfile(vec![stay]), 5).unwrap();
        assert!(!out.reached_target);
        assert_eq!(out.play.len(), 6);
        assert!(out.play.vertices().iter().all(|&v| v == v1));
        // one player: everything is owned by player 1
        assert!(is_turn_based(&g).unwrap().iter().all(|&p| p == PlayerId(0)));
    }

    #[test]
    fn undefined_strategy_is_an_error() {
        let g = fixtures::fig1();
        let s = g.vertex_by_name("s").unwrap();
        let empty = StrategyProfile(vec![
            Strategy::Positional(vec![None; g.num_vertices()]),
            Strategy::Positional(vec![None; g.num_vertices()]),
        ]);
        assert!(matches!(
            outcome(&g, s, &empty, 3),
            Err(GameError::StrategyUndefined { .. })
        ));
    }

    #[test]
    fn non_visible_game_detected() {
        let mut b = GameBuilder::new();
        let p = b.player("P1");
        let x = b.action(p, "x");
        let y = b.action(p, "y");
        let v = b.vertex("v", false);
        let t = b.vertex("t", true);
        b.edge(v, t, vec![0]);
        b.add_move(v, vec![x], t);
        b.add_move(v, vec![y], t);
        let g = b.build().unwrap();
        assert!(!is_action_visible(&g));
    }

    #[test]
    fn fig1_unilateral_deviation_always_helps_someone() {
        let g = fixtures::fig1();
        let s = g.vertex_by_name("s").unwrap();
        for (profile, to) in g.moves(s) {
            let mut improvers = 0;
            for p in g.players() {
                let cost = g.weight(p, s, to).unwrap();
                let better = g.legal(s, p).iter().any(|&alt| {
                    let mut q = profile.clone();
                    q[p.0] = alt;
                    g.weight(p, s, g.next(s, &q).unwrap()).unwrap() < cost
                });
                if better {
                    improvers += 1;
                }
            }
            assert_eq!(improvers, 1);
        }
    }
}
