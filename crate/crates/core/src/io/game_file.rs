use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{from_json, to_json, Diagnostic, IoError, VERSION};
use crate::cost::Weight;
use crate::game::{ConcurrentGame, GameBuilder, PlayerId, VertexId, Violation, WAIT};

/// A game as written on disk. The wait action `-` is implicit in every
/// action table. Targets need no edges or moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub version: u32,
    pub players: Vec<String>,
    pub actions: Vec<Vec<String>>,
    pub vertices: Vec<VertexEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub next: Vec<MoveEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub target: bool,
    /// Turn-based shorthand: the owner's actions are the successor names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub weights: Vec<Weight>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveEntry {
    pub vertex: String,
    pub profile: Vec<String>,
    pub to: String,
}

impl GameFile {
    pub fn from_game(game: &ConcurrentGame) -> GameFile {
        let players: Vec<String> = game.players().map(|p| game.player_name(p).to_string()).collect();
        let actions = game
            .players()
            .map(|p| {
                game.action_names(p)
                    .iter()
                    .filter(|a| *a != WAIT)
                    .cloned()
                    .collect()
            })
            .collect();
        let mut vertices = Vec::new();
        let mut next = Vec::new();
        for v in game.vertices() {
            let target = game.is_target(v);
            let owner = if target { None } else { owned_by(game, v) };
            vertices.push(VertexEntry {
                name: game.vertex_name(v).to_string(),
                target,
                owner: owner.map(|p| players[p.0].clone()),
            });
            if target || owner.is_some() {
                continue;
            }
            for (profile, to) in game.moves(v) {
                next.push(MoveEntry {
                    vertex: game.vertex_name(v).to_string(),
                    profile: game.profile_names(&profile),
                    to: game.vertex_name(to).to_string(),
                });
            }
        }
        let edges = game
            .edges()
            .iter()
            .filter(|e| !game.is_target(e.from))
            .map(|e| EdgeEntry {
                from: game.vertex_name(e.from).to_string(),
                to: game.vertex_name(e.to).to_string(),
                weights: e.weights.clone(),
            })
            .collect();
        GameFile {
            version: VERSION,
            players,
            actions,
            vertices,
            initial: game.initial().map(|v| game.vertex_name(v).to_string()),
            edges,
            next,
        }
    }

    /// Resolves names; structural rules are left to the builder.
    pub fn to_builder(&self) -> Result<GameBuilder, IoError> {
        let mut b = GameBuilder::new();
        let players: HashMap<&str, PlayerId> = self
            .players
            .iter()
            .map(|p| (p.as_str(), b.player(p.clone())))
            .collect();
        if self.actions.len() != self.players.len() {
            return Err(IoError::Value(format!(
                "{} action tables for {} players",
                self.actions.len(),
                self.players.len()
            )));
        }
        let mut symbols: Vec<HashMap<&str, _>> = Vec::new();
        for (p, table) in self.actions.iter().enumerate() {
            let mut m = HashMap::new();
            for a in table {
                m.insert(a.as_str(), b.action(PlayerId(p), a));
            }
            m.insert(WAIT, b.action(PlayerId(p), WAIT));
            symbols.push(m);
        }
        let mut vertices: HashMap<&str, VertexId> = HashMap::new();
        for v in &self.vertices {
            let id = match &v.owner {
                Some(o) if !v.target => {
                    let p = *players
                        .get(o.as_str())
                        .ok_or_else(|| IoError::UnknownPlayer(o.clone()))?;
                    b.owned_vertex(v.name.clone(), p)
                }
                _ => b.vertex(v.name.clone(), v.target),
            };
            vertices.entry(v.name.as_str()).or_insert(id);
        }
        let vertex = |name: &str| {
            vertices
                .get(name)
                .copied()
                .ok_or_else(|| IoError::UnknownVertex(name.to_string()))
        };
        if let Some(i) = &self.initial {
            b.set_initial(vertex(i)?);
        }
        for e in &self.edges {
            b.edge(vertex(&e.from)?, vertex(&e.to)?, e.weights.clone());
        }
        for m in &self.next {
            let profile = m
                .profile
                .iter()
                .enumerate()
                .map(|(p, a)| {
                    symbols
                        .get(p)
                        .and_then(|t| t.get(a.as_str()).copied())
                        .ok_or_else(|| IoError::UnknownAction {
                            player: self.players.get(p).cloned().unwrap_or_else(|| format!("#{}", p + 1)),
                            action: a.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            b.add_move(vertex(&m.vertex)?, profile, vertex(&m.to)?);
        }
        Ok(b)
    }
}

/// The player whose actions are named after the successors while every
/// other player waits.
fn owned_by(game: &ConcurrentGame, v: VertexId) -> Option<PlayerId> {
    let waits_only = |p: PlayerId| {
        let l = game.legal(v, p);
        l.len() == 1 && game.action_name(p, l[0]) == WAIT
    };
    let owner = game.players().find(|&p| !waits_only(p))?;
    if game.players().any(|p| p != owner && !waits_only(p)) {
        return None;
    }
    let ok = game
        .moves(v)
        .all(|(profile, to)| game.action_name(owner, profile[owner.0]) == game.vertex_name(to));
    ok.then_some(owner)
}

/// Parses and builds a game; rule violations come back with the line of
/// the vertex they concern.
pub fn parse_game(text: &str) -> Result<ConcurrentGame, IoError> {
    let file: GameFile = from_json(text)?;
    let b = file.to_builder()?;
    let violations = b.violations();
    if !violations.is_empty() {
        return Err(IoError::Invalid(
            violations
                .into_iter()
                .map(|v| Diagnostic {
                    line: anchor(text, &v),
                    violation: v,
                })
                .collect(),
        ));
    }
    Ok(b.build()?)
}

pub fn emit_game(game: &ConcurrentGame) -> String {
    to_json(&GameFile::from_game(game))
}

fn anchor(text: &str, v: &Violation) -> Option<usize> {
    use Violation::*;
    let (key, name) = match v {
        NoPlayers => return None,
        DuplicateVertex { vertex } => ("name", vertex),
        WeightArity { from, .. } | DuplicateEdge { from, .. } => ("from", from),
        DeadlockAt { vertex }
        | NextOffEdge { vertex, .. }
        | MissingMove { vertex, .. }
        | DuplicateMove { vertex, .. }
        | ProfileArity { vertex, .. }
        | UnknownAction { vertex, .. }
        | OwnedVertexWithMoves { vertex } => ("name", vertex),
    };
    let quoted = serde_json::to_string(name).ok()?;
    let mut from = 0;
    while let Some(k) = text[from..].find(&quoted) {
        let at = from + k;
        let before = text[..at].trim_end();
        if let Some(rest) = before.strip_suffix(':') {
            if rest.trim_end().ends_with(&format!("\"{key}\"")) {
                return Some(text[..at].matches('\n').count() + 1);
            }
        }
        from = at + quoted.len();
    }
    None
}
