use serde::{Deserialize, Serialize};

use super::{from_json, to_json, IoError, VERSION};
use crate::cost::ExtCost;
use crate::game::{ConcurrentGame, FinitePlay, Play, VertexId};
use crate::nash::{FailureReport, NashCertificate};

/// A finite play, or `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlayEntry {
    Finite(Vec<String>),
    Lasso { prefix: Vec<String>, cycle: Vec<String> },
}

impl PlayEntry {
    pub fn from_play(game: &ConcurrentGame, play: &Play) -> PlayEntry {
        let names = |vs: &[VertexId]| vs.iter().map(|&v| game.vertex_name(v).to_string()).collect();
        match play {
            Play::Finite(p) => PlayEntry::Finite(names(p.vertices())),
            Play::Lasso { prefix, cycle } => PlayEntry::Lasso {
                prefix: names(prefix),
                cycle: names(cycle),
            },
        }
    }

    pub fn to_play(&self, game: &ConcurrentGame) -> Result<Play, IoError> {
        let ids = |names: &[String]| {
            names
                .iter()
                .map(|n| {
                    game.vertex_by_name(n)
                        .ok_or_else(|| IoError::UnknownVertex(n.clone()))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let play = match self {
            PlayEntry::Finite(vs) => Play::Finite(FinitePlay::new(ids(vs)?)?),
            PlayEntry::Lasso { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err(IoError::Value("a lasso needs a non-empty cycle".into()));
                }
                Play::Lasso {
                    prefix: ids(prefix)?,
                    cycle: ids(cycle)?,
                }
            }
        };
        play.check(game)?;
        Ok(play)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayFile {
    pub version: u32,
    pub play: PlayEntry,
}

impl PlayFile {
    pub fn parse(text: &str) -> Result<PlayFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub player: String,
    /// Index in the play of the vertex where the player deviates.
    pub position: usize,
    pub at: String,
    pub agreed_action: String,
    pub action: String,
    pub to: String,
    pub lhs: ExtCost,
    pub deviation_payoff: ExtCost,
    pub retaliation: ExtCost,
    pub rhs: ExtCost,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerAction {
    pub player: String,
    pub action: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunishmentMove {
    pub vertex: String,
    pub actions: Vec<PlayerAction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunishmentEntry {
    /// The punished player.
    pub player: String,
    pub moves: Vec<PunishmentMove>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEntry {
    pub valid: bool,
    pub play: PlayEntry,
    pub costs: Vec<ExtCost>,
    pub checks: Vec<CheckEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub punishment: Vec<PunishmentEntry>,
}

impl CertificateEntry {
    pub fn from_certificate(game: &ConcurrentGame, cert: &NashCertificate) -> CertificateEntry {
        let pname = |p: crate::game::PlayerId| game.player_name(p).to_string();
        let vname = |v: VertexId| game.vertex_name(v).to_string();
        CertificateEntry {
            valid: cert.valid,
            play: PlayEntry::from_play(game, &cert.play),
            costs: cert.costs.clone(),
            checks: cert
                .checks
                .iter()
                .map(|c| {
                    let d = &c.deviation;
                    CheckEntry {
                        player: pname(d.player),
                        position: d.position,
                        at: vname(d.prefix.vertices()[d.position]),
                        agreed_action: game.action_name(d.player, d.replaced_action).to_string(),
                        action: game.action_name(d.player, d.new_action).to_string(),
                        to: vname(d.new_vertex),
                        lhs: c.lhs,
                        deviation_payoff: c.deviation_payoff,
                        retaliation: c.retaliation,
                        rhs: c.rhs(),
                        holds: c.holds,
                    }
                })
                .collect(),
            punishment: cert
                .punishment
                .iter()
                .map(|p| PunishmentEntry {
                    player: pname(p.player),
                    moves: p
                        .moves
                        .iter()
                        .map(|(v, acts)| PunishmentMove {
                            vertex: vname(*v),
                            actions: acts
                                .iter()
                                .map(|&(q, a)| PlayerAction {
                                    player: pname(q),
                                    action: game.action_name(q, a).to_string(),
                                })
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// A certificate, or the failure report of the construction: the outcome
/// that was tried first and every other candidate, all invalid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub version: u32,
    pub certificate: CertificateEntry,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

impl CertificateFile {
    pub fn found(game: &ConcurrentGame, cert: &NashCertificate) -> CertificateFile {
        CertificateFile {
            version: VERSION,
            certificate: CertificateEntry::from_certificate(game, cert),
            candidates: Vec::new(),
            truncated: false,
        }
    }

    pub fn failed(game: &ConcurrentGame, report: &FailureReport) -> CertificateFile {
        CertificateFile {
            version: VERSION,
            certificate: CertificateEntry::from_certificate(game, &report.outcome),
            candidates: report
                .candidates
                .iter()
                .map(|c| CertificateEntry::from_certificate(game, c))
                .collect(),
            truncated: report.truncated,
        }
    }

    pub fn parse(text: &str) -> Result<CertificateFile, IoError> {
        from_json(text)
    }

    pub fn emit(&self) -> String {
        to_json(self)
    }
}
