use super::NashError;
use crate::game::{is_action_visible, ActionId, ConcurrentGame, FinitePlay, Play, PlayerId, VertexId};

/// A one-step unilateral deviation from an agreed play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub player: PlayerId,
    /// Index of the vertex where the player deviates.
    pub position: usize,
    pub replaced_action: ActionId,
    pub new_action: ActionId,
    pub new_vertex: VertexId,
    /// `v_0 … v_position · new_vertex`.
    pub prefix: FinitePlay,
}

/// Vertices at which deviations are considered: up to the first target for
/// target-reaching plays, the prefix and one pass of the cycle otherwise.
/// Returns the step sequence (each position with its successor) and
/// whether a target is reached.
pub(crate) fn steps(game: &ConcurrentGame, play: &Play) -> (Vec<VertexId>, bool) {
    let seq = play.unrolled();
    match seq.iter().position(|&v| game.is_target(v)) {
        Some(k) => (seq[..=k].to_vec(), true),
        None => {
            let mut s = seq;
            if let Play::Lasso { cycle, .. } = play {
                s.push(cycle[0]);
            }
            (s, false)
        }
    }
}

/// All `(player, position, new vertex)` deviations, grouped by player then
/// by position. Finite plays must reach a target.
pub fn enumerate_deviations(game: &ConcurrentGame, play: &Play) -> Result<Vec<Deviation>, NashError> {
    if !is_action_visible(game) {
        return Err(NashError::NotActionVisible);
    }
    play.check(game)?;
    let (seq, reached) = steps(game, play);
    if !reached && matches!(play, Play::Finite(_)) {
        return Err(NashError::NoTarget);
    }
    Ok(deviations_along(game, &seq))
}

pub(crate) fn deviations_along(game: &ConcurrentGame, seq: &[VertexId]) -> Vec<Deviation> {
    let mut out = Vec::new();
    for i in game.players() {
        for pos in 0..seq.len().saturating_sub(1) {
            let v = seq[pos];
            if game.is_target(v) {
                break;
            }
            let agreed = game
                .profiles_to(v, seq[pos + 1])
                .into_iter()
                .next()
                .expect("checked play");
            for &a in game.legal(v, i) {
                if a == agreed[i.0] {
                    continue;
                }
                let mut alt = agreed.clone();
                alt[i.0] = a;
                let to = game.next(v, &alt).expect("legal");
                let mut prefix = seq[..=pos].to_vec();
                prefix.push(to);
                out.push(Deviation {
                    player: i,
                    position: pos,
                    replaced_action: agreed[i.0],
                    new_action: a,
                    new_vertex: to,
                    prefix: FinitePlay::new(prefix).expect("non-empty"),
                });
            }
        }
    }
    out
}
