use std::collections::HashMap;

use super::instance::{GridError, GridInstance};
use crate::cost::{ExtCost, Weight};
use crate::game::{ActionId, ConcurrentGame, GameBuilder, PlayerId, VertexId, WAIT};
use crate::zerosum::{solve_acyclic, Side, ZeroSumGame};

/// Current slot (1-based, `slots + 1` once the day is over) and the mask of
/// performed tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridState {
    pub slot: u32,
    pub done: u64,
}

/// Reachable states with every house's actions, as masks of newly
/// performed tasks.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub states: Vec<GridState>,
    index: HashMap<GridState, usize>,
    /// `actions[s][h]`: the action list of house `h` in state `s`; empty for
    /// terminal states.
    pub actions: Vec<Vec<Vec<u64>>>,
    pub full: u64,
}

impl StateSpace {
    /// Explores from `(1, ∅)`. With `prune`, a task whose interval ends in
    /// the current slot must be performed now.
    pub fn explore(inst: &GridInstance, prune: bool) -> StateSpace {
        let full = inst.full_mask();
        let offsets = inst.offsets();
        let mut states = vec![GridState { slot: 1, done: 0 }];
        let mut index = HashMap::from([(states[0], 0usize)]);
        let mut actions = Vec::new();
        let mut k = 0;
        while k < states.len() {
            let s = states[k];
            let acts: Vec<Vec<u64>> = if s.done == full || s.slot > inst.slots {
                Vec::new()
            } else {
                inst.houses
                    .iter()
                    .enumerate()
                    .map(|(h, house)| house_actions(inst, house, offsets[h], s, prune))
                    .collect()
            };
            for union in profile_unions(&acts) {
                let next = GridState {
                    slot: s.slot + 1,
                    done: s.done | union,
                };
                index.entry(next).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
            }
            actions.push(acts);
            k += 1;
        }
        StateSpace {
            states,
            index,
            actions,
            full,
        }
    }

    pub fn index_of(&self, s: GridState) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn is_target(&self, k: usize) -> bool {
        self.states[k].done == self.full
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn house_actions(
    inst: &GridInstance,
    house: &super::instance::House,
    offset: usize,
    s: GridState,
    prune: bool,
) -> Vec<u64> {
    let mut forced = 0u64;
    let mut optional = Vec::new();
    for (j, t) in house.tasks.iter().enumerate() {
        let bit = 1u64 << (offset + j);
        if s.done & bit != 0 || s.slot < t.window.0 || s.slot > t.window.1 {
            continue;
        }
        if prune && t.window.1 == s.slot {
            forced |= bit;
        } else {
            optional.push(bit);
        }
    }
    let _ = inst;
    (0..1u64 << optional.len())
        .map(|sub| {
            optional
                .iter()
                .enumerate()
                .filter(|(b, _)| sub >> b & 1 == 1)
                .fold(forced, |acc, (_, &bit)| acc | bit)
        })
        .collect()
}

/// Unions of every action profile, first house most significant.
fn profile_unions(acts: &[Vec<u64>]) -> Vec<u64> {
    let mut out = vec![0u64];
    if acts.is_empty() {
        return Vec::new();
    }
    for a in acts {
        out = out
            .iter()
            .flat_map(|&u| a.iter().map(move |&m| u | m))
            .collect();
    }
    out
}

/// A micro-grid game: vertex `k` is state `space.states[k]`.
#[derive(Clone, Debug)]
pub struct GridGame {
    pub game: ConcurrentGame,
    pub space: StateSpace,
}

impl GridGame {
    pub fn state(&self, v: VertexId) -> GridState {
        self.space.states[v.0]
    }
}

pub(crate) fn mask_label(inst: &GridInstance, mask: u64) -> String {
    let ids: Vec<&str> = inst
        .tasks()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, (_, t))| t.id.as_str())
        .collect();
    format!("{{{}}}", ids.join(","))
}

pub(crate) fn energy_of(inst: &GridInstance, mask: u64) -> Weight {
    inst.tasks()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, (_, t))| t.energy)
        .sum()
}

/// Builds the concurrent game over `space`; `weights(slot, new)` gives the
/// per-house weights of a step where house `h` performs the tasks in
/// `new[h]`. Every house has one action per subset it may perform.
pub fn build_grid_game(
    inst: &GridInstance,
    space: StateSpace,
    mut weights: impl FnMut(u32, &[u64]) -> Result<Vec<Weight>, GridError>,
) -> Result<GridGame, GridError> {
    let n = inst.num_houses();
    let mut b = GameBuilder::new();
    let players: Vec<PlayerId> = inst.houses.iter().map(|h| b.player(h.id.clone())).collect();
    let wait: Vec<ActionId> = players.iter().map(|&p| b.action(p, WAIT)).collect();
    for (k, s) in space.states.iter().enumerate() {
        let v = b.vertex(format!("{}:{}", s.slot, mask_label(inst, s.done)), space.is_target(k));
        if k == 0 {
            b.set_initial(v);
        }
    }
    for (k, s) in space.states.iter().enumerate() {
        if space.is_target(k) {
            continue;
        }
        let v = VertexId(k);
        let acts = &space.actions[k];
        if acts.is_empty() {
            // the day is over with tasks left: stuck forever, never a target
            b.edge(v, v, vec![0; n]);
            b.add_move(v, wait.clone(), v);
            continue;
        }
        let names: Vec<Vec<ActionId>> = acts
            .iter()
            .enumerate()
            .map(|(h, list)| list.iter().map(|&m| b.action(players[h], &mask_label(inst, m))).collect())
            .collect();
        let mut seen = HashMap::new();
        let total: usize = acts.iter().map(|a| a.len()).product();
        for mut idx in 0..total {
            let mut choice = vec![0usize; n];
            for h in (0..n).rev() {
                choice[h] = idx % acts[h].len();
                idx /= acts[h].len();
            }
            let new: Vec<u64> = (0..n).map(|h| acts[h][choice[h]]).collect();
            let union = new.iter().fold(0, |a, m| a | m);
            let to = space
                .index_of(GridState {
                    slot: s.slot + 1,
                    done: s.done | union,
                })
                .expect("explored");
            if !seen.contains_key(&to) {
                seen.insert(to, ());
                b.edge(v, VertexId(to), weights(s.slot, &new)?);
            }
            let profile = (0..n).map(|h| names[h][choice[h]]).collect();
            b.add_move(v, profile, VertexId(to));
        }
    }
    Ok(GridGame {
        game: b.build()?,
        space,
    })
}

/// Energy game: `ω_i = Σ E(new tasks of i) - prod(d)`.
pub fn build_energy_game(inst: &GridInstance, prune: bool) -> Result<GridGame, GridError> {
    inst.validate()?;
    let space = StateSpace::explore(inst, prune);
    build_grid_game(inst, space, |d, new| {
        Ok(new.iter().map(|&m| energy_of(inst, m) - inst.prod_at(d)).collect())
    })
}

/// Energy the grid imports in a step: `max(0, Σ E - N·prod(d))`.
pub fn import_weight(inst: &GridInstance, d: u32, consumed: Weight) -> Weight {
    (consumed - inst.num_houses() as Weight * inst.prod_at(d)).max(0)
}

/// The global weight as literally defined: `min(0, Σ E - N·prod(d))`.
/// Minimizing it rewards imports, so schedules optimize
/// [`import_weight`] instead.
pub fn literal_global_weight(inst: &GridInstance, d: u32, consumed: Weight) -> Weight {
    (consumed - inst.num_houses() as Weight * inst.prod_at(d)).min(0)
}

/// Slot of every task, by global task index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub slot_of: Vec<u32>,
}

impl Schedule {
    /// Checks that `slots` (one optional slot per task) is complete and
    /// respects the intervals.
    pub fn from_slots(inst: &GridInstance, slots: Vec<Option<u32>>) -> Result<Schedule, GridError> {
        let missing: Vec<String> = inst
            .tasks()
            .zip(&slots)
            .filter(|(_, s)| s.is_none())
            .map(|((_, t), _)| t.id.clone())
            .collect();
        if !missing.is_empty() {
            return Err(GridError::Incomplete(missing));
        }
        let slot_of: Vec<u32> = slots.into_iter().map(|s| s.expect("checked")).collect();
        for ((_, t), &d) in inst.tasks().zip(&slot_of) {
            if d < t.window.0 || d > t.window.1 {
                return Err(GridError::OutOfWindow {
                    id: t.id.clone(),
                    slot: d,
                });
            }
        }
        Ok(Schedule { slot_of })
    }

    /// Reads the schedule off a play of a grid game (states only).
    pub fn from_states(inst: &GridInstance, states: &[GridState]) -> Result<Schedule, GridError> {
        let mut slots = vec![None; inst.num_tasks()];
        for w in states.windows(2) {
            let new = w[1].done & !w[0].done;
            for (k, s) in slots.iter_mut().enumerate() {
                if new >> k & 1 == 1 {
                    *s = Some(w[0].slot);
                }
            }
        }
        Schedule::from_slots(inst, slots)
    }

    /// Mask of the tasks of each house performed in slot `d`.
    pub fn performed(&self, inst: &GridInstance, d: u32) -> Vec<u64> {
        let mut out = vec![0u64; inst.num_houses()];
        for (k, ((h, _), &s)) in inst.tasks().zip(&self.slot_of).enumerate() {
            if s == d {
                out[h] |= 1 << k;
            }
        }
        out
    }
}

/// `Σ_d max(0, consumption(d) - N·prod(d))`.
pub fn imported_energy(inst: &GridInstance, schedule: &Schedule) -> Weight {
    (1..=inst.slots)
        .map(|d| {
            let consumed = schedule
                .performed(inst, d)
                .iter()
                .map(|&m| energy_of(inst, m))
                .sum();
            import_weight(inst, d, consumed)
        })
        .sum()
}

/// Minimum imported energy over all complete schedules, with a schedule
/// attaining it: backward induction on the one-player game where the
/// houses act together.
pub fn optimal_coalition_schedule(inst: &GridInstance) -> Result<(Schedule, Weight), GridError> {
    inst.validate()?;
    let space = StateSpace::explore(inst, true);
    let mut zs = ZeroSumGame::new(0);
    for (k, s) in space.states.iter().enumerate() {
        zs.add_vertex(format!("{}:{:x}", s.slot, s.done), Side::Min, space.is_target(k));
    }
    for (k, s) in space.states.iter().enumerate() {
        if space.is_target(k) {
            continue;
        }
        for union in profile_unions(&space.actions[k]) {
            let to = space
                .index_of(GridState {
                    slot: s.slot + 1,
                    done: s.done | union,
                })
                .expect("explored");
            zs.add_edge(k, to, import_weight(inst, s.slot, energy_of(inst, union)));
        }
    }
    let vm = solve_acyclic(&zs)?;
    let ExtCost::Finite(e_min) = vm.at(0) else {
        return Err(GridError::Unschedulable);
    };
    let mut path = vec![space.states[0]];
    let mut k = 0;
    while !space.is_target(k) {
        k = vm.choice[k].ok_or(GridError::Unschedulable)?;
        path.push(space.states[k]);
    }
    Ok((Schedule::from_states(inst, &path)?, e_min))
}
