use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::energy::{build_grid_game, energy_of, GridGame, Schedule, StateSpace};
use super::instance::{BillingMode, GridError, GridInstance};
use crate::cost::Weight;
use crate::game::PlayerId;
use crate::transforms::{turnify_with, TurnGame};

/// Figures of one slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotBill {
    /// `Σ E_T - prod(d)` per house.
    pub excess: Vec<Weight>,
    pub tot_c: Weight,
    pub tot_o: Weight,
    /// Energy the selling houses have to spare.
    pub tot_s: Weight,
    pub b_tot: Rational64,
    pub bills: Vec<Rational64>,
}

fn r(x: Weight) -> Rational64 {
    Rational64::from_integer(x)
}

/// Bills of slot `d` when house `h` performs the tasks in `performed[h]`.
pub fn slot_bill(inst: &GridInstance, d: u32, performed: &[u64]) -> SlotBill {
    let prod = inst.prod_at(d);
    let excess: Vec<Weight> = performed.iter().map(|&m| energy_of(inst, m) - prod).collect();
    let tot_c: Weight = excess.iter().map(|&e| e.max(0)).sum();
    let tot_s: Weight = excess.iter().map(|&e| (-e).max(0)).sum();
    let tot_o = tot_c - tot_s;
    let (p_in, p_out) = (inst.prices.p_in, inst.prices.p_out);
    let (b_tot, bills) = match inst.billing {
        BillingMode::Literal => {
            let b_tot = r(tot_c - tot_o) * p_in + r(tot_o) * p_out;
            let bills = if tot_c == 0 {
                vec![Rational64::zero(); excess.len()]
            } else {
                let unit = b_tot / r(tot_c);
                excess.iter().map(|&e| unit * r(e)).collect()
            };
            (b_tot, bills)
        }
        BillingMode::Balanced => {
            let traded = r(tot_c.min(tot_s)) * p_in;
            let bought = traded + r(tot_o.max(0)) * p_out;
            let credit = if inst.credit_exports {
                r((-tot_o).max(0)) * p_out
            } else {
                Rational64::zero()
            };
            let sold = traded + credit;
            let bills = excess
                .iter()
                .map(|&e| {
                    if e > 0 {
                        bought / r(tot_c) * r(e)
                    } else if e < 0 {
                        sold / r(tot_s) * r(e)
                    } else {
                        Rational64::zero()
                    }
                })
                .collect();
            (bought - sold, bills)
        }
    };
    SlotBill {
        excess,
        tot_c,
        tot_o,
        tot_s,
        b_tot,
        bills,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BillReport {
    pub slots: Vec<SlotBill>,
    pub totals: Vec<Rational64>,
    pub penalties: Vec<Rational64>,
}

pub fn bill_schedule(inst: &GridInstance, schedule: &Schedule) -> BillReport {
    let slots: Vec<SlotBill> = (1..=inst.slots)
        .map(|d| slot_bill(inst, d, &schedule.performed(inst, d)))
        .collect();
    let totals = (0..inst.num_houses())
        .map(|h| slots.iter().map(|s| s.bills[h]).sum())
        .collect();
    BillReport {
        slots,
        totals,
        penalties: vec![Rational64::zero(); inst.num_houses()],
    }
}

/// A game whose weights are bills multiplied by `scale`.
#[derive(Clone, Debug)]
pub struct BilledGame {
    pub grid: GridGame,
    pub scale: Weight,
}

impl BilledGame {
    pub fn unscale(&self, w: Weight) -> Rational64 {
        Rational64::new(w, self.scale)
    }
}

/// Energy game with every house paying its slot bill. Bills are multiplied
/// by the least common multiple of all their denominators.
pub fn build_billed_game(inst: &GridInstance, prune: bool) -> Result<BilledGame, GridError> {
    inst.validate()?;
    let space = StateSpace::explore(inst, prune);
    let mut scale: Weight = 1;
    build_grid_game(inst, space.clone(), |d, new| {
        for b in slot_bill(inst, d, new).bills {
            scale = scale.lcm(b.denom());
        }
        Ok(vec![0; new.len()])
    })?;
    let grid = build_grid_game(inst, space, |d, new| {
        slot_bill(inst, d, new)
            .bills
            .iter()
            .map(|b| scaled(*b, scale))
            .collect()
    })?;
    Ok(BilledGame { grid, scale })
}

pub(crate) fn scaled(b: Rational64, scale: Weight) -> Result<Weight, GridError> {
    (scale / b.denom())
        .checked_mul(*b.numer())
        .ok_or(GridError::Overflow)
}

/// Order of the houses in each slot `1..=slots`, one shuffle per slot.
pub fn slot_orders(inst: &GridInstance, seed: u64) -> Vec<Vec<PlayerId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..inst.slots)
        .map(|_| {
            let mut order: Vec<PlayerId> = (0..inst.num_houses()).map(PlayerId).collect();
            order.shuffle(&mut rng);
            order
        })
        .collect()
}

/// The billed game turned turn-based: within a slot houses choose one at a
/// time in a seeded random order.
#[derive(Clone, Debug)]
pub struct TurnBilledGame {
    pub billed: BilledGame,
    pub turn: TurnGame,
    pub orders: Vec<Vec<PlayerId>>,
}

impl TurnBilledGame {
    pub fn scale(&self) -> Weight {
        self.billed.scale
    }
}

pub fn build_turnified_billed_game(
    inst: &GridInstance,
    order_seed: u64,
    prune: bool,
) -> Result<TurnBilledGame, GridError> {
    let billed = build_billed_game(inst, prune)?;
    let orders = slot_orders(inst, order_seed);
    let turn = turnify_with(&billed.grid.game, |v| {
        let d = billed.grid.state(v).slot;
        match orders.get(d as usize - 1) {
            Some(o) => o.clone(),
            None => (0..inst.num_houses()).map(PlayerId).collect(),
        }
    })?;
    Ok(TurnBilledGame {
        billed,
        turn,
        orders,
    })
}

/// `Σ_i bills` in balanced mode.
pub fn external_cost(inst: &GridInstance, s: &SlotBill) -> Rational64 {
    let out = r(s.tot_o.max(0)) * inst.prices.p_out;
    if inst.credit_exports {
        out - r((-s.tot_o).max(0)) * inst.prices.p_out
    } else {
        out
    }
}
