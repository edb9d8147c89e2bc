use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::billing::{bill_schedule, build_turnified_billed_game, TurnBilledGame};
use super::energy::{imported_energy, optimal_coalition_schedule, Schedule};
use super::generator::{generate_from_seed, GenConfig};
use super::instance::{BillingMode, GridError, GridInstance, Prices};
use super::penalty::{build_penalized_game, PenalizedGame};
use crate::cost::{ExtCost, Weight};
use crate::game::{outcome, FinitePlay, Play, PlayerId, StrategyProfile, VertexId};
use crate::nash::{individual_strategies, NashCertificate, NashContext};

/// Outcome of the houses' individually bill-minimizing strategies on the
/// turnified billed game.
#[derive(Clone, Debug)]
pub struct NeSchedule {
    pub turn: TurnBilledGame,
    pub profile: StrategyProfile,
    pub play: FinitePlay,
    pub schedule: Schedule,
    /// Scaled value of each house's coalition game: the bill it can
    /// guarantee on its own.
    pub floor: Vec<Weight>,
    /// The equilibrium check without penalties.
    pub certificate: NashCertificate,
}

impl NeSchedule {
    pub fn floor_bills(&self) -> Vec<Rational64> {
        self.floor.iter().map(|&w| self.turn.billed.unscale(w)).collect()
    }
}

/// Builds the turnified billed game (deadline-pruned), solves every
/// house's coalition game and follows the resulting strategies.
pub fn ne_schedule(inst: &GridInstance, order_seed: u64) -> Result<NeSchedule, GridError> {
    let turn = build_turnified_billed_game(inst, order_seed, true)?;
    let game = &turn.turn.game;
    let ctx = NashContext::new(game)?;
    let profile = individual_strategies(&ctx)?;
    let start = game.initial().unwrap_or(VertexId(0));
    let out = outcome(game, start, &profile, game.num_vertices())?;
    if !out.reached_target {
        return Err(GridError::Unschedulable);
    }
    let floor = game
        .players()
        .map(|i| ctx.value(i, start).finite().ok_or(GridError::Unschedulable))
        .collect::<Result<Vec<_>, _>>()?;
    let certificate = ctx.check(&Play::Finite(out.play.clone()))?;
    let base = turn.turn.project_play(&out.play);
    let states: Vec<_> = base.vertices().iter().map(|&v| turn.billed.grid.state(v)).collect();
    let schedule = Schedule::from_states(inst, &states)?;
    Ok(NeSchedule {
        turn,
        profile,
        play: out.play,
        schedule,
        floor,
        certificate,
    })
}

/// The equilibrium check of the same outcome once every house pays its
/// guaranteed bill as a penalty for deviating.
#[derive(Clone, Debug)]
pub struct PenaltyRun {
    pub game: PenalizedGame,
    pub certificate: NashCertificate,
    /// Houses whose guaranteed bill is negative, so that the penalty is a
    /// reward.
    pub negative_floor: Vec<PlayerId>,
    /// For every deviation from the outcome: the deviator and the least
    /// cost it can secure once the others punish it, penalty included.
    pub single_deviations: Vec<(PlayerId, ExtCost)>,
}

impl PenaltyRun {
    /// Single deviations by a house with a non-negative guaranteed bill
    /// that cost it less than twice that bill.
    pub fn below_twice_floor(&self, ne: &NeSchedule) -> Vec<(PlayerId, ExtCost)> {
        self.single_deviations
            .iter()
            .filter(|(i, c)| {
                let f = ne.floor[i.0];
                f >= 0 && *c < ExtCost::Finite(2 * f)
            })
            .copied()
            .collect()
    }
}

pub fn penalized_check(ne: &NeSchedule) -> Result<PenaltyRun, GridError> {
    let base = &ne.turn.turn.game;
    let pen = build_penalized_game(base, &ne.profile, &ne.floor)?;
    let lifted = pen.lift_compliant(&ne.play).ok_or(GridError::Unschedulable)?;
    let ctx = NashContext::new(&pen.game)?;
    let certificate = ctx.check(&Play::Finite(lifted))?;
    let single_deviations = certificate
        .checks
        .iter()
        .map(|c| (c.deviation.player, c.rhs()))
        .collect();
    Ok(PenaltyRun {
        negative_floor: pen.negative_penalties(),
        game: pen,
        certificate,
        single_deviations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub imported_energy: Weight,
    pub e_min: Weight,
    pub energy_gap: Weight,
    pub bills: Vec<Rational64>,
    /// Bills under the coalition-optimal schedule.
    pub reference_bills: Vec<Rational64>,
    /// Per house `100·(bill - reference) / max(1, |reference|)`.
    pub bill_gap_percent: Vec<f64>,
}

impl Metrics {
    pub fn mean_bill_gap(&self) -> f64 {
        if self.bill_gap_percent.is_empty() {
            0.0
        } else {
            self.bill_gap_percent.iter().sum::<f64>() / self.bill_gap_percent.len() as f64
        }
    }
}

pub fn evaluate_profile(inst: &GridInstance, schedule: &Schedule) -> Result<Metrics, GridError> {
    inst.validate()?;
    let (reference, e_min) = optimal_coalition_schedule(inst)?;
    Ok(compare(inst, schedule, &reference, e_min))
}

fn compare(inst: &GridInstance, schedule: &Schedule, reference: &Schedule, e_min: Weight) -> Metrics {
    let imported = imported_energy(inst, schedule);
    let bills = bill_schedule(inst, schedule).totals;
    let reference_bills = bill_schedule(inst, reference).totals;
    let one = Rational64::from_integer(1);
    let bill_gap_percent = bills
        .iter()
        .zip(&reference_bills)
        .map(|(b, r)| {
            let gap = Rational64::from_integer(100) * (b - r) / r.abs().max(one);
            gap.to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    Metrics {
        imported_energy: imported,
        e_min,
        energy_gap: imported - e_min,
        bills,
        reference_bills,
        bill_gap_percent,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub houses: usize,
    /// Tasks of each house.
    pub tasks: usize,
    pub cases: usize,
    pub slots: u32,
    pub seed: u64,
    pub prices: Prices,
    pub billing: BillingMode,
    pub credit_exports: bool,
    /// Also build the penalized game and check the outcome there.
    pub check_penalty: bool,
}

impl ExperimentConfig {
    pub fn new(houses: usize, tasks: usize, cases: usize, seed: u64) -> Self {
        ExperimentConfig {
            houses,
            tasks,
            cases,
            slots: 8,
            seed,
            prices: Prices::default(),
            billing: BillingMode::default(),
            credit_exports: false,
            check_penalty: false,
        }
    }
}

/// One row in the layout of the published results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    #[serde(rename = "Houses")]
    pub houses: usize,
    #[serde(rename = "Tasks")]
    pub tasks: usize,
    #[serde(rename = "Number of cases")]
    pub cases: usize,
    #[serde(rename = "Total energy difference")]
    pub energy_difference: f64,
    #[serde(rename = "Average bill difference")]
    pub bill_difference: f64,
}

#[derive(Clone, Debug)]
pub struct PenaltySummary {
    pub valid: bool,
    pub negative_floor: Vec<PlayerId>,
    pub deviations: usize,
    /// Single deviations that cost less than twice a non-negative floor.
    pub below_twice_floor: usize,
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub instance_seed: u64,
    pub order_seed: u64,
    pub instance: GridInstance,
    pub metrics: Metrics,
    /// The outcome passes the check without penalties.
    pub plain_valid: bool,
    pub penalty: Option<PenaltySummary>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub row: ExperimentRow,
    pub cases: Vec<CaseResult>,
}

/// Instance and order seeds of every case, drawn from the master seed.
pub fn case_seeds(seed: u64, cases: usize) -> Vec<(u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases).map(|_| (rng.gen(), rng.gen())).collect()
}

pub fn run_case(cfg: &ExperimentConfig, instance_seed: u64, order_seed: u64) -> Result<CaseResult, GridError> {
    let gen = GenConfig {
        houses: cfg.houses,
        tasks_per_house: cfg.tasks,
        slots: cfg.slots,
    };
    let mut inst = generate_from_seed(instance_seed, gen);
    inst.prices = cfg.prices;
    inst.billing = cfg.billing;
    inst.credit_exports = cfg.credit_exports;
    let (reference, e_min) = optimal_coalition_schedule(&inst)?;
    let ne = ne_schedule(&inst, order_seed)?;
    let metrics = compare(&inst, &ne.schedule, &reference, e_min);
    let penalty = if cfg.check_penalty {
        let run = penalized_check(&ne)?;
        Some(PenaltySummary {
            valid: run.certificate.valid,
            below_twice_floor: run.below_twice_floor(&ne).len(),
            deviations: run.single_deviations.len(),
            negative_floor: run.negative_floor,
        })
    } else {
        None
    };
    Ok(CaseResult {
        instance_seed,
        order_seed,
        instance: inst,
        metrics,
        plain_valid: ne.certificate.valid,
        penalty,
    })
}

/// Runs every case in parallel; the result depends only on the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, GridError> {
    let cases = case_seeds(cfg.seed, cfg.cases)
        .into_par_iter()
        .map(|(a, b)| run_case(cfg, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let n = cases.len().max(1) as f64;
    let energy = cases.iter().map(|c| c.metrics.energy_gap as f64).sum::<f64>() / n;
    let bill = cases.iter().map(|c| c.metrics.mean_bill_gap()).sum::<f64>() / n;
    Ok(ExperimentReport {
        row: ExperimentRow {
            houses: cfg.houses,
            tasks: cfg.tasks,
            cases: cfg.cases,
            energy_difference: energy,
            bill_difference: bill,
        },
        cases,
    })
}
