//! Energy sharing among the houses of a local grid: scheduling, billing and
//! penalties.

mod billing;
mod energy;
mod experiment;
mod generator;
mod instance;
mod penalty;

pub use billing::{
    bill_schedule, build_billed_game, build_turnified_billed_game, external_cost, slot_bill,
    slot_orders, BillReport, BilledGame, SlotBill, TurnBilledGame,
};
pub use energy::{
    build_energy_game, build_grid_game, import_weight, imported_energy, literal_global_weight,
    optimal_coalition_schedule, GridGame, GridState, Schedule, StateSpace,
};
pub use experiment::{
    case_seeds, evaluate_profile, ne_schedule, penalized_check, run_case, run_experiment,
    CaseResult, ExperimentConfig, ExperimentReport, ExperimentRow, Metrics, NeSchedule,
    PenaltyRun, PenaltySummary,
};
pub use generator::{generate_from_seed, generate_instance, GenConfig};
pub use instance::{BillingMode, GridError, GridInstance, House, Prices, Task, MAX_TASKS};
pub use penalty::{build_penalized_game, PenalizedGame};
