use std::collections::HashSet;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::cost::Weight;

/// Tasks are tracked in a 64-bit mask.
pub const MAX_TASKS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    /// Energy units consumed in the slot where the task runs.
    pub energy: Weight,
    /// First and last admissible slot, 1-based and inclusive.
    pub window: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct House {
    pub id: String,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BillingMode {
    /// Buyers share the cost of what is bought, sellers share the income
    /// from other houses (and from outside with `credit_exports`).
    #[default]
    Balanced,
    /// `B_Tot / Tot_C × excess_i`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prices {
    /// Price of a unit bought from another house.
    pub p_in: Rational64,
    /// Price of a unit bought from outside the grid.
    pub p_out: Rational64,
}

impl Default for Prices {
    fn default() -> Self {
        Prices {
            p_in: Rational64::from_integer(1),
            p_out: Rational64::from_integer(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridInstance {
    pub houses: Vec<House>,
    pub slots: u32,
    /// Production of every house in each slot, `prod[d-1]`.
    pub prod: Vec<Weight>,
    pub prices: Prices,
    pub billing: BillingMode,
    pub credit_exports: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("instance needs at least one house")]
    NoHouses,
    #[error("production has {found} entries for {slots} slots")]
    ProductionLength { slots: u32, found: usize },
    #[error("task id `{0}` is used twice")]
    DuplicateTask(String),
    #[error("task `{id}` has an empty or out-of-range interval [{from},{to}]")]
    BadWindow { id: String, from: u32, to: u32 },
    #[error("task `{0}` has negative energy")]
    NegativeEnergy(String),
    #[error("prices must satisfy P_out >= P_in >= 0")]
    BadPrices,
    #[error("at most {MAX_TASKS} tasks are supported, got {0}")]
    TooManyTasks(usize),
    #[error("no schedule completes every task")]
    Unschedulable,
    #[error("schedule is incomplete; missing {0:?}")]
    Incomplete(Vec<String>),
    #[error("schedule places `{id}` in slot {slot}, outside its interval")]
    OutOfWindow { id: String, slot: u32 },
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("bill scaling overflows 64-bit weights")]
    Overflow,
    #[error(transparent)]
    Game(#[from] crate::game::GameError),
    #[error(transparent)]
    Nash(#[from] crate::nash::NashError),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
    #[error(transparent)]
    ZeroSum(#[from] crate::zerosum::ZeroSumError),
}

impl GridInstance {
    pub fn validate(&self) -> Result<(), GridError> {
        if self.houses.is_empty() {
            return Err(GridError::NoHouses);
        }
        if self.prod.len() != self.slots as usize {
            return Err(GridError::ProductionLength {
                slots: self.slots,
                found: self.prod.len(),
            });
        }
        let mut ids = HashSet::new();
        let mut count = 0;
        for h in &self.houses {
            for t in &h.tasks {
                count += 1;
                if !ids.insert(t.id.as_str()) {
                    return Err(GridError::DuplicateTask(t.id.clone()));
                }
                let (a, b) = t.window;
                if a < 1 || a > b || b > self.slots {
                    return Err(GridError::BadWindow {
                        id: t.id.clone(),
                        from: a,
                        to: b,
                    });
                }
                if t.energy < 0 {
                    return Err(GridError::NegativeEnergy(t.id.clone()));
                }
            }
        }
        if count > MAX_TASKS {
            return Err(GridError::TooManyTasks(count));
        }
        let zero = Rational64::from_integer(0);
        if self.prices.p_in < zero || self.prices.p_out < self.prices.p_in {
            return Err(GridError::BadPrices);
        }
        Ok(())
    }

    pub fn num_houses(&self) -> usize {
        self.houses.len()
    }

    /// Production in slot `d` (1-based).
    pub fn prod_at(&self, d: u32) -> Weight {
        self.prod[(d - 1) as usize]
    }

    /// All tasks in house order; their positions are the global task
    /// indices used in masks.
    pub fn tasks(&self) -> impl Iterator<Item = (usize, &Task)> {
        self.houses
            .iter()
            .enumerate()
            .flat_map(|(h, house)| house.tasks.iter().map(move |t| (h, t)))
    }

    pub fn num_tasks(&self) -> usize {
        self.houses.iter().map(|h| h.tasks.len()).sum()
    }

    /// Global index of the first task of each house.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.houses
            .iter()
            .map(|h| {
                let o = acc;
                acc += h.tasks.len();
                o
            })
            .collect()
    }

    pub fn full_mask(&self) -> u64 {
        let n = self.num_tasks();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn task_index(&self, id: &str) -> Option<usize> {
        self.tasks().position(|(_, t)| t.id == id)
    }

    /// Two houses, two slots, production (4, 2), one task each.
    pub fn example() -> GridInstance {
        GridInstance {
            houses: vec![
                House {
                    id: "H1".into(),
                    tasks: vec![Task {
                        id: "t1".into(),
                        energy: 4,
                        window: (1, 2),
                    }],
                },
                House {
                    id: "H2".into(),
                    tasks: vec![Task {
                        id: "t2".into(),
                        energy: 5,
                        window: (1, 2),
                    }],
                },
            ],
            slots: 2,
            prod: vec![4, 2],
            prices: Prices::default(),
            billing: BillingMode::Balanced,
            credit_exports: false,
        }
    }
}
