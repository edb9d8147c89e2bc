use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::instance::{BillingMode, GridInstance, House, Prices, Task};
use crate::cost::Weight;

/// Shape of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub houses: usize,
    pub tasks_per_house: usize,
    pub slots: u32,
}

/// Production is piecewise constant with one to three pieces, each level in
/// `[1, 6]`. Energies are uniform in `[1, max(1, round(2·mean prod))]`;
/// an interval starts uniformly in `[1, S]` and ends uniformly between its
/// start and `S`.
pub fn generate_instance<R: Rng>(rng: &mut R, cfg: GenConfig) -> GridInstance {
    let slots = cfg.slots.max(1);
    let pieces = rng.gen_range(1..=3u32.min(slots));
    let mut cuts: Vec<u32> = Vec::new();
    while cuts.len() + 1 < pieces as usize {
        let c = rng.gen_range(2..=slots);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let levels: Vec<Weight> = (0..pieces).map(|_| rng.gen_range(1..=6)).collect();
    let prod: Vec<Weight> = (1..=slots)
        .map(|d| levels[cuts.iter().filter(|&&c| c <= d).count()])
        .collect();
    let mean = prod.iter().sum::<Weight>() as f64 / slots as f64;
    let emax = ((2.0 * mean).round() as Weight).max(1);
    let houses = (0..cfg.houses)
        .map(|h| House {
            id: format!("H{}", h + 1),
            tasks: (0..cfg.tasks_per_house)
                .map(|j| {
                    let a = rng.gen_range(1..=slots);
                    let b = rng.gen_range(a..=slots);
                    Task {
                        id: format!("h{}t{}", h + 1, j + 1),
                        energy: rng.gen_range(1..=emax),
                        window: (a, b),
                    }
                })
                .collect(),
        })
        .collect();
    GridInstance {
        houses,
        slots,
        prod,
        prices: Prices::default(),
        billing: BillingMode::default(),
        credit_exports: false,
    }
}

/// [`generate_instance`] driven by a ChaCha8 generator seeded with `seed`.
pub fn generate_from_seed(seed: u64, cfg: GenConfig) -> GridInstance {
    generate_instance(&mut ChaCha8Rng::seed_from_u64(seed), cfg)
}
