//! Naive deterministic strategies used to populate the adversary test zoo.

use num_traits::One;

use crate::model::{Item, Solution};
use crate::rat::{floor_u64, Rat};
use crate::replay::{Action, OnlineAlgorithm};

/// Fills the knapsack with the first item and ignores everything after.
#[derive(Debug, Clone, Default)]
pub struct KeepFirst {
    started: bool,
}

impl OnlineAlgorithm for KeepFirst {
    fn name(&self) -> String {
        "keep-first".into()
    }

    fn step(&mut self, x: &Item, knapsack: &Solution) -> Action {
        if std::mem::replace(&mut self.started, true) {
            Action::keep()
        } else {
            Action::fill(knapsack, x)
        }
    }
}

/// Evicts every held item strictly less dense than the arrival, then packs
/// as many copies of the arrival as fit in the free space.
#[derive(Debug, Clone, Default)]
pub struct GreedyDensity;

impl OnlineAlgorithm for GreedyDensity {
    fn name(&self) -> String {
        "greedy-density".into()
    }

    fn step(&mut self, x: &Item, knapsack: &Solution) -> Action {
        let density = x.density();
        let mut action = Action::keep();
        let mut free = Rat::one() - knapsack.total_weight();
        for (y, c) in knapsack.entries() {
            if y.density() < density {
                free += y.weight() * Rat::from_integer(c.into());
                action = action.and_remove(y, c);
            }
        }
        let copies = floor_u64(&(free / x.weight())).unwrap_or(0);
        if copies > 0 {
            action.packs.push((x.clone(), copies));
        }
        action
    }
}
