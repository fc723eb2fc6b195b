use num_traits::One;

use crate::model::{Item, Solution};
use crate::rat::Rat;
use crate::replay::{Action, OnlineAlgorithm};

/// Keeps the single heaviest item until an item of weight at most 1/2
/// arrives, then fills the knapsack with that item and ignores the rest.
///
/// Ties on weight keep the incumbent.
#[derive(Debug, Clone)]
pub struct Simple {
    held: Option<Item>,
    halted: bool,
    proportional_only: bool,
}

impl Simple {
    pub fn new() -> Self {
        Self {
            held: None,
            halted: false,
            proportional_only: true,
        }
    }

    /// The same rule applied to arbitrary instances, comparing weights only.
    pub fn heaviest() -> Self {
        Self {
            proportional_only: false,
            ..Self::new()
        }
    }
}

impl Default for Simple {
    fn default() -> Self {
        Self::new()
    }
}

impl OnlineAlgorithm for Simple {
    fn name(&self) -> String {
        if self.proportional_only { "simple" } else { "heaviest" }.into()
    }

    fn requires_proportional(&self) -> bool {
        self.proportional_only
    }

    fn step(&mut self, x: &Item, knapsack: &Solution) -> Action {
        if self.halted {
            return Action::keep();
        }
        let half = Rat::one() / Rat::from_integer(2.into());
        if *x.weight() <= half {
            self.halted = true;
            self.held = Some(x.clone());
            return Action::fill(knapsack, x);
        }
        match &self.held {
            Some(prev) if x.weight() <= prev.weight() => Action::keep(),
            _ => {
                self.held = Some(x.clone());
                Action::replace(knapsack, x, 1)
            }
        }
    }
}
