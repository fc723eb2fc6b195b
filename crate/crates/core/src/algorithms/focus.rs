use crate::model::{Item, Solution};
use crate::replay::{Action, OnlineAlgorithm};

/// Holds `⟨x⟩` for the first-seen item `x` of maximal cumulative value,
/// switching only on a strict improvement.
#[derive(Debug, Clone, Default)]
pub struct Focus {
    held: Option<Item>,
}

impl Focus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn held(&self) -> Option<&Item> {
        self.held.as_ref()
    }
}

impl OnlineAlgorithm for Focus {
    fn name(&self) -> String {
        "focus".into()
    }

    fn step(&mut self, x: &Item, knapsack: &Solution) -> Action {
        let better = match &self.held {
            None => true,
            Some(prev) => x.cumulative_value() > prev.cumulative_value(),
        };
        if better {
            self.held = Some(x.clone());
            Action::fill(knapsack, x)
        } else {
            Action::keep()
        }
    }
}
