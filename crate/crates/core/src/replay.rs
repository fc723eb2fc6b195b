//! The online model and a replay engine that enforces it.
//!
//! On each arriving item an algorithm may pack copies of that item and then
//! remove any items it holds. Packing happens before removal, so the
//! knapsack may be transiently over capacity within a step; after the
//! removals it must weigh at most 1.

use std::fmt;

use crate::model::{Instance, Item, Solution};
use crate::rat::Rat;

/// What an algorithm does with one arriving item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Action {
    pub packs: Vec<(Item, u64)>,
    pub removals: Vec<(Item, u64)>,
}

impl Action {
    /// Do nothing.
    pub fn keep() -> Self {
        Self::default()
    }

    pub fn pack(x: &Item, copies: u64) -> Self {
        Self {
            packs: vec![(x.clone(), copies)],
            removals: Vec::new(),
        }
    }

    pub fn and_remove(mut self, x: &Item, copies: u64) -> Self {
        self.removals.push((x.clone(), copies));
        self
    }

    /// Empty the knapsack and hold `copies` copies of the arriving item `x`.
    pub fn replace(knapsack: &Solution, x: &Item, copies: u64) -> Self {
        Self {
            packs: vec![(x.clone(), copies)],
            removals: knapsack.entries().map(|(y, c)| (y.clone(), c)).collect(),
        }
    }

    /// Empty the knapsack and hold `⟨x⟩`.
    pub fn fill(knapsack: &Solution, x: &Item) -> Self {
        Self::replace(knapsack, x, x.multiplicity())
    }
}

/// A deterministic online algorithm. Randomized algorithms are expressed as
/// mixtures of these (see [`crate::algorithms::MixedStrategy`]).
pub trait OnlineAlgorithm: Send {
    fn name(&self) -> String;

    /// Proportional-only algorithms are rejected on items with weight ≠ value.
    fn requires_proportional(&self) -> bool {
        false
    }

    fn step(&mut self, item: &Item, knapsack: &Solution) -> Action;
}

impl<A: OnlineAlgorithm + ?Sized> OnlineAlgorithm for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn requires_proportional(&self) -> bool {
        (**self).requires_proportional()
    }

    fn step(&mut self, item: &Item, knapsack: &Solution) -> Action {
        (**self).step(item, knapsack)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IllegalMove {
    /// Knapsack weight after removals.
    Overweight(Rat),
    ForeignPack(Item),
    NotPresent {
        item: Item,
        requested: u64,
        held: u64,
    },
}

impl fmt::Display for IllegalMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Overweight(w) => write!(f, "knapsack weight {w} exceeds 1 after removals"),
            Self::ForeignPack(x) => write!(f, "packed copies of {x}, which is not the current item"),
            Self::NotPresent { item, requested, held } => {
                write!(f, "removed {requested} copies of {item} but only {held} are held")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("{algorithm}: illegal move at step {step}: {kind}")]
    IllegalMove {
        algorithm: String,
        step: usize,
        kind: IllegalMove,
    },
    #[error("{algorithm} requires a proportional instance, but item {step} is {item}")]
    NotProportional { algorithm: String, step: usize, item: Item },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub item_index: usize,
    pub item: Item,
    pub copies_packed: u64,
    pub removed: Vec<(Item, u64)>,
    pub knapsack_after: Solution,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn final_knapsack(&self) -> Option<&Solution> {
        self.steps.last().map(|s| &s.knapsack_after)
    }
}

/// Drives one algorithm item by item. Adversaries use this directly to
/// inspect the knapsack between arrivals.
pub struct Session<'a> {
    alg: &'a mut dyn OnlineAlgorithm,
    knapsack: Solution,
    arrived: usize,
    trace: Option<Trace>,
}

impl<'a> Session<'a> {
    pub fn new(alg: &'a mut dyn OnlineAlgorithm) -> Self {
        Self {
            alg,
            knapsack: Solution::empty(),
            arrived: 0,
            trace: Some(Trace::default()),
        }
    }

    /// A session that keeps no trace.
    pub fn untraced(alg: &'a mut dyn OnlineAlgorithm) -> Self {
        Self {
            trace: None,
            ..Self::new(alg)
        }
    }

    pub fn knapsack(&self) -> &Solution {
        &self.knapsack
    }

    pub fn holds(&self, x: &Item) -> bool {
        self.knapsack.contains(x)
    }

    pub fn gain(&self) -> Rat {
        self.knapsack.gain()
    }

    pub fn arrived(&self) -> usize {
        self.arrived
    }

    /// Offers the next item. On error the knapsack is left as it was before
    /// the offending step.
    pub fn feed(&mut self, item: &Item) -> Result<(), ReplayError> {
        let step = self.arrived;
        if self.alg.requires_proportional() && !item.is_proportional() {
            return Err(ReplayError::NotProportional {
                algorithm: self.alg.name(),
                step,
                item: item.clone(),
            });
        }
        let action = self.alg.step(item, &self.knapsack);
        let illegal = |kind| ReplayError::IllegalMove {
            algorithm: self.alg.name(),
            step,
            kind,
        };

        let mut next = self.knapsack.clone();
        let mut copies_packed = 0;
        for (x, c) in &action.packs {
            if x != item {
                return Err(illegal(IllegalMove::ForeignPack(x.clone())));
            }
            next.add(x, *c);
            copies_packed += c;
        }
        for (x, c) in &action.removals {
            if !next.remove(x, *c) {
                return Err(illegal(IllegalMove::NotPresent {
                    item: x.clone(),
                    requested: *c,
                    held: next.count(x),
                }));
            }
        }
        if next.check_capacity().is_err() {
            return Err(illegal(IllegalMove::Overweight(next.total_weight().clone())));
        }

        self.knapsack = next;
        self.arrived += 1;
        if let Some(trace) = &mut self.trace {
            trace.steps.push(TraceStep {
                item_index: step,
                item: item.clone(),
                copies_packed,
                removed: action.removals.into_iter().filter(|(_, c)| *c > 0).collect(),
                knapsack_after: self.knapsack.clone(),
            });
        }
        Ok(())
    }

    pub fn finish(self) -> (Rat, Trace) {
        (self.knapsack.gain(), self.trace.unwrap_or_default())
    }
}

/// Runs `alg` over the whole instance and returns its final gain with the
/// full trace.
pub fn replay(alg: &mut dyn OnlineAlgorithm, inst: &Instance) -> Result<(Rat, Trace), ReplayError> {
    check_proportional(alg, inst)?;
    let mut session = Session::new(alg);
    for x in inst.items() {
        session.feed(x)?;
    }
    Ok(session.finish())
}

/// Like [`replay`] but keeps no trace.
pub fn replay_gain(alg: &mut dyn OnlineAlgorithm, inst: &Instance) -> Result<Rat, ReplayError> {
    check_proportional(alg, inst)?;
    let mut session = Session::untraced(alg);
    for x in inst.items() {
        session.feed(x)?;
    }
    Ok(session.gain())
}

fn check_proportional(alg: &dyn OnlineAlgorithm, inst: &Instance) -> Result<(), ReplayError> {
    if !alg.requires_proportional() {
        return Ok(());
    }
    match inst.first_non_proportional() {
        Some((step, item)) => Err(ReplayError::NotProportional {
            algorithm: alg.name(),
            step,
            item: item.clone(),
        }),
        None => Ok(()),
    }
}
