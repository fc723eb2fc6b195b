//! The two deterministic strategies behind RandChoice.
//!
//! Weights are split into four categories:
//!
//! | category | weights                          |
//! |----------|----------------------------------|
//! | G        | `[0,1/3] ∪ [3/8,1/2] ∪ [3/4,1]`  |
//! | S        | `(1/3, 3/8)`                     |
//! | M        | `(1/2, 5/8]`                     |
//! | L        | `(5/8, 3/4)`                     |
//!
//! Both strategies fill the knapsack with the first G item and stop. Until
//! then A1 prefers the smallest S item (two copies), then the largest M item,
//! then the smallest L item, and pairs an S item with an M∪L item as soon as
//! they fit, improving either side afterwards. A2 prefers the smallest L
//! item, then the smallest S item (two copies), then the largest M item, and
//! freezes once it holds an S+L pair. Any L item outranks a held M or S item
//! in A2; a literal `x < x'` test would never let L displace M and breaks the
//! 4/3 guarantee on `(97/180, 131/180)`.

use std::fmt;

use num_traits::One;

use crate::model::{Item, Solution};
use crate::rat::{rat, Rat};
use crate::replay::{Action, OnlineAlgorithm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeCategory {
    G,
    S,
    M,
    L,
}

impl SizeCategory {
    pub fn of(w: &Rat) -> Self {
        if *w <= rat(1, 3) || (*w >= rat(3, 8) && *w <= rat(1, 2)) || *w >= rat(3, 4) {
            Self::G
        } else if *w < rat(3, 8) {
            Self::S
        } else if *w <= rat(5, 8) {
            Self::M
        } else {
            Self::L
        }
    }

    fn is_big(self) -> bool {
        matches!(self, Self::M | Self::L)
    }
}

impl fmt::Display for SizeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::G => "G",
            Self::S => "S",
            Self::M => "M",
            Self::L => "L",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    A1,
    A2,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A1 => "a1",
            Self::A2 => "a2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum State {
    Empty,
    /// `⟨x⟩` for an item outside G.
    Single(Item),
    /// One S item and one M∪L item.
    Pair {
        s: Item,
        b: Item,
    },
    Halted,
}

#[derive(Debug, Clone)]
pub struct RandChoiceStrategy {
    branch: Branch,
    state: State,
}

impl RandChoiceStrategy {
    pub fn new(branch: Branch) -> Self {
        Self {
            branch,
            state: State::Empty,
        }
    }

    pub fn is_halted(&self) -> bool {
        self.state == State::Halted
    }

    // One branch per pseudocode case, even where two cases act alike.
    #[allow(clippy::if_same_then_else)]
    fn step_a1(&mut self, x: &Item, cat: SizeCategory, knapsack: &Solution) -> Action {
        use SizeCategory::*;
        match std::mem::replace(&mut self.state, State::Halted) {
            State::Empty => self.hold(knapsack, x),
            State::Single(prev) => {
                let pc = SizeCategory::of(prev.weight());
                if ((pc.is_big() && cat == S) || (pc == S && cat.is_big())) && fits(x, &prev) {
                    self.pair_with(knapsack, x, cat, prev)
                } else if cat == S && x.weight() < prev.weight() {
                    self.hold(knapsack, x)
                } else if cat == M && pc == M && x.weight() > prev.weight() {
                    self.hold(knapsack, x)
                } else if cat.is_big() && pc == L && x.weight() < prev.weight() {
                    // M over L, smaller L over larger L. A smaller M item
                    // never replaces a held M item.
                    self.hold(knapsack, x)
                } else {
                    // Includes an L item that does not fit with a held S item.
                    self.state = State::Single(prev);
                    Action::keep()
                }
            }
            State::Pair { s, b } => {
                if x.weight() < s.weight() {
                    let action = Action::pack(x, 1).and_remove(&s, 1);
                    self.state = State::Pair { s: x.clone(), b };
                    action
                } else if x.weight() > b.weight() && fits(x, &s) {
                    let action = Action::pack(x, 1).and_remove(&b, 1);
                    self.state = State::Pair { s, b: x.clone() };
                    action
                } else {
                    self.state = State::Pair { s, b };
                    Action::keep()
                }
            }
            State::Halted => Action::keep(),
        }
    }

    #[allow(clippy::if_same_then_else)]
    fn step_a2(&mut self, x: &Item, cat: SizeCategory, knapsack: &Solution) -> Action {
        use SizeCategory::*;
        match std::mem::replace(&mut self.state, State::Halted) {
            State::Empty => self.hold(knapsack, x),
            State::Single(prev) => {
                let pc = SizeCategory::of(prev.weight());
                if ((pc == L && cat == S) || (pc == S && cat == L)) && fits(x, &prev) {
                    self.pair_with(knapsack, x, cat, prev)
                } else if cat == L && (pc != L || x.weight() < prev.weight()) {
                    // L is first in A2's order, so it displaces a held M item
                    // and a held S item it cannot pair with.
                    self.hold(knapsack, x)
                } else if cat == S && matches!(pc, M | S) && x.weight() < prev.weight() {
                    self.hold(knapsack, x)
                } else if cat == M && pc == M && x.weight() > prev.weight() {
                    self.hold(knapsack, x)
                } else {
                    self.state = State::Single(prev);
                    Action::keep()
                }
            }
            // frozen
            pair @ State::Pair { .. } => {
                self.state = pair;
                Action::keep()
            }
            State::Halted => Action::keep(),
        }
    }

    /// `K ← ⟨x⟩`.
    fn hold(&mut self, knapsack: &Solution, x: &Item) -> Action {
        self.state = State::Single(x.clone());
        Action::fill(knapsack, x)
    }

    /// `K ← {x, prev}` from `K = ⟨prev⟩`.
    fn pair_with(&mut self, knapsack: &Solution, x: &Item, cat: SizeCategory, prev: Item) -> Action {
        let extra = knapsack.count(&prev).saturating_sub(1);
        let action = Action::pack(x, 1).and_remove(&prev, extra);
        self.state = if cat == SizeCategory::S {
            State::Pair { s: x.clone(), b: prev }
        } else {
            State::Pair { s: prev, b: x.clone() }
        };
        action
    }
}

fn fits(x: &Item, y: &Item) -> bool {
    x.weight() + y.weight() <= Rat::one()
}

impl OnlineAlgorithm for RandChoiceStrategy {
    fn name(&self) -> String {
        format!("randchoice:{}", self.branch)
    }

    fn requires_proportional(&self) -> bool {
        true
    }

    fn step(&mut self, x: &Item, knapsack: &Solution) -> Action {
        if self.state == State::Halted {
            return Action::keep();
        }
        let cat = SizeCategory::of(x.weight());
        if cat == SizeCategory::G {
            self.state = State::Halted;
            return Action::fill(knapsack, x);
        }
        match self.branch {
            Branch::A1 => self.step_a1(x, cat, knapsack),
            Branch::A2 => self.step_a2(x, cat, knapsack),
        }
    }
}
