//! The adaptive game behind the `c_N` lower bound for general instances.
//!
//! For `i = N, …, 3` the algorithm sees `x_i` then `y_i`. If it lets `y_i`
//! go, it gets `x'_i` and the game stops. Otherwise `x_2` follows; skipping
//! it brings `z`. Holding it brings `y_2`, then `x'_2` if `y_2` is skipped
//! and `z` if it is held.
//!
//! The knapsack after holding `y_i` is exactly `{y_i}`: `y_i` cannot share
//! the knapsack with any earlier `y_j`, nor with `x_i`, and every `x_j`
//! with `j > i` left when `y_j` came in. That pins down what the algorithm
//! can own at the end of each branch, so every branch has an exact
//! guaranteed ratio ([`GameItems::branch_bounds`]).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{check_small_eps, AdversaryError, AdversaryReport, Game};
use crate::bounds::{sylvester, LowerBoundSolution};
use crate::model::{Instance, Item};
use crate::rat::{floor_u64, rat, Rat};
use crate::replay::{OnlineAlgorithm, Session};

/// Denominator used to turn the `v` vector into item values.
const VALUE_DENOMINATOR: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameBranch {
    /// `y_i` not held; `x'_i` sent.
    Stop(usize),
    /// `x_2` not held; `z` sent.
    SkipX2,
    /// `y_2` not held; `x'_2` sent.
    SkipY2,
    /// `y_2` held; `z` sent.
    HoldY2,
}

impl fmt::Display for GameBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stop(i) => write!(f, "y_{i} skipped → x'_{i}"),
            Self::SkipX2 => f.write_str("x_2 skipped → z"),
            Self::SkipY2 => f.write_str("y_2 skipped → x'_2"),
            Self::HoldY2 => f.write_str("y_2 held → z"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchBound {
    pub branch: GameBranch,
    /// Value of a feasible packing of the emitted items.
    pub witness_value: Rat,
    /// Largest gain any algorithm can hold at the end of the branch.
    pub alg_cap: Rat,
    /// `witness_value / alg_cap`.
    pub bound: Rat,
}

/// The items of the game, indexed by level `2..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameItems {
    pub n: usize,
    pub eps: Rat,
    /// `v_1..v_N` rounded to the value grid; `v_N = 1`.
    pub values: Vec<Rat>,
    x: Vec<Item>,
    y: Vec<Item>,
    x_prime: Vec<Item>,
    z: Item,
}

fn round_to_grid(v: &Rat) -> Rat {
    let d = BigInt::from(VALUE_DENOMINATOR);
    let scaled = v * Rat::from_integer(d.clone()) + rat(1, 2);
    Rat::new(scaled.floor().to_integer(), d)
}

impl GameItems {
    /// Builds the items for `N ≥ 3` and `0 < ε < 1/24`. `ε` is not required
    /// to make `z, x_2, …, x_N` fit together; when it does not, the `z`
    /// branches lose a little (see [`GameItems::slack`]).
    pub fn new(n: usize, eps: &Rat, lbs: &LowerBoundSolution) -> Result<Self, AdversaryError> {
        if n < 3 {
            return Err(AdversaryError::Domain(format!("the game needs N >= 3, got {n}")));
        }
        if lbs.n != n {
            return Err(AdversaryError::Domain(format!(
                "lower-bound solution is for N = {}, not {n}",
                lbs.n
            )));
        }
        check_small_eps(eps)?;
        let values: Vec<Rat> = lbs.v.iter().map(round_to_grid).collect();
        let v = |i: usize| values[i - 1].clone();
        let two = rat(2, 1);
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut x_prime = Vec::new();
        for i in 2..=n {
            let a = sylvester(i);
            let inv = Rat::new(BigInt::one(), a.clone());
            let small_value = if i == 2 {
                v(1) / &two
            } else {
                v(i) / Rat::from_integer(a - 1u32)
            };
            let big_value = if i == 2 { v(2) } else { v(i - 1) };
            x.push(Item::new(&inv + eps * &two, small_value.clone())?);
            y.push(Item::new(Rat::one() - &inv - eps, big_value)?);
            x_prime.push(Item::new(&inv + eps, small_value)?);
        }
        let z = Item::new(rat(1, 2) + eps, v(2))?;
        let items = Self {
            n,
            eps: eps.clone(),
            values,
            x,
            y,
            x_prime,
            z,
        };
        items.verify()?;
        Ok(items)
    }

    /// Exact checks of the structural facts the game relies on.
    fn verify(&self) -> Result<(), AdversaryError> {
        let one = Rat::one();
        for i in 2..self.n {
            if self.y(i + 1).weight() + self.x(i).weight() <= one {
                return Err(AdversaryError::Domain(format!("y_{} and x_{i} fit together", i + 1)));
            }
        }
        for i in 2..=self.n {
            if self.y(i).weight() + self.x_prime(i).weight() != one {
                return Err(AdversaryError::Domain(format!(
                    "y_{i} and x'_{i} do not fill the knapsack"
                )));
            }
            if !self.values[i - 1].is_positive() {
                return Err(AdversaryError::Domain(format!("v_{i} rounds to zero")));
            }
        }
        if !self.values[self.n - 1].is_one() {
            return Err(AdversaryError::Domain("v_N is not 1".into()));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> &Item {
        &self.x[i - 2]
    }

    pub fn y(&self, i: usize) -> &Item {
        &self.y[i - 2]
    }

    pub fn x_prime(&self, i: usize) -> &Item {
        &self.x_prime[i - 2]
    }

    pub fn z(&self) -> &Item {
        &self.z
    }

    /// `z, x_2, …, x_m` for the largest `m ≤ N` whose total weight is at most
    /// 1, and its value.
    pub fn z_witness(&self) -> (Vec<Item>, Rat) {
        let mut items = vec![self.z.clone()];
        let mut weight = self.z.weight().clone();
        for i in 2..=self.n {
            weight += self.x(i).weight();
            if weight > Rat::one() {
                break;
            }
            items.push(self.x(i).clone());
        }
        let value = items.iter().map(|x| x.value().clone()).sum();
        (items, value)
    }

    /// Whether all of `z, x_2, …, x_N` fit, which needs
    /// `(2N − 1) ε ≤ 1/(a_{N+1} − 1)`.
    pub fn full_witness_fits(&self) -> bool {
        self.z_witness().0.len() == self.n
    }

    fn bound(branch: GameBranch, witness_value: Rat, alg_cap: Rat) -> BranchBound {
        BranchBound {
            branch,
            bound: &witness_value / &alg_cap,
            witness_value,
            alg_cap,
        }
    }

    /// The ratio each branch forces on any algorithm.
    pub fn branch_bounds(&self) -> Vec<BranchBound> {
        let copies = |x: &Item| Rat::from_integer(floor_u64(&x.weight().recip()).unwrap_or(0).into());
        let mut out = Vec::new();
        for i in (3..=self.n).rev() {
            let witness = self.y(i).value() + self.x_prime(i).value();
            let mut cap = copies(self.x_prime(i)) * self.x(i).value();
            if i < self.n {
                cap = cap.max(self.y(i + 1).value().clone());
            }
            out.push(Self::bound(GameBranch::Stop(i), witness, cap));
        }
        let z_value = self.z_witness().1;
        out.push(Self::bound(
            GameBranch::SkipX2,
            z_value.clone(),
            self.y(3).value().max(self.z.value()).clone(),
        ));
        out.push(Self::bound(
            GameBranch::SkipY2,
            self.y(2).value() + self.x_prime(2).value(),
            copies(self.x_prime(2)) * self.x(2).value(),
        ));
        out.push(Self::bound(
            GameBranch::HoldY2,
            z_value,
            self.y(2).value().max(self.z.value()).clone(),
        ));
        out
    }

    /// Smallest guaranteed ratio over all branches.
    pub fn guaranteed_ratio(&self) -> Rat {
        self.branch_bounds()
            .into_iter()
            .map(|b| b.bound)
            .min()
            .expect("at least one branch")
    }

    /// `δ(ε) = max(0, c − min branch bound)`: every algorithm ends with
    /// ratio at least `c − δ`.
    pub fn slack(&self, c: &Rat) -> Rat {
        (c - self.guaranteed_ratio()).max(Rat::zero())
    }
}

fn emit(session: &mut Session<'_>, emitted: &mut Vec<Item>, x: &Item) -> Result<(), AdversaryError> {
    session.feed(x)?;
    emitted.push(x.clone());
    Ok(())
}

/// Plays the game against `alg` with items built from `lbs`.
pub fn general_adversary(
    alg: &mut dyn OnlineAlgorithm,
    n: usize,
    eps: &Rat,
    lbs: &LowerBoundSolution,
) -> Result<AdversaryReport, AdversaryError> {
    let items = GameItems::new(n, eps, lbs)?;
    let name = alg.name();
    let mut session = Session::new(alg);
    let mut emitted = Vec::new();
    let mut log = Vec::new();
    let mut branch = None;

    for i in (3..=n).rev() {
        emit(&mut session, &mut emitted, items.x(i))?;
        log.push(format!("x_{i}: {} copies held", session.knapsack().count(items.x(i))));
        emit(&mut session, &mut emitted, items.y(i))?;
        if !session.holds(items.y(i)) {
            emit(&mut session, &mut emitted, items.x_prime(i))?;
            branch = Some(GameBranch::Stop(i));
            break;
        }
        log.push(format!("y_{i} held"));
    }
    let branch = match branch {
        Some(b) => b,
        None => {
            emit(&mut session, &mut emitted, items.x(2))?;
            if !session.holds(items.x(2)) {
                emit(&mut session, &mut emitted, items.z())?;
                GameBranch::SkipX2
            } else {
                log.push(format!("x_2: {} copies held", session.knapsack().count(items.x(2))));
                emit(&mut session, &mut emitted, items.y(2))?;
                if session.holds(items.y(2)) {
                    emit(&mut session, &mut emitted, items.z())?;
                    GameBranch::HoldY2
                } else {
                    emit(&mut session, &mut emitted, items.x_prime(2))?;
                    GameBranch::SkipY2
                }
            }
        }
    };
    log.push(branch.to_string());

    let bound = items
        .branch_bounds()
        .into_iter()
        .find(|b| b.branch == branch)
        .expect("every branch has a bound");
    let mut flags = Vec::new();
    if !items.full_witness_fits() {
        flags.push(format!(
            "z, x_2, …, x_{} do not fit together at ε = {eps}; witness uses x_2..x_{}",
            n,
            items.z_witness().0.len()
        ));
    }
    let gain = session.gain();
    if gain > bound.alg_cap {
        flags.push(format!("gain {gain} exceeds the branch cap {}", bound.alg_cap));
    }
    AdversaryReport::score(
        Game::General,
        name,
        eps,
        Instance::general(emitted),
        session.finish(),
        bound.bound,
        log,
        flags,
    )
}
