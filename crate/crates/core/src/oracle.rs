//! Exact offline optimum of the unbounded knapsack with capacity 1.
//!
//! Two backends, both exact:
//!
//! * `ScaledDp`: scale all weights by the LCM `D` of their denominators and
//!   run the textbook unbounded-knapsack recurrence over capacities `0..=D`.
//!   Used when `D` is at most [`OracleConfig::dp_capacity_limit`].
//! * `BranchAndBound`: depth-first search over items in order of decreasing
//!   density, pruned by the fractional (density) relaxation. Used otherwise,
//!   with a node budget.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::model::{Instance, Item, Solution};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ScaledDp,
    BranchAndBound,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ScaledDp => "scaled_dp",
            Self::BranchAndBound => "branch_and_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub dp_capacity_limit: u64,
    pub node_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dp_capacity_limit: 1_000_000,
            node_budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: Rat,
    pub witness: Solution,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("branch and bound exceeded its budget of {budget} nodes")]
    ResourceLimit { budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatioError {
    #[error("competitive ratio undefined: algorithm gain is 0 but OPT is {opt}")]
    Undefined { opt: Rat },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub fn optimal(inst: &Instance) -> Result<OracleResult, OracleError> {
    optimal_with(inst, &OracleConfig::default())
}

pub fn optimal_with(inst: &Instance, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    let items = candidates(inst.items());
    if let Some(r) = scaled_dp(&items, cfg.dp_capacity_limit) {
        return Ok(r);
    }
    branch_and_bound(&items, cfg.node_budget)
}

/// `OPT(inst) / alg_gain`; 1 when both are zero.
pub fn competitive_ratio(alg_gain: &Rat, inst: &Instance) -> Result<Rat, RatioError> {
    let opt = optimal(inst)?.optimum;
    ratio_of(&opt, alg_gain)
}

pub fn ratio_of(opt: &Rat, alg_gain: &Rat) -> Result<Rat, RatioError> {
    if alg_gain.is_zero() {
        return if opt.is_zero() {
            Ok(Rat::one())
        } else {
            Err(RatioError::Undefined { opt: opt.clone() })
        };
    }
    Ok(opt / alg_gain)
}

/// Distinct items with positive value, in arrival order.
fn candidates(items: &[Item]) -> Vec<Item> {
    let mut out: Vec<Item> = Vec::new();
    for x in items {
        if x.value().is_positive() && !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

fn lcm_of_denominators<'a, I: Iterator<Item = &'a Rat>>(it: I) -> BigInt {
    it.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn scale(r: &Rat, by: &BigInt) -> BigInt {
    (r * Rat::from_integer(by.clone())).to_integer()
}

fn witness_from_counts(items: &[Item], counts: &[u64]) -> Solution {
    Solution::from_entries(
        items
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (x.clone(), c)),
    )
    .expect("oracle witness respects the capacity")
}

/// Exact DP over integer capacities, or `None` when the common denominator
/// of the weights exceeds `capacity_limit`.
pub fn scaled_dp(items: &[Item], capacity_limit: u64) -> Option<OracleResult> {
    let items = candidates(items);
    let d = lcm_of_denominators(items.iter().map(Item::weight));
    let cap = d.to_u64().filter(|&c| c <= capacity_limit)? as usize;
    let weights: Vec<usize> = items
        .iter()
        .map(|x| scale(x.weight(), &d).to_usize().expect("scaled weight ≤ D"))
        .collect();
    let vden = lcm_of_denominators(items.iter().map(Item::value));
    let values: Vec<BigInt> = items.iter().map(|x| scale(x.value(), &vden)).collect();

    // i128 when the largest possible total cannot overflow.
    let max_total_bits = values.iter().map(|v| v.bits()).max().unwrap_or(0) + d.bits();
    let (best, counts) = if max_total_bits < 120 {
        let small: Vec<i128> = values.iter().map(|v| v.to_i128().expect("fits")).collect();
        let (b, c) = unbounded_dp(cap, &weights, &small);
        (BigInt::from(b), c)
    } else {
        unbounded_dp(cap, &weights, &values)
    };
    Some(OracleResult {
        optimum: Rat::new(best, vden),
        witness: witness_from_counts(&items, &counts),
        method: Method::ScaledDp,
    })
}

fn unbounded_dp<T>(cap: usize, weights: &[usize], values: &[T]) -> (T, Vec<u64>)
where
    T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T>,
{
    const CARRY: u32 = u32::MAX;
    let mut best: Vec<T> = Vec::with_capacity(cap + 1);
    let mut choice: Vec<u32> = Vec::with_capacity(cap + 1);
    best.push(T::zero());
    choice.push(CARRY);
    for c in 1..=cap {
        let mut b = best[c - 1].clone();
        let mut ch = CARRY;
        for (i, (&w, v)) in weights.iter().zip(values).enumerate() {
            if w <= c {
                let cand = best[c - w].clone() + v;
                if cand > b {
                    b = cand;
                    ch = i as u32;
                }
            }
        }
        best.push(b);
        choice.push(ch);
    }
    let mut counts = vec![0u64; weights.len()];
    let mut c = cap;
    while c > 0 {
        match choice[c] {
            CARRY => c -= 1,
            i => {
                counts[i as usize] += 1;
                c -= weights[i as usize];
            }
        }
    }
    (best[cap].clone(), counts)
}

/// Depth-first branch and bound over count vectors.
pub fn branch_and_bound(items: &[Item], node_budget: u64) -> Result<OracleResult, OracleError> {
    let mut items = candidates(items);
    // decreasing density, lighter first on ties
    items.sort_by(|a, b| b.density().cmp(&a.density()).then_with(|| a.weight().cmp(b.weight())));
    let d = lcm_of_denominators(items.iter().map(Item::weight));
    let vden = lcm_of_denominators(items.iter().map(Item::value));
    let mut search = Search {
        weights: items.iter().map(|x| scale(x.weight(), &d)).collect(),
        values: items.iter().map(|x| scale(x.value(), &vden)).collect(),
        counts: vec![0; items.len()],
        best: BigInt::zero(),
        best_counts: vec![0; items.len()],
        nodes: 0,
        budget: node_budget,
    };
    search.descend(0, d, BigInt::zero())?;
    Ok(OracleResult {
        optimum: Rat::new(search.best, vden),
        witness: witness_from_counts(&items, &search.best_counts),
        method: Method::BranchAndBound,
    })
}

/// Integer-scaled search state: weights in units of `1/D`, values in units
/// of `1/V`.
struct Search {
    weights: Vec<BigInt>,
    values: Vec<BigInt>,
    counts: Vec<u64>,
    best: BigInt,
    best_counts: Vec<u64>,
    nodes: u64,
    budget: u64,
}

impl Search {
    /// Whether `value + cap * density(idx)` can exceed the incumbent, with
    /// density zero past the last item.
    fn promising(&self, idx: usize, cap: &BigInt, value: &BigInt) -> bool {
        match (self.weights.get(idx), self.values.get(idx)) {
            (Some(w), Some(v)) => value * w + cap * v > &self.best * w,
            _ => *value > self.best,
        }
    }

    fn descend(&mut self, idx: usize, cap: BigInt, value: BigInt) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::ResourceLimit { budget: self.budget });
        }
        if value > self.best {
            self.best = value.clone();
            self.best_counts.clone_from(&self.counts);
        }
        if idx == self.weights.len() || !self.promising(idx, &cap, &value) {
            return Ok(());
        }
        let w = self.weights[idx].clone();
        let v = self.values[idx].clone();
        let max = (&cap / &w).to_u64().expect("count fits in u64");
        for c in (0..=max).rev() {
            let big_c = BigInt::from(c);
            let rest = &cap - &w * &big_c;
            let gained = &value + &v * &big_c;
            // The child bound is non-increasing as `c` decreases.
            if !self.promising(idx + 1, &rest, &gained) {
                break;
            }
            self.counts[idx] = c;
            self.descend(idx + 1, rest, gained)?;
        }
        self.counts[idx] = 0;
        Ok(())
    }
}

/// Brute force over every count vector with `count_i ≤ floor(1/w_i)`.
/// Returns `None` when there are more than `max_vectors` such vectors.
pub fn exhaustive(items: &[Item], max_vectors: u64) -> Option<Rat> {
    let mut total: u64 = 1;
    for x in items {
        total = total.checked_mul(x.multiplicity() + 1)?;
    }
    if total > max_vectors {
        return None;
    }
    let mut best = Rat::zero();
    let mut counts = vec![0u64; items.len()];
    loop {
        let weight: Rat = items
            .iter()
            .zip(&counts)
            .map(|(x, &c)| x.weight() * Rat::from_integer(c.into()))
            .sum();
        if weight <= Rat::one() {
            let value: Rat = items
                .iter()
                .zip(&counts)
                .map(|(x, &c)| x.value() * Rat::from_integer(c.into()))
                .sum();
            if value > best {
                best = value;
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == items.len() {
                return Some(best);
            }
            if counts[i] < items[i].multiplicity() {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, inv_pow10, rat};

    fn item(w: Rat, v: Rat) -> Item {
        Item::new(w, v).unwrap()
    }

    fn both(items: &[Item]) -> (OracleResult, OracleResult) {
        (
            scaled_dp(items, 1_000_000).expect("small denominators"),
            branch_and_bound(items, 1_000_000).unwrap(),
        )
    }

    #[test]
    fn single_half_item() {
        let inst = Instance::general(vec![item(rat(1, 2), int(1))]);
        let r = optimal(&inst).unwrap();
        assert_eq!(r.optimum, int(2));
        assert_eq!(r.witness.copies(), 2);
        assert_eq!(r.method, Method::ScaledDp);
    }

    #[test]
    fn proportional_trap_optimum() {
        let inst = Instance::from_weights([rat(53, 150), rat(197, 300), rat(103, 300)]).unwrap();
        let r = optimal(&inst).unwrap();
        assert_eq!(r.optimum, int(1));
        assert_eq!(r.witness.gain(), int(1));
        assert!(r.witness.total_weight() <= &int(1));
    }

    #[test]
    fn large_denominators_use_branch_and_bound() {
        let eps = inv_pow10(4);
        // weights 1/a_i + eps, values 1/(a_i - 1): LCM of denominators > 10^6
        let inst = Instance::general(
            [2i64, 3, 7, 43]
                .iter()
                .map(|&a| item(rat(1, a) + &eps, rat(1, a - 1)))
                .collect(),
        );
        let r = optimal(&inst).unwrap();
        assert_eq!(r.method, Method::BranchAndBound);
        assert_eq!(r.optimum, rat(71, 42));
        assert_eq!(r.witness.gain(), r.optimum);
    }

    #[test]
    fn backends_agree_on_small_cases() {
        let cases = vec![
            vec![item(rat(3, 5), int(10)), item(rat(3, 10), int(4))],
            vec![
                item(rat(1, 3), int(2)),
                item(rat(1, 4), rat(3, 2)),
                item(rat(2, 5), rat(5, 2)),
            ],
            vec![item(rat(7, 10), int(3)), item(rat(1, 6), rat(1, 2))],
            vec![item(int(1), int(0))],
        ];
        for items in cases {
            let (dp, bb) = both(&items);
            assert_eq!(dp.optimum, bb.optimum);
            assert_eq!(dp.witness.gain(), dp.optimum);
            assert_eq!(bb.witness.gain(), bb.optimum);
            let brute = exhaustive(&items, 1_000_000).unwrap();
            assert_eq!(brute, dp.optimum);
        }
    }

    #[test]
    fn empty_and_zero_value_instances() {
        let r = optimal(&Instance::general(vec![])).unwrap();
        assert_eq!(r.optimum, int(0));
        assert!(r.witness.is_empty());
        let r = optimal(&Instance::general(vec![item(rat(1, 3), int(0))])).unwrap();
        assert_eq!(r.optimum, int(0));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let items: Vec<Item> = [rat(3, 7), rat(2, 5), rat(2, 7)]
            .into_iter()
            .map(|w| Item::proportional(w).unwrap())
            .collect();
        assert_eq!(
            branch_and_bound(&items, 2),
            Err(OracleError::ResourceLimit { budget: 2 })
        );
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(ratio_of(&int(0), &int(0)).unwrap(), int(1));
        assert!(matches!(ratio_of(&int(1), &int(0)), Err(RatioError::Undefined { .. })));
        let inst = Instance::from_weights([rat(53, 150), rat(197, 300), rat(103, 300)]).unwrap();
        assert_eq!(competitive_ratio(&rat(53, 75), &inst).unwrap(), rat(75, 53));
        assert_eq!(competitive_ratio(&int(1), &inst).unwrap(), int(1));
    }

    #[test]
    fn wide_values_take_the_bigint_path() {
        let huge = Rat::new(BigInt::from(10).pow(40) + 1, BigInt::from(10).pow(40));
        let items = vec![item(rat(1, 3), huge.clone()), item(rat(1, 2), int(1))];
        let (dp, bb) = both(&items);
        assert_eq!(dp.optimum, bb.optimum);
        assert_eq!(dp.optimum, huge * int(3));
    }
}
