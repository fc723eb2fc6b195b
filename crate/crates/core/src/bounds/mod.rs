//! Sylvester's sequence and the constants built on it.
//!
//! `a_1 = 2`, `a_n = 1 + a_1 ⋯ a_{n-1}`; `S_N = Σ_{n ≤ N} 1/(a_n − 1)`,
//! `T_N = a_N/(a_N − 1)^2 + S_{N−1}`. Both converge to `S_∞ ≈ 1.691030`,
//! the competitive ratio of Focus, from below and above respectively.

mod lower;
mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rat::Rat;

pub use lower::{default_precision, lower_bound_cn, polynomial, LowerBoundError, LowerBoundSolution, Residual};
pub use poly::Poly;

/// Default depth for tables and identity checks. `a_8` already exceeds
/// `10^25`.
pub const DEFAULT_DEPTH: usize = 8;

/// `a_1..a_K`, built with `a_{n+1} = a_n (a_n − 1) + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylvesterTable {
    a: Vec<BigInt>,
}

impl SylvesterTable {
    pub fn new(depth: usize) -> Self {
        let mut a = Vec::with_capacity(depth);
        let mut next = BigInt::from(2);
        for _ in 0..depth {
            let following = &next * (&next - 1u32) + 1u32;
            a.push(std::mem::replace(&mut next, following));
        }
        Self { a }
    }

    /// `a_n`, 1-based. Panics outside `1..=len`.
    pub fn get(&self, n: usize) -> &BigInt {
        assert!(
            n >= 1 && n <= self.a.len(),
            "a_{n} outside table of depth {}",
            self.a.len()
        );
        &self.a[n - 1]
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.a
    }

    /// `1/(a_n − 1)`.
    pub fn reciprocal(&self, n: usize) -> Rat {
        Rat::new(BigInt::one(), self.get(n) - 1u32)
    }
}

/// `a_n` for `n ≥ 1`.
pub fn sylvester(n: usize) -> BigInt {
    assert!(n >= 1, "the sequence starts at n = 1");
    SylvesterTable::new(n).get(n).clone()
}

/// `a_n` straight from the product definition, used to cross-check the
/// recursion.
pub fn sylvester_by_product(n: usize) -> BigInt {
    assert!(n >= 1, "the sequence starts at n = 1");
    let mut terms: Vec<BigInt> = Vec::with_capacity(n);
    for _ in 0..n {
        let product: BigInt = terms.iter().product();
        terms.push(product + 1u32);
    }
    terms.pop().expect("n >= 1")
}

/// `S_N`, with `S_0 = 0`.
pub fn partial_sum_s(n: usize) -> Rat {
    if n == 0 {
        return Rat::zero();
    }
    let table = SylvesterTable::new(n);
    (1..=n).map(|i| table.reciprocal(i)).sum()
}

/// `T_N` for `N ≥ 1`.
pub fn t_value(n: usize) -> Rat {
    assert!(n >= 1, "T_N is defined for N >= 1");
    let a = sylvester(n);
    let am1 = &a - 1u32;
    Rat::new(a, &am1 * &am1) + partial_sum_s(n - 1)
}

/// Certified `(lo, hi)` with `lo < S_∞ < hi`.
///
/// `hi = T_K`. For `n ≥ K`, `1/(a_{n+1} − 1) = 1/(a_n (a_n − 1)) ≤
/// (1/a_K) · 1/(a_n − 1)`, so the tail `Σ_{n ≥ K} 1/(a_n − 1)` is dominated by
/// a geometric series of ratio `1/a_K` and is at most `a_K/(a_K − 1)^2`; the
/// domination is strict from the second term on.
///
/// `lo = S_{K+1} = S_K + 1/(a_K (a_K − 1))`, the partial sum including the
/// first tail term. All later terms are positive, so `lo < S_∞`. Then
/// `hi − lo = 1/(a_K (a_K − 1)^2)`.
pub fn s_infinity_bracket(depth: usize) -> (Rat, Rat) {
    assert!(depth >= 1, "depth must be at least 1");
    let table = SylvesterTable::new(depth + 1);
    let lo: Rat = (1..=depth + 1).map(|i| table.reciprocal(i)).sum();
    (lo, t_value(depth))
}

/// `S_N`, `T_N` and the bracket of depth `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSet {
    pub n: usize,
    pub s_n: Rat,
    pub t_n: Rat,
    pub s_inf_lo: Rat,
    pub s_inf_hi: Rat,
}

impl BoundSet {
    pub fn new(n: usize) -> Self {
        let (s_inf_lo, s_inf_hi) = s_infinity_bracket(n);
        Self {
            n,
            s_n: partial_sum_s(n),
            t_n: t_value(n),
            s_inf_lo,
            s_inf_hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{status:>6}  {}", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub n: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Exact checks of the sequence and `T_N` identities up to `N`:
///
/// * the recursion against the product definition, for every `n ≤ N`;
/// * `1/(a_n − 1) = 1 − Σ_{j<n} 1/a_j` for every `n ≤ N`;
/// * `(a_N − 1)^2/a_N · (1 − S_{N−1}/T_N) = 1/T_N`;
/// * `a_k (a_k − 1)/(a_k + 1) · (1 − S_{k−1}/T_N) > 1/T_N` for `1 ≤ k ≤ N`.
pub fn check_identities(n: usize) -> IdentityReport {
    assert!(n >= 1, "N must be at least 1");
    let table = SylvesterTable::new(n + 1);
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool| checks.push(IdentityCheck { name, passed });

    let mut product = BigInt::one();
    for i in 1..=n {
        let a = table.get(i);
        push(format!("a_{i} = 1 + a_1⋯a_{}", i - 1), *a == &product + 1u32);
        product *= a;
        push(
            format!("a_{} = a_{i}(a_{i} − 1) + 1", i + 1),
            *table.get(i + 1) == a * (a - 1u32) + 1u32,
        );
    }

    let mut unit_sum = Rat::zero();
    for i in 1..=n {
        push(
            format!("1/(a_{i} − 1) = 1 − Σ_{{j<{i}}} 1/a_j"),
            table.reciprocal(i) == Rat::one() - &unit_sum,
        );
        unit_sum += Rat::new(BigInt::one(), table.get(i).clone());
    }

    let t = t_value(n);
    let t_inv = t.recip();
    let a_n = Rat::from_integer(table.get(n).clone());
    let one = Rat::one();
    let lhs = (&a_n - &one) * (&a_n - &one) / &a_n * (&one - partial_sum_s(n - 1) / &t);
    push(
        format!("(a_{n} − 1)²/a_{n} · (1 − S_{}/T_{n}) = 1/T_{n}", n - 1),
        lhs == t_inv,
    );

    let mut s_prev = Rat::zero();
    for k in 1..=n {
        let a_k = Rat::from_integer(table.get(k).clone());
        let lhs = &a_k * (&a_k - &one) / (&a_k + &one) * (&one - &s_prev / &t);
        push(
            format!("a_{k}(a_{k} − 1)/(a_{k} + 1) · (1 − S_{}/T_{n}) > 1/T_{n}", k - 1),
            lhs > t_inv,
        );
        s_prev += table.reciprocal(k);
    }

    IdentityReport { n, checks }
}
