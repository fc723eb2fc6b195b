//! The constants `c_N` of the deterministic lower bound for general
//! instances.
//!
//! `c = c_N` and `v_1..v_N` (with `v_N = 1`) solve
//!
//! ```text
//! c·v_i = v_{i−1} + v_i/(a_i − 1)              3 ≤ i ≤ N
//! c·v_1 = v_2 + v_1/2
//! c·v_2 = v_2 + v_1/2 + Σ_{i=3..N} v_i/(a_i − 1)
//! ```
//!
//! With `r_i = 1/(a_i − 1)` the first two lines give `v_i = Π_{j>i} (c − r_j)`
//! for `i ≥ 2` and `v_1 = v_2/(c − 1/2)`. Substituting into the third yields
//! the degree-`N` polynomial
//!
//! ```text
//! P(c) = Π_{i=1..N} (c − r_i) − ½ Π_{i=3..N} (c − r_i)
//!        − (c − ½) Σ_{i=3..N} r_i Π_{j=i+1..N} (c − r_j)
//! ```
//!
//! whose largest root is `c_N`. Dividing by `(c − ½) v_2(c)` gives
//! `f(c) = c − 1 − 1/(2(c − ½)) − Σ_{i≥3} r_i/Π_{j=3..i}(c − r_j)`, which is
//! strictly increasing for `c > ½` (every subtracted term shrinks as `c`
//! grows, since `r_j ≤ 1/6` for `j ≥ 3`). So `P` has exactly one root above
//! `½`, and the bisection bracket is certified by exact sign evaluations.

use num_traits::{One, Signed, Zero};

use super::{poly::Poly, SylvesterTable};
use crate::rat::{rat, Rat};

/// Upper end of the descending scan, and its step.
const SCAN_TOP: i64 = 2;
const SCAN_STEPS_PER_UNIT: i64 = 64;
const MAX_BISECTIONS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LowerBoundError {
    #[error("c_N is defined for N >= 3, got N = {0}")]
    InvalidN(usize),
    #[error("precision must be positive")]
    InvalidPrecision,
    #[error("no sign change of the N = {n} polynomial in (1, 2]")]
    NoRoot { n: usize },
    #[error("bisection budget exhausted before reaching the requested precision (width {width})")]
    PrecisionUnreachable { width: Rat },
}

/// `|lhs − rhs|` of one constraint at the returned `c` and `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub constraint: String,
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundSolution {
    pub n: usize,
    pub polynomial: Poly,
    /// `P` changes sign on `[c_lo, c_hi]` (or vanishes at an end point).
    pub c_lo: Rat,
    pub c_hi: Rat,
    /// Midpoint of the bracket.
    pub c: Rat,
    /// `v_1..v_N`; index 0 holds `v_1`.
    pub v: Vec<Rat>,
    pub residuals: Vec<Residual>,
    /// `f(c_hi) − f(c_lo)`. Because `f` is increasing and vanishes inside
    /// the bracket, every point of the bracket has `|f| ≤ tolerance`.
    pub tolerance: Rat,
}

impl LowerBoundSolution {
    /// `v_i`, 1-based.
    pub fn v(&self, i: usize) -> &Rat {
        &self.v[i - 1]
    }

    pub fn width(&self) -> Rat {
        &self.c_hi - &self.c_lo
    }

    pub fn max_residual(&self) -> Rat {
        self.residuals
            .iter()
            .map(|r| r.value.clone())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn residuals_within_tolerance(&self) -> bool {
        self.residuals.iter().all(|r| r.value <= self.tolerance)
    }
}

/// Default bracket width, `10^-9`.
pub fn default_precision() -> Rat {
    rat(1, 1_000_000_000)
}

fn reciprocals(n: usize) -> Vec<Rat> {
    let table = SylvesterTable::new(n);
    (1..=n).map(|i| table.reciprocal(i)).collect()
}

/// `P` for a given `N ≥ 3`.
pub fn polynomial(n: usize) -> Poly {
    let r = reciprocals(n);
    let factor = |i: usize| Poly::linear_root(r[i - 1].clone());
    let product = |from: usize| (from..=n).fold(Poly::constant(Rat::one()), |acc, j| &acc * &factor(j));
    let half = rat(1, 2);
    let mut sum = Poly::default();
    for i in 3..=n {
        sum = &sum + &product(i + 1).scale(&r[i - 1]);
    }
    let lhs = product(1);
    let rhs = &product(3).scale(&half) + &(&Poly::linear_root(half) * &sum);
    &lhs - &rhs
}

/// `v_1..v_N` at `c`.
fn value_vector(c: &Rat, r: &[Rat]) -> Vec<Rat> {
    let n = r.len();
    let mut v = vec![Rat::zero(); n];
    v[n - 1] = Rat::one();
    for i in (3..=n).rev() {
        v[i - 2] = (c - &r[i - 1]) * &v[i - 1];
    }
    v[0] = &v[1] / (c - rat(1, 2));
    v
}

/// Signed gap `c − (v_2 + v_1/2 + Σ v_i r_i)/v_2`, i.e. `f(c)`.
fn closing_gap(c: &Rat, v: &[Rat], r: &[Rat]) -> Rat {
    let tail: Rat = (3..=v.len()).map(|i| &v[i - 1] * &r[i - 1]).sum();
    c - (&v[1] + &v[0] / Rat::from_integer(2.into()) + tail) / &v[1]
}

fn residuals(c: &Rat, v: &[Rat], r: &[Rat]) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in 3..=v.len() {
        let rhs = (&v[i - 2] + &v[i - 1] * &r[i - 1]) / &v[i - 1];
        out.push(Residual {
            constraint: format!("c·v_{i} = v_{} + v_{i}/(a_{i} − 1)", i - 1),
            value: (c - rhs).abs(),
        });
    }
    let rhs = (&v[1] + &v[0] / Rat::from_integer(2.into())) / &v[0];
    out.push(Residual {
        constraint: "c·v_1 = v_2 + v_1/2".into(),
        value: (c - rhs).abs(),
    });
    out.push(Residual {
        constraint: "c·v_2 = v_2 + v_1/2 + Σ v_i/(a_i − 1)".into(),
        value: closing_gap(c, v, r).abs(),
    });
    out
}

/// Brackets the largest root of `P` to a width below `precision` and
/// rebuilds `v_1..v_N` at the midpoint.
pub fn lower_bound_cn(n: usize, precision: &Rat) -> Result<LowerBoundSolution, LowerBoundError> {
    if n < 3 {
        return Err(LowerBoundError::InvalidN(n));
    }
    if !precision.is_positive() {
        return Err(LowerBoundError::InvalidPrecision);
    }
    let p = polynomial(n);
    let sign = |x: &Rat| p.eval(x).signum();

    // descending scan from 2 in steps of 1/64
    let grid = |k: i64| rat(k, SCAN_STEPS_PER_UNIT);
    let mut hi = grid(SCAN_TOP * SCAN_STEPS_PER_UNIT);
    let mut s_hi = sign(&hi);
    let mut bracket = None;
    if s_hi.is_zero() {
        bracket = Some((hi.clone(), hi.clone()));
    } else {
        for k in (SCAN_STEPS_PER_UNIT..SCAN_TOP * SCAN_STEPS_PER_UNIT).rev() {
            let lo = grid(k);
            let s_lo = sign(&lo);
            if s_lo.is_zero() {
                bracket = Some((lo.clone(), lo));
                break;
            }
            if s_lo != s_hi {
                bracket = Some((lo, hi));
                break;
            }
            hi = lo;
            s_hi = s_lo;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(LowerBoundError::NoRoot { n })?;

    let s_lo = sign(&lo);
    let mut steps = 0;
    while &hi - &lo >= *precision {
        if steps == MAX_BISECTIONS {
            return Err(LowerBoundError::PrecisionUnreachable { width: &hi - &lo });
        }
        steps += 1;
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        let s_mid = sign(&mid);
        if s_mid.is_zero() {
            lo = mid.clone();
            hi = mid;
        } else if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let r = reciprocals(n);
    let c = (&lo + &hi) / Rat::from_integer(2.into());
    let v = value_vector(&c, &r);
    let tolerance = closing_gap(&hi, &value_vector(&hi, &r), &r) - closing_gap(&lo, &value_vector(&lo, &r), &r);
    Ok(LowerBoundSolution {
        n,
        polynomial: p,
        residuals: residuals(&c, &v, &r),
        c_lo: lo,
        c_hi: hi,
        c,
        v,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, to_f64};

    #[test]
    fn cubic_for_three_levels() {
        let p = polynomial(3);
        assert_eq!(p.coeffs(), &[rat(1, 12), rat(1, 12), rat(-5, 3), int(1)]);
    }

    #[test]
    fn polynomial_has_degree_n() {
        for n in 3..=7 {
            let p = polynomial(n);
            assert_eq!(p.degree(), n);
            assert!(p.coeffs().last().unwrap().is_one());
        }
    }

    #[test]
    fn c5_above_published_bound() {
        let s = lower_bound_cn(5, &default_precision()).unwrap();
        assert!(s.c_lo > rat(15877, 10000), "c_lo = {}", s.c_lo);
        assert!(s.c_hi < rat(15878, 10000));
        assert!(s.width() < default_precision());
        assert!(s.residuals_within_tolerance(), "{:?}", s.residuals);
        assert_eq!(s.v(5), &int(1));
        // independent high-precision solve: 1.5877933125443739...
        assert!((to_f64(&s.c) - 1.587_793_312_544_374).abs() < 1e-9);
    }

    #[test]
    fn n3_matches_dense_scan() {
        let s = lower_bound_cn(3, &default_precision()).unwrap();
        // c^3 − 5/3 c^2 + c/12 + 1/12 scanned on (1, 2] at step 1e-6
        let cubic = |c: f64| c * c * c - 5.0 / 3.0 * c * c + c / 12.0 + 1.0 / 12.0;
        let mut last = None;
        for k in 1..=1_000_000u32 {
            let (a, b) = (1.0 + f64::from(k - 1) * 1e-6, 1.0 + f64::from(k) * 1e-6);
            if cubic(a).signum() != cubic(b).signum() {
                last = Some((a, b));
            }
        }
        let (a, b) = last.expect("sign change");
        let c = to_f64(&s.c);
        assert!(c >= a - 1e-9 && c <= b + 1e-9, "{c} not in [{a}, {b}]");
    }

    #[test]
    fn cn_non_decreasing() {
        let sols: Vec<_> = (3..=6)
            .map(|n| lower_bound_cn(n, &default_precision()).unwrap())
            .collect();
        for w in sols.windows(2) {
            assert!(w[1].c_hi >= w[0].c_lo, "c_{} vs c_{}", w[0].n, w[1].n);
            assert!(w[1].c >= w[0].c);
        }
        for s in &sols {
            assert!(s.c_lo >= int(1));
            assert!(s.residuals_within_tolerance());
        }
    }

    #[test]
    fn recursive_constraints_hold_exactly() {
        let s = lower_bound_cn(4, &rat(1, 1000)).unwrap();
        let n_exact = s.residuals.len() - 1;
        assert!(s.residuals[..n_exact].iter().all(|r| r.value.is_zero()));
        assert!(s.tolerance.is_positive());
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            lower_bound_cn(2, &default_precision()),
            Err(LowerBoundError::InvalidN(2))
        );
        assert_eq!(lower_bound_cn(3, &int(0)), Err(LowerBoundError::InvalidPrecision));
        let tiny = Rat::new(1.into(), num_traits::pow(num_bigint::BigInt::from(2), 400));
        assert!(matches!(
            lower_bound_cn(3, &tiny),
            Err(LowerBoundError::PrecisionUnreachable { .. })
        ));
    }
}
