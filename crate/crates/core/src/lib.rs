//! Exact-arithmetic laboratory for the online unbounded knapsack problem
//! with removal.

// Errors carry the offending rationals by value; they are not hot paths.
#![allow(clippy::result_large_err)]

pub mod adversary;
pub mod algorithms;
pub mod bounds;
pub mod format;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod rat;
pub mod replay;
