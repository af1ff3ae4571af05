//! Variance of `y`-rough numbers in short intervals.
//!
//! The crate computes the variance `V(X, H, y)` of the count of integers free
//! of prime factors `<= y` in windows of length `H`, both by brute force and
//! through the exact main term `M(H, y)`, and ships the friable-number,
//! saddle-point and contour-integral tools that describe `M` asymptotically.
//!
//! Exact values are [`ExactRational`]s; floats are mirrors.

pub mod analytic;
pub mod arith;
pub mod error;
pub mod friable;
pub mod main_term;
pub mod rational;
pub mod report;
pub mod sieve;
pub mod variance;

pub use error::{Error, Result};
pub use rational::ExactRational;
pub use sieve::{primes_up_to, PrimeTable};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
