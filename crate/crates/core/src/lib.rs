//! Maximizing `P(S_n <= t)` over i.i.d. sums of mean-`m` random variables
//! on `[0, 1]`.
//!
//! The crate covers the whole pipeline around this extremal problem:
//!
//! - [`dist`]: finite discrete distributions and the exact law of `S_n`.
//! - [`bounds`]: Markov, Hoeffding and Hoeffding–Shrikande upper bounds.
//! - [`exact2`]: the closed-form solution for `n = 2`.
//! - [`lagrange`]: fitting and checking Lagrange multiplier certificates.
//! - [`candidates`]: conjectured two- and three-point extremals for any `n`.
//! - [`oracle`]: brute-force search over small supports, used as ground truth.
//! - [`conflevel`]: the nonparametric upper confidence bound on `m`.

pub mod bounds;
pub mod candidates;
pub mod conflevel;
pub mod dist;
pub mod exact2;
pub mod lagrange;
pub mod oracle;

pub use dist::{DiscreteDistribution, SumDistribution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// An instance `(n, m, t)`: `n` i.i.d. variables on `[0, 1]` with mean `m`,
/// threshold `t` on their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub n: usize,
    pub m: f64,
    pub t: f64,
}

impl Problem {
    pub fn new(n: usize, m: f64, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProblem("n must be at least 1".into()));
        }
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidProblem(format!("m = {m} not in (0, 1)")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidProblem(format!("t = {t} must be >= 0")));
        }
        Ok(Self { n, m, t })
    }

    /// `t >= m n`: the point mass at `m` puts all of `S_n` at or below `t`.
    pub fn is_trivial(&self) -> bool {
        self.t + dist::ATOL >= self.m * self.n as f64
    }

    /// Errors unless `0 <= t < m n`.
    pub fn require_nontrivial(&self) -> Result<()> {
        if self.is_trivial() {
            Err(Error::InvalidProblem(format!(
                "t = {} >= m n = {}; the point mass at m gives probability 1",
                self.t,
                self.m * self.n as f64
            )))
        } else {
            Ok(())
        }
    }
}
