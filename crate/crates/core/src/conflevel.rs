//! Nonparametric upper confidence bound on the mean.
//!
//! Since `p_n(m, t)` is non-increasing in `m`, the smallest `m_u` with
//! `p_n(m_u, t) <= α` gives `P(S_n <= t) <= α` for every population with
//! mean at least `m_u`. Observing `S_n = t` then yields `m_u` as an upper
//! confidence bound at level `1 - α`.
//!
//! For `n <= 2` the value function is exact. For `n >= 3` the best
//! conjectured candidate stands in for `p_n`, and the result is labeled as
//! a heuristic.

use std::fmt;

use crate::bounds::markov_bound;
use crate::candidates::best_candidate;
use crate::{exact2, Error, Problem, Result};

/// Distance kept from the ends of the open interval `(t/n, 1)`.
pub const EDGE_EPS: f64 = 1e-9;
/// Bisection stops once the bracket is this narrow.
pub const BRACKET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The value function is the proven supremum (`n <= 2`).
    ExactN2,
    /// The value function is the best conjectured candidate (`n >= 3`).
    CandidateHeuristic,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ExactN2 => "EXACT_N2",
            Method::CandidateHeuristic => "CANDIDATE_HEURISTIC",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceResult {
    pub m_u: f64,
    pub alpha: f64,
    /// `p_n(m_u, t)`.
    pub achieved: f64,
    pub method: Method,
    /// False when `p_n(m, t) > α` all the way up to `m = 1 - ε`.
    pub root_found: bool,
}

/// `p_n(m, t)` for `n <= 2`, or the best candidate value for `n >= 3`.
pub fn tail_value(n: usize, m: f64, t: f64) -> Result<f64> {
    let p = Problem::new(n, m, t)?;
    if p.is_trivial() {
        return Ok(1.0);
    }
    match n {
        1 => markov_bound(m, t),
        2 => Ok(exact2::solve(&p)?.value),
        _ => Ok(best_candidate(&p)?.best_value),
    }
}

/// Solves `p_n(m, t) = α` for the smallest such `m` by bisection.
pub fn upper_conf_bound(n: usize, t: f64, alpha: f64) -> Result<ConfidenceResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain(format!("alpha = {alpha} not in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::OutOfDomain("n must be at least 1".into()));
    }
    if !(t >= 0.0 && t < n as f64) {
        return Err(Error::OutOfDomain(format!("t = {t} not in [0, n)")));
    }
    let method = if n <= 2 {
        Method::ExactN2
    } else {
        Method::CandidateHeuristic
    };
    let f = |m: f64| tail_value(n, m, t);

    let mut lo = t / n as f64 + EDGE_EPS;
    let mut hi = 1.0 - EDGE_EPS;
    let f_hi = f(hi)?;
    if f_hi > alpha {
        return Ok(ConfidenceResult {
            m_u: hi,
            alpha,
            achieved: f_hi,
            method,
            root_found: false,
        });
    }
    if f(lo)? <= alpha {
        hi = lo;
    }
    // Invariant: f(lo) > alpha >= f(hi).
    while hi - lo > BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ConfidenceResult {
        m_u: hi,
        alpha,
        achieved: f(hi)?,
        method,
        root_found: true,
    })
}
