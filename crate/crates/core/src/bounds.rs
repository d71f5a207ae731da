//! Closed-form upper bounds on `P(S_n <= t)`.

use crate::{Error, Problem, Result};

/// Bounds that apply to a given problem. `markov` is only set for `n = 1`
/// and `hs` only for `n = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub markov: Option<f64>,
    pub hoeffding: f64,
    pub hs: Option<f64>,
}

/// Markov's inequality applied to `1 - X`: `P(X <= t) <= (1 - m) / (1 - t)`.
///
/// Attained by `P(X = t) = (1 - m) / (1 - t)`, `P(X = 1) = (m - t) / (1 - t)`.
pub fn markov_bound(m: f64, t: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::OutOfDomain(format!("m = {m} not in (0, 1)")));
    }
    if !(0.0..m).contains(&t) {
        return Err(Error::OutOfDomain(format!(
            "markov bound needs 0 <= t < m, got t = {t}, m = {m}"
        )));
    }
    Ok(((1.0 - m) / (1.0 - t)).clamp(0.0, 1.0))
}

/// Hoeffding's exponential bound for the lower tail of `S_n`.
///
/// At `t = 0` the `0^0` factor is taken as its limit, giving `(1 - m)^n`.
pub fn hoeffding_bound(p: &Problem) -> Result<f64> {
    if p.is_trivial() {
        return Err(Error::OutOfDomain(format!(
            "hoeffding bound needs t < m n, got t = {}, m n = {}",
            p.t,
            p.m * p.n as f64
        )));
    }
    let n = p.n as f64;
    if p.t == 0.0 {
        return Ok((1.0 - p.m).powi(p.n as i32));
    }
    let mean_t = p.t / n;
    let value = ((1.0 - p.m) / (1.0 - mean_t)).powf(n - p.t) * (p.m / mean_t).powf(p.t);
    Ok(value.clamp(0.0, 1.0))
}

/// The Hoeffding–Shrikande bound for `n = 2`, translated to the left tail
/// with `c = (2 - t) / (1 - m)`.
pub fn hs_bound(m: f64, t: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::OutOfDomain(format!("m = {m} not in (0, 1)")));
    }
    if !(0.0..=2.0).contains(&t) {
        return Err(Error::OutOfDomain(format!("t = {t} not in [0, 2]")));
    }
    let c = (2.0 - t) / (1.0 - m);
    let value = if c <= 2.0 {
        1.0
    } else if c <= 2.5 {
        4.0 / (c * c)
    } else {
        2.0 / c - 1.0 / (c * c)
    };
    Ok(value.clamp(0.0, 1.0))
}

pub fn bound_report(p: &Problem) -> Result<BoundReport> {
    let markov = if p.n == 1 {
        Some(markov_bound(p.m, p.t)?)
    } else {
        None
    };
    let hs = if p.n == 2 {
        Some(hs_bound(p.m, p.t)?)
    } else {
        None
    };
    Ok(BoundReport {
        markov,
        hoeffding: hoeffding_bound(p)?,
        hs,
    })
}
