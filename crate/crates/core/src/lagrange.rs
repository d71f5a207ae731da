//! Lagrange multiplier certificates for candidate extremal distributions.
//!
//! With the objective multiplier normalized so that `n λ0 = 1`, a mean-`m`
//! extremal `μ` admits `λ1, λ2 >= 0` such that
//!
//! ```text
//! ℓ(x) = λ1 - λ2 x - P(S_{n-1} <= t - x) >= 0   on [0, 1]
//! ℓ(x) = 0                                      on supp μ
//! ```
//!
//! and `P(S_n <= t) = λ1 - λ2 m`. These are necessary conditions only: a
//! passing report does not prove optimality.

use crate::dist::{cdf_at, iid_sum, SumDistribution, ATOL};
use crate::{DiscreteDistribution, Error, Problem, Result};

/// Tolerance on `ℓ >= 0` and on `ℓ = 0` at the atoms.
pub const ELL_TOL: f64 = 1e-10;
/// Offset used to probe `ℓ` on either side of its jump points.
pub const PROBE_OFFSET: f64 = 1e-9;
/// Tolerance for matching `t - x` against atoms of `S_{n-1}`.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Tolerance between `λ1 - λ2 m` and the directly computed probability.
pub const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub certificate: Certificate,
    /// `max(0, -min ℓ)` over all probe points.
    pub max_violation_l1: f64,
    /// `max |ℓ|` over the atoms of `μ`.
    pub max_violation_l2: f64,
    pub support_condition_ok: bool,
    /// `λ1 - λ2 m`.
    pub implied_value: f64,
    /// `P(S_n <= t)` computed by convolution.
    pub direct_value: f64,
    pub passed: bool,
}

/// Law of `S_{n-1}`; the empty sum for `n = 1`.
fn partial_sum(mu: &DiscreteDistribution, n: usize) -> Result<SumDistribution> {
    if n <= 1 {
        Ok(SumDistribution::zero())
    } else {
        iid_sum(mu, n - 1)
    }
}

fn ell(lead: &SumDistribution, p: &Problem, cert: &Certificate, x: f64) -> f64 {
    cert.lambda1 - cert.lambda2 * x - cdf_at(lead, p.t - x)
}

/// Evaluates `ℓ(x)` for `μ` at `x`.
pub fn ell_at(mu: &DiscreteDistribution, p: &Problem, cert: &Certificate, x: f64) -> Result<f64> {
    let lead = partial_sum(mu, p.n)?;
    Ok(ell(&lead, p, cert, x))
}

/// Least-squares fit of `λ1 - λ2 x = P(S_{n-1} <= t - x)` over the atoms
/// of `μ`. Exact when `μ` has two atoms.
pub fn fit_certificate(mu: &DiscreteDistribution, p: &Problem) -> Result<Certificate> {
    if mu.len() < 2 {
        return Err(Error::InvalidDistribution(
            "certificate fit needs at least two atoms".into(),
        ));
    }
    let lead = partial_sum(mu, p.n)?;
    let pts: Vec<(f64, f64)> = mu.support().map(|x| (x, cdf_at(&lead, p.t - x))).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / k;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidDistribution("atoms are not distinct".into()));
    }
    let slope = sxy / sxx;
    // y = λ1 - λ2 x
    Ok(Certificate {
        lambda1: my - slope * mx,
        lambda2: -slope,
    })
}

/// Checks the Lagrange conditions for `μ` under `cert`.
///
/// `ℓ >= 0` is probed on a uniform grid of `grid_points` over `[0, 1]`, at
/// every atom of `μ`, and at every `t - y` for atoms `y` of `S_{n-1}`,
/// together with `±1e-9` offsets around those points. The support condition
/// requires `t - x` to be an atom of `S_{n-1}` for every atom `x != 1`.
pub fn verify(
    mu: &DiscreteDistribution,
    p: &Problem,
    cert: &Certificate,
    grid_points: usize,
) -> Result<VerifyReport> {
    if grid_points < 2 {
        return Err(Error::OutOfDomain(
            "verify needs at least 2 grid points".into(),
        ));
    }
    let lead = partial_sum(mu, p.n)?;

    let mut probes: Vec<f64> = (0..grid_points)
        .map(|i| i as f64 / (grid_points - 1) as f64)
        .collect();
    let jumps = mu
        .support()
        .chain(lead.atoms().iter().map(|&(y, _)| p.t - y))
        .filter(|x| (-ATOL..=1.0 + ATOL).contains(x));
    for x in jumps {
        probes.extend([x - PROBE_OFFSET, x, x + PROBE_OFFSET]);
    }
    let max_violation_l1 = probes
        .into_iter()
        .filter(|x| (0.0..=1.0).contains(x))
        .map(|x| -ell(&lead, p, cert, x))
        .fold(0.0, f64::max);

    let max_violation_l2 = mu
        .support()
        .map(|x| ell(&lead, p, cert, x).abs())
        .fold(0.0, f64::max);

    let support_condition_ok = mu
        .support()
        .filter(|&x| (x - 1.0).abs() > ATOL)
        .all(|x| lead.has_atom_near(p.t - x, SUPPORT_TOL));

    let implied_value = cert.lambda1 - cert.lambda2 * p.m;
    let direct_value = cdf_at(&iid_sum(mu, p.n)?, p.t);

    let passed = max_violation_l1 <= ELL_TOL
        && max_violation_l2 <= ELL_TOL
        && support_condition_ok
        && (implied_value - direct_value).abs() <= VALUE_TOL
        && cert.lambda2 > 0.0
        && cert.lambda1 >= 0.0;

    Ok(VerifyReport {
        certificate: *cert,
        max_violation_l1,
        max_violation_l2,
        support_condition_ok,
        implied_value,
        direct_value,
        passed,
    })
}

/// Fits a certificate and verifies it. A distribution whose fit is
/// undefined (a single atom) yields a failing report with zero multipliers.
pub fn fit_and_verify(
    mu: &DiscreteDistribution,
    p: &Problem,
    grid_points: usize,
) -> Result<VerifyReport> {
    match fit_certificate(mu, p) {
        Ok(cert) => verify(mu, p, &cert, grid_points),
        Err(Error::InvalidDistribution(_)) => {
            let cert = Certificate {
                lambda1: 0.0,
                lambda2: 0.0,
            };
            let mut report = verify(mu, p, &cert, grid_points)?;
            report.passed = false;
            Ok(report)
        }
        Err(e) => Err(e),
    }
}
