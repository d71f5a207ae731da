//! Conjectured extremal distributions for general `n`.
//!
//! Two families are generated:
//!
//! - binary: support `{a, b}` with `t - a = j b + (n - 1 - j) a` for some
//!   `j`, pushed to the smallest feasible `a`. At most `n` of these.
//! - ternary: support `{0, a, 1}` with `a = (t - l) / k`, probabilities
//!   fixed by the mean and by linearity of `x -> P(S_{n-1} <= t - x)` on
//!   the three atoms. At most `C(n, 2)` supports, each possibly with
//!   several roots.
//!
//! The best candidate value is always a valid lower bound on `p_n(m, t)`.

use crate::dist::{binom_cdf, cdf_at, iid_sum, interval_prob, ATOL};
use crate::{DiscreteDistribution, Error, Problem, Result};

/// Uniform cells scanned for sign changes of the linearity residual.
pub const SCAN_CELLS: usize = 1024;
/// Bracket width at which bisection stops.
pub const ROOT_TOL: f64 = 1e-13;
/// Weights below this mark a ternary root as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryCandidate {
    pub j: usize,
    pub a: f64,
    pub b: f64,
    /// `P(X = b)`.
    pub pi: f64,
    pub value: f64,
}

impl BinaryCandidate {
    pub fn distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::new([(self.a, 1.0 - self.pi), (self.b, self.pi)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TernaryCandidate {
    pub k: usize,
    pub l: usize,
    pub a: f64,
    /// `P(X = 1)`.
    pub p: f64,
    /// `P(X = a)`.
    pub q: f64,
    /// `P(X = 0)`.
    pub r: f64,
    pub value: f64,
    /// Linearity residual at the root.
    pub residual: f64,
    /// Some weight vanishes, so the support has fewer than three points.
    pub degenerate: bool,
}

impl TernaryCandidate {
    pub fn distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::new([(0.0, self.r), (self.a, self.q), (1.0, self.p)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BestRef {
    Binary(usize),
    Ternary(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub binary: Vec<BinaryCandidate>,
    pub ternary: Vec<TernaryCandidate>,
    pub best: Option<BestRef>,
    pub best_value: f64,
}

impl CandidateSet {
    pub fn best_distribution(&self) -> Option<DiscreteDistribution> {
        match self.best? {
            BestRef::Binary(i) => self.binary[i].distribution().ok(),
            BestRef::Ternary(i) => self.ternary[i].distribution().ok(),
        }
    }
}

/// Number of binary indices: `j = 0, ..., ceil(t/m) - 1`, at least one.
fn binary_index_count(p: &Problem) -> usize {
    let ratio = p.t / p.m;
    let nearest = ratio.round();
    let ceil = if (ratio - nearest).abs() <= 1e-12 {
        nearest
    } else {
        ratio.ceil()
    };
    (ceil as usize).max(1).min(p.n)
}

/// The binary family, in increasing `j`.
pub fn binary_candidates(p: &Problem) -> Result<Vec<BinaryCandidate>> {
    p.require_nontrivial()?;
    let (n, m, t) = (p.n as f64, p.m, p.t);
    let mut out = Vec::new();
    for j in 0..binary_index_count(p) {
        let jf = j as f64;
        let (a, b, pi) = if jf <= t + ATOL {
            let a = ((t - jf) / (n - jf)).max(0.0);
            (a, 1.0, 1.0 - (1.0 - m) * (n - jf) / (n - t))
        } else if jf * m < t {
            (0.0, t / jf, jf * m / t)
        } else {
            continue;
        };
        let feasible = a >= 0.0 && a < m && m < b && b <= 1.0 + ATOL && pi > 0.0 && pi < 1.0;
        if !feasible {
            continue;
        }
        out.push(BinaryCandidate {
            j,
            a,
            b: b.min(1.0),
            pi,
            value: binom_cdf(p.n, pi, jf),
        });
    }
    Ok(out)
}

/// Weights `(r, q, p)` on `{0, a, 1}` for a given `P(X = 1) = p`.
fn ternary_weights(m: f64, a: f64, p: f64) -> (f64, f64, f64) {
    let q = ((m - p) / a).max(0.0);
    let r = (1.0 - p - q).max(0.0);
    (r, q, p)
}

/// `(1 - a) P(t - a < S_{n-1} <= t) - a P(t - 1 < S_{n-1} <= t - a)`.
fn linearity_residual(prob: &Problem, a: f64, p: f64) -> Result<f64> {
    let (r, q, p) = ternary_weights(prob.m, a, p);
    let d = DiscreteDistribution::new([(0.0, r), (a, q), (1.0, p)])?;
    let s = iid_sum(&d, prob.n - 1)?;
    let t = prob.t;
    Ok((1.0 - a) * interval_prob(&s, t - a, t) - a * interval_prob(&s, t - 1.0, t - a))
}

/// Scans `f` on `cells` uniform cells of `[lo, hi]` and bisects every sign
/// change down to `tol`. Exact zeros at scan points are returned as is.
pub fn scan_roots<F>(mut f: F, lo: f64, hi: f64, cells: usize, tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let xs: Vec<f64> = (0..=cells)
        .map(|i| {
            if i == cells {
                hi
            } else {
                lo + (hi - lo) * i as f64 / cells as f64
            }
        })
        .collect();
    let fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for i in 0..=cells {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i == cells || fs[i + 1] == 0.0 || fs[i].signum() == fs[i + 1].signum() {
            continue;
        }
        let (mut a, mut b, fa) = (xs[i], xs[i + 1], fs[i]);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok(roots)
}

/// Pairs `(k, l)` with `l < t < l + k <= n - 1`, lexicographic.
pub fn ternary_supports(p: &Problem) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if p.n < 2 {
        return out;
    }
    let top = p.n - 1;
    for k in 1..=top {
        for l in 0..=top - k {
            let (lf, hi) = (l as f64, (l + k) as f64);
            if lf < p.t - ATOL && p.t < hi - ATOL {
                out.push((k, l));
            }
        }
    }
    out
}

/// The ternary family, ordered by `(k, l)` and then by increasing `p`.
pub fn ternary_candidates(prob: &Problem) -> Result<Vec<TernaryCandidate>> {
    prob.require_nontrivial()?;
    if prob.n < 2 {
        return Ok(Vec::new());
    }
    let m = prob.m;
    let mut out = Vec::new();
    for (k, l) in ternary_supports(prob) {
        let a = (prob.t - l as f64) / k as f64;
        if !(a > 0.0 && a < 1.0) {
            continue;
        }
        let lo = ((m - a) / (1.0 - a)).max(0.0);
        let hi = m;
        if lo > hi {
            continue;
        }
        let roots = scan_roots(
            |p| linearity_residual(prob, a, p),
            lo,
            hi,
            SCAN_CELLS,
            ROOT_TOL,
        )?;
        let mut last: Option<f64> = None;
        for root in roots {
            if last.is_some_and(|x| (root - x).abs() <= 1e-9) {
                continue;
            }
            last = Some(root);
            let (r, q, p) = ternary_weights(m, a, root);
            let d = DiscreteDistribution::new([(0.0, r), (a, q), (1.0, p)])?;
            let value = cdf_at(&iid_sum(&d, prob.n)?, prob.t);
            out.push(TernaryCandidate {
                k,
                l,
                a,
                p,
                q,
                r,
                value,
                residual: linearity_residual(prob, a, root)?,
                degenerate: p <= DEGENERATE_TOL || q <= DEGENERATE_TOL || r <= DEGENERATE_TOL,
            });
        }
    }
    Ok(out)
}

/// Both families and the best of them.
///
/// Ties go to binary before ternary, then to smaller `j`, then to smaller
/// `(k, l)` and smaller `a`; this is the generation order, so the first
/// maximum wins.
pub fn best_candidate(p: &Problem) -> Result<CandidateSet> {
    let binary = binary_candidates(p)?;
    let ternary = ternary_candidates(p)?;
    let mut best = None;
    let mut best_value = f64::NEG_INFINITY;
    let ranked = binary
        .iter()
        .enumerate()
        .map(|(i, c)| (BestRef::Binary(i), c.value))
        .chain(
            ternary
                .iter()
                .enumerate()
                .map(|(i, c)| (BestRef::Ternary(i), c.value)),
        );
    for (r, v) in ranked {
        if v > best_value {
            best = Some(r);
            best_value = v;
        }
    }
    if best.is_none() {
        return Err(Error::InvalidProblem(format!(
            "no feasible candidate at n = {}, m = {}, t = {}",
            p.n, p.m, p.t
        )));
    }
    Ok(CandidateSet {
        binary,
        ternary,
        best,
        best_value,
    })
}
