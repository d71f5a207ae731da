//! Brute-force search over two- and three-point distributions.
//!
//! The oracle is the ground truth used to check the closed form for
//! `n = 2` and to stress the conjectured candidate families for larger `n`.
//! It never exceeds the true supremum: every distribution it evaluates is
//! a valid mean-`m` law on `[0, 1]`.
//!
//! For a fixed support the set of count vectors whose sum lands at or below
//! `t` does not depend on the weights, so `P(S_n <= t)` is a fixed
//! polynomial in the weights. The search precomputes that polynomial per
//! support and sweeps the single free weight.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::candidates::best_candidate;
use crate::dist::{cdf_at, iid_sum, ATOL};
use crate::{DiscreteDistribution, Error, Problem, Result};

/// Limit on `grid_n^3 * prob_steps`.
pub const BUDGET: f64 = 1e8;
/// Oracle excess over the candidate value that is flagged as a counterexample.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-6;

const GOLDEN_ITERS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Support grid resolution `N`: the pool contains `i / N`.
    pub grid_n: usize,
    /// Sweep resolution `M` for the free weight of three-point supports.
    pub prob_steps: usize,
    /// Coordinate-descent rounds on the incumbent support.
    pub refine_iters: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_n: 40,
            prob_steps: 32,
            refine_iters: 3,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 || self.prob_steps < 2 {
            return Err(Error::OutOfDomain(format!(
                "grid_n and prob_steps must be >= 2, got {} and {}",
                self.grid_n, self.prob_steps
            )));
        }
        let work = (self.grid_n as f64).powi(3) * self.prob_steps as f64;
        if work > BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "grid_n^3 * prob_steps = {work:e} exceeds {BUDGET:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub distribution: DiscreteDistribution,
    pub evaluations: u64,
}

/// `P(S_n <= t)` as a polynomial in the weights of a fixed support.
struct SupportPoly {
    terms: Vec<(f64, [u32; 3])>,
}

impl SupportPoly {
    fn new(xs: &[f64], n: usize, t: f64, binom: &[Vec<f64>]) -> Self {
        let mut terms = Vec::new();
        match xs.len() {
            2 => {
                for (c0, &coef) in binom[n].iter().enumerate() {
                    let c1 = n - c0;
                    if c0 as f64 * xs[0] + c1 as f64 * xs[1] <= t + ATOL {
                        terms.push((coef, [c0 as u32, c1 as u32, 0]));
                    }
                }
            }
            3 => {
                for c0 in 0..=n {
                    for c1 in 0..=n - c0 {
                        let c2 = n - c0 - c1;
                        let s = c0 as f64 * xs[0] + c1 as f64 * xs[1] + c2 as f64 * xs[2];
                        if s <= t + ATOL {
                            let coef = binom[n][c0] * binom[n - c0][c1];
                            terms.push((coef, [c0 as u32, c1 as u32, c2 as u32]));
                        }
                    }
                }
            }
            _ => unreachable!("supports have two or three points"),
        }
        Self { terms }
    }

    fn eval(&self, w: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|&(coef, c)| {
                coef * w[0].powi(c[0] as i32) * w[1].powi(c[1] as i32) * w[2].powi(c[2] as i32)
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
struct Incumbent {
    value: f64,
    support: Vec<f64>,
    weights: Vec<f64>,
}

/// Higher value first; on equal values the lexicographically smaller support.
fn better(a: &Incumbent, b: &Incumbent) -> Ordering {
    a.value.total_cmp(&b.value).then_with(|| {
        for (x, y) in a.support.iter().zip(&b.support) {
            match y.total_cmp(x) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        b.support.len().cmp(&a.support.len())
    })
}

fn pick(a: Incumbent, b: Incumbent) -> Incumbent {
    if better(&b, &a) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut row = vec![1.0; r + 1];
        for c in 1..r {
            row[c] = rows[r - 1][c - 1] + rows[r - 1][c];
        }
        rows.push(row);
    }
    rows
}

struct Search<'a> {
    p: &'a Problem,
    cfg: &'a OracleConfig,
    binom: Vec<Vec<f64>>,
}

impl Search<'_> {
    fn pair(&self, a: f64, b: f64) -> Option<Incumbent> {
        let m = self.p.m;
        if !(a < m && m < b) {
            return None;
        }
        let pb = (m - a) / (b - a);
        let w = [1.0 - pb, pb, 0.0];
        let poly = SupportPoly::new(&[a, b], self.p.n, self.p.t, &self.binom);
        Some(Incumbent {
            value: poly.eval(&w),
            support: vec![a, b],
            weights: vec![w[0], w[1]],
        })
    }

    /// Weights on `a < b < c` with `P(X = c) = pc` and mean `m`.
    fn weights(&self, xs: [f64; 3], pc: f64) -> [f64; 3] {
        let [a, b, c] = xs;
        let pb = ((self.p.m - a - pc * (c - a)) / (b - a)).max(0.0);
        let pa = (1.0 - pb - pc).max(0.0);
        [pa, pb, pc]
    }

    /// Best weight vector for the triple, and the number of evaluations.
    fn triple(&self, xs: [f64; 3]) -> Option<(Incumbent, u64)> {
        let m = self.p.m;
        let [a, b, c] = xs;
        if !(a < m && m < c) {
            return None;
        }
        let lo = ((m - b) / (c - b)).max(0.0);
        let hi = ((m - a) / (c - a)).min(1.0);
        if lo > hi {
            return None;
        }
        let poly = SupportPoly::new(&xs, self.p.n, self.p.t, &self.binom);
        let steps = self.cfg.prob_steps;
        let at = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;

        let mut best_i = 0;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..=steps {
            let v = poly.eval(&self.weights(xs, at(i)));
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }
        let mut best_pc = at(best_i);
        let mut evals = steps as u64 + 1;

        // Golden-section search on the cell around the best sample.
        let (mut l, mut r) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(steps)));
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let f = |pc: f64| poly.eval(&self.weights(xs, pc));
        let mut x1 = r - inv_phi * (r - l);
        let mut x2 = l + inv_phi * (r - l);
        let (mut f1, mut f2) = (f(x1), f(x2));
        evals += 2;
        for _ in 0..GOLDEN_ITERS {
            if f1 < f2 {
                l = x1;
                x1 = x2;
                f1 = f2;
                x2 = l + inv_phi * (r - l);
                f2 = f(x2);
            } else {
                r = x2;
                x2 = x1;
                f2 = f1;
                x1 = r - inv_phi * (r - l);
                f1 = f(x1);
            }
            evals += 1;
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best_v {
                best_v = v;
                best_pc = x;
            }
        }

        let w = self.weights(xs, best_pc);
        Some((
            Incumbent {
                value: best_v,
                support: xs.to_vec(),
                weights: w.to_vec(),
            },
            evals,
        ))
    }

    fn evaluate_support(&self, xs: &[f64]) -> Option<(Incumbent, u64)> {
        match *xs {
            [a, b] => self.pair(a, b).map(|i| (i, 1)),
            [a, b, c] => self.triple([a, b, c]),
            _ => None,
        }
    }

    fn refine(&self, mut inc: Incumbent, evals: &mut u64) -> Incumbent {
        let mut step = 1.0 / self.cfg.grid_n as f64;
        for _ in 0..self.cfg.refine_iters {
            for i in 0..inc.support.len() {
                for delta in [-step, step] {
                    let mut xs = inc.support.clone();
                    xs[i] += delta;
                    let ordered = xs.windows(2).all(|w| w[1] - w[0] > ATOL);
                    if !ordered || xs[0] < 0.0 || xs[xs.len() - 1] > 1.0 {
                        continue;
                    }
                    if let Some((cand, e)) = self.evaluate_support(&xs) {
                        *evals += e;
                        if cand.value > inc.value {
                            inc = cand;
                        }
                    }
                }
            }
            step *= 0.5;
        }
        inc
    }
}

/// Candidate support points: the grid `i / N`, the points `0, 1, m, t/2`,
/// the reflections `t - i/N`, and `t - 1`, restricted to `[0, 1]`.
pub fn support_pool(p: &Problem, grid_n: usize) -> Vec<f64> {
    let grid = (0..=grid_n).map(|i| i as f64 / grid_n as f64);
    let mut pool: Vec<f64> = grid.clone().collect();
    pool.extend([0.0, 1.0, p.m, p.t / 2.0]);
    pool.extend(grid.map(|g| p.t - g));
    if p.t >= 1.0 {
        pool.push(p.t - 1.0);
    }
    pool.retain(|x| (-ATOL..=1.0 + ATOL).contains(x));
    for x in pool.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    pool.sort_by(f64::total_cmp);
    pool.dedup_by(|b, a| (*b - *a).abs() <= ATOL);
    pool
}

/// Maximizes `P(S_n <= t)` over two- and three-point distributions whose
/// atoms come from [`support_pool`], then polishes the winner.
pub fn oracle_search(p: &Problem, cfg: &OracleConfig) -> Result<OracleResult> {
    cfg.validate()?;
    p.require_nontrivial()?;
    let search = Search {
        p,
        cfg,
        binom: binomial_table(p.n),
    };
    let pool = support_pool(p, cfg.grid_n);
    let k = pool.len();

    // Phase 1 and 2, parallel over the smallest atom. The reduction is a
    // max under a total order, so the result is independent of scheduling.
    let (best, mut evals) = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut local: Option<Incumbent> = None;
            let mut evals = 0u64;
            let mut offer = |c: Incumbent| {
                local = Some(match local.take() {
                    Some(cur) => pick(cur, c),
                    None => c,
                });
            };
            for j in i + 1..k {
                if let Some(c) = search.pair(pool[i], pool[j]) {
                    evals += 1;
                    offer(c);
                }
            }
            for j in i + 1..k {
                for l in j + 1..k {
                    if let Some((c, e)) = search.triple([pool[i], pool[j], pool[l]]) {
                        evals += e;
                        offer(c);
                    }
                }
            }
            (local, evals)
        })
        .reduce(
            || (None, 0),
            |(a, ea), (b, eb)| {
                let best = match (a, b) {
                    (Some(x), Some(y)) => Some(pick(x, y)),
                    (x, None) => x,
                    (None, y) => y,
                };
                (best, ea + eb)
            },
        );

    let best =
        best.ok_or_else(|| Error::InvalidProblem("no feasible support in the oracle pool".into()))?;
    let best = search.refine(best, &mut evals);

    let distribution = DiscreteDistribution::new(
        best.support
            .iter()
            .copied()
            .zip(best.weights.iter().copied()),
    )?;
    let value = cdf_at(&iid_sum(&distribution, p.n)?, p.t);
    Ok(OracleResult {
        value,
        distribution,
        evaluations: evals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub m: f64,
    pub t: f64,
    pub candidate_value: f64,
    pub oracle_value: f64,
    /// `oracle_value - candidate_value`.
    pub excess: f64,
    pub oracle_distribution: DiscreteDistribution,
    pub candidate_distribution: Option<DiscreteDistribution>,
}

impl ScanRow {
    pub fn is_counterexample(&self) -> bool {
        self.excess > COUNTEREXAMPLE_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub n: usize,
    pub config: OracleConfig,
    pub rows: Vec<ScanRow>,
    pub max_excess: f64,
}

impl ScanReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.is_counterexample())
    }
}

/// Compares the best conjectured candidate with the oracle at every
/// `(m, t)` of `grid`.
pub fn conjecture_scan(n: usize, grid: &[(f64, f64)], cfg: &OracleConfig) -> Result<ScanReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for &(m, t) in grid {
        let p = Problem::new(n, m, t)?;
        let cands = best_candidate(&p)?;
        let oracle = oracle_search(&p, cfg)?;
        rows.push(ScanRow {
            m,
            t,
            candidate_value: cands.best_value,
            oracle_value: oracle.value,
            excess: oracle.value - cands.best_value,
            oracle_distribution: oracle.distribution,
            candidate_distribution: cands.best_distribution(),
        });
    }
    let max_excess = rows
        .iter()
        .map(|r| r.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ScanReport {
        n,
        config: *cfg,
        rows,
        max_excess,
    })
}

/// A `g x g` grid strictly inside the nontrivial region `0 < t < n m`:
/// `m_i = i / (g + 1)` and `t_j = n m_i j / (g + 1)` for `i, j = 1..=g`.
pub fn feasible_grid(n: usize, g: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(g * g);
    for i in 1..=g {
        let m = i as f64 / (g + 1) as f64;
        for j in 1..=g {
            out.push((m, n as f64 * m * j as f64 / (g + 1) as f64));
        }
    }
    out
}
