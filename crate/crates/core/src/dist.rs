//! Finite discrete distributions on `[0, 1]` and the exact law of their
//! i.i.d. sums.
//!
//! Everything here is exact enumeration in floating point: the law of
//! `S_n = X_1 + ... + X_n` is materialized by walking the multisets of
//! atoms (count vectors) rather than the `k^n` ordered tuples.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Tolerance used for merging atoms and for weak inequalities `x <= t`.
pub const ATOL: f64 = 1e-12;

/// Tolerance on the total mass of a [`DiscreteDistribution`].
pub const MASS_TOL: f64 = 1e-12;

/// Upper limit on the number of count vectors enumerated by [`iid_sum`].
pub const MAX_MULTISETS: u64 = 10_000_000;

/// A probability measure on `[0, 1]` with finitely many atoms.
///
/// Atoms are kept sorted and pairwise separated by more than [`ATOL`];
/// every weight is strictly positive and the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, weight)` pairs.
    ///
    /// Zero weights are dropped and values closer than [`ATOL`] are merged.
    /// Weights are not renormalized: they must already sum to one.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (x, p) in pairs {
            if !x.is_finite() || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite pair ({x}, {p})"
                )));
            }
            if !(-ATOL..=1.0 + ATOL).contains(&x) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {x} outside [0, 1]"
                )));
            }
            if p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {p} at atom {x}"
                )));
            }
            raw.push((x.clamp(0.0, 1.0), p));
        }
        if raw.is_empty() {
            return Err(Error::InvalidDistribution("empty atom list".into()));
        }
        let total: f64 = raw.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        raw.retain(|&(_, p)| p > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            atoms: merge_sorted(raw),
        })
    }

    /// Point mass at `x`.
    pub fn point(x: f64) -> Result<Self> {
        Self::new([(x, 1.0)])
    }

    /// Two-point distribution on `{0, 1}` with `P(X = 1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new([(0.0, 1.0 - p), (1.0, p)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atom locations in increasing order.
    pub fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|&(x, _)| x)
    }

    pub fn mean(&self) -> f64 {
        mean(self)
    }

    /// Returns true if both distributions have the same atoms and weights
    /// up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self
                .atoms
                .iter()
                .zip(&other.atoms)
                .all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol)
    }
}

/// Parses the `x:p,x:p,...` text form.
impl FromStr for DiscreteDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            let (x, p) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `x:p`, got `{item}`")))?;
            let x: f64 = x
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom `{x}` in `{item}`")))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad weight `{p}` in `{item}`")))?;
            pairs.push((x, p));
        }
        Self::new(pairs)
    }
}

/// Writes the `x:p,...` form with 17 significant digits.
impl fmt::Display for DiscreteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(x, p)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", fmt_g17(x), fmt_g17(p))?;
        }
        Ok(())
    }
}

/// Formats a float with 17 significant digits, `%.17g` style.
///
/// Seventeen digits round-trip every `f64` exactly.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Merges runs of sorted atoms whose consecutive gaps are within [`ATOL`].
/// The merged atom keeps the location of the heaviest member.
fn merge_sorted(sorted: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    let mut heaviest = 0.0;
    let mut last_x = f64::NEG_INFINITY;
    for (x, p) in sorted {
        match out.last_mut() {
            Some(cur) if x - last_x <= ATOL => {
                if p > heaviest {
                    cur.0 = x;
                    heaviest = p;
                }
                cur.1 += p;
            }
            _ => {
                out.push((x, p));
                heaviest = p;
            }
        }
        last_x = x;
    }
    out
}

/// Sample mean, summed left to right over the ordered atoms.
pub fn mean(d: &DiscreteDistribution) -> f64 {
    d.atoms.iter().map(|&(x, p)| x * p).sum()
}

/// The law of an i.i.d. sum `S_n`, as sorted `(value, probability)` atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDistribution {
    atoms: Vec<(f64, f64)>,
}

impl SumDistribution {
    /// The law of the empty sum, a point mass at zero.
    pub fn zero() -> Self {
        Self {
            atoms: vec![(0.0, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, p)| x * p).sum()
    }

    /// Whether `y` is an atom of the sum within `tol`.
    pub fn has_atom_near(&self, y: f64, tol: f64) -> bool {
        let i = self.atoms.partition_point(|&(x, _)| x < y - tol);
        self.atoms.get(i).is_some_and(|&(x, _)| x <= y + tol)
    }

    pub fn cdf_at(&self, t: f64) -> f64 {
        cdf_at(self, t)
    }

    pub fn interval_prob(&self, u: f64, v: f64) -> f64 {
        interval_prob(self, u, v)
    }
}

/// Number of multisets of size `n` drawn from `k` kinds, `C(n+k-1, k-1)`,
/// saturating at `u64::MAX`.
pub fn multiset_count(n: usize, k: usize) -> u64 {
    if k == 0 {
        return u64::from(n == 0);
    }
    let r = (k - 1).min(n) as u64;
    let top = (n + k - 1) as u64;
    let mut c: u128 = 1;
    for i in 0..r {
        c = c * u128::from(top - i) / u128::from(i + 1);
        if c > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    c as u64
}

/// Exact law of `S_n` for `n` i.i.d. draws from `d`.
///
/// Enumerates count vectors `(c_1, ..., c_k)` with `sum c_i = n`, weighting
/// each by the multinomial probability. Sums closer than [`ATOL`] are merged.
pub fn iid_sum(d: &DiscreteDistribution, n: usize) -> Result<SumDistribution> {
    if n == 0 {
        return Err(Error::OutOfDomain("iid_sum needs n >= 1".into()));
    }
    let k = d.atoms.len();
    let count = multiset_count(n, k);
    if count > MAX_MULTISETS {
        return Err(Error::BudgetExceeded(format!(
            "{count} count vectors for n = {n}, k = {k} (limit {MAX_MULTISETS})"
        )));
    }
    let xs: Vec<f64> = d.atoms.iter().map(|a| a.0).collect();
    let ps: Vec<f64> = d.atoms.iter().map(|a| a.1).collect();
    let binom = binomial_table(n);

    let mut out: Vec<(f64, f64)> = Vec::with_capacity(count as usize);
    let mut counts = vec![0usize; k];
    // Depth-first walk over compositions; the last coordinate takes the rest.
    fn walk(
        idx: usize,
        remaining: usize,
        counts: &mut [usize],
        xs: &[f64],
        ps: &[f64],
        binom: &[Vec<f64>],
        out: &mut Vec<(f64, f64)>,
    ) {
        let k = counts.len();
        if idx == k - 1 {
            counts[idx] = remaining;
            let mut weight = 1.0;
            let mut left = counts.iter().sum::<usize>();
            let mut value = 0.0;
            for i in 0..k {
                let c = counts[i];
                weight *= binom[left][c] * ps[i].powi(c as i32);
                left -= c;
                value += c as f64 * xs[i];
            }
            out.push((value, weight));
            return;
        }
        for c in 0..=remaining {
            counts[idx] = c;
            walk(idx + 1, remaining - c, counts, xs, ps, binom, out);
        }
    }
    walk(0, n, &mut counts, &xs, &ps, &binom, &mut out);

    out.retain(|&(_, p)| p > 0.0);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(SumDistribution {
        atoms: merge_sorted(out),
    })
}

/// Pascal's triangle up to row `n`, in floating point.
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

/// `P(S <= t)`, counting atoms at `t + ATOL` and below.
pub fn cdf_at(s: &SumDistribution, t: f64) -> f64 {
    s.atoms
        .iter()
        .take_while(|&&(x, _)| x <= t + ATOL)
        .map(|&(_, p)| p)
        .sum()
}

/// `P(u < S <= v)` with the same [`ATOL`] shift on both ends.
pub fn interval_prob(s: &SumDistribution, u: f64, v: f64) -> f64 {
    s.atoms
        .iter()
        .filter(|&&(x, _)| x > u + ATOL && x <= v + ATOL)
        .map(|&(_, p)| p)
        .sum()
}

/// Binomial CDF `b(n, p, x) = P(Bin(n, p) <= x)` by direct summation.
pub fn binom_cdf(n: usize, p: f64, x: f64) -> f64 {
    if x + ATOL < 0.0 {
        return 0.0;
    }
    let upper = (x + ATOL).floor();
    if upper >= n as f64 {
        return 1.0;
    }
    let upper = upper as usize;
    let q = 1.0 - p;
    let mut coeff = 1.0;
    let mut total = 0.0;
    for i in 0..=upper {
        if i > 0 {
            coeff = coeff * (n - i + 1) as f64 / i as f64;
        }
        total += coeff * p.powi(i as i32) * q.powi((n - i) as i32);
    }
    total.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(pairs: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn point_mass() {
        let p = d(&[(0.5, 1.0)]);
        assert_eq!(p.atoms(), &[(0.5, 1.0)]);
    }

    #[test]
    fn duplicates_merge() {
        let p = d(&[(0.0, 0.5), (1.0, 0.25), (1.0, 0.25)]);
        assert_eq!(p.atoms(), &[(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn near_atoms_merge() {
        let p = d(&[(0.3, 0.5), (0.3 + 1e-13, 0.5)]);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DiscreteDistribution::new([(0.0, 0.5), (0.5, 0.6)]).is_err());
        assert!(DiscreteDistribution::new([(1.5, 1.0)]).is_err());
        assert!(DiscreteDistribution::new([(-0.1, 1.0)]).is_err());
        assert!(DiscreteDistribution::new([(0.5, -0.1), (0.2, 1.1)]).is_err());
        assert!(DiscreteDistribution::new(Vec::<(f64, f64)>::new()).is_err());
    }

    #[test]
    fn zero_weights_dropped() {
        let p = d(&[(0.0, 0.0), (0.4, 1.0)]);
        assert_eq!(p.atoms(), &[(0.4, 1.0)]);
    }

    #[test]
    fn means() {
        assert_eq!(d(&[(0.0, 0.5), (1.0, 0.5)]).mean(), 0.5);
        assert_eq!(d(&[(0.37, 1.0)]).mean(), 0.37);
        assert_abs_diff_eq!(d(&[(0.25, 0.8), (1.0, 0.2)]).mean(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn fair_coin_cubed() {
        let s = iid_sum(&d(&[(0.0, 0.5), (1.0, 0.5)]), 3).unwrap();
        let want = [(0.0, 0.125), (1.0, 0.375), (2.0, 0.375), (3.0, 0.125)];
        assert_eq!(s.atoms().len(), 4);
        for (a, b) in s.atoms().iter().zip(want) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(cdf_at(&s, 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn point_mass_sum() {
        let s = iid_sum(&d(&[(0.3, 1.0)]), 4).unwrap();
        assert_eq!(s.atoms().len(), 1);
        assert_abs_diff_eq!(s.atoms()[0].0, 1.2, epsilon = 1e-15);
    }

    #[test]
    fn two_atom_square() {
        let s = iid_sum(&d(&[(0.25, 0.8), (1.0, 0.2)]), 2).unwrap();
        let want = [(0.5, 0.64), (1.25, 0.32), (2.0, 0.04)];
        for (a, b) in s.atoms().iter().zip(want) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(cdf_at(&s, 0.5), 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(cdf_at(&s, 2.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(interval_prob(&s, 0.5, 1.5), 0.32, epsilon = 1e-15);
    }

    #[test]
    fn half_open_intervals() {
        let s = iid_sum(&d(&[(0.0, 0.5), (1.0, 0.5)]), 1).unwrap();
        assert_eq!(interval_prob(&s, -0.5, 0.0), 0.5);
        assert_eq!(interval_prob(&s, 0.0, 0.5), 0.0);
    }

    #[test]
    fn explosion_guard() {
        let many: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 / 19.0, 0.05)).collect();
        let wide = DiscreteDistribution::new(many).unwrap();
        assert!(matches!(iid_sum(&wide, 30), Err(Error::BudgetExceeded(_))));
        assert_eq!(multiset_count(3, 2), 4);
        assert_eq!(multiset_count(2, 3), 6);
    }

    #[test]
    fn binomial_cdf_values() {
        assert_abs_diff_eq!(binom_cdf(3, 0.6, 1.0), 0.352, epsilon = 1e-15);
        assert_eq!(binom_cdf(7, 0.3, 7.0), 1.0);
        assert_abs_diff_eq!(binom_cdf(5, 0.2, 0.0), 0.8f64.powi(5), epsilon = 1e-15);
        assert_eq!(binom_cdf(5, 0.2, -0.5), 0.0);
        assert_abs_diff_eq!(binom_cdf(4, 0.5, 1.999), 5.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn text_form() {
        let p: DiscreteDistribution = "0:0.5,0.25:0.3,1:0.2".parse().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(
            p.to_string(),
            "0:0.5,0.25:0.29999999999999999,1:0.20000000000000001"
        );
        let back: DiscreteDistribution = p.to_string().parse().unwrap();
        assert_eq!(back, p);
        assert!("0:0.5,1".parse::<DiscreteDistribution>().is_err());
        assert!("0:a".parse::<DiscreteDistribution>().is_err());
        assert!("".parse::<DiscreteDistribution>().is_err());
    }

    #[test]
    fn g17_format() {
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(123456.0), "123456");
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-9, 7e21, 0.64] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
