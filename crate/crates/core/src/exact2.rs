//! Closed-form solution of the `n = 2` problem.
//!
//! Every extremal distribution for two summands is supported on one of
//! `{0, t}`, `{0, t, 1}`, `{t - 1, 1}` or `{t/2, 1}`. [`solve`] evaluates
//! each family that exists at `(m, t)` and keeps the best; the region
//! boundaries of the summary table fall out of the comparison.

use std::fmt;

use crate::{DiscreteDistribution, Error, Problem, Result};

/// Value differences below this are treated as ties between families.
pub const TIE_TOL: f64 = 1e-12;

/// Support family of an `n = 2` extremal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionN2 {
    /// `{0, t}`
    ZeroT,
    /// `{0, t, 1}`
    ZeroTOne,
    /// `{t - 1, 1}`
    TMinus1One,
    /// `{t/2, 1}`
    HalfTOne,
    /// `t >= 2m`, solved by the point mass at `m`.
    Trivial,
}

impl RegionN2 {
    pub fn label(self) -> &'static str {
        match self {
            RegionN2::ZeroT => "ZERO_T",
            RegionN2::ZeroTOne => "ZERO_T_ONE",
            RegionN2::TMinus1One => "TMINUS1_ONE",
            RegionN2::HalfTOne => "HALF_T_ONE",
            RegionN2::Trivial => "TRIVIAL",
        }
    }
}

impl fmt::Display for RegionN2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    /// One entry, or two on the boundary between `{t/2, 1}` and another family.
    pub maximizers: Vec<(RegionN2, DiscreteDistribution)>,
    pub problem: Problem,
}

impl SolveResult {
    pub fn regions(&self) -> Vec<RegionN2> {
        self.maximizers.iter().map(|(r, _)| *r).collect()
    }

    /// Region labels joined by `|`.
    pub fn region_label(&self) -> String {
        self.maximizers
            .iter()
            .map(|(r, _)| r.label())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// The curve `m_1(t)` on `4/5 <= t <= 1` where the `{0, t}` and `{t/2, 1}`
/// families give the same value.
pub fn m1_curve(t: f64) -> Result<f64> {
    if !(0.8 - 1e-12..=1.0 + 1e-12).contains(&t) {
        return Err(Error::OutOfDomain(format!(
            "m1 curve defined on [0.8, 1], got t = {t}"
        )));
    }
    let disc = (t * (5.0 * t - 4.0)).max(0.0);
    Ok((4.0 * t * t - (2.0 - t) * t * disc.sqrt()) / (5.0 * t * t - 4.0 * t + 4.0))
}

/// A family member that exists at `(m, t)`, with its closed-form value.
#[derive(Debug, Clone)]
pub struct FamilyCandidate {
    pub region: RegionN2,
    pub value: f64,
    pub atoms: Vec<(f64, f64)>,
}

/// All support families that yield a valid mean-`m` distribution at
/// `(m, t)`, in the order `{t/2,1}`, `{0,t}`, `{0,t,1}`, `{t-1,1}`.
///
/// Requires `0 <= t < 2m`.
pub fn family_candidates(m: f64, t: f64) -> Vec<FamilyCandidate> {
    let mut out = Vec::with_capacity(4);

    let h = t / 2.0;
    let w = (1.0 - m) / (1.0 - h);
    out.push(FamilyCandidate {
        region: RegionN2::HalfTOne,
        value: w * w,
        atoms: vec![(h, w), (1.0, (m - h) / (1.0 - h))],
    });

    if m < t && t <= 1.0 {
        let r = m / t;
        out.push(FamilyCandidate {
            region: RegionN2::ZeroT,
            value: 1.0 - r * r,
            atoms: vec![(0.0, 1.0 - r), (t, r)],
        });
    }

    if t > 0.0 && t < 1.0 && m > t * t {
        let denom = 1.0 - t * t;
        out.push(FamilyCandidate {
            region: RegionN2::ZeroTOne,
            value: (1.0 - m) * (1.0 - m) / denom,
            atoms: vec![
                (0.0, (1.0 - m) * (1.0 - t) / denom),
                (t, (1.0 - m) * t / denom),
                (1.0, (m - t * t) / denom),
            ],
        });
    }

    if (1.0..2.0).contains(&t) {
        let r = (1.0 + m - t) / (2.0 - t);
        out.push(FamilyCandidate {
            region: RegionN2::TMinus1One,
            value: 1.0 - r * r,
            atoms: vec![(t - 1.0, (1.0 - m) / (2.0 - t)), (1.0, r)],
        });
    }

    out
}

/// Solves `sup P(X_1 + X_2 <= t)` over mean-`m` distributions on `[0, 1]`.
pub fn solve(p: &Problem) -> Result<SolveResult> {
    if p.n != 2 {
        return Err(Error::InvalidProblem(format!(
            "closed form covers n = 2 only, got n = {}",
            p.n
        )));
    }
    if p.is_trivial() {
        return Ok(SolveResult {
            value: 1.0,
            maximizers: vec![(RegionN2::Trivial, DiscreteDistribution::point(p.m)?)],
            problem: *p,
        });
    }

    let cands = family_candidates(p.m, p.t);
    let best = cands
        .iter()
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);

    // `{t/2, 1}` is always first. Among the other families at most one is
    // kept: where two of them tie their distributions coincide.
    let half = &cands[0];
    let other = cands[1..]
        .iter()
        .fold(None::<&FamilyCandidate>, |acc, c| match acc {
            Some(a) if a.value >= c.value => Some(a),
            _ => Some(c),
        });

    let mut chosen: Vec<&FamilyCandidate> = Vec::with_capacity(2);
    if best - half.value <= TIE_TOL {
        chosen.push(half);
    }
    if let Some(o) = other {
        if best - o.value <= TIE_TOL {
            chosen.push(o);
        }
    }

    let mut maximizers = Vec::with_capacity(chosen.len());
    for c in chosen {
        let d = DiscreteDistribution::new(c.atoms.iter().copied())?;
        if maximizers
            .iter()
            .any(|(_, e): &(RegionN2, DiscreteDistribution)| e.approx_eq(&d, 1e-9))
        {
            continue;
        }
        maximizers.push((c.region, d));
    }

    Ok(SolveResult {
        value: best.clamp(0.0, 1.0),
        maximizers,
        problem: *p,
    })
}

/// Shorthand for the `n = 2` value `p_2(m, t)`.
pub fn value(m: f64, t: f64) -> Result<f64> {
    Ok(solve(&Problem::new(2, m, t)?)?.value)
}
