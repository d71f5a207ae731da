//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tailmax::bounds::{hoeffding_bound, hs_bound};
use tailmax::candidates::{best_candidate, ternary_candidates};
use tailmax::conflevel::upper_conf_bound;
use tailmax::dist::{binom_cdf, cdf_at, iid_sum};
use tailmax::exact2::{self, RegionN2};
use tailmax::lagrange::fit_and_verify;
use tailmax::oracle::{conjecture_scan, feasible_grid, oracle_search, OracleConfig};
use tailmax::{DiscreteDistribution, Problem};
use tailmax_cli::commands::{contour_rows, falsify};

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn p2(m: f64, t: f64) -> f64 {
    exact2::value(m, t).unwrap()
}

fn prob(d: &DiscreteDistribution, n: usize, t: f64) -> f64 {
    cdf_at(&iid_sum(d, n).unwrap(), t)
}

fn closed_form_vs_oracle() -> Verdict {
    let cfg = OracleConfig {
        grid_n: 50,
        prob_steps: 64,
        refine_iters: 3,
    };
    let grid = feasible_grid(2, 25);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_self = 0.0f64;
    for &(m, t) in &grid {
        let p = Problem::new(2, m, t).unwrap();
        let exact = exact2::solve(&p).unwrap();
        for (_, d) in &exact.maximizers {
            worst_self = worst_self.max((prob(d, 2, t) - exact.value).abs());
        }
        let oracle = oracle_search(&p, &cfg).unwrap();
        worst_excess = worst_excess.max(oracle.value - exact.value);
    }
    verdict(
        worst_excess <= 1e-9 && worst_self <= 1e-10,
        format!(
            "{} points, max oracle - exact = {worst_excess:.3e} (tol 1e-9), max |direct - reported| = {worst_self:.3e} (tol 1e-10)",
            grid.len()
        ),
    )
}

fn certificates() -> Verdict {
    let grid = feasible_grid(2, 50);
    let (mut l1, mut l2, mut gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    let mut checked = 0;
    for &(m, t) in &grid {
        let p = Problem::new(2, m, t).unwrap();
        for (region, d) in exact2::solve(&p).unwrap().maximizers {
            let r = fit_and_verify(&d, &p, 1001).unwrap();
            checked += 1;
            l1 = l1.max(r.max_violation_l1);
            l2 = l2.max(r.max_violation_l2);
            gap = gap.max((r.implied_value - r.direct_value).abs());
            let ok = r.max_violation_l1 <= 1e-10
                && r.max_violation_l2 <= 1e-10
                && r.support_condition_ok
                && (r.implied_value - r.direct_value).abs() <= 1e-9;
            if !ok {
                failures.push(format!("({m}, {t}) {}", region.label()));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{checked} maximizers, max L1 = {l1:.3e}, max L2 = {l2:.3e}, max |implied - direct| = {gap:.3e}, failures: {failures:?}"
        ),
    )
}

/// Best `P(S_2 <= t)` over two-point laws `{0, b}` and `{a, 1}` with mean `m`.
fn best_two_point_with_endpoint(m: f64, t: f64) -> (f64, String) {
    const STEPS: usize = 200_000;
    let mut best = (f64::NEG_INFINITY, String::new());
    let mut consider = |d: DiscreteDistribution| {
        let v = prob(&d, 2, t);
        if v > best.0 {
            best = (v, d.to_string());
        }
    };
    let mut bs: Vec<f64> = (0..=STEPS)
        .map(|i| m + (1.0 - m) * i as f64 / STEPS as f64)
        .collect();
    bs.extend([t, t / 2.0]);
    for b in bs.into_iter().filter(|&b| b > m && b <= 1.0) {
        consider(DiscreteDistribution::new([(0.0, 1.0 - m / b), (b, m / b)]).unwrap());
    }
    let mut as_: Vec<f64> = (0..=STEPS).map(|i| m * i as f64 / STEPS as f64).collect();
    as_.extend([t / 2.0, t - 1.0]);
    for a in as_.into_iter().filter(|&a| (0.0..m).contains(&a)) {
        let w1 = (m - a) / (1.0 - a);
        consider(DiscreteDistribution::new([(a, 1.0 - w1), (1.0, w1)]).unwrap());
    }
    best
}

fn three_point_refutation() -> Verdict {
    let (m, t) = (0.85, 0.9);
    let three = (1.0 - m) * (1.0 - m) / (1.0 - t * t);
    let (two, arg) = best_two_point_with_endpoint(m, t);
    let zero_t = 1.0 - (m / t) * (m / t);
    let p = Problem::new(2, m, t).unwrap();
    let exact = exact2::solve(&p).unwrap();
    let oracle = oracle_search(
        &p,
        &OracleConfig {
            grid_n: 50,
            prob_steps: 64,
            refine_iters: 3,
        },
    )
    .unwrap();
    let pass = three - two >= 1e-3
        && (exact.value - three).abs() <= 1e-12
        && exact.regions() == [RegionN2::ZeroTOne]
        && (two - zero_t).abs() <= 1e-9
        && (oracle.value - three).abs() <= 1e-9;
    verdict(
        pass,
        format!(
            "three-point {three:.10}, best two-point {two:.10} at {arg}, gap {:.3e} (need >= 1e-3), oracle {:.10}",
            three - two,
            oracle.value
        ),
    )
}

fn bernoulli_refutation() -> Verdict {
    let w = falsify(0.3).unwrap();
    let pass = w.binomial < w.p2
        && w.p2 <= 0.3
        && (w.binomial - 0.16).abs() <= 1e-9
        && (w.p2 - (0.4f64 / 0.75).powi(2)).abs() <= 1e-9;
    verdict(
        pass,
        format!(
            "witness n = {}, m = {}, t = {}: b = {:.12} < p_2 = {:.12} <= 0.3",
            w.n, w.m, w.t, w.binomial, w.p2
        ),
    )
}

fn bound_identities() -> Verdict {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut half, mut tm1) = (Vec::new(), Vec::new());
    while half.len() < 200 || tm1.len() < 200 {
        let m: f64 = rng.gen_range(0.01..0.99);
        let t: f64 = rng.gen_range(0.0..(2.0 * m).min(1.99));
        let regions = exact2::solve(&Problem::new(2, m, t).unwrap())
            .unwrap()
            .regions();
        // The {t/2, 1} branch of the bound is the one with c <= 5/2.
        if regions == [RegionN2::HalfTOne] && 5.0 * m <= 2.0 * t + 1.0 && half.len() < 200 {
            half.push((m, t));
        } else if regions == [RegionN2::TMinus1One] && tm1.len() < 200 {
            tm1.push((m, t));
        }
    }
    let gap = |pts: &[(f64, f64)]| {
        pts.iter()
            .map(|&(m, t)| (hs_bound(m, t).unwrap() - p2(m, t)).abs())
            .fold(0.0, f64::max)
    };
    let (g_half, g_tm1) = (gap(&half), gap(&tm1));

    let mut dom = 0.0f64;
    let mut pts = feasible_grid(2, 50);
    pts.extend(half.iter().chain(&tm1));
    for &(m, t) in &pts {
        let v = p2(m, t);
        let h = hoeffding_bound(&Problem::new(2, m, t).unwrap()).unwrap();
        dom = dom.max(v - h).max(v - hs_bound(m, t).unwrap());
    }
    verdict(
        g_half <= 1e-12 && g_tm1 <= 1e-12 && dom <= 1e-12,
        format!(
            "max |hs - p_2| on {{t/2,1}} with 5m <= 2t+1: {g_half:.3e}, on {{t-1,1}}: {g_tm1:.3e} (tol 1e-12); max p_2 - min(bounds) over {} points: {dom:.3e}",
            pts.len()
        ),
    )
}

fn contour_figure() -> Verdict {
    let rows = contour_rows(100).unwrap();
    let in_range = rows.iter().all(|r| r.ratio > 0.0 && r.ratio <= 1.0);

    let band: Vec<_> = rows.iter().filter(|r| r.m - r.t / 2.0 <= 1e-3).collect();
    let band_ok = !band.is_empty() && band.iter().all(|r| r.ratio >= 0.999);

    // Same band sampled off-grid, at each t of the CSV.
    let ratio =
        |m: f64, t: f64| p2(m, t) / hoeffding_bound(&Problem::new(2, m, t).unwrap()).unwrap();
    let ts: Vec<f64> = (1..100).map(|j| 2.0 * j as f64 / 100.0).collect();
    let probe_min = |delta: f64| {
        ts.iter()
            .filter(|&&t| t / 2.0 + delta < 1.0)
            .map(|&t| ratio(t / 2.0 + delta, t))
            .fold(f64::INFINITY, f64::min)
    };
    let (r3, r4, r6) = (probe_min(1e-3), probe_min(1e-4), probe_min(1e-6));

    let mut slices = std::collections::BTreeMap::<u64, Vec<(f64, f64)>>::new();
    for r in &rows {
        slices
            .entry(r.t.to_bits())
            .or_default()
            .push((r.m, r.ratio));
    }
    let monotone = slices
        .values()
        .filter(|s| s.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12))
        .count();
    let frac = monotone as f64 / slices.len() as f64;

    verdict(
        in_range && band_ok && frac >= 0.95,
        format!(
            "ratios in (0,1]: {in_range}; CSV rows within 1e-3 of m = t/2: {} (nearest grid row is 1e-2 away); \
             off-grid min ratio at distance 1e-3: {r3:.6}, 1e-4: {r4:.6}, 1e-6: {r6:.8}; \
             monotone slices {monotone}/{} = {frac:.3}",
            band.len(),
            slices.len()
        ),
    )
}

fn conjecture_scans() -> Verdict {
    let cfg = OracleConfig {
        grid_n: 30,
        prob_steps: 32,
        refine_iters: 3,
    };
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [3, 4] {
        let report = conjecture_scan(n, &feasible_grid(n, 10), &cfg).unwrap();
        for row in report.counterexamples() {
            pass = false;
            println!(
                "    COUNTEREXAMPLE n={n} m={} t={} candidate={} oracle={} oracle_dist={} candidate_dist={:?} config={:?}",
                row.m,
                row.t,
                row.candidate_value,
                row.oracle_value,
                row.oracle_distribution,
                row.candidate_distribution.as_ref().map(|d| d.to_string()),
                cfg
            );
        }
        lines.push(format!(
            "n = {n}: {} points, max oracle - candidate = {:.3e}",
            report.rows.len(),
            report.max_excess
        ));
    }
    verdict(pass, lines.join("; "))
}

fn subsumption() -> Verdict {
    let mut worst = 0.0f64;
    let mut pts = 0;
    for i in 1..=40 {
        let m = i as f64 / 41.0;
        for j in 1..=40 {
            let t = 2.0 * m * j as f64 / 41.0;
            let p = Problem::new(2, m, t).unwrap();
            worst = worst.max((best_candidate(&p).unwrap().best_value - p2(m, t)).abs());
            pts += 1;
        }
    }

    // Root at (k, l) = (1, 0) against the three-point weights.
    let mut weight_gap = 0.0f64;
    let mut roots = 0;
    for &(m, t) in &feasible_grid(2, 40) {
        if !(t > 0.0 && t < 1.0 && m > t * t) {
            continue;
        }
        let d = 1.0 - t * t;
        let (w0, wt, w1) = (
            (1.0 - m) * (1.0 - t) / d,
            (1.0 - m) * t / d,
            (m - t * t) / d,
        );
        let cands = ternary_candidates(&Problem::new(2, m, t).unwrap()).unwrap();
        let best = cands
            .iter()
            .filter(|c| (c.k, c.l) == (1, 0))
            .map(|c| (c.r - w0).abs().max((c.q - wt).abs()).max((c.p - w1).abs()))
            .fold(f64::INFINITY, f64::min);
        weight_gap = weight_gap.max(best);
        roots += 1;
    }
    verdict(
        worst <= 1e-9 && weight_gap <= 1e-9,
        format!(
            "{pts} points, max |best candidate - p_2| = {worst:.3e}; (1,0) root vs three-point weights at {roots} points: max gap {weight_gap:.3e}"
        ),
    )
}

fn confidence() -> Verdict {
    let r = upper_conf_bound(2, 0.0, 0.05).unwrap();
    let err = (r.m_u - (1.0 - 0.05f64.sqrt())).abs();
    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0;
    for (t, alpha) in [(0.0, 0.05), (0.5, 0.1), (1.2, 0.05), (0.3, 0.5)] {
        let c = upper_conf_bound(2, t, alpha).unwrap();
        for i in 0..100 {
            let m = c.m_u + (1.0 - 1e-9 - c.m_u) * i as f64 / 99.0;
            let p = Problem::new(2, m, t).unwrap();
            let s = exact2::solve(&p).unwrap();
            let mut probs = vec![
                s.value,
                prob(&DiscreteDistribution::bernoulli(m).unwrap(), 2, t),
            ];
            probs.extend(s.maximizers.iter().map(|(_, d)| prob(d, 2, t)));
            for v in probs {
                worst = worst.max(v - alpha);
                checks += 1;
            }
        }
    }
    verdict(
        err <= 1e-9 && worst <= 1e-9,
        format!(
            "|m_u - (1 - sqrt 0.05)| = {err:.3e}; max P(S_2 <= t) - alpha above m_u over {checks} checks: {worst:.3e}"
        ),
    )
}

fn monotonicity() -> Verdict {
    let mut rng = StdRng::seed_from_u64(10);
    let (mut in_m, mut in_t) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let t: f64 = rng.gen_range(0.0..1.98);
        let lo = t / 2.0 + 1e-6;
        let m1: f64 = rng.gen_range(lo..0.999);
        let m2: f64 = rng.gen_range(m1..0.9995);
        in_m = in_m.max(p2(m2, t) - p2(m1, t));

        let m: f64 = rng.gen_range(0.001..0.999);
        let t1: f64 = rng.gen_range(0.0..2.0 * m);
        let t2: f64 = rng.gen_range(t1..2.0 * m);
        in_t = in_t.max(p2(m, t1) - p2(m, t2));
    }
    let mut conv = 0.0f64;
    for n in 1..=10 {
        for k in 1..20 {
            let p = k as f64 / 20.0;
            let s = iid_sum(&DiscreteDistribution::bernoulli(p).unwrap(), n).unwrap();
            for x in 0..=2 * n {
                let x = x as f64 / 2.0;
                conv = conv.max((cdf_at(&s, x) - binom_cdf(n, p, x)).abs());
            }
        }
    }
    verdict(
        in_m <= 1e-12 && in_t <= 1e-12 && conv <= 1e-12,
        format!(
            "max increase in m: {in_m:.3e}; max decrease in t: {in_t:.3e} (500 pairs each); Bernoulli convolution vs binomial CDF: {conv:.3e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("n=2 closed form vs oracle", closed_form_vs_oracle),
        ("Lagrange certificates", certificates),
        ("three-point refutation", three_point_refutation),
        ("Bernoulli refutation", bernoulli_refutation),
        ("bound identities", bound_identities),
        ("ratio to Hoeffding", contour_figure),
        ("conjecture scan n=3,4", conjecture_scans),
        ("n=2 subsumption", subsumption),
        ("confidence bound", confidence),
        ("monotonicity", monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
