//! One function per subcommand. Each returns an [`Outcome`] holding the
//! envelope to print and the process exit code.

use std::path::Path;

use serde_json::{json, Map, Value};
use tailmax::bounds::{bound_report, hoeffding_bound};
use tailmax::candidates::{best_candidate, BestRef};
use tailmax::conflevel::upper_conf_bound;
use tailmax::dist::{binom_cdf, fmt_g17};
use tailmax::exact2::{self, RegionN2};
use tailmax::lagrange::{fit_certificate, verify};
use tailmax::oracle::{oracle_search, OracleConfig};
use tailmax::{DiscreteDistribution, Error, Problem};

use crate::envelope::Envelope;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Grid resolution used by `verify` for the `ℓ >= 0` scan.
pub const VERIFY_GRID: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub envelope: Envelope,
    pub code: i32,
}

impl Outcome {
    fn ok(envelope: Envelope) -> Self {
        Self {
            envelope,
            code: EXIT_OK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) => EXIT_BUDGET,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<Outcome, CliError>;

fn inputs(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn dist_json(d: &DiscreteDistribution) -> Value {
    json!({ "text": d.to_string(), "mean": d.mean() })
}

pub fn cmd_solve(n: usize, m: f64, t: f64) -> CmdResult {
    if n != 2 {
        return Err(CliError::invalid(format!(
            "the closed form covers n = 2 only; use `candidates` for n = {n}"
        )));
    }
    let p = Problem::new(n, m, t)?;
    let r = exact2::solve(&p)?;
    let maximizers: Vec<Value> = r
        .maximizers
        .iter()
        .map(|(region, d)| json!({ "region": region.label(), "distribution": dist_json(d) }))
        .collect();
    let result = json!({
        "value": r.value,
        "region": r.region_label(),
        "maximizers": maximizers,
    });
    Ok(Outcome::ok(Envelope::new(
        "solve",
        inputs(&[("n", json!(n)), ("m", json!(m)), ("t", json!(t))]),
        result,
    )))
}

pub fn cmd_candidates(n: usize, m: f64, t: f64) -> CmdResult {
    let p = Problem::new(n, m, t)?;
    let set = best_candidate(&p)?;
    let binary: Vec<Value> = set
        .binary
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "j": c.j, "a": c.a, "b": c.b, "pi": c.pi, "value": c.value,
                "best": set.best == Some(BestRef::Binary(i)),
            })
        })
        .collect();
    let ternary: Vec<Value> = set
        .ternary
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "k": c.k, "l": c.l, "a": c.a, "p": c.p, "q": c.q, "r": c.r,
                "value": c.value, "residual": c.residual, "degenerate": c.degenerate,
                "best": set.best == Some(BestRef::Ternary(i)),
            })
        })
        .collect();
    let best = match set.best {
        Some(BestRef::Binary(i)) => json!({ "family": "binary", "index": i }),
        Some(BestRef::Ternary(i)) => json!({ "family": "ternary", "index": i }),
        None => Value::Null,
    };
    let result = json!({
        "binary": binary,
        "ternary": ternary,
        "best": best,
        "best_value": set.best_value,
        "best_distribution": set.best_distribution().map(|d| d.to_string()),
    });
    let mut env = Envelope::new(
        "candidates",
        inputs(&[("n", json!(n)), ("m", json!(m)), ("t", json!(t))]),
        result,
    );
    if n >= 3 {
        env =
            env.warn("best_value is a lower bound on p_n(m,t); equality is conjectural for n >= 3");
    }
    Ok(Outcome::ok(env))
}

pub fn cmd_verify(n: usize, t: f64, dist: &str) -> CmdResult {
    let mu: DiscreteDistribution = dist.parse()?;
    let m = mu.mean();
    let p = Problem::new(n, m, t)?;
    let cert = fit_certificate(&mu, &p)?;
    let report = verify(&mu, &p, &cert, VERIFY_GRID)?;
    let result = json!({
        "m": m,
        "certificate": { "lambda1": cert.lambda1, "lambda2": cert.lambda2 },
        "max_violation_l1": report.max_violation_l1,
        "max_violation_l2": report.max_violation_l2,
        "support_condition_ok": report.support_condition_ok,
        "implied_value": report.implied_value,
        "direct_value": report.direct_value,
        "passed": report.passed,
    });
    let mut env = Envelope::new(
        "verify",
        inputs(&[
            ("n", json!(n)),
            ("t", json!(t)),
            ("dist", json!(mu.to_string())),
        ]),
        result,
    );
    if p.is_trivial() {
        env = env.warn("t >= n m: the point mass at m already attains probability 1");
    }
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    Ok(Outcome {
        envelope: env,
        code,
    })
}

pub fn cmd_bounds(n: usize, m: f64, t: f64) -> CmdResult {
    let p = Problem::new(n, m, t)?;
    let r = bound_report(&p)?;
    let result = json!({ "markov": r.markov, "hoeffding": r.hoeffding, "hs": r.hs });
    Ok(Outcome::ok(Envelope::new(
        "bounds",
        inputs(&[("n", json!(n)), ("m", json!(m)), ("t", json!(t))]),
        result,
    )))
}

pub fn cmd_oracle(n: usize, m: f64, t: f64, cfg: OracleConfig) -> CmdResult {
    let p = Problem::new(n, m, t)?;
    let r = oracle_search(&p, &cfg)?;
    let result = json!({
        "value": r.value,
        "distribution": dist_json(&r.distribution),
        "evaluations": r.evaluations,
    });
    Ok(Outcome::ok(Envelope::new(
        "oracle",
        inputs(&[
            ("n", json!(n)),
            ("m", json!(m)),
            ("t", json!(t)),
            ("grid", json!(cfg.grid_n)),
            ("prob_steps", json!(cfg.prob_steps)),
            ("refine", json!(cfg.refine_iters)),
        ]),
        result,
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourRow {
    pub m: f64,
    pub t: f64,
    pub p2: f64,
    pub hoeffding: f64,
    pub ratio: f64,
}

/// `p_2` against the Hoeffding bound on the grid `m = i / grid`,
/// `t = 2 j / grid`, keeping `0 < t < 2m`. Rows are ordered by `t`, then `m`.
pub fn contour_rows(grid: usize) -> Result<Vec<ContourRow>, CliError> {
    if grid < 2 {
        return Err(CliError::invalid("grid must be >= 2"));
    }
    let g = grid as f64;
    let mut rows = Vec::new();
    for j in 1..grid {
        let t = (2 * j) as f64 / g;
        for i in 1..grid {
            let m = i as f64 / g;
            if t >= 2.0 * m {
                continue;
            }
            let p = Problem::new(2, m, t)?;
            let p2 = exact2::solve(&p)?.value;
            let h = hoeffding_bound(&p)?;
            rows.push(ContourRow {
                m,
                t,
                p2,
                hoeffding: h,
                ratio: p2 / h,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub t: f64,
    pub m: f64,
    pub regions: Vec<RegionN2>,
}

impl RegionRow {
    pub fn label(&self) -> String {
        self.regions
            .iter()
            .map(|r| r.label())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Support family on the grid `t = 2 j / grid` (`0 <= t < 2`) and
/// `m = i / grid` (`0 < m < 1`), trivial points included.
pub fn region_rows(grid: usize) -> Result<Vec<RegionRow>, CliError> {
    if grid < 2 {
        return Err(CliError::invalid("grid must be >= 2"));
    }
    let g = grid as f64;
    let mut rows = Vec::new();
    for j in 0..grid {
        let t = (2 * j) as f64 / g;
        for i in 1..grid {
            let m = i as f64 / g;
            let r = exact2::solve(&Problem::new(2, m, t)?)?;
            rows.push(RegionRow {
                t,
                m,
                regions: r.regions(),
            });
        }
    }
    Ok(rows)
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::invalid(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_contour(grid: usize, out: &Path) -> CmdResult {
    let rows = contour_rows(grid)?;
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let count = rows.len();
    let records = rows
        .into_iter()
        .map(|r| [r.m, r.t, r.p2, r.hoeffding, r.ratio].map(fmt_g17).to_vec())
        .collect();
    write_csv(out, &["m", "t", "p2", "hoeffding", "ratio"], records)?;
    let result = json!({
        "rows": count,
        "path": out.display().to_string(),
        "min_ratio": min_ratio,
        "max_ratio": max_ratio,
    });
    Ok(Outcome::ok(Envelope::new(
        "contour",
        inputs(&[
            ("grid", json!(grid)),
            ("out", json!(out.display().to_string())),
        ]),
        result,
    )))
}

pub fn cmd_regions(grid: usize, out: &Path) -> CmdResult {
    let rows = region_rows(grid)?;
    let count = rows.len();
    let ties = rows.iter().filter(|r| r.regions.len() > 1).count();
    let records = rows
        .into_iter()
        .map(|r| vec![fmt_g17(r.t), fmt_g17(r.m), r.label()])
        .collect();
    write_csv(out, &["t", "m", "region"], records)?;
    let result = json!({ "rows": count, "tie_rows": ties, "path": out.display().to_string() });
    Ok(Outcome::ok(Envelope::new(
        "regions",
        inputs(&[
            ("grid", json!(grid)),
            ("out", json!(out.display().to_string())),
        ]),
        result,
    )))
}

pub fn cmd_confbound(n: usize, t: f64, alpha: f64) -> CmdResult {
    let r = upper_conf_bound(n, t, alpha)?;
    let result = json!({
        "m_u": r.m_u,
        "alpha": r.alpha,
        "achieved": r.achieved,
        "method": r.method.label(),
        "root_found": r.root_found,
    });
    let mut env = Envelope::new(
        "confbound",
        inputs(&[("n", json!(n)), ("t", json!(t)), ("alpha", json!(alpha))]),
        result,
    );
    if !r.root_found {
        env = env.warn("p_n(m,t) stays above alpha on the whole interval; m_u clipped at 1 - 1e-9");
    }
    if n >= 3 {
        env =
            env.warn("CANDIDATE_HEURISTIC: the value function is the conjectured candidate value");
    }
    Ok(Outcome::ok(env))
}

/// Witness `(n = 2, m, t)` with `b(2, m, t) < p_2(m, t) <= p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub n: usize,
    pub m: f64,
    pub t: f64,
    pub p2: f64,
    pub binomial: f64,
}

/// Threshold used by `falsify`; `p_2` is strictly above the binomial CDF
/// for every `m > t/2` here.
pub const FALSIFY_T: f64 = 0.5;

/// Fixes `t = 1/2` and raises `m` until `p_2(m, t) <= p0`. The witness is
/// the smallest `m` with the fewest decimal digits that qualifies.
pub fn falsify(p0: f64) -> Result<Witness, CliError> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(CliError::invalid(format!("p0 = {p0} not in (0, 1)")));
    }
    let t = FALSIFY_T;
    let value = |m: f64| exact2::value(m, t);
    for digits in 1..=15 {
        let scale = 10f64.powi(digits);
        let first = ((t / 2.0) * scale).floor() as i64 + 1;
        let last = scale as i64 - 1;
        // Jump near the threshold from the {t/2, 1} formula, then walk.
        let guess = ((1.0 - (1.0 - t / 2.0) * p0.sqrt()) * scale - 1e-6).ceil() as i64;
        let mut k = guess.clamp(first, last);
        while k > first && value((k - 1) as f64 / scale)? <= p0 + 1e-12 {
            k -= 1;
        }
        while k <= last {
            let m = k as f64 / scale;
            let p2 = value(m)?;
            if p2 <= p0 + 1e-12 {
                let binomial = binom_cdf(2, m, t);
                if binomial < p2 {
                    return Ok(Witness {
                        n: 2,
                        m,
                        t,
                        p2,
                        binomial,
                    });
                }
            }
            if p2 <= p0 + 1e-12 {
                break;
            }
            k += 1;
        }
    }
    Err(CliError::invalid(format!("no witness found for p0 = {p0}")))
}

pub fn cmd_falsify(p0: f64) -> CmdResult {
    let w = falsify(p0)?;
    let result = json!({
        "n": w.n,
        "m": w.m,
        "t": w.t,
        "p2": w.p2,
        "binomial": w.binomial,
        "bernoulli_dominated": w.binomial < w.p2,
    });
    Ok(Outcome::ok(Envelope::new(
        "falsify",
        inputs(&[("p0", json!(p0))]),
        result,
    )))
}
