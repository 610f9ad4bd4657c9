//! Rate-maximizing variable side for a fixed set of degrees.
//!
//! For fixed `ε` the convergence condition is linear in `λ`, so sampling it
//! on the convergence grid gives a linear program: maximize `Σ λ_d/d`
//! subject to `Σ λ_d = 1`, `λ ≥ 0` and `ε Σ λ_d y_k^(d-1) ≤ x_k - slack`
//! with `y_k = 1 - ρ(1 - x_k)`. A simplex-lattice search is kept as a
//! cross-check.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::rate_bound_for;
use crate::convergence::{check_to_variable, grid, ConvergenceChecker};
use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};
use crate::simplex::{LinearProgram, LpOutcome};

/// Initial slack on the sampled convergence constraints.
pub const LP_SLACK: f64 = 1e-9;
const MAX_SLACK: f64 = 1e-5;
const INITIAL_ROWS: usize = 500;
const ROWS_PER_ROUND: usize = 200;
const LATTICE_STEP: f64 = 0.005;
const REFINE_STEP: f64 = 0.0005;
const MAX_LATTICE_POINTS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lp,
    Grid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lp => "lp",
            Method::Grid => "grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub degree_set: Vec<u32>,
    pub best_lambda: DegreeDistribution,
    pub best_rate: f64,
    /// `best_rate` over the rate upper bound at the search `ε`.
    pub ratio_to_bound: f64,
    pub method: Method,
}

/// One degree set of a sweep; `report` is `None` when no convergent `λ` exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub degree_set: Vec<u32>,
    pub report: Option<SearchReport>,
}

fn validate(degrees: &[u32], eps: f64) -> Result<Vec<u32>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let mut d = degrees.to_vec();
    d.sort_unstable();
    d.dedup();
    if d.len() != degrees.len() {
        return Err(Error::param("degrees", "duplicate degree"));
    }
    if d.is_empty() || d[0] < 2 {
        return Err(Error::param("degrees", "need at least one degree, all >= 2"));
    }
    Ok(d)
}

fn report(
    degrees: Vec<u32>,
    coeffs: &[f64],
    rho: &DegreeDistribution,
    eps: f64,
    method: Method,
) -> Result<SearchReport> {
    let total: f64 = coeffs.iter().sum();
    let lambda = DegreeDistribution::variable(
        degrees
            .iter()
            .zip(coeffs)
            .map(|(&d, &c)| (d, if c < 1e-15 { 0.0 } else { c / total })),
    )?;
    let rate = Ensemble::new(lambda.clone(), rho.clone()).design_rate();
    Ok(SearchReport {
        degree_set: degrees,
        best_lambda: lambda,
        best_rate: rate,
        ratio_to_bound: rate / rate_bound_for(eps, rho),
        method,
    })
}

/// Maximizes the design rate over `λ` supported on `degrees` at channel parameter `eps`.
///
/// The returned distribution always passes the convergence check at `eps`;
/// when no convergent `λ` exists the error is [`Error::Infeasible`].
pub fn optimize_lambda(
    degrees: &[u32],
    rho: &DegreeDistribution,
    eps: f64,
    method: Method,
) -> Result<SearchReport> {
    let degrees = validate(degrees, eps)?;
    let checker = ConvergenceChecker::new(rho, *degrees.last().unwrap());
    match method {
        Method::Lp => optimize_lp(degrees, rho, eps, &checker),
        Method::Grid => optimize_grid(degrees, rho, eps, &checker),
    }
}

fn optimize_lp(
    degrees: Vec<u32>,
    rho: &DegreeDistribution,
    eps: f64,
    checker: &ConvergenceChecker,
) -> Result<SearchReport> {
    let xs = grid(eps);
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            let y = check_to_variable(rho, x);
            degrees.iter().map(|&d| eps * y.powi(d as i32 - 1)).collect()
        })
        .collect();
    let t2 = checker.series().get(2);

    let mut slack = LP_SLACK;
    while slack <= MAX_SLACK {
        let coeffs = match solve_lp(&degrees, &xs, &rows, eps, t2, slack)? {
            Some(c) => c,
            None => {
                return Err(Error::Infeasible(format!(
                    "no convergent distribution on degrees {degrees:?} at eps = {eps}"
                )))
            }
        };
        let r = report(degrees.clone(), &coeffs, rho, eps, Method::Lp)?;
        if checker.check_fixed(&r.best_lambda, eps).convergent {
            return Ok(r);
        }
        slack *= 10.0;
    }
    Err(Error::Solver(format!(
        "LP optimum for {degrees:?} failed certification up to slack {MAX_SLACK}"
    )))
}

/// Constraint generation: start from a subsample, add the worst violated rows.
fn solve_lp(
    degrees: &[u32],
    xs: &[f64],
    rows: &[Vec<f64>],
    eps: f64,
    t2: f64,
    slack: f64,
) -> Result<Option<Vec<f64>>> {
    let stride = (xs.len() / INITIAL_ROWS).max(1);
    let mut active: Vec<bool> = (0..xs.len())
        .map(|k| k % stride == 0 || k + 1 == xs.len())
        .collect();
    let objective: Vec<f64> = degrees.iter().map(|&d| 1.0 / d as f64).collect();
    loop {
        let mut lp = LinearProgram::new(objective.clone());
        lp.add_eq(vec![1.0; degrees.len()], 1.0);
        if degrees[0] == 2 {
            let mut row = vec![0.0; degrees.len()];
            row[0] = 1.0;
            lp.add_le(row, t2 / eps * (1.0 - 1e-10));
        }
        for (k, row) in rows.iter().enumerate() {
            if active[k] {
                lp.add_le(row.clone(), xs[k] - slack);
            }
        }
        let x = match lp.maximize()? {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => return Err(Error::Solver("unbounded LP".into())),
        };
        let mut violated: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .filter(|&(k, _)| !active[k])
            .filter_map(|(k, row)| {
                let lhs: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                let v = lhs - (xs[k] - slack);
                (v > 1e-13).then_some((v, k))
            })
            .collect();
        if violated.is_empty() {
            return Ok(Some(x));
        }
        violated.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, k) in violated.iter().take(ROWS_PER_ROUND) {
            active[k] = true;
        }
    }
}

/// Compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>) {
    if parts == 1 {
        cur.push(total as u16);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for v in 0..=total {
        cur.push(v as u16);
        compositions(total - v, parts - 1, out, cur);
        cur.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn first_convergent(
    mut candidates: Vec<Vec<f64>>,
    degrees: &[u32],
    eps: f64,
    checker: &ConvergenceChecker,
) -> Option<Vec<f64>> {
    let rate = |c: &[f64]| -> f64 {
        c.iter()
            .zip(degrees)
            .map(|(v, &d)| v / d as f64)
            .sum()
    };
    candidates.sort_by(|a, b| rate(b).total_cmp(&rate(a)));
    // cheap screen on a coarse subsample before the full check
    let coarse: Vec<(f64, f64)> = grid(eps)
        .into_iter()
        .step_by(50)
        .map(|x| (x, check_to_variable(checker.rho(), x)))
        .collect();
    candidates.into_iter().find(|c| {
        let screen = coarse.iter().all(|&(x, y)| {
            let l: f64 = c
                .iter()
                .zip(degrees)
                .map(|(v, &d)| v * y.powi(d as i32 - 1))
                .sum();
            eps * l < x
        });
        screen
            && DegreeDistribution::variable(degrees.iter().copied().zip(c.iter().copied()))
                .map(|l| checker.check_fixed(&l, eps).convergent)
                .unwrap_or(false)
    })
}

fn optimize_grid(
    degrees: Vec<u32>,
    rho: &DegreeDistribution,
    eps: f64,
    checker: &ConvergenceChecker,
) -> Result<SearchReport> {
    let units = (1.0 / LATTICE_STEP).round() as usize;
    let k = degrees.len();
    if binomial(units + k - 1, k - 1) > MAX_LATTICE_POINTS as f64 {
        return Err(Error::param(
            "degrees",
            format!("grid search supports at most {MAX_LATTICE_POINTS} lattice points"),
        ));
    }
    let mut comps = Vec::new();
    compositions(units, k, &mut comps, &mut Vec::new());
    let coarse: Vec<Vec<f64>> = comps
        .into_iter()
        .map(|c| {
            let mut v: Vec<f64> = c[..k - 1].iter().map(|&u| u as f64 * LATTICE_STEP).collect();
            v.push(1.0 - v.iter().sum::<f64>());
            v
        })
        .collect();
    let best = first_convergent(coarse, &degrees, eps, checker).ok_or_else(|| {
        Error::Infeasible(format!(
            "no convergent lattice point on degrees {degrees:?} at eps = {eps}"
        ))
    })?;

    // refinement box of ± one coarse step in every free coordinate
    let half = (LATTICE_STEP / REFINE_STEP).round() as i64;
    let mut fine = Vec::new();
    let mut offsets = vec![-half; k - 1];
    'outer: loop {
        let mut v: Vec<f64> = best[..k - 1]
            .iter()
            .zip(&offsets)
            .map(|(&b, &o)| b + o as f64 * REFINE_STEP)
            .collect();
        let last = 1.0 - v.iter().sum::<f64>();
        if v.iter().all(|&c| c >= -1e-15) && last >= -1e-15 {
            v.iter_mut().for_each(|c| *c = c.max(0.0));
            v.push(last.max(0.0));
            fine.push(v);
        }
        for o in offsets.iter_mut() {
            *o += 1;
            if *o <= half {
                continue 'outer;
            }
            *o = -half;
        }
        break;
    }
    let refined = first_convergent(fine, &degrees, eps, checker).unwrap_or(best);
    report(degrees, &refined, rho, eps, Method::Grid)
}

/// Every `p`-subset of `2..=dv_max` (or only those containing 2), optimized
/// and sorted by rate with infeasible sets last.
pub fn sweep_degree_sets(
    p: usize,
    dv_max: u32,
    rho: &DegreeDistribution,
    eps: f64,
    require_two: bool,
    method: Method,
) -> Result<Vec<SweepRow>> {
    if p == 0 || dv_max < 2 || p > (dv_max - 1) as usize {
        return Err(Error::param(
            "P",
            format!("need 1 <= P <= D_v,max - 1, got P = {p}, D_v,max = {dv_max}"),
        ));
    }
    let pool: Vec<u32> = (2..=dv_max).collect();
    let mut sets = Vec::new();
    subsets(&pool, p, 0, &mut Vec::new(), &mut sets);
    if require_two {
        sets.retain(|s| s[0] == 2);
    }
    let mut rows: Vec<SweepRow> = sets
        .into_par_iter()
        .map(|s| -> Result<SweepRow> {
            let report = match optimize_lambda(&s, rho, eps, method) {
                Ok(r) => Some(r),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                degree_set: s,
                report,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| {
        let ra = a.report.as_ref().map_or(f64::NEG_INFINITY, |r| r.best_rate);
        let rb = b.report.as_ref().map_or(f64::NEG_INFINITY, |r| r.best_rate);
        rb.total_cmp(&ra)
    });
    Ok(rows)
}

fn subsets(pool: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..pool.len() {
        cur.push(pool[i]);
        subsets(pool, k, i + 1, cur, out);
        cur.pop();
    }
}
