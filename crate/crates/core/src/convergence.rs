//! Convergence of an ensemble on the BEC and its threshold.
//!
//! An ensemble is convergent at channel parameter `ε` when
//! `ελ(1 - ρ(1 - x)) < x` for `0 < x ≤ ε`. Writing `y = 1 - ρ(1 - x)`,
//! the margin `x - ελ(y)` equals `Σ_i (T_i - ελ_i) y^(i-1)`. Designed
//! ensembles saturate the leading coefficients (`ελ_i = T_i`), so the margin
//! vanishes to high order at the origin and direct evaluation is swamped by
//! roundoff there. The check therefore runs in two stages:
//!
//! 1. the coefficient chain: the first index whose coefficient is not saturated
//!    must have `ελ_j < T_j`; a certified radius around the origin follows from
//!    bounding the negative coefficients;
//! 2. a grid on `[x_min, ε]` (plus geometric refinement near zero) where each
//!    point is accepted if the direct margin clears the strictness tolerance
//!    or the cancellation-free series form is positive.

use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::series::TaylorCoefficients;

/// Left end of the uniform grid.
pub const X_MIN: f64 = 1e-4;
/// Uniform grid size on `[X_MIN, ε]`.
pub const GRID_POINTS: usize = 10_000;
/// Geometric refinement density on `[X_MIN, 1e-2]`.
pub const POINTS_PER_DECADE: usize = 20;
const REFINE_TOP: f64 = 1e-2;
/// A direct margin at or below this value is treated as indeterminate.
pub const STRICTNESS: f64 = 1e-12;
/// Relative tolerance under which `ελ_i` and `T_i` count as equal.
pub const SATURATION: f64 = 1e-12;
/// Default bisection tolerance for [`threshold`].
pub const DEFAULT_TOL: f64 = 1e-6;
/// Minimum series truncation used by the checker.
pub const MIN_SERIES_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceVerdict {
    pub convergent: bool,
    /// Minimum of `x - ελ(1 - ρ(1 - x))` over the test points. When the
    /// near-zero screen fails this holds the offending (negative) coefficient
    /// `T_j - ελ_j` instead and `witness_x` is zero.
    pub margin: f64,
    pub witness_x: f64,
}

/// `1 - ρ(1 - x)`, computed without cancellation for small `x`.
pub fn check_to_variable(rho: &DegreeDistribution, x: f64) -> f64 {
    let l = (-x).ln_1p();
    rho.iter()
        .map(|(d, c)| -c * ((d - 1) as f64 * l).exp_m1())
        .sum()
}

/// Test abscissae in `x` for channel parameter `eps`: `GRID_POINTS` uniform
/// points on `[x_min, eps]` plus `POINTS_PER_DECADE` geometric points on
/// `[x_min, min(1e-2, eps)]`, sorted ascending.
pub fn grid(eps: f64) -> Vec<f64> {
    let x_min = X_MIN.min(eps / 10.0);
    let mut xs = Vec::with_capacity(GRID_POINTS + 64);
    let span = eps - x_min;
    for k in 0..GRID_POINTS {
        xs.push(x_min + span * k as f64 / (GRID_POINTS - 1) as f64);
    }
    let top = REFINE_TOP.min(eps);
    xs.extend(geometric(x_min, top));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn geometric(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let decades = if hi > lo { (hi / lo).log10() } else { 0.0 };
    let n = (decades * POINTS_PER_DECADE as f64).ceil() as usize;
    (0..=n).map(move |k| {
        if n == 0 {
            lo
        } else {
            lo * (hi / lo).powf(k as f64 / n as f64)
        }
    })
}

/// Reusable checker for one check side; holds the series of `ρ⁻¹(1 - x)`.
#[derive(Debug, Clone)]
pub struct ConvergenceChecker {
    rho: DegreeDistribution,
    series: TaylorCoefficients,
}

impl ConvergenceChecker {
    /// Builds a checker able to handle variable sides up to `max_var_degree`.
    pub fn new(rho: &DegreeDistribution, max_var_degree: u32) -> Self {
        let m = (4 * max_var_degree as usize).max(MIN_SERIES_TERMS);
        let series = TaylorCoefficients::for_rho(rho, m)
            .or_else(|_| TaylorCoefficients::for_rho(rho, MIN_SERIES_TERMS))
            .expect("check side with a usable series");
        Self {
            rho: rho.clone(),
            series,
        }
    }

    pub fn rho(&self) -> &DegreeDistribution {
        &self.rho
    }

    pub fn series(&self) -> &TaylorCoefficients {
        &self.series
    }

    fn ensure_terms(&mut self, max_var_degree: u32) {
        let need = (4 * max_var_degree as usize).max(MIN_SERIES_TERMS);
        if self.series.truncation() < need {
            let grown = need.max(2 * self.series.truncation());
            if let Ok(s) = TaylorCoefficients::for_rho(&self.rho, grown) {
                self.series = s;
            }
        }
    }

    pub fn check(&mut self, lambda: &DegreeDistribution, eps: f64) -> ConvergenceVerdict {
        self.ensure_terms(lambda.max_degree());
        self.check_fixed(lambda, eps)
    }

    /// Like [`check`](Self::check) but stops at the first failing test point.
    pub fn is_convergent(&mut self, lambda: &DegreeDistribution, eps: f64) -> bool {
        self.ensure_terms(lambda.max_degree());
        self.run(lambda, eps, true).convergent
    }

    /// Same as [`check`](Self::check) but without growing the series.
    pub fn check_fixed(&self, lambda: &DegreeDistribution, eps: f64) -> ConvergenceVerdict {
        self.run(lambda, eps, false)
    }

    fn run(&self, lambda: &DegreeDistribution, eps: f64, early_exit: bool) -> ConvergenceVerdict {
        if eps <= 0.0 {
            return ConvergenceVerdict {
                convergent: true,
                margin: f64::INFINITY,
                witness_x: 0.0,
            };
        }
        let top = lambda.max_degree() as usize;
        let m = self.series.truncation().max(top + 1);

        // c[i - 2] = T_i - ελ_i with saturated entries zeroed
        let mut c: Vec<f64> = (2..=m).map(|i| self.series.get(i)).collect();
        for (d, l) in lambda.iter() {
            let i = d as usize;
            let t = self.series.get(i);
            let v = t - eps * l;
            c[i - 2] = if v.abs() <= SATURATION * t { 0.0 } else { v };
        }

        // stage 1: leading non-saturated coefficient
        let j = match c.iter().position(|&v| v != 0.0) {
            Some(k) => k + 2,
            None => m + 1,
        };
        if j <= m && c[j - 2] < 0.0 {
            return ConvergenceVerdict {
                convergent: false,
                margin: c[j - 2],
                witness_x: 0.0,
            };
        }
        let radius = if j <= m {
            certified_radius(&c[j - 2..])
        } else {
            1.0
        };

        // stage 2: grid
        let mut xs = grid(eps);
        let x_min = xs[0];
        let x_lo = self.series.get(2) * radius;
        if x_lo < x_min {
            let lo = x_lo.max(1e-300);
            xs.extend(geometric(lo, x_min));
            xs.sort_by(f64::total_cmp);
            xs.dedup();
        }
        let tail = if j <= m { &c[j - 2..] } else { &c[c.len()..] };

        let mut convergent = true;
        let mut margin = f64::INFINITY;
        let mut witness_x = 0.0;
        for &x in &xs {
            let y = check_to_variable(&self.rho, x);
            let direct = x - eps * lambda.evaluate(y);
            let (ok, value) = if direct > STRICTNESS {
                (true, direct)
            } else {
                let (scaled, s) = series_value(tail, j, y);
                (scaled > 0.0, s.max(direct))
            };
            if value < margin {
                margin = value;
                witness_x = x;
            }
            if !ok {
                convergent = false;
                if early_exit {
                    break;
                }
            }
        }
        ConvergenceVerdict {
            convergent,
            margin,
            witness_x,
        }
    }

    /// Supremum of convergent channel parameters, to within `tol`.
    pub fn threshold(&mut self, lambda: &DegreeDistribution, tol: f64) -> f64 {
        self.ensure_terms(lambda.max_degree());
        let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
        let mut hi = 1.0;
        let l2 = lambda.coefficient(2);
        if l2 > 0.0 {
            // the stability condition caps the threshold at T_2/λ_2
            let cap = self.series.get(2) / l2;
            if cap < 1.0 {
                if self.check_fixed(lambda, cap).convergent {
                    return cap;
                }
                hi = cap;
            }
        }
        let mut lo = 0.0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.run(lambda, mid, true).convergent {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// `Σ_{i≥j} c_i y^(i-1)` where `tail[k] = c_{j+k}`.
/// `(Σ c_i y^(i-j), Σ c_i y^(i-1))`. The first carries the sign even when
/// `y^(j-1)` underflows.
fn series_value(tail: &[f64], j: usize, y: f64) -> (f64, f64) {
    if tail.is_empty() {
        return (0.0, 0.0);
    }
    let poly = tail.iter().rev().fold(0.0, |acc, &v| acc * y + v);
    (poly, poly * y.powi(j as i32 - 1))
}

/// Largest `r ∈ (0, 1]` with `c_j > Σ_{i>j, c_i<0} |c_i| r^(i-j)`; on `(0, r)`
/// the margin is bounded below by a positive multiple of `y^(j-1)`.
fn certified_radius(tail: &[f64]) -> f64 {
    let lead = tail[0];
    let negative: Vec<(usize, f64)> = tail
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v < 0.0)
        .map(|(k, &v)| (k, -v))
        .collect();
    let slack = |r: f64| lead - negative.iter().map(|&(k, v)| v * r.powi(k as i32)).sum::<f64>();
    if slack(1.0) > 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slack(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if lo > 0.0 && hi / lo < 1.0 + 1e-6 {
            break;
        }
    }
    lo
}

/// Two-stage convergence test of `e` at channel parameter `eps`.
pub fn check_convergent(e: &Ensemble, eps: f64) -> ConvergenceVerdict {
    ConvergenceChecker::new(&e.rho, e.lambda.max_degree()).check(&e.lambda, eps)
}

/// Threshold of `e` by bisection, to within `tol`.
pub fn threshold(e: &Ensemble, tol: f64) -> f64 {
    ConvergenceChecker::new(&e.rho, e.lambda.max_degree()).threshold(&e.lambda, tol)
}

/// Largest admissible `λ_2` at `eps`: `T_2/ε = 1/(ε ρ'(1))`.
pub fn stability_bound(rho: &DegreeDistribution, eps: f64) -> f64 {
    1.0 / (rho.derivative_at_one() * eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(dc: u32) -> DegreeDistribution {
        DegreeDistribution::check_regular(dc).unwrap()
    }

    #[test]
    fn check_to_variable_matches_naive() {
        let rho = DegreeDistribution::check([(3, 0.4), (6, 0.6)]).unwrap();
        for x in [0.1, 0.3, 0.7, 1.0] {
            let naive = 1.0 - rho.evaluate(1.0 - x);
            assert!((check_to_variable(&rho, x) - naive).abs() < 1e-15);
        }
        // small x keeps relative accuracy: 1-(1-x)^5 ≈ 5x
        let y = check_to_variable(&regular(6), 1e-12);
        assert!((y / 5e-12 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn long_saturated_prefix_is_certified() {
        // λ matches the series up to degree 199; the margin near x = 1e-4 is below f64 range
        let rho = regular(4);
        let eps = 0.8735;
        let t = TaylorCoefficients::for_rho(&rho, 400).unwrap();
        let n = (3..=400).find(|&n| t.partial_sum(n) > eps).unwrap();
        assert!(n > 150);
        let mut coeffs: Vec<(u32, f64)> = (2..n).map(|i| (i as u32, t.get(i) / eps)).collect();
        coeffs.push((n as u32, 1.0 - t.partial_sum(n - 1) / eps));
        let lambda = DegreeDistribution::variable(coeffs).unwrap();
        let v = check_convergent(&Ensemble::new(lambda, rho), eps);
        assert!(v.convergent, "{v:?}");
    }

    #[test]
    fn grid_covers_interval() {
        let xs = grid(0.48);
        assert!((xs[0] - X_MIN).abs() < 1e-18);
        assert!((xs.last().unwrap() - 0.48).abs() < 1e-15);
        assert!(xs.len() >= GRID_POINTS);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn stability_bound_examples() {
        assert!((stability_bound(&regular(6), 0.48) - 0.2 / 0.48).abs() < 1e-15);
        assert!((stability_bound(&regular(5), 0.5) - 0.5).abs() < 1e-15);
        assert!((stability_bound(&regular(6), 0.2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_degree_two_threshold_is_t2() {
        let e = Ensemble::new(DegreeDistribution::variable([(2, 1.0)]).unwrap(), regular(6));
        assert!((threshold(&e, 1e-7) - 0.2).abs() < 1e-3);
    }

    #[test]
    fn vanishing_channel_is_convergent() {
        let e = Ensemble::new(
            DegreeDistribution::variable([(3, 1.0)]).unwrap(),
            regular(6),
        );
        assert!(check_convergent(&e, 1e-9).convergent);
    }

    #[test]
    fn stability_violation_fails_at_origin() {
        let e = Ensemble::new(DegreeDistribution::variable([(2, 1.0)]).unwrap(), regular(6));
        let v = check_convergent(&e, 0.25);
        assert!(!v.convergent);
        assert_eq!(v.witness_x, 0.0);
        assert!(v.margin < 0.0);
    }

    #[test]
    fn certified_radius_bounds() {
        assert_eq!(certified_radius(&[1.0, 0.5, 0.2]), 1.0);
        let r = certified_radius(&[1.0, -4.0]);
        assert!((r - 0.25).abs() < 1e-5);
    }
}
