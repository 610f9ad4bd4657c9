//! Fixed rate, maximal threshold.

use super::{saturated_lambda, series_until, Category, DesignKind, DesignResult, RESIDUAL_CLAMP};
use crate::convergence::ConvergenceChecker;
use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};
use crate::series::TaylorCoefficients;

/// `Σ λ_i/i` required for rate `r`.
fn dv_inverse(rho: &DegreeDistribution, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("R", format!("must lie in (0, 1), got {r}")));
    }
    let dc_inv = rho.avg_inverse_degree();
    let limit = 1.0 - 2.0 * dc_inv;
    if r >= limit {
        return Err(Error::InfeasibleRate { rate: r, limit });
    }
    Ok(dc_inv / (1.0 - r))
}

fn n_from_series(t: &TaylorCoefficients, dv_inv: f64) -> Option<usize> {
    let mut weighted = 0.0;
    for (i, ti) in t.iter() {
        weighted += ti / i as f64;
        if i >= 3 && dv_inv * t.partial_sum(i) > weighted {
            return Some(i);
        }
    }
    None
}

fn setup(rho: &DegreeDistribution, r: f64) -> Result<(usize, f64, TaylorCoefficients)> {
    let dv_inv = dv_inverse(rho, r)?;
    let t = series_until(rho, |t| n_from_series(t, dv_inv).is_some())?;
    let n = n_from_series(&t, dv_inv).expect("series_until guarantees a crossing");
    Ok((n, dv_inv, t))
}

/// Smallest `N` with `(Σ λ_i/i) · Σ_{2}^{N} T_i > Σ_{2}^{N} T_i/i` at rate `r`.
pub fn find_n_rate(rho: &DegreeDistribution, r: f64) -> Result<usize> {
    setup(rho, r).map(|(n, _, _)| n)
}

/// Channel parameter making the degrees `2..=p` plus `dv` hit the rate exactly.
fn eps_for(t: &TaylorCoefficients, dv_inv: f64, p: usize, dv: usize) -> Option<f64> {
    let inv = 1.0 / dv as f64;
    let denom = dv_inv - inv;
    if !(denom > 0.0) {
        return None;
    }
    let num: f64 = (2..=p).map(|i| t.get(i) * (1.0 / i as f64 - inv)).sum();
    let eps = num / denom;
    // a negative top coefficient means ε < Σ_{2}^{P} T_i
    if !(eps < 1.0) || eps < t.partial_sum(p) * (1.0 - RESIDUAL_CLAMP) {
        return None;
    }
    Some(eps)
}

fn build(
    rho: &DegreeDistribution,
    t: &TaylorCoefficients,
    dv_inv: f64,
    p: usize,
    dv: usize,
) -> Result<(f64, DegreeDistribution)> {
    let eps = eps_for(t, dv_inv, p, dv).ok_or_else(|| {
        Error::Infeasible(format!(
            "no valid channel parameter for degrees 2..={p} plus {dv} under {rho}"
        ))
    })?;
    Ok((eps, saturated_lambda(t, eps, p, dv)?))
}

fn result(
    rho: &DegreeDistribution,
    lambda: DegreeDistribution,
    kind: DesignKind,
    n: usize,
    p: usize,
    eps: f64,
) -> DesignResult {
    let dv = lambda.max_degree() as usize;
    let ensemble = Ensemble::new(lambda, rho.clone());
    DesignResult {
        design_rate: ensemble.design_rate(),
        ensemble,
        kind,
        category: Category::Rate,
        n,
        dv,
        p,
        design_eps: eps,
        threshold_claimed: eps,
    }
}

fn check_p(p: usize, n: usize) -> Result<()> {
    if p < 2 || p > n - 1 {
        return Err(Error::param(
            "P",
            format!("must satisfy 2 <= P <= N - 1 = {}, got {p}", n - 1),
        ));
    }
    Ok(())
}

/// Degrees `2..=N` at rate `r`.
pub fn type_a_rate(rho: &DegreeDistribution, r: f64) -> Result<DesignResult> {
    let (n, dv_inv, t) = setup(rho, r)?;
    let (eps, lambda) = build(rho, &t, dv_inv, n - 1, n)?;
    Ok(result(rho, lambda, DesignKind::TypeA, n, n - 1, eps))
}

/// Degrees `2..=P` plus `N` at rate `r`. `P = N - 1` is Type-A.
pub fn type_b_rate(rho: &DegreeDistribution, r: f64, p: usize) -> Result<DesignResult> {
    let (n, dv_inv, t) = setup(rho, r)?;
    check_p(p, n)?;
    let (eps, lambda) = build(rho, &t, dv_inv, p, n)?;
    let kind = if p == n - 1 {
        DesignKind::TypeA
    } else {
        DesignKind::TypeB
    };
    Ok(result(rho, lambda, kind, n, p, eps))
}

/// Degrees `2..=P` plus the smallest `D_v` whose rate-matched candidate converges.
///
/// Each candidate has its own channel parameter, so unlike the fixed-ε case
/// every `D_v` from `P + 1` upward is tested in turn.
pub fn type_mb_rate(rho: &DegreeDistribution, r: f64, p: usize) -> Result<DesignResult> {
    let (n, dv_inv, t) = setup(rho, r)?;
    check_p(p, n)?;
    let mut checker = ConvergenceChecker::new(rho, (p + 1) as u32);
    for dv in p + 1..=n {
        let Some(eps) = eps_for(&t, dv_inv, p, dv) else {
            continue;
        };
        let lambda = saturated_lambda(&t, eps, p, dv)?;
        if checker.is_convergent(&lambda, eps) {
            return Ok(result(rho, lambda, DesignKind::TypeMB, n, p, eps));
        }
    }
    Err(Error::Infeasible(format!(
        "no convergent top degree in {}..={n} for P = {p}",
        p + 1
    )))
}

/// The rate-matched candidate `2..=P` plus `dv` and its channel parameter, unchecked.
pub fn mb_rate_candidate(
    rho: &DegreeDistribution,
    r: f64,
    p: usize,
    dv: usize,
) -> Result<(Ensemble, f64)> {
    let dv_inv = dv_inverse(rho, r)?;
    if p < 2 || dv <= p {
        return Err(Error::param(
            "D_v",
            format!("need 2 <= P < D_v, got P = {p}, D_v = {dv}"),
        ));
    }
    let t = series_until(rho, |t| t.truncation() >= dv)?;
    let (eps, lambda) = build(rho, &t, dv_inv, p, dv)?;
    Ok((Ensemble::new(lambda, rho.clone()), eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::check_convergent;

    fn regular(dc: u32) -> DegreeDistribution {
        DegreeDistribution::check_regular(dc).unwrap()
    }

    #[test]
    fn infeasible_rate_names_limit() {
        match find_n_rate(&regular(4), 0.5) {
            Err(Error::InfeasibleRate { limit, .. }) => assert!((limit - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(find_n_rate(&regular(6), 0.0).is_err());
    }

    #[test]
    fn n_dc7_half_rate() {
        assert_eq!(find_n_rate(&regular(7), 0.5).unwrap(), 29);
    }

    #[test]
    fn type_a_hits_rate() {
        for dc in 5..=9 {
            let d = type_a_rate(&regular(dc), 0.5).unwrap();
            assert!((d.design_rate - 0.5).abs() < 1e-10, "dc {dc}");
            assert!(d.design_eps < 0.5);
        }
    }

    #[test]
    fn type_b_hits_rate_and_converges() {
        let d = type_b_rate(&regular(6), 0.5, 4).unwrap();
        assert!((d.design_rate - 0.5).abs() < 1e-10);
        assert!(check_convergent(&d.ensemble, d.design_eps).convergent);
    }

    #[test]
    fn type_mb_dc6_p4() {
        let d = type_mb_rate(&regular(6), 0.5, 4).unwrap();
        assert_eq!(d.dv, 8);
        assert!((d.design_eps - 0.4688).abs() < 5e-5);
        assert!((d.design_rate - 0.5).abs() < 1e-10);
    }

    #[test]
    fn candidate_below_minimum_fails() {
        let rho = regular(6);
        let (e, eps) = mb_rate_candidate(&rho, 0.5, 4, 7).unwrap();
        assert!(!check_convergent(&e, eps).convergent);
    }
}
