//! Fixed channel parameter, maximal rate.

use super::{saturated_lambda, series_until, Category, DesignKind, DesignResult};
use crate::convergence::ConvergenceChecker;
use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};
use crate::series::TaylorCoefficients;

fn validate_eps(rho: &DegreeDistribution, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let t2 = 1.0 / rho.derivative_at_one();
    if eps < t2 * (1.0 - 1e-12) {
        return Err(Error::InfeasibleChannel { eps, t2 });
    }
    Ok(())
}

fn n_from_series(t: &TaylorCoefficients, eps: f64) -> Option<usize> {
    // smallest N ≥ 3 with Σ_{2}^{N} T_i > ε; Σ_{2}^{N-1} T_i ≤ ε then holds
    (3..=t.truncation()).find(|&n| t.partial_sum(n) > eps)
}

pub(crate) fn setup(rho: &DegreeDistribution, eps: f64) -> Result<(usize, TaylorCoefficients)> {
    validate_eps(rho, eps)?;
    let t = series_until(rho, |t| n_from_series(t, eps).is_some())?;
    let n = n_from_series(&t, eps).expect("series_until guarantees a crossing");
    Ok((n, t))
}

/// The unique `N` with `Σ_{2}^{N} T_i > ε ≥ Σ_{2}^{N-1} T_i`.
pub fn find_n_eps(rho: &DegreeDistribution, eps: f64) -> Result<usize> {
    setup(rho, eps).map(|(n, _)| n)
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
        category: Category::Eps,
        n,
        dv,
        p,
        design_eps: eps,
        threshold_claimed: eps,
    }
}

/// `λ_i = T_i/ε` for `2 ≤ i < N`, residual on `N`.
pub fn type_a_eps(rho: &DegreeDistribution, eps: f64) -> Result<DesignResult> {
    let (n, t) = setup(rho, eps)?;
    let lambda = saturated_lambda(&t, eps, n - 1, n)?;
    Ok(result(rho, lambda, DesignKind::TypeA, n, n - 1, eps))
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

/// Degrees `2..=P` saturated, residual on `N`. `P = N - 1` is Type-A.
pub fn type_b_eps(rho: &DegreeDistribution, eps: f64, p: usize) -> Result<DesignResult> {
    let (n, t) = setup(rho, eps)?;
    check_p(p, n)?;
    let lambda = saturated_lambda(&t, eps, p, n)?;
    let kind = if p == n - 1 {
        DesignKind::TypeA
    } else {
        DesignKind::TypeB
    };
    Ok(result(rho, lambda, kind, n, p, eps))
}

fn bound_from(t: &TaylorCoefficients, n: usize, eps: f64, p: usize) -> f64 {
    let num: f64 = (p + 1..n).map(|i| (n - i) as f64 * t.get(i)).sum();
    n as f64 - num / (eps - t.partial_sum(p))
}

/// Sufficient lower bound on `D_v` for the degrees `2..=P` plus `D_v` to converge.
pub fn dv_lower_bound(rho: &DegreeDistribution, eps: f64, p: usize) -> Result<f64> {
    let (n, t) = setup(rho, eps)?;
    check_p(p, n)?;
    Ok(bound_from(&t, n, eps, p))
}

/// Type-B with the top degree lowered to the smallest convergent `D_v`.
///
/// The search starts from the ceiling of [`dv_lower_bound`]; since moving
/// edge mass to a higher degree preserves convergence, the convergent
/// candidates form an upper set and walking down until the first failure
/// certifies minimality.
pub fn type_mb_eps(rho: &DegreeDistribution, eps: f64, p: usize) -> Result<DesignResult> {
    let (n, t) = setup(rho, eps)?;
    check_p(p, n)?;
    let mut checker = ConvergenceChecker::new(rho, (p + 1) as u32);
    let mut converges = |dv: usize| -> Result<bool> {
        let lambda = saturated_lambda(&t, eps, p, dv)?;
        Ok(checker.is_convergent(&lambda, eps))
    };

    let bound = bound_from(&t, n, eps, p);
    let mut dv = (bound.ceil().max(0.0) as usize).clamp(p + 1, n);
    while dv < n && !converges(dv)? {
        dv += 1;
    }
    while dv > p + 1 && converges(dv - 1)? {
        dv -= 1;
    }
    let lambda = saturated_lambda(&t, eps, p, dv)?;
    Ok(result(rho, lambda, DesignKind::TypeMB, n, p, eps))
}

/// The fixed-degree candidate `2..=P` plus `dv` at `ε`, without a convergence check.
pub fn mb_eps_candidate(
    rho: &DegreeDistribution,
    eps: f64,
    p: usize,
    dv: usize,
) -> Result<Ensemble> {
    let (n, t) = setup(rho, eps)?;
    check_p(p, n)?;
    if dv <= p {
        return Err(Error::param("D_v", format!("must exceed P = {p}, got {dv}")));
    }
    Ok(Ensemble::new(saturated_lambda(&t, eps, p, dv)?, rho.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::check_convergent;

    fn regular(dc: u32) -> DegreeDistribution {
        DegreeDistribution::check_regular(dc).unwrap()
    }

    #[test]
    fn n_examples() {
        assert_eq!(find_n_eps(&regular(6), 0.48).unwrap(), 13);
        assert_eq!(find_n_eps(&regular(5), 0.48).unwrap(), 7);
        assert_eq!(find_n_eps(&regular(6), 0.2).unwrap(), 3);
    }

    #[test]
    fn below_t2_is_infeasible() {
        match find_n_eps(&regular(6), 0.1) {
            Err(Error::InfeasibleChannel { t2, .. }) => assert!((t2 - 0.2).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(find_n_eps(&regular(6), 1.0).is_err());
    }

    #[test]
    fn type_a_at_t2_is_all_degree_two() {
        let d = type_a_eps(&regular(6), 0.2).unwrap();
        assert_eq!(d.lambda().degrees(), vec![2]);
        assert!((d.lambda().coefficient(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn type_a_dc5() {
        let d = type_a_eps(&regular(5), 0.48).unwrap();
        assert_eq!(d.n, 7);
        assert!((d.lambda().coefficient(2) - 0.25 / 0.48).abs() < 1e-12);
    }

    #[test]
    fn type_b_p2_residual() {
        let d = type_b_eps(&regular(6), 0.48, 2).unwrap();
        assert_eq!(d.lambda().degrees(), vec![2, 13]);
        assert!((d.lambda().coefficient(2) - 0.2 / 0.48).abs() < 1e-12);
        assert!((d.lambda().coefficient(13) - 0.28 / 0.48).abs() < 1e-12);
        assert!(check_convergent(&d.ensemble, 0.48).convergent);
    }

    #[test]
    fn type_b_at_top_p_is_type_a() {
        let a = type_a_eps(&regular(6), 0.48).unwrap();
        let b = type_b_eps(&regular(6), 0.48, 12).unwrap();
        assert_eq!(a.ensemble, b.ensemble);
        assert_eq!(b.kind, DesignKind::TypeA);
        assert!(type_b_eps(&regular(6), 0.48, 13).is_err());
        assert!(type_b_eps(&regular(6), 0.48, 1).is_err());
    }

    #[test]
    fn bound_degenerates_to_n() {
        let b = dv_lower_bound(&regular(6), 0.48, 12).unwrap();
        assert!((b - 13.0).abs() < 1e-12);
    }

    #[test]
    fn bound_dc5_is_sufficient() {
        let rho = regular(5);
        let b = dv_lower_bound(&rho, 0.48, 4).unwrap();
        assert!(b > 4.0 && b <= 7.0, "{b}");
        let e = mb_eps_candidate(&rho, 0.48, 4, b.ceil() as usize).unwrap();
        assert!(check_convergent(&e, 0.48).convergent);
    }
}
