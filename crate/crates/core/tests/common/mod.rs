#![allow(dead_code)]

use bec_design::convergence::{check_convergent, threshold, ConvergenceChecker};
use bec_design::design::{self, eps::mb_eps_candidate};
use bec_design::{DegreeDistribution, Ensemble, TaylorCoefficients};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn regular(dc: u32) -> DegreeDistribution {
    DegreeDistribution::check_regular(dc).unwrap()
}

/// Check side: mostly regular, sometimes a two-degree mixture.
pub fn rho_strategy() -> impl Strategy<Value = DegreeDistribution> {
    prop_oneof![
        3 => (3u32..=12).prop_map(regular),
        1 => (3u32..=8, 1u32..=4, 0.05f64..0.95).prop_map(|(d, gap, w)| {
            DegreeDistribution::check([(d, w), (d + gap, 1.0 - w)]).unwrap()
        }),
    ]
}

/// `(ρ, ε)` with `T_2 ≤ ε < Σ_{2}^{499} T_i`, so that `N ≤ 500`.
pub fn rho_eps() -> impl Strategy<Value = (DegreeDistribution, f64)> {
    (rho_strategy(), 0.0f64..1.0).prop_map(|(rho, u)| {
        let t = TaylorCoefficients::for_rho(&rho, 499).unwrap();
        let (lo, hi) = (t.get(2), t.partial_sum(499));
        let eps = lo + u * (hi - lo) * 0.999;
        (rho, eps)
    })
}

/// `(ρ, R)` with `R` high enough that `N ≤ 500` and below `1 - 2/d̄_c`.
pub fn rho_rate() -> impl Strategy<Value = (DegreeDistribution, f64)> {
    (3u32..=10)
        .prop_filter("room for a rate", |&dc| 1.0 - 2.0 / dc as f64 > 0.1)
        .prop_map(regular)
        .prop_flat_map(|rho| {
            let t = TaylorCoefficients::for_rho(&rho, 499).unwrap();
            let weighted: f64 = t.iter().take_while(|&(i, _)| i <= 499).map(|(i, ti)| ti / i as f64).sum();
            let dc_inv = rho.avg_inverse_degree();
            let lo = (1.0 - dc_inv * t.partial_sum(499) / weighted).max(0.0);
            let hi = 1.0 - 2.0 * dc_inv;
            (Just(rho), (lo + 1e-3 * (hi - lo))..(hi - 1e-3 * (hi - lo)))
        })
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

pub fn prop_unique_n_eps(rho: &DegreeDistribution, eps: f64) -> Result<(), TestCaseError> {
    let n = design::find_n_eps(rho, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let t = TaylorCoefficients::for_rho(rho, n + 40).unwrap();
    ensure(t.partial_sum(n) > eps && t.partial_sum(n - 1) <= eps, format!("N = {n} brackets"))?;
    let count = (3..=n + 40)
        .filter(|&k| t.partial_sum(k) > eps && t.partial_sum(k - 1) <= eps)
        .count();
    ensure(count == 1, format!("{count} values of N satisfy both conditions"))
}

pub fn prop_unique_n_rate(rho: &DegreeDistribution, r: f64) -> Result<(), TestCaseError> {
    let n = design::find_n_rate(rho, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let t = TaylorCoefficients::for_rho(rho, n + 40).unwrap();
    let dv_inv = rho.avg_inverse_degree() / (1.0 - r);
    let f = |k: usize| dv_inv * t.partial_sum(k) - (2..=k).map(|i| t.get(i) / i as f64).sum::<f64>();
    ensure(f(n) > 0.0 && f(n - 1) <= 0.0, format!("N = {n} brackets"))?;
    let count = (3..=n + 40).filter(|&k| f(k) > 0.0 && f(k - 1) <= 0.0).count();
    ensure(count == 1, format!("{count} crossings"))
}

fn in_unit(e: &Ensemble) -> Result<(), TestCaseError> {
    ensure(
        e.lambda.iter().all(|(_, c)| (0.0..=1.0).contains(&c)),
        format!("coefficient outside [0, 1]: {}", e.lambda),
    )
}

pub fn prop_top_nonnegative_eps(rho: &DegreeDistribution, eps: f64, p_frac: f64) -> Result<(), TestCaseError> {
    let a = design::type_a_eps(rho, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
    in_unit(&a.ensemble)?;
    if a.n >= 3 {
        let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
        let b = design::type_b_eps(rho, eps, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        in_unit(&b.ensemble)?;
    }
    Ok(())
}

pub fn prop_top_nonnegative_rate(rho: &DegreeDistribution, r: f64, p_frac: f64) -> Result<(), TestCaseError> {
    let a = design::type_a_rate(rho, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    in_unit(&a.ensemble)?;
    let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
    let b = design::type_b_rate(rho, r, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    in_unit(&b.ensemble)?;
    ensure((b.design_rate - r).abs() < 1e-9, "Type-B misses the rate")
}

pub fn prop_threshold_is_design_eps(rho: &DegreeDistribution, eps: f64, p_frac: f64) -> Result<(), TestCaseError> {
    let a = design::type_a_eps(rho, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
    let b = design::type_b_eps(rho, eps, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for d in [&a, &b] {
        let th = threshold(&d.ensemble, 1e-5);
        ensure(
            (th - d.design_eps).abs() <= 1e-3,
            format!("{}: threshold {th} vs design {}", d.kind, d.design_eps),
        )?;
    }
    Ok(())
}

pub fn prop_threshold_is_design_eps_rate(rho: &DegreeDistribution, r: f64, p_frac: f64) -> Result<(), TestCaseError> {
    let a = design::type_a_rate(rho, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
    let b = design::type_b_rate(rho, r, p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for d in [&a, &b] {
        let th = threshold(&d.ensemble, 1e-5);
        ensure(
            (th - d.design_eps).abs() <= 1e-3,
            format!("{}: threshold {th} vs design {}", d.kind, d.design_eps),
        )?;
    }
    Ok(())
}

pub fn prop_bound_sufficient(rho: &DegreeDistribution, eps: f64, p_frac: f64) -> Result<(), TestCaseError> {
    let n = design::find_n_eps(rho, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
    if n < 4 {
        return Ok(());
    }
    let p = 2 + ((n - 3) as f64 * p_frac) as usize;
    let bound = design::dv_lower_bound(rho, eps, p).unwrap();
    let dv = (bound.ceil().max((p + 1) as f64) as usize).min(n);
    let e = mb_eps_candidate(rho, eps, p, dv).unwrap();
    ensure(
        check_convergent(&e, eps).convergent,
        format!("D_v = {dv} from bound {bound} not convergent (P = {p}, N = {n})"),
    )?;
    let mb = design::type_mb_eps(rho, eps, p).unwrap();
    ensure(mb.dv <= dv, format!("Type-MB D_v {} above bound {dv}", mb.dv))
}

/// `λ` on degrees `degs` with positive weights.
pub fn lambda_strategy() -> impl Strategy<Value = DegreeDistribution> {
    proptest::collection::btree_map(2u32..=20, 0.05f64..1.0, 2..6).prop_map(|m| {
        let total: f64 = m.values().sum();
        DegreeDistribution::variable(m.into_iter().map(|(d, w)| (d, w / total))).unwrap()
    })
}

pub fn prop_mass_down_raises_rate(lambda: &DegreeDistribution, rho: &DegreeDistribution, frac: f64) -> Result<(), TestCaseError> {
    let degs = lambda.degrees();
    let (lo, hi) = (degs[0], *degs.last().unwrap());
    let k = lambda.coefficient(hi) * frac;
    let moved = lambda.perturb_edge_mass(hi, lo, k).unwrap();
    let before = Ensemble::new(lambda.clone(), rho.clone()).design_rate();
    let after = Ensemble::new(moved, rho.clone()).design_rate();
    ensure(after > before, format!("rate {before} -> {after}"))
}

pub fn prop_mass_up_dominates(
    lambda: &DegreeDistribution,
    rho: &DegreeDistribution,
    frac: f64,
) -> Result<(), TestCaseError> {
    let degs = lambda.degrees();
    let (lo, hi) = (degs[0], *degs.last().unwrap());
    let k = lambda.coefficient(lo) * frac;
    let moved = lambda.perturb_edge_mass(lo, hi + 1, k).unwrap();
    for i in 0..=200 {
        let x = i as f64 / 200.0;
        ensure(
            moved.evaluate(x) <= lambda.evaluate(x) + 1e-15,
            format!("not dominated at x = {x}"),
        )?;
    }
    let original = Ensemble::new(lambda.clone(), rho.clone());
    let th = threshold(&original, 1e-4);
    if th > 1e-3 {
        let eps = th * 0.98;
        let mut checker = ConvergenceChecker::new(rho, hi + 1);
        ensure(checker.check(lambda, eps).convergent, "original not convergent below threshold")?;
        ensure(checker.check(&moved, eps).convergent, "domination lost convergence")?;
    }
    Ok(())
}

/// `B ≤ MB`, and `MB ≤ A` too when `with_a`.
pub fn prop_ordering_eps(rho: &DegreeDistribution, eps: f64, p_frac: f64, with_a: bool) -> Result<(), TestCaseError> {
    let a = design::type_a_eps(rho, eps).map_err(|e| TestCaseError::fail(e.to_string()))?;
    if a.n < 4 {
        return Ok(());
    }
    let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
    let b = design::type_b_eps(rho, eps, p).unwrap();
    let mb = design::type_mb_eps(rho, eps, p).unwrap();
    let tol = 1e-12;
    ensure(
        b.design_rate <= mb.design_rate + tol && (!with_a || mb.design_rate <= a.design_rate + tol),
        format!("rates B {} MB {} A {}", b.design_rate, mb.design_rate, a.design_rate),
    )
}

pub fn prop_ordering_rate(rho: &DegreeDistribution, r: f64, p_frac: f64, with_a: bool) -> Result<(), TestCaseError> {
    let a = design::type_a_rate(rho, r).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let p = 2 + ((a.n - 3) as f64 * p_frac) as usize;
    let b = design::type_b_rate(rho, r, p).unwrap();
    let mb = design::type_mb_rate(rho, r, p).unwrap();
    let tol = 1e-12;
    ensure(
        b.design_eps <= mb.design_eps + tol && (!with_a || mb.design_eps <= a.design_eps + tol),
        format!("eps B {} MB {} A {}", b.design_eps, mb.design_eps, a.design_eps),
    )
}
