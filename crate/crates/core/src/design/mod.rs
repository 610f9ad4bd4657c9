//! Deterministic variable-side constructions for a fixed check side.
//!
//! Two categories: fix the channel parameter and maximise the rate
//! ([`eps`]), or fix the rate and maximise the threshold ([`rate`]). Each has
//! three shapes:
//!
//! * Type-A: every degree `2..=N`;
//! * Type-B: degrees `2..=P` plus `N`;
//! * Type-MB: degrees `2..=P` plus the smallest convergent `D_v ≤ N`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::error::{Error, Result};
use crate::series::TaylorCoefficients;

pub mod eps;
pub mod rate;

pub use eps::{dv_lower_bound, find_n_eps, type_a_eps, type_b_eps, type_mb_eps};
pub use rate::{find_n_rate, mb_rate_candidate, type_a_rate, type_b_rate, type_mb_rate};

/// Largest variable degree any construction will consider.
pub const MAX_DEGREE: usize = 1 << 16;

/// Residuals in `[-RESIDUAL_CLAMP, 0)` are rounded up to zero.
pub const RESIDUAL_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DesignKind {
    #[serde(rename = "type-a")]
    TypeA,
    #[serde(rename = "type-b")]
    TypeB,
    #[serde(rename = "type-mb")]
    TypeMB,
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignKind::TypeA => "Type-A",
            DesignKind::TypeB => "Type-B",
            DesignKind::TypeMB => "Type-MB",
        })
    }
}

impl FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "type-a" => Ok(DesignKind::TypeA),
            "b" | "type-b" => Ok(DesignKind::TypeB),
            "mb" | "type-mb" => Ok(DesignKind::TypeMB),
            other => Err(Error::Parse(format!("unknown design type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Fixed channel parameter, maximal rate.
    Eps,
    /// Fixed rate, maximal threshold.
    Rate,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Eps => "eps",
            Category::Rate => "rate",
        })
    }
}

/// A designed ensemble and the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub ensemble: Ensemble,
    pub kind: DesignKind,
    pub category: Category,
    /// The unique maximum degree `N` for the category.
    pub n: usize,
    /// Actual maximum variable degree.
    pub dv: usize,
    /// Number of consecutive low degrees `2..=P`.
    pub p: usize,
    pub design_eps: f64,
    pub design_rate: f64,
    pub threshold_claimed: f64,
}

impl DesignResult {
    pub fn lambda(&self) -> &DegreeDistribution {
        &self.ensemble.lambda
    }

    /// One-line summary with four decimals.
    pub fn summary(&self) -> String {
        format!(
            "{} ({} design): N {}, D_v {}, P {}, rate {:.4}, threshold {:.4}",
            self.kind,
            self.category,
            self.n,
            self.dv,
            self.p,
            self.design_rate,
            self.threshold_claimed
        )
    }
}

/// Series long enough that `done(series)` holds, doubling the truncation.
pub(crate) fn series_until(
    rho: &DegreeDistribution,
    mut done: impl FnMut(&TaylorCoefficients) -> bool,
) -> Result<TaylorCoefficients> {
    let cap = if rho.regular_degree().is_some() {
        MAX_DEGREE
    } else {
        1 << 13
    };
    let mut m = 256;
    loop {
        let t = TaylorCoefficients::for_rho(rho, m)?;
        if done(&t) {
            return Ok(t);
        }
        if m >= cap {
            return Err(Error::DegreeLimit { limit: cap });
        }
        m = (2 * m).min(cap);
    }
}

/// `λ_i = T_i/ε` for `2 ≤ i ≤ p`, residual `(ε - Σ T_i)/ε` on `top`.
pub(crate) fn saturated_lambda(
    t: &TaylorCoefficients,
    eps: f64,
    p: usize,
    top: usize,
) -> Result<DegreeDistribution> {
    let mut coeffs: Vec<(u32, f64)> = (2..=p).map(|i| (i as u32, t.get(i) / eps)).collect();
    let mut residual = (eps - t.partial_sum(p)) / eps;
    if residual < 0.0 {
        if residual >= -RESIDUAL_CLAMP {
            residual = 0.0;
        } else {
            return Err(Error::CoefficientRange {
                degree: top as u32,
                value: residual,
            });
        }
    }
    coeffs.push((top as u32, residual));
    DegreeDistribution::variable(coeffs)
}
