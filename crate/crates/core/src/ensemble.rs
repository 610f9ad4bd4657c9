//! Edge-perspective degree distributions and the ensemble algebra built on them.
//!
//! A distribution stores, for each degree `i`, the fraction of edges attached to
//! nodes of degree `i`; as a polynomial it reads `Σ c_i x^(i-1)`. Storage is
//! sparse because designed variable sides routinely skip degrees
//! (for example `{2, 3, 4, 13}`).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ c_i = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Variable,
    Check,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Variable => f.write_str("variable"),
            Side::Check => f.write_str("check"),
        }
    }
}

/// Edge-perspective degree distribution (λ or ρ).
///
/// Immutable once constructed; every instance satisfies nonnegative
/// coefficients, unit sum within [`SUM_TOLERANCE`], and minimum degree 2.
/// Zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    side: Side,
    coeffs: BTreeMap<u32, f64>,
}

impl DegreeDistribution {
    pub fn new(side: Side, coeffs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (degree, c) in coeffs {
            if !c.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "coefficient of degree {degree} is not finite"
                )));
            }
            if c < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "coefficient of degree {degree} is negative ({c})"
                )));
            }
            if degree < 2 {
                return Err(Error::InvalidDistribution(format!(
                    "degree {degree} on the {side} side; minimum degree is 2"
                )));
            }
            if map.insert(degree, c).is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "degree {degree} listed twice"
                )));
            }
        }
        map.retain(|_, c| *c > 0.0);
        if map.is_empty() {
            return Err(Error::InvalidDistribution("no positive coefficients".into()));
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "coefficients sum to {sum:.15}, expected 1"
            )));
        }
        if let Some((&degree, &c)) = map.iter().find(|(_, &c)| c > 1.0 + SUM_TOLERANCE) {
            return Err(Error::InvalidDistribution(format!(
                "coefficient of degree {degree} exceeds 1 ({c})"
            )));
        }
        Ok(Self { side, coeffs: map })
    }

    pub fn variable(coeffs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        Self::new(Side::Variable, coeffs)
    }

    pub fn check(coeffs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        Self::new(Side::Check, coeffs)
    }

    /// ρ(x) = x^(dc-1).
    pub fn check_regular(dc: u32) -> Result<Self> {
        Self::check([(dc, 1.0)])
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    pub fn coefficient(&self, degree: u32) -> f64 {
        self.coeffs.get(&degree).copied().unwrap_or(0.0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.coeffs.keys().copied().collect()
    }

    pub fn max_degree(&self) -> u32 {
        *self.coeffs.keys().next_back().expect("nonempty by construction")
    }

    pub fn min_degree(&self) -> u32 {
        *self.coeffs.keys().next().expect("nonempty by construction")
    }

    /// Single-degree distribution, i.e. a regular side.
    pub fn regular_degree(&self) -> Option<u32> {
        (self.coeffs.len() == 1).then(|| self.min_degree())
    }

    /// `Σ c_i x^(i-1)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&d, &c)| c * x.powi(d as i32 - 1))
            .sum()
    }

    /// `Σ c_i / i`, equal to `∫₀¹ dist(x) dx` and to the inverse average node degree.
    pub fn avg_inverse_degree(&self) -> f64 {
        self.coeffs.iter().map(|(&d, &c)| c / d as f64).sum()
    }

    pub fn average_degree(&self) -> f64 {
        1.0 / self.avg_inverse_degree()
    }

    /// Derivative at one, `Σ c_i (i-1)`.
    pub fn derivative_at_one(&self) -> f64 {
        self.coeffs.iter().map(|(&d, &c)| c * (d - 1) as f64).sum()
    }

    /// Moves edge mass `k` from degree `a` to degree `b`.
    ///
    /// With `a > b` the inverse average degree (and hence the rate) strictly
    /// increases; with `a < b` the new polynomial is pointwise no larger on
    /// `(0, 1]`, so any convergence certificate for the original carries over.
    pub fn perturb_edge_mass(&self, a: u32, b: u32, k: f64) -> Result<Self> {
        if a == b {
            return Err(Error::param("b", "source and target degree must differ"));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::param("k", format!("must be a finite value >= 0, got {k}")));
        }
        for degree in [a, b] {
            if degree < 2 {
                return Err(Error::InvalidDistribution(format!(
                    "degree {degree} is below the minimum degree 2"
                )));
            }
        }
        let mut coeffs = self.coeffs.clone();
        let new_a = self.coefficient(a) - k;
        let new_b = self.coefficient(b) + k;
        if new_a < 0.0 {
            return Err(Error::CoefficientRange {
                degree: a,
                value: new_a,
            });
        }
        if new_b > 1.0 {
            return Err(Error::CoefficientRange {
                degree: b,
                value: new_b,
            });
        }
        coeffs.insert(a, new_a);
        coeffs.insert(b, new_b);
        coeffs.retain(|_, c| *c > 0.0);
        Ok(Self {
            side: self.side,
            coeffs,
        })
    }

    /// Same coefficients, relabelled to another side.
    pub(crate) fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }
}

impl fmt::Display for DegreeDistribution {
    /// Polynomial form with four decimals, e.g. `0.4167x + 0.1667x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.iter() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match d - 1 {
                1 => write!(f, "{c:.4}x")?,
                e => write!(f, "{c:.4}x^{e}")?,
            }
        }
        Ok(())
    }
}

/// A (λ, ρ) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub lambda: DegreeDistribution,
    pub rho: DegreeDistribution,
}

impl Ensemble {
    pub fn new(lambda: DegreeDistribution, rho: DegreeDistribution) -> Self {
        Self {
            lambda: lambda.with_side(Side::Variable),
            rho: rho.with_side(Side::Check),
        }
    }

    /// Design rate `1 - d̄_v/d̄_c`, i.e. the rate under a full-rank parity-check matrix.
    pub fn design_rate(&self) -> f64 {
        design_rate_of(self)
    }
}

pub fn design_rate_of(e: &Ensemble) -> f64 {
    1.0 - e.rho.avg_inverse_degree() / e.lambda.avg_inverse_degree()
}
