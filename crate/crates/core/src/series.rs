//! Taylor coefficients `T_i` of `ρ⁻¹(1 - x)` around `x = 0`:
//!
//! ```text
//! ρ⁻¹(1 - x) = 1 - Σ_{i≥2} T_i x^(i-1),   T_i > 0,   Σ T_i = 1
//! ```
//!
//! Every deterministic construction in this crate is assembled from these
//! coefficients. Check-regular ρ has a closed form through a fractional
//! binomial; general ρ goes through order-by-order series reversion.

use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};

/// Truncated sequence `T_2, ..., T_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoefficients {
    /// `t[k]` holds `T_{k+2}`.
    t: Vec<f64>,
    /// Running sums, `partial[k] = T_2 + ... + T_{k+2}`.
    partial: Vec<f64>,
}

impl TaylorCoefficients {
    fn from_vec(t: Vec<f64>) -> Self {
        let partial = t
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Self { t, partial }
    }

    /// Largest stored index `M`.
    pub fn truncation(&self) -> usize {
        self.t.len() + 1
    }

    /// `T_i`; zero outside `2..=M`.
    pub fn get(&self, i: usize) -> f64 {
        if i < 2 {
            return 0.0;
        }
        self.t.get(i - 2).copied().unwrap_or(0.0)
    }

    /// `Σ_{i=2}^{n} T_i` for `n ≤ M`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        self.partial[(n - 2).min(self.partial.len() - 1)]
    }

    /// `1 - Σ_{i=2}^{M} T_i`.
    pub fn tail_mass(&self) -> f64 {
        1.0 - self.partial.last().copied().unwrap_or(0.0)
    }

    /// `(i, T_i)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.t.iter().enumerate().map(|(k, &v)| (k + 2, v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    /// Truncated approximation `1 - Σ_{i=2}^{M} T_i x^(i-1)` of `ρ⁻¹(1 - x)`.
    pub fn evaluate_truncated(&self, x: f64) -> f64 {
        // Horner over x·(T_2 + T_3 x + ...)
        let poly = self.t.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        1.0 - x * poly
    }

    /// Computes the coefficients for `rho`, preferring the closed form when ρ is check-regular.
    pub fn for_rho(rho: &DegreeDistribution, m: usize) -> Result<Self> {
        match rho.regular_degree() {
            Some(dc) => taylor_check_regular(dc, m),
            None => taylor_general(rho, m),
        }
    }
}

/// Closed form for `ρ(x) = x^(dc-1)`: `T_i = |binom(α, i-1)|` with `α = 1/(dc-1)`,
/// via the telescoping product `(α/k)(1-α)(1-α/2)...(1-α/(k-1))`.
pub fn taylor_check_regular(dc: u32, m: usize) -> Result<TaylorCoefficients> {
    if dc < 3 {
        return Err(Error::DegenerateCheckDistribution(format!(
            "check degree {dc}: rho^-1(1-x) = 1-x exactly, only T_2 = 1 exists"
        )));
    }
    if m < 2 {
        return Err(Error::param("M", format!("truncation must be at least 2, got {m}")));
    }
    let alpha = 1.0 / (dc - 1) as f64;
    let mut t = Vec::with_capacity(m - 1);
    let mut prod = 1.0;
    // T_{k+1} = (α/k) Π_{j<k} (1 - α/j)
    for k in 1..m {
        if k > 1 {
            prod *= 1.0 - alpha / (k - 1) as f64;
        }
        t.push(alpha / k as f64 * prod);
    }
    Ok(TaylorCoefficients::from_vec(t))
}

/// General ρ: reverts `y = 1 - ρ(1 - u) = Σ a_k u^k` into `u = Σ b_k y^k`, so `T_{k+1} = b_k`.
///
/// Coefficient `b_k` depends only on `b_1..b_{k-1}`; powers of the partial
/// inverse are kept up to the polynomial degree of the forward map.
pub fn taylor_general(rho: &DegreeDistribution, m: usize) -> Result<TaylorCoefficients> {
    if m < 2 {
        return Err(Error::param("M", format!("truncation must be at least 2, got {m}")));
    }
    let top = rho.max_degree() as usize;
    if top <= 2 {
        return Err(Error::DegenerateCheckDistribution(
            "rho is concentrated on degree 2".into(),
        ));
    }
    // forward coefficients a_1..a_D, D = top - 1
    let deg = top - 1;
    let mut a = vec![0.0; deg + 1];
    for (d, c) in rho.iter() {
        let n = d as usize - 1;
        let mut binom = 1.0;
        for k in 1..=n {
            binom *= (n - k + 1) as f64 / k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            a[k] += c * binom * sign;
        }
    }
    let a1 = a[1];
    if !(a1 > 0.0) {
        return Err(Error::DegenerateCheckDistribution(format!(
            "rho'(1) = {a1} is not positive"
        )));
    }

    let orders = m - 1; // b_1..b_{m-1}
    // pw[j][k] = [y^k] G(y)^j for j = 1..=deg, k = 0..=orders
    let jmax = deg.min(orders);
    let mut pw = vec![vec![0.0; orders + 1]; jmax + 1];
    let mut b = vec![0.0; orders + 1];
    b[1] = 1.0 / a1;
    pw[1][1] = b[1];
    for j in 2..=jmax {
        pw[j][j] = pw[j - 1][j - 1] * b[1];
    }
    for k in 2..=orders {
        let mut acc = 0.0;
        for j in 2..=jmax.min(k) {
            if j < k {
                let mut s = 0.0;
                for l in 1..=(k - j + 1) {
                    s += b[l] * pw[j - 1][k - l];
                }
                pw[j][k] = s;
            }
            acc += a[j] * pw[j][k];
        }
        b[k] = -acc / a1;
        pw[1][k] = b[k];
        // the diagonal entries pw[j][k] with j == k were seeded above; the j > k
        // entries are zero
    }

    let t: Vec<f64> = b[1..].to_vec();
    if let Some((k, &v)) = t.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::SeriesDegradation { index: k + 2, value: v });
    }
    Ok(TaylorCoefficients::from_vec(t))
}

/// The unique `u ∈ [0, 1]` with `ρ(u) = y`, by bracketed Newton iteration.
pub fn rho_inverse(rho: &DegreeDistribution, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    if let Some(dc) = rho.regular_degree() {
        return y.powf(1.0 / (dc - 1) as f64);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut u = 0.5_f64;
    for _ in 0..200 {
        let (f, df) = rho.iter().fold((-y, 0.0), |(f, df), (d, c)| {
            let e = d as i32 - 1;
            (f + c * u.powi(e), df + c * e as f64 * u.powi(e - 1))
        });
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        if hi - lo <= 1e-16 {
            break;
        }
        let mut next = if df > 0.0 { u - f / df } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() <= 1e-17 {
            u = next;
            break;
        }
        u = next;
    }
    u
}
