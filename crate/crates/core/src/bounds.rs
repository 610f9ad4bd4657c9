//! Upper bounds used as yardsticks for designed ensembles.
//!
//! `dc_bar` is the average check node degree `1/Σ ρ_i/i`.

use crate::ensemble::DegreeDistribution;

/// Best achievable threshold at rate `r`: `(1 - r)(1 - r^dc_bar)`.
pub fn threshold_upper_bound(r: f64, dc_bar: f64) -> f64 {
    (1.0 - r) * (1.0 - r.powf(dc_bar))
}

/// Best achievable rate at channel parameter `eps`: `1 - ε/(1 - (1 - ε)^dc_bar)`.
pub fn rate_upper_bound(eps: f64, dc_bar: f64) -> f64 {
    1.0 - eps / (1.0 - (1.0 - eps).powf(dc_bar))
}

/// [`threshold_upper_bound`] with `dc_bar` taken from `rho`.
pub fn threshold_bound_for(r: f64, rho: &DegreeDistribution) -> f64 {
    threshold_upper_bound(r, rho.average_degree())
}

/// [`rate_upper_bound`] with `dc_bar` taken from `rho`.
pub fn rate_bound_for(eps: f64, rho: &DegreeDistribution) -> f64 {
    rate_upper_bound(eps, rho.average_degree())
}
