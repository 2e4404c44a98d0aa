//! Gamma function values used by the closed forms and kernel normalisations.
//!
//! Backed by `statrs` (Lanczos approximation). Ratios go through log-Gamma
//! differences so large arguments do not overflow.

use statrs::function::gamma as sg;

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

/// `Γ(num) / Γ(den)` for positive arguments.
pub fn gamma_ratio(num: f64, den: f64) -> f64 {
    (ln_gamma(num) - ln_gamma(den)).exp()
}
