use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::InferenceError;

const BISECTION_TOL: f64 = 1e-8;

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    standard_normal().inverse_cdf(p)
}

/// Critical value `C >= 0` solving
/// `Phi(C + delta / sigma_max) - Phi(-C) = 1 - alpha`.
///
/// `delta` is the estimated width `U - L` of the selected bounds and
/// `sigma_max` the larger of their standard errors. The left side is strictly
/// increasing in `C`, so the root is found by bisection on
/// `[0, z_{1-alpha/2} + 2]` to an absolute tolerance of `1e-8`. For crossed
/// estimates (`delta < 0`) the root can sit above that bracket, which is then
/// doubled until it contains the root. If the left side already reaches
/// `1 - alpha` at `C = 0` (only possible for `alpha > 1/2`) the result is 0.
pub fn solve_c(delta: f64, sigma_max: f64, alpha: f64) -> Result<f64, InferenceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InferenceError::InvalidAlpha(alpha));
    }
    if !(sigma_max > 0.0 && sigma_max.is_finite()) {
        return Err(InferenceError::InvalidSigma(sigma_max));
    }
    if !delta.is_finite() {
        return Err(InferenceError::NonFiniteDelta(delta));
    }
    let shift = delta / sigma_max;
    let excess = |c: f64| normal_cdf(c + shift) - normal_cdf(-c) - (1.0 - alpha);

    let mut lo = 0.0;
    if excess(lo) >= 0.0 {
        return Ok(0.0);
    }
    let mut hi = normal_quantile(1.0 - alpha / 2.0) + 2.0;
    while excess(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(InferenceError::NonFiniteDelta(delta));
        }
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
