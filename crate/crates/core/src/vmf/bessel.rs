//! Log-space modified Bessel function of the first kind and related
//! special functions. The series here is slow but has no overflow at any
//! order, which makes it the reference against which the BIC's
//! leading-order approximation is checked.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const REL_EPS: f64 = 1e-16;

/// `log I_order(kappa)` from the ascending series
/// `Σ_m (κ/2)^{2m+ν} / (m! Γ(m+ν+1))`, summed with a running log-sum-exp.
pub fn log_bessel_i_exact(order: f64, kappa: f64) -> Result<f64> {
    if !(order >= 0.0) || !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "log_bessel_i_exact needs order >= 0 and kappa > 0, got ({order}, {kappa})"
        )));
    }
    let log_half = (0.5 * kappa).ln();
    // log of the m = 0 term
    let mut log_term = order * log_half - ln_gamma(order + 1.0);
    let mut log_max = log_term;
    let mut scaled_sum = 1.0;
    let log_eps = REL_EPS.ln();
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        log_term += 2.0 * log_half - (mf + 1.0).ln() - (mf + order + 1.0).ln();
        if log_term > log_max {
            scaled_sum = scaled_sum * (log_max - log_term).exp() + 1.0;
            log_max = log_term;
        } else {
            scaled_sum += (log_term - log_max).exp();
        }
        let log_sum = log_max + scaled_sum.ln();
        if log_term - log_sum < log_eps {
            return Ok(log_sum);
        }
    }
    Err(Error::NonConvergence { order, kappa })
}

/// `A_d(κ) = I_{d/2}(κ) / I_{d/2−1}(κ)`, the expected mean resultant
/// length of a vMF sample in R^d.
pub fn bessel_ratio(d: usize, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let nu = d as f64 / 2.0;
    Ok((log_bessel_i_exact(nu, kappa)? - log_bessel_i_exact(nu - 1.0, kappa)?).exp())
}

/// Log of the surface area of the unit sphere in R^d:
/// `log 2 + (d/2) log π − log Γ(d/2)`.
pub fn log_sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    std::f64::consts::LN_2 + half * PI.ln() - ln_gamma(half)
}
