//! The von Mises-Fisher distribution on the unit sphere in R^d.
//!
//! Density `C_d(κ) exp(κ μᵀx)` with normalizer
//! `C_d(κ) = κ^{d/2−1} / ((2π)^{d/2} I_{d/2−1}(κ))`. The normalizer can be
//! evaluated exactly through the log-space Bessel series, or with the
//! leading-order asymptotic `I_ν(κ) ≈ e^κ / √(2πκ)`, which stays finite in
//! thousands of dimensions and is what model selection uses.

mod bessel;
mod sample;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_ratio, log_bessel_i_exact, log_sphere_area};
pub use sample::{sample, uniform_on_sphere, VmfSampler};

use crate::error::{Error, Result};
use crate::sphere::{self, normalize, PointSet, UnitVector};

/// Upper bound on any fitted or supplied concentration.
pub const KAPPA_MAX: f64 = 1e5;
/// Mean resultant lengths are clamped below `1 − R_BAR_MARGIN` before
/// inverting for κ.
pub const R_BAR_MARGIN: f64 = 1e-10;
const DEGENERATE_RESULTANT: f64 = 1e-12;

/// How the normalizing constant is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// Log-space Bessel series.
    Exact,
    /// Leading asymptotic term of `I_ν`.
    Approx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmfParams {
    mu: UnitVector,
    kappa: f64,
}

impl VmfParams {
    pub fn new(mu: UnitVector, kappa: f64) -> Result<Self> {
        if !(0.0..=KAPPA_MAX).contains(&kappa) {
            return Err(Error::InvalidConfig(format!(
                "kappa must lie in [0, {KAPPA_MAX}], got {kappa}"
            )));
        }
        Ok(VmfParams { mu, kappa })
    }

    pub fn mu(&self) -> &UnitVector {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }
}

/// A maximum-likelihood fit to a set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlFit {
    pub params: VmfParams,
    /// Mean resultant length `‖Σxᵢ‖ / n`.
    pub r_bar: f64,
    pub n: usize,
}

/// Mean direction: the normalized resultant of the selected points.
pub fn estimate_mu(points: &PointSet, ids: &[usize]) -> Result<UnitVector> {
    let r = sphere::resultant(points, ids)?;
    mu_from_resultant(&r)
}

pub(crate) fn mu_from_resultant(r: &[f64]) -> Result<UnitVector> {
    if sphere::norm(r) <= DEGENERATE_RESULTANT {
        return Err(Error::DegenerateResultant);
    }
    normalize(r)
}

/// Closed-form approximate inverse of the Bessel ratio,
/// `κ = r̄ (d − r̄²) / (1 − r̄²)`, clamped to `[0, KAPPA_MAX]`.
pub fn estimate_kappa(r_bar: f64, d: usize) -> f64 {
    let r = r_bar.clamp(0.0, 1.0 - R_BAR_MARGIN);
    let r2 = r * r;
    (r * (d as f64 - r2) / (1.0 - r2)).clamp(0.0, KAPPA_MAX)
}

/// Fits μ and κ, or μ alone when `kappa_fixed` is given.
pub fn fit(points: &PointSet, ids: &[usize], kappa_fixed: Option<f64>) -> Result<MlFit> {
    let r = sphere::resultant(points, ids)?;
    let mu = mu_from_resultant(&r)?;
    let n = ids.len();
    let r_bar = sphere::norm(&r) / n as f64;
    let kappa = kappa_fixed.unwrap_or_else(|| estimate_kappa(r_bar, points.dim()));
    Ok(MlFit {
        params: VmfParams::new(mu, kappa)?,
        r_bar,
        n,
    })
}

/// `log C_d(κ)`.
pub fn log_norm_const(d: usize, kappa: f64, mode: NormMode) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "log_norm_const needs kappa > 0, got {kappa}"
        )));
    }
    let df = d as f64;
    let log_2pi = (2.0 * PI).ln();
    match mode {
        NormMode::Exact => Ok((df / 2.0 - 1.0) * kappa.ln()
            - (df / 2.0) * log_2pi
            - log_bessel_i_exact(df / 2.0 - 1.0, kappa)?),
        NormMode::Approx => Ok(approx_log_norm_const(d, kappa)),
    }
}

/// `((d−1)/2)(log κ − log 2π) − κ`
#[inline]
pub(crate) fn approx_log_norm_const(d: usize, kappa: f64) -> f64 {
    0.5 * (d as f64 - 1.0) * (kappa.ln() - (2.0 * PI).ln()) - kappa
}

/// `log C_d(κ) + κ μᵀx`. κ = 0 gives the uniform density.
pub fn log_density(x: &UnitVector, params: &VmfParams, mode: NormMode) -> Result<f64> {
    let cos = sphere::cosine_similarity(x, params.mu())?;
    if params.kappa == 0.0 {
        return Ok(-log_sphere_area(x.dim()));
    }
    Ok(log_norm_const(x.dim(), params.kappa, mode)? + params.kappa * cos)
}
