//! BIC scores for "one vMF" versus "two vMF" hypotheses on a cluster.
//!
//! Both hypotheses are scored with the overflow-free approximated
//! log-likelihoods
//!
//! ```text
//! l  = N (((d−1)/2)(log κ − log 2π) − κ) + κ Σ μᵀxᵢ
//! l' = Σₘ { nₘ (log nₘ − log N + ((d−1)/2)(log κₘ − log 2π) − κₘ) + κₘ Σ μₘᵀxᵢ }
//! ```
//!
//! and penalized by `(p/2) log N` with N the cluster's own size.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::skmeans::{self, SkMeansConfig};
use crate::sphere::{self, PointSet};
use crate::vmf::{self, log_sphere_area, VmfParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicScore {
    pub log_likelihood: f64,
    pub param_count: usize,
    pub n: usize,
    pub value: f64,
}

impl BicScore {
    pub fn new(log_likelihood: f64, param_count: usize, n: usize) -> Self {
        let value = log_likelihood - 0.5 * param_count as f64 * (n as f64).ln();
        BicScore {
            log_likelihood,
            param_count,
            n,
            value,
        }
    }

    /// Recomputes `value` from the other fields.
    pub fn recomputed(&self) -> f64 {
        self.log_likelihood - 0.5 * self.param_count as f64 * (self.n as f64).ln()
    }
}

/// Whether the split model's parameter count includes the mixing weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamCounting {
    #[default]
    WithMixingWeight,
    WithoutMixingWeight,
}

/// Free parameters of a single vMF in R^d: d−1 for the direction plus
/// one concentration unless κ is fixed.
pub fn param_count_single(d: usize, kappa_fixed: bool) -> usize {
    if kappa_fixed {
        d - 1
    } else {
        d
    }
}

pub fn param_count_split(d: usize, kappa_fixed: bool, counting: ParamCounting) -> usize {
    let both = 2 * param_count_single(d, kappa_fixed);
    match counting {
        ParamCounting::WithMixingWeight => both + 1,
        ParamCounting::WithoutMixingWeight => both,
    }
}

/// Parameters of one fitted mixture component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ComponentParams {
    Vmf(VmfParams),
    Gaussian { mean: Vec<f64>, variance: f64 },
}

impl ComponentParams {
    /// Center of the component (mean direction or Euclidean mean).
    pub fn center(&self) -> &[f64] {
        match self {
            ComponentParams::Vmf(p) => p.mu().as_slice(),
            ComponentParams::Gaussian { mean, .. } => mean,
        }
    }
}

/// Why a split was not scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    TooSmall,
    Undersized,
    Degenerate,
    Failed(String),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::TooSmall => f.write_str("cluster too small to split"),
            Rejection::Undersized => f.write_str("2-means left a subcluster with fewer than 2 points"),
            Rejection::Degenerate => f.write_str("subcluster resultant vanished"),
            Rejection::Failed(m) => f.write_str(m),
        }
    }
}

/// Outcome of the split test on one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDecision {
    pub cluster_id: usize,
    pub pre: BicScore,
    pub post: Option<BicScore>,
    pub accepted: bool,
    pub sub_params: Option<[ComponentParams; 2]>,
    pub sub_sizes: Option<[usize; 2]>,
    pub rejection: Option<Rejection>,
}

impl SplitDecision {
    pub fn scored(
        cluster_id: usize,
        pre: BicScore,
        post: BicScore,
        sub_params: [ComponentParams; 2],
        sub_sizes: [usize; 2],
    ) -> Self {
        SplitDecision {
            cluster_id,
            pre,
            accepted: pre.value < post.value,
            post: Some(post),
            sub_params: Some(sub_params),
            sub_sizes: Some(sub_sizes),
            rejection: None,
        }
    }

    pub fn rejected(cluster_id: usize, pre: BicScore, reason: Rejection) -> Self {
        SplitDecision {
            cluster_id,
            pre,
            post: None,
            accepted: false,
            sub_params: None,
            sub_sizes: None,
            rejection: Some(reason),
        }
    }

    /// Checks `accepted == (pre < post)` and `n₁ + n₂ == pre.n`.
    pub fn is_consistent(&self) -> bool {
        match (&self.post, &self.sub_sizes) {
            (Some(post), Some([a, b])) => {
                self.accepted == (self.pre.value < post.value) && a + b == self.pre.n
            }
            (None, None) => !self.accepted && self.rejection.is_some(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicOptions {
    pub kappa_fixed: Option<f64>,
    pub counting: ParamCounting,
    /// Smallest cluster a split is attempted on.
    pub min_split_size: usize,
    /// Smallest subcluster a split may produce.
    pub min_subcluster: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for BicOptions {
    fn default() -> Self {
        BicOptions {
            kappa_fixed: None,
            counting: ParamCounting::default(),
            min_split_size: 4,
            min_subcluster: 2,
            max_iters: 300,
            rel_tol: 1e-6,
        }
    }
}

impl BicOptions {
    pub fn fixed(kappa: f64) -> Self {
        BicOptions {
            kappa_fixed: Some(kappa),
            ..Default::default()
        }
    }
}

/// Log-likelihood of N points under the uniform density on the sphere.
pub fn uniform_log_likelihood(n: usize, d: usize) -> f64 {
    -(n as f64) * log_sphere_area(d)
}

/// Approximated single-vMF log-likelihood of the selected points.
pub fn log_likelihood_single(points: &PointSet, ids: &[usize], params: &VmfParams) -> Result<f64> {
    if params.dim() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: params.dim(),
        });
    }
    let r = sphere::resultant(points, ids)?;
    let n = ids.len() as f64;
    let kappa = params.kappa();
    if kappa == 0.0 {
        return Ok(uniform_log_likelihood(ids.len(), points.dim()));
    }
    Ok(n * vmf::approx_log_norm_const(points.dim(), kappa)
        + kappa * sphere::dot(params.mu().as_slice(), &r))
}

/// Approximated two-component log-likelihood with plug-in mixing
/// weights `nₘ / N`.
pub fn log_likelihood_split(
    points: &PointSet,
    ids1: &[usize],
    params1: &VmfParams,
    ids2: &[usize],
    params2: &VmfParams,
) -> Result<f64> {
    if ids1.is_empty() || ids2.is_empty() {
        return Err(Error::EmptySubcluster);
    }
    let d = points.dim();
    let total = (ids1.len() + ids2.len()) as f64;
    let mut l = 0.0;
    for (ids, p) in [(ids1, params1), (ids2, params2)] {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        let n = ids.len() as f64;
        let kappa = p.kappa();
        let r = sphere::resultant(points, ids)?;
        let density = if kappa == 0.0 {
            -log_sphere_area(d)
        } else {
            0.5 * (d as f64 - 1.0) * (kappa.ln() - (2.0 * std::f64::consts::PI).ln()) - kappa
        };
        l += n * (n.ln() - total.ln() + density);
        if kappa != 0.0 {
            l += kappa * sphere::dot(p.mu().as_slice(), &r);
        }
    }
    Ok(l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleFit {
    pub score: BicScore,
    pub params: VmfParams,
}

/// Scores the cluster as a single vMF.
pub fn pre_bic(points: &PointSet, ids: &[usize], opts: &BicOptions) -> Result<SingleFit> {
    let fit = vmf::fit(points, ids, opts.kappa_fixed)?;
    let l = log_likelihood_single(points, ids, &fit.params)?;
    let p = param_count_single(points.dim(), opts.kappa_fixed.is_some());
    Ok(SingleFit {
        score: BicScore::new(l, p, ids.len()),
        params: fit.params,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitFit {
    pub score: BicScore,
    pub params: [VmfParams; 2],
    pub members: [Vec<usize>; 2],
}

impl SplitFit {
    pub fn sizes(&self) -> [usize; 2] {
        [self.members[0].len(), self.members[1].len()]
    }
}

/// Splits the cluster with a seeded 2-way sk-means and scores the result
/// as a two-component mixture.
pub fn post_bic(points: &PointSet, ids: &[usize], seed: u64, opts: &BicOptions) -> Result<SplitFit> {
    if ids.len() < opts.min_split_size.max(2) {
        return Err(Error::TooSmallToSplit { size: ids.len() });
    }
    let sub = points.subset(ids)?;
    let mut rng = rng_from_seed(seed);
    let cfg = SkMeansConfig {
        max_iters: opts.max_iters,
        rel_tol: opts.rel_tol,
        ..SkMeansConfig::new(2, rng.gen())
    };
    let clustering = skmeans::run(&sub, &cfg)?;
    let local = clustering.members();
    let members: [Vec<usize>; 2] = [
        local[0].iter().map(|&i| ids[i]).collect(),
        local[1].iter().map(|&i| ids[i]).collect(),
    ];
    let (a, b) = (members[0].len(), members[1].len());
    if a < opts.min_subcluster || b < opts.min_subcluster {
        return Err(Error::UndersizedSubcluster(a, b));
    }
    let f1 = vmf::fit(points, &members[0], opts.kappa_fixed)?;
    let f2 = vmf::fit(points, &members[1], opts.kappa_fixed)?;
    let l = log_likelihood_split(points, &members[0], &f1.params, &members[1], &f2.params)?;
    let p = param_count_split(points.dim(), opts.kappa_fixed.is_some(), opts.counting);
    Ok(SplitFit {
        score: BicScore::new(l, p, ids.len()),
        params: [f1.params, f2.params],
        members,
    })
}
