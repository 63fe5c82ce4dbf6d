//! SX-means: grows k from a small start by alternately refitting a
//! spherical k-means partition and testing every cluster for a 2-way
//! split under the vMF BIC. The fixed variant holds κ constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_selection::{
    self, param_count_single, uniform_log_likelihood, BicOptions, BicScore, ComponentParams,
    ParamCounting, Rejection, SplitDecision,
};
use crate::search::{
    run_search, ClusterFit, ClusterSummary, Finalized, LoopLimits, RoundTrace, SearchModel,
    StopReason,
};
use crate::seed::{derive_seed, TAG_PARAMS, TAG_SPLIT};
use crate::skmeans::{self, Clustering, Init, SkMeansConfig};
use crate::sphere::PointSet;
use crate::vmf::{self, VmfParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KappaMode {
    Free,
    Fixed { kappa: f64 },
}

impl KappaMode {
    pub fn fixed_value(&self) -> Option<f64> {
        match *self {
            KappaMode::Free => None,
            KappaMode::Fixed { kappa } => Some(kappa),
        }
    }
}

/// Which estimator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Sx,
    Fixed { kappa: f64 },
    Xmeans,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Sx => "SX-means".to_string(),
            Method::Fixed { kappa } => format!("fixed (κ = {kappa})"),
            Method::Xmeans => "X-means".to_string(),
        }
    }

    /// Short identifier used in file names.
    pub fn slug(&self) -> String {
        match self {
            Method::Sx => "sx".to_string(),
            Method::Fixed { kappa } => format!("fixed{kappa}"),
            Method::Xmeans => "xmeans".to_string(),
        }
    }
}

impl From<KappaMode> for Method {
    fn from(m: KappaMode) -> Self {
        match m {
            KappaMode::Free => Method::Sx,
            KappaMode::Fixed { kappa } => Method::Fixed { kappa },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SxConfig {
    pub limits: LoopLimits,
    pub kappa_mode: KappaMode,
    pub seed: u64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub counting: ParamCounting,
    pub min_split_size: usize,
}

impl Default for SxConfig {
    fn default() -> Self {
        SxConfig {
            limits: LoopLimits::default(),
            kappa_mode: KappaMode::Free,
            seed: 0,
            max_iters: 300,
            rel_tol: 1e-6,
            counting: ParamCounting::default(),
            min_split_size: 4,
        }
    }
}

impl SxConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial_k(mut self, k: usize) -> Self {
        self.limits.initial_k = k;
        self
    }

    pub fn with_fixed_kappa(mut self, kappa: f64) -> Self {
        self.kappa_mode = KappaMode::Fixed { kappa };
        self
    }

    pub fn bic_options(&self) -> BicOptions {
        BicOptions {
            kappa_fixed: self.kappa_mode.fixed_value(),
            counting: self.counting,
            min_split_size: self.min_split_size,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            ..BicOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if let KappaMode::Fixed { kappa } = self.kappa_mode {
            if !(kappa > 0.0 && kappa <= vmf::KAPPA_MAX) {
                return Err(Error::InvalidConfig(format!(
                    "fixed kappa must lie in (0, {}], got {kappa}",
                    vmf::KAPPA_MAX
                )));
            }
        }
        Ok(())
    }
}

/// Result of a cluster-count estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    #[serde(flatten)]
    pub method: Method,
    pub k: usize,
    pub clusters: Vec<ClusterSummary>,
    pub assignment: Vec<usize>,
    pub trace: Vec<RoundTrace>,
    pub rounds: usize,
    pub seed: u64,
    pub stop: StopReason,
    pub initial_k: usize,
    pub notes: Vec<String>,
}

impl EstimationReport {
    pub fn accepted_splits(&self) -> usize {
        self.trace.iter().map(RoundTrace::accepted).sum()
    }

    /// Checks every structural invariant of a report.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.k != self.clusters.len() {
            return Err(format!("k = {} but {} clusters", self.k, self.clusters.len()));
        }
        if let Some(&bad) = self.assignment.iter().find(|&&a| a >= self.k) {
            return Err(format!("assignment index {bad} >= k"));
        }
        let total: usize = self.clusters.iter().map(|c| c.size).sum();
        if total != self.assignment.len() {
            return Err(format!("cluster sizes sum to {total}, expected {}", self.assignment.len()));
        }
        if self.rounds != self.trace.len() {
            return Err("rounds disagrees with trace length".into());
        }
        let mut k = self.initial_k;
        for (i, round) in self.trace.iter().enumerate() {
            if round.k_before != k || round.k_after < round.k_before {
                return Err(format!("round {i} breaks monotone k"));
            }
            if round.accepted() == 0 && i + 1 != self.trace.len() {
                return Err(format!("round {i} accepted nothing but is not final"));
            }
            if let Some(d) = round.decisions.iter().find(|d| !d.is_consistent()) {
                return Err(format!("round {i} cluster {} has an inconsistent decision", d.cluster_id));
            }
            k = round.k_after;
        }
        if k != self.k {
            return Err(format!("trace ends at k = {k}, report says {}", self.k));
        }
        if self.stop != StopReason::MaxK && self.k != self.initial_k + self.accepted_splits() {
            return Err(format!(
                "k = {} but initial_k + accepted splits = {}",
                self.k,
                self.initial_k + self.accepted_splits()
            ));
        }
        Ok(())
    }
}

/// Fit of one cluster, falling back to the first point's direction and
/// the uniform density when the resultant vanishes.
fn fit_cluster(points: &PointSet, ids: &[usize], opts: &BicOptions) -> Result<ClusterFit> {
    match model_selection::pre_bic(points, ids, opts) {
        Ok(f) => Ok(ClusterFit {
            score: f.score,
            params: ComponentParams::Vmf(f.params),
            fallback: false,
        }),
        Err(Error::DegenerateResultant) => {
            let p = param_count_single(points.dim(), opts.kappa_fixed.is_some());
            let l = uniform_log_likelihood(ids.len(), points.dim());
            Ok(ClusterFit {
                score: BicScore::new(l, p, ids.len()),
                params: ComponentParams::Vmf(VmfParams::new(points.get(ids[0]).clone(), 0.0)?),
                fallback: true,
            })
        }
        Err(e) => Err(e),
    }
}

fn sk_config(k: usize, seed: u64, opts: &BicOptions) -> SkMeansConfig {
    SkMeansConfig {
        max_iters: opts.max_iters,
        rel_tol: opts.rel_tol,
        ..SkMeansConfig::new(k, seed)
    }
}

/// Runs sk-means at `k` and scores each cluster as a single vMF.
pub fn improve_parameters(
    points: &PointSet,
    k: usize,
    round_seed: u64,
    opts: &BicOptions,
) -> Result<(Clustering, Vec<ClusterFit>)> {
    let clustering = skmeans::run(points, &sk_config(k, derive_seed(round_seed, &[TAG_PARAMS]), opts))?;
    let members = clustering.members();
    let mut fits = Vec::with_capacity(k);
    for (j, ids) in members.iter().enumerate() {
        if ids.is_empty() {
            // an empty cluster contributes nothing and cannot split
            let mu = clustering.centroids[j].clone();
            fits.push(ClusterFit {
                score: BicScore::new(0.0, param_count_single(points.dim(), opts.kappa_fixed.is_some()), 1),
                params: ComponentParams::Vmf(VmfParams::new(mu, 0.0)?),
                fallback: true,
            });
        } else {
            fits.push(fit_cluster(points, ids, opts)?);
        }
    }
    Ok((clustering, fits))
}

/// Attempts a 2-way split of every cluster; returns the new k and one
/// decision per cluster in cluster-id order.
pub fn improve_structure(
    points: &PointSet,
    clustering: &Clustering,
    pre: &[ClusterFit],
    round_seed: u64,
    opts: &BicOptions,
) -> (usize, Vec<SplitDecision>) {
    let members = clustering.members();
    let decisions: Vec<SplitDecision> = members
        .par_iter()
        .zip(pre.par_iter())
        .enumerate()
        .map(|(j, (ids, fit))| {
            let seed = derive_seed(round_seed, &[TAG_SPLIT, j as u64]);
            match model_selection::post_bic(points, ids, seed, opts) {
                Ok(split) => {
                    let sizes = split.sizes();
                    let [p1, p2] = split.params;
                    SplitDecision::scored(
                        j,
                        fit.score,
                        split.score,
                        [ComponentParams::Vmf(p1), ComponentParams::Vmf(p2)],
                        sizes,
                    )
                }
                Err(e) => SplitDecision::rejected(j, fit.score, rejection_for(e)),
            }
        })
        .collect();
    let accepted = decisions.iter().filter(|d| d.accepted).count();
    (clustering.k + accepted, decisions)
}

pub(crate) fn rejection_for(e: Error) -> Rejection {
    match e {
        Error::TooSmallToSplit { .. } => Rejection::TooSmall,
        Error::UndersizedSubcluster(..) | Error::EmptySubcluster => Rejection::Undersized,
        Error::DegenerateResultant => Rejection::Degenerate,
        other => Rejection::Failed(other.to_string()),
    }
}

struct SxSearch<'a> {
    points: &'a PointSet,
    opts: BicOptions,
}

impl SearchModel for SxSearch<'_> {
    type State = Clustering;

    fn len(&self) -> usize {
        self.points.len()
    }

    fn improve_parameters(&self, k: usize, round_seed: u64) -> Result<(Clustering, Vec<ClusterFit>)> {
        improve_parameters(self.points, k, round_seed, &self.opts)
    }

    fn improve_structure(&self, state: &Clustering, pre: &[ClusterFit], round_seed: u64) -> (usize, Vec<SplitDecision>) {
        improve_structure(self.points, state, pre, round_seed, &self.opts)
    }

    fn finalize(&self, k: usize, converged: Option<Clustering>, seed: u64) -> Result<Finalized> {
        let mut cfg = sk_config(k, seed, &self.opts);
        if let Some(c) = converged {
            cfg.init = Init::Given(c.centroids);
        }
        let clustering = skmeans::run(self.points, &cfg)?;
        let mut notes = Vec::new();
        let clusters = clustering
            .members()
            .iter()
            .enumerate()
            .map(|(j, ids)| {
                let fit = if ids.is_empty() {
                    None
                } else {
                    vmf::fit(self.points, ids, self.opts.kappa_fixed).ok()
                };
                let params = match fit {
                    Some(f) => f.params,
                    None => {
                        notes.push(format!("final cluster {j} is empty or degenerate"));
                        VmfParams::new(clustering.centroids[j].clone(), 0.0)?
                    }
                };
                Ok(ClusterSummary {
                    size: ids.len(),
                    params: ComponentParams::Vmf(params),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Finalized {
            assignment: clustering.assignment,
            clusters,
            notes,
        })
    }
}

/// Estimates the number of clusters of `points`.
pub fn estimate(points: &PointSet, config: &SxConfig) -> Result<EstimationReport> {
    config.validate()?;
    let model = SxSearch {
        points,
        opts: config.bic_options(),
    };
    let out = run_search(&model, &config.limits, config.seed)?;
    let mut notes = out.notes;
    notes.extend(out.final_.notes);
    Ok(EstimationReport {
        method: config.kappa_mode.into(),
        k: out.k,
        clusters: out.final_.clusters,
        assignment: out.final_.assignment,
        rounds: out.trace.len(),
        trace: out.trace,
        seed: config.seed,
        stop: out.stop,
        initial_k: config.limits.initial_k,
        notes,
    })
}

/// SX-means with κ held at `kappa` for every cluster and subcluster.
pub fn fit_fixed(points: &PointSet, kappa: f64, config: &SxConfig) -> Result<EstimationReport> {
    estimate(points, &config.with_fixed_kappa(kappa))
}
