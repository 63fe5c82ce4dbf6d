//! Gaussian X-means baseline: Euclidean k-means inside the same outer
//! loop as SX-means, with a spherical-Gaussian BIC per cluster.
//!
//! Each cluster carries its own isotropic variance MLE
//! `σ² = Σ‖x − m‖² / (n·M)`; a split is scored with plug-in mixing
//! weights `nₘ / n`. Parameter counts are `M + 1` for one cluster and
//! `2(M + 1) + 1` for a split.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_selection::{BicScore, ComponentParams, SplitDecision};
use crate::search::{run_search, ClusterFit, ClusterSummary, Finalized, LoopLimits, SearchModel};
use crate::seed::{derive_seed, rng_from_seed, TAG_PARAMS, TAG_SPLIT};
use crate::sphere;
use crate::sxmeans::{rejection_for, EstimationReport, Method};

const VARIANCE_FLOOR: f64 = 1e-12;

/// Unnormalized rows of equal length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPoints {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl RawPoints {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().ok_or(Error::EmptySelection)?.len();
        if dim == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
        Ok(RawPoints { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn subset(&self, ids: &[usize]) -> RawPoints {
        RawPoints {
            dim: self.dim,
            rows: ids.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansClustering {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances to assigned centroids.
    pub sse: f64,
    pub iterations: usize,
}

impl KMeansClustering {
    pub fn members(&self) -> Vec<Vec<usize>> {
        crate::skmeans::members_of(&self.assignment, self.k)
    }
}

fn plus_plus<R: Rng>(points: &RawPoints, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut taken = vec![false; n];
    let first = rng.gen_range(0..n);
    taken[first] = true;
    let mut centers = vec![points.rows[first].clone()];
    let mut weight: Vec<f64> = points.rows.iter().map(|x| sq_dist(x, &centers[0])).collect();
    weight[first] = 0.0;
    while centers.len() < k {
        let total: f64 = weight.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = 0;
            for (i, &w) in weight.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = i;
                    if acc > target {
                        break;
                    }
                }
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        taken[next] = true;
        centers.push(points.rows[next].clone());
        for i in 0..n {
            weight[i] = if taken[i] {
                0.0
            } else {
                weight[i].min(sq_dist(&points.rows[i], &points.rows[next]))
            };
        }
    }
    centers
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, sq_dist(x, &centers[0]));
    for (j, c) in centers.iter().enumerate().skip(1) {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn update(points: &RawPoints, assignment: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = previous.len();
    let mut sums = vec![vec![0.0; points.dim]; k];
    let mut counts = vec![0usize; k];
    for (x, &a) in points.rows.iter().zip(assignment) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut next: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|v| v / c.max(1) as f64).collect())
        .collect();
    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        let mut far: Vec<(f64, usize)> = points
            .rows
            .iter()
            .zip(assignment)
            .enumerate()
            .map(|(i, (x, &a))| (sq_dist(x, &previous[a]), i))
            .collect();
        far.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (j, (_, i)) in empty.into_iter().zip(far) {
            next[j] = points.rows[i].clone();
        }
    }
    next
}

/// Lloyd's k-means with k-means++ seeding.
pub fn kmeans(points: &RawPoints, k: usize, seed: u64, max_iters: usize, rel_tol: f64) -> Result<KMeansClustering> {
    if k == 0 || k > points.len() {
        return Err(Error::TooFewPoints { k, n: points.len() });
    }
    let mut centroids = plus_plus(points, k, &mut rng_from_seed(seed));
    let assign = |c: &[Vec<f64>]| -> Vec<usize> { points.rows.iter().map(|x| nearest(x, c).0).collect() };
    let sse = |a: &[usize], c: &[Vec<f64>]| -> f64 {
        points.rows.iter().zip(a).map(|(x, &j)| sq_dist(x, &c[j])).sum()
    };
    let mut assignment = assign(&centroids);
    centroids = update(points, &assignment, &centroids);
    let mut obj = sse(&assignment, &centroids);
    let mut iterations = 1;
    while iterations < max_iters.max(1) {
        let next = assign(&centroids);
        if next == assignment {
            break;
        }
        assignment = next;
        centroids = update(points, &assignment, &centroids);
        let next_obj = sse(&assignment, &centroids);
        iterations += 1;
        let rel = (obj - next_obj).abs() / obj.abs().max(f64::MIN_POSITIVE);
        obj = next_obj;
        if rel < rel_tol {
            break;
        }
    }
    Ok(KMeansClustering {
        k,
        assignment,
        centroids,
        sse: obj,
        iterations,
    })
}

/// Mean and per-dimension variance MLE of the selected rows.
pub fn gaussian_fit(points: &RawPoints, ids: &[usize]) -> Result<(Vec<f64>, f64)> {
    if ids.is_empty() {
        return Err(Error::EmptySelection);
    }
    let n = ids.len() as f64;
    let mut mean = vec![0.0; points.dim];
    for &i in ids {
        for (m, v) in mean.iter_mut().zip(&points.rows[i]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let ss: f64 = ids.iter().map(|&i| sq_dist(&points.rows[i], &mean)).sum();
    Ok((mean, (ss / (n * points.dim as f64)).max(VARIANCE_FLOOR)))
}

/// Maximized isotropic-Gaussian log-likelihood of `n` points in `dim`
/// dimensions with variance MLE `variance`.
fn gaussian_log_likelihood(n: usize, dim: usize, variance: f64) -> f64 {
    -0.5 * (n * dim) as f64 * ((2.0 * PI * variance).ln() + 1.0)
}

pub fn gaussian_pre_bic(points: &RawPoints, ids: &[usize]) -> Result<(BicScore, ComponentParams)> {
    let (mean, variance) = gaussian_fit(points, ids)?;
    let l = gaussian_log_likelihood(ids.len(), points.dim, variance);
    Ok((
        BicScore::new(l, points.dim + 1, ids.len()),
        ComponentParams::Gaussian { mean, variance },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSplit {
    pub score: BicScore,
    pub params: [ComponentParams; 2],
    pub members: [Vec<usize>; 2],
}

pub fn gaussian_post_bic(
    points: &RawPoints,
    ids: &[usize],
    seed: u64,
    config: &XMeansConfig,
) -> Result<GaussianSplit> {
    if ids.len() < config.min_split_size.max(2) {
        return Err(Error::TooSmallToSplit { size: ids.len() });
    }
    let sub = points.subset(ids);
    let mut rng = rng_from_seed(seed);
    let c = kmeans(&sub, 2, rng.gen(), config.max_iters, config.rel_tol)?;
    let local = c.members();
    let members = [
        local[0].iter().map(|&i| ids[i]).collect::<Vec<_>>(),
        local[1].iter().map(|&i| ids[i]).collect::<Vec<_>>(),
    ];
    let (a, b) = (members[0].len(), members[1].len());
    if a < 2 || b < 2 {
        return Err(Error::UndersizedSubcluster(a, b));
    }
    let n = ids.len() as f64;
    let mut l = 0.0;
    let mut params = Vec::with_capacity(2);
    for m in &members {
        let (mean, variance) = gaussian_fit(points, m)?;
        let nm = m.len() as f64;
        l += nm * (nm.ln() - n.ln()) + gaussian_log_likelihood(m.len(), points.dim, variance);
        params.push(ComponentParams::Gaussian { mean, variance });
    }
    let p = 2 * (points.dim + 1) + 1;
    let [p1, p2]: [ComponentParams; 2] = params.try_into().expect("two components");
    Ok(GaussianSplit {
        score: BicScore::new(l, p, ids.len()),
        params: [p1, p2],
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XMeansConfig {
    pub limits: LoopLimits,
    pub seed: u64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub min_split_size: usize,
}

impl Default for XMeansConfig {
    fn default() -> Self {
        XMeansConfig {
            limits: LoopLimits::default(),
            seed: 0,
            max_iters: 300,
            rel_tol: 1e-6,
            min_split_size: 4,
        }
    }
}

impl XMeansConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial_k(mut self, k: usize) -> Self {
        self.limits.initial_k = k;
        self
    }
}

struct XSearch<'a> {
    points: &'a RawPoints,
    config: XMeansConfig,
}

impl SearchModel for XSearch<'_> {
    type State = KMeansClustering;

    fn len(&self) -> usize {
        self.points.len()
    }

    fn improve_parameters(&self, k: usize, round_seed: u64) -> Result<(KMeansClustering, Vec<ClusterFit>)> {
        let c = kmeans(
            self.points,
            k,
            derive_seed(round_seed, &[TAG_PARAMS]),
            self.config.max_iters,
            self.config.rel_tol,
        )?;
        let fits = c
            .members()
            .iter()
            .enumerate()
            .map(|(j, ids)| {
                if ids.is_empty() {
                    return ClusterFit {
                        score: BicScore::new(0.0, self.points.dim + 1, 1),
                        params: ComponentParams::Gaussian {
                            mean: c.centroids[j].clone(),
                            variance: VARIANCE_FLOOR,
                        },
                        fallback: true,
                    };
                }
                let (score, params) = gaussian_pre_bic(self.points, ids).expect("non-empty cluster");
                ClusterFit {
                    score,
                    params,
                    fallback: false,
                }
            })
            .collect();
        Ok((c, fits))
    }

    fn improve_structure(&self, state: &KMeansClustering, pre: &[ClusterFit], round_seed: u64) -> (usize, Vec<SplitDecision>) {
        let members = state.members();
        let decisions: Vec<SplitDecision> = members
            .par_iter()
            .zip(pre.par_iter())
            .enumerate()
            .map(|(j, (ids, fit))| {
                let seed = derive_seed(round_seed, &[TAG_SPLIT, j as u64]);
                match gaussian_post_bic(self.points, ids, seed, &self.config) {
                    Ok(s) => {
                        let sizes = [s.members[0].len(), s.members[1].len()];
                        SplitDecision::scored(j, fit.score, s.score, s.params, sizes)
                    }
                    Err(e) => SplitDecision::rejected(j, fit.score, rejection_for(e)),
                }
            })
            .collect();
        let accepted = decisions.iter().filter(|d| d.accepted).count();
        (state.k + accepted, decisions)
    }

    fn finalize(&self, k: usize, converged: Option<KMeansClustering>, seed: u64) -> Result<Finalized> {
        let c = match converged {
            Some(c) => c,
            None => kmeans(self.points, k, seed, self.config.max_iters, self.config.rel_tol)?,
        };
        let mut notes = Vec::new();
        let clusters = c
            .members()
            .iter()
            .enumerate()
            .map(|(j, ids)| {
                let params = if ids.is_empty() {
                    notes.push(format!("final cluster {j} is empty"));
                    ComponentParams::Gaussian {
                        mean: c.centroids[j].clone(),
                        variance: VARIANCE_FLOOR,
                    }
                } else {
                    gaussian_pre_bic(self.points, ids).expect("non-empty").1
                };
                ClusterSummary {
                    size: ids.len(),
                    params,
                }
            })
            .collect();
        Ok(Finalized {
            assignment: c.assignment,
            clusters,
            notes,
        })
    }
}

/// Estimates k with the Gaussian X-means baseline on raw rows.
pub fn xmeans_baseline(points: &RawPoints, config: &XMeansConfig) -> Result<EstimationReport> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { k: 2, n: points.len() });
    }
    let model = XSearch {
        points,
        config: *config,
    };
    let out = run_search(&model, &config.limits, config.seed)?;
    let mut notes = out.notes;
    notes.extend(out.final_.notes);
    Ok(EstimationReport {
        method: Method::Xmeans,
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

/// Convenience: the raw coordinates of a point set.
pub fn raw_from_points(points: &sphere::PointSet) -> RawPoints {
    RawPoints {
        dim: points.dim(),
        rows: points.to_rows(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::synth::{blobs, BlobsSpec};
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, Normal};

    fn gaussian_blob(center: &[f64], n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rng_from_seed(seed);
        let z = Normal::new(0.0, 1.0).unwrap();
        (0..n)
            .map(|_| center.iter().map(|c| c + z.sample(&mut rng)).collect())
            .collect()
    }

    #[test]
    fn kmeans_separates_blobs() {
        let mut rows = gaussian_blob(&[0.0, 0.0], 100, 1);
        rows.extend(gaussian_blob(&[20.0, 0.0], 100, 2));
        let p = RawPoints::new(rows).unwrap();
        let c = kmeans(&p, 2, 3, 300, 1e-6).unwrap();
        let first = c.assignment[0];
        assert!(c.assignment[..100].iter().all(|&a| a == first));
        assert!(c.assignment[100..].iter().all(|&a| a != first));
    }

    #[test]
    fn variance_is_per_dimension_mle() {
        let p = RawPoints::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let (mean, var) = gaussian_fit(&p, &[0, 1]).unwrap();
        assert_eq!(mean, vec![0.0, 0.0]);
        assert_abs_diff_eq!(var, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn three_blobs_found() {
        let hits = (0..20)
            .filter(|&s| {
                let (rows, _) = blobs(&BlobsSpec { n: 600, seed: 100 + s, half_width: 20.0, ..Default::default() }).unwrap();
                let p = RawPoints::new(rows).unwrap();
                xmeans_baseline(&p, &XMeansConfig::default().with_seed(s)).unwrap().k == 3
            })
            .count();
        assert!(hits >= 18, "{hits}/20");
    }

    #[test]
    fn single_blob_stays_put() {
        let hits = (0..20)
            .filter(|&s| {
                let p = RawPoints::new(gaussian_blob(&[1.0, 2.0, 3.0], 500, 200 + s)).unwrap();
                let r = xmeans_baseline(&p, &XMeansConfig::default().with_seed(s).with_initial_k(1)).unwrap();
                r.validate().unwrap();
                r.k == 1
            })
            .count();
        assert!(hits >= 18, "{hits}/20");
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(RawPoints::new(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        let p = RawPoints::new(vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            xmeans_baseline(&p, &XMeansConfig::default()),
            Err(Error::TooFewPoints { .. })
        ));
    }
}
