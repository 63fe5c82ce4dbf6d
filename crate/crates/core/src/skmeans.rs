//! Spherical k-means: clusters unit vectors by cosine similarity to
//! renormalized centroids, maximizing `J = Σᵢ μ_{a(i)}ᵀ xᵢ`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::sphere::{self, PointSet, UnitVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Init {
    /// k-means++ seeding with `1 − cos` as the distance weight.
    PlusPlus,
    Given(Vec<UnitVector>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    /// Secondary stop on relative objective change.
    pub rel_tol: f64,
    pub seed: u64,
    pub init: Init,
}

impl SkMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        SkMeansConfig {
            k,
            max_iters: 300,
            rel_tol: 1e-6,
            seed,
            init: Init::PlusPlus,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.max_iters == 0 || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sk-means needs k >= 1, max_iters >= 1, rel_tol > 0 (got {}, {}, {})",
                self.k, self.max_iters, self.rel_tol
            )));
        }
        if let Init::Given(c) = &self.init {
            if c.len() != self.k {
                return Err(Error::InvalidConfig(format!(
                    "{} initial centroids given for k = {}",
                    c.len(),
                    self.k
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centroids: Vec<UnitVector>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after every update pass; non-decreasing.
    pub objective_trace: Vec<f64>,
}

impl Clustering {
    /// Point ids per cluster, in ascending id order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        members_of(&self.assignment, self.k)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &a in &self.assignment {
            s[a] += 1;
        }
        s
    }
}

pub(crate) fn members_of(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut m = vec![Vec::new(); k];
    for (i, &a) in assignment.iter().enumerate() {
        m[a].push(i);
    }
    m
}

/// Picks `k` distinct data points as initial centroids.
pub fn init_centroids<R: Rng + ?Sized>(
    points: &PointSet,
    k: usize,
    rng: &mut R,
) -> Result<Vec<UnitVector>> {
    Ok(init_centroid_ids(points, k, rng)?
        .into_iter()
        .map(|i| points.get(i).clone())
        .collect())
}

pub(crate) fn init_centroid_ids<R: Rng + ?Sized>(
    points: &PointSet,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::TooFewPoints { k, n });
    }
    let first = rng.gen_range(0..n);
    let mut chosen = vec![first];
    let mut taken = vec![false; n];
    taken[first] = true;
    let gap = |i: usize, c: usize| (1.0 - sphere::dot(points.get(i).as_slice(), points.get(c).as_slice())).max(0.0);
    let mut weight: Vec<f64> = (0..n).map(|i| if taken[i] { 0.0 } else { gap(i, first) }).collect();

    while chosen.len() < k {
        let total: f64 = weight.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            // only duplicates of chosen points remain
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        taken[next] = true;
        chosen.push(next);
        for i in 0..n {
            weight[i] = if taken[i] { 0.0 } else { weight[i].min(gap(i, next)) };
        }
    }
    Ok(chosen)
}

/// Nearest centroid by cosine similarity; ties go to the lowest index.
pub fn assign(points: &PointSet, centroids: &[UnitVector]) -> Result<Vec<usize>> {
    let first = centroids.first().ok_or(Error::EmptySelection)?;
    if first.dim() != points.dim() || centroids.iter().any(|c| c.dim() != points.dim()) {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            found: centroids.iter().map(|c| c.dim()).find(|&d| d != points.dim()).unwrap_or(first.dim()),
        });
    }
    Ok(points
        .iter()
        .map(|x| nearest(x.as_slice(), centroids).0)
        .collect())
}

#[inline]
fn nearest(x: &[f64], centroids: &[UnitVector]) -> (usize, f64) {
    let mut best = (0, sphere::dot(x, centroids[0].as_slice()));
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let s = sphere::dot(x, c.as_slice());
        if s > best.1 {
            best = (j, s);
        }
    }
    best
}

/// Normalized resultant per cluster. A cluster with a vanishing resultant
/// keeps its previous centroid; an empty cluster is reseeded with the
/// point that fits its own centroid worst.
pub fn update_centroids(
    points: &PointSet,
    assignment: &[usize],
    previous: &[UnitVector],
) -> Vec<UnitVector> {
    let k = previous.len();
    let d = points.dim();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (x, &a) in points.iter().zip(assignment) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(x.as_slice()) {
            *s += v;
        }
    }
    let mut next: Vec<UnitVector> = sums
        .iter()
        .zip(previous)
        .map(|(s, prev)| match crate::vmf::mu_from_resultant(s) {
            Ok(mu) => mu,
            Err(_) => prev.clone(),
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        let mut fit: Vec<(f64, usize)> = points
            .iter()
            .zip(assignment)
            .enumerate()
            .map(|(i, (x, &a))| (sphere::dot(x.as_slice(), previous[a].as_slice()), i))
            .collect();
        fit.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (j, (_, i)) in empty.into_iter().zip(fit) {
            next[j] = points.get(i).clone();
        }
    }
    next
}

pub(crate) fn objective(points: &PointSet, assignment: &[usize], centroids: &[UnitVector]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(x, &a)| sphere::dot(x.as_slice(), centroids[a].as_slice()))
        .sum()
}

pub fn run(points: &PointSet, config: &SkMeansConfig) -> Result<Clustering> {
    config.validate()?;
    let n = points.len();
    if config.k > n {
        return Err(Error::TooFewPoints { k: config.k, n });
    }
    let mut centroids = match &config.init {
        Init::PlusPlus => init_centroids(points, config.k, &mut rng_from_seed(config.seed))?,
        Init::Given(c) => c.clone(),
    };
    let mut assignment = assign(points, &centroids)?;
    centroids = update_centroids(points, &assignment, &centroids);
    let mut obj = objective(points, &assignment, &centroids);
    let mut trace = vec![obj];
    let mut iterations = 1;

    while iterations < config.max_iters {
        let next = assign(points, &centroids)?;
        if next == assignment {
            break;
        }
        assignment = next;
        centroids = update_centroids(points, &assignment, &centroids);
        let next_obj = objective(points, &assignment, &centroids);
        iterations += 1;
        trace.push(next_obj);
        let rel = (next_obj - obj).abs() / obj.abs().max(f64::MIN_POSITIVE);
        obj = next_obj;
        if rel < config.rel_tol {
            break;
        }
    }

    Ok(Clustering {
        k: config.k,
        assignment,
        centroids,
        objective: obj,
        iterations,
        objective_trace: trace,
    })
}
