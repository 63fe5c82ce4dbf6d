//! Greedy matching of estimated clusters to ground-truth components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{self, PointSet, UnitVector};
use crate::sxmeans::EstimationReport;
use crate::vmf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueComponent {
    pub size: usize,
    pub mu: UnitVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub estimated: usize,
    pub truth: usize,
    /// Estimated size minus true size.
    pub size_error: i64,
    pub angular_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub k_error: usize,
    pub matches: Vec<Match>,
    pub unmatched_estimated: Vec<usize>,
    pub unmatched_truth: Vec<usize>,
}

impl Evaluation {
    pub fn size_errors(&self) -> Vec<i64> {
        self.matches.iter().map(|m| m.size_error).collect()
    }

    pub fn angular_errors(&self) -> Vec<f64> {
        self.matches.iter().map(|m| m.angular_error).collect()
    }

    /// The match for a given true component, if any.
    pub fn for_truth(&self, truth: usize) -> Option<&Match> {
        self.matches.iter().find(|m| m.truth == truth)
    }
}

/// Repeatedly pairs the unmatched (estimate, truth) with the largest
/// centroid cosine.
pub fn evaluate_against_components(report: &EstimationReport, truth: &[TrueComponent]) -> Evaluation {
    let dirs: Vec<Option<UnitVector>> = report
        .clusters
        .iter()
        .map(|c| sphere::normalize(c.params.center()).ok())
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (e, dir) in dirs.iter().enumerate() {
        if let Some(dir) = dir {
            for (t, comp) in truth.iter().enumerate() {
                if let Ok(cos) = sphere::cosine_similarity(dir, &comp.mu) {
                    pairs.push((cos, e, t));
                }
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_e = vec![false; dirs.len()];
    let mut used_t = vec![false; truth.len()];
    let mut matches = Vec::new();
    for (cos, e, t) in pairs {
        if used_e[e] || used_t[t] {
            continue;
        }
        used_e[e] = true;
        used_t[t] = true;
        matches.push(Match {
            estimated: e,
            truth: t,
            size_error: report.clusters[e].size as i64 - truth[t].size as i64,
            angular_error: cos.acos(),
        });
    }
    matches.sort_by_key(|m| m.truth);
    Evaluation {
        k_error: report.k.abs_diff(truth.len()),
        matches,
        unmatched_estimated: (0..dirs.len()).filter(|&e| !used_e[e]).collect(),
        unmatched_truth: (0..truth.len()).filter(|&t| !used_t[t]).collect(),
    }
}

/// Builds the true components from labels (mean direction and count per
/// label) and matches against them.
pub fn evaluate_against_labels(
    report: &EstimationReport,
    points: &PointSet,
    labels: &[usize],
) -> Result<Evaluation> {
    if labels.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    let truth = members
        .iter()
        .filter(|ids| !ids.is_empty())
        .map(|ids| {
            Ok(TrueComponent {
                size: ids.len(),
                mu: vmf::estimate_mu(points, ids)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(evaluate_against_components(report, &truth))
}
