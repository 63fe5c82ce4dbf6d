//! Repeated-seed benchmarks: run one estimator `runs` times and aggregate
//! the estimated k.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::synth::{blobs, generate, BlobsSpec, SyntheticSpec};
use crate::bench::xmeans::{raw_from_points, xmeans_baseline, RawPoints, XMeansConfig};
use crate::error::{Error, Result};
use crate::search::LoopLimits;
use crate::sphere::PointSet;
use crate::sxmeans::{estimate, EstimationReport, Method, SxConfig};

/// Where the points for each run come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// Random vMF mixture, redrawn every run with the run seed.
    Synthetic { d: usize, k: usize, n_per_cluster: usize, kappa: f64 },
    /// Fixed data; only the estimator seed varies. `raw` feeds the
    /// X-means baseline, which never sees normalized rows.
    Fixed { name: String, unit: PointSet, raw: RawPoints },
}

impl DataSource {
    /// Points drawn once from a Gaussian blobs layout.
    pub fn blobs(spec: &BlobsSpec) -> Result<Self> {
        let (rows, _) = blobs(spec)?;
        let mean: Vec<f64> = (0..spec.d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64)
            .collect();
        let centered: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().zip(&mean).map(|(v, m)| v - m).collect())
            .collect();
        Ok(DataSource::Fixed {
            name: "blobs".into(),
            unit: PointSet::from_rows(&centered)?,
            raw: RawPoints::new(centered)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            DataSource::Synthetic { d, k, n_per_cluster, kappa } => {
                format!("synthetic(d={d},k={k},n={n_per_cluster},kappa={kappa})")
            }
            DataSource::Fixed { name, .. } => name.clone(),
        }
    }

    fn data(&self, seed: u64) -> Result<(PointSet, Option<RawPoints>)> {
        match self {
            DataSource::Synthetic { d, k, n_per_cluster, kappa } => {
                let spec = SyntheticSpec::random_mixture(*d, *k, *n_per_cluster, *kappa, seed);
                Ok((generate(&spec)?.points, None))
            }
            DataSource::Fixed { unit, raw, .. } => Ok((unit.clone(), Some(raw.clone()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rounds: Option<usize>,
    /// Report invariant check; `None` for failed runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    #[serde(flatten)]
    pub method: Method,
    pub source: String,
    pub true_k: usize,
    pub runs: usize,
    /// Over successful runs; `None` when every run failed.
    pub mean_k: Option<f64>,
    /// Population SD.
    pub sd_k: Option<f64>,
    pub per_run: Vec<RunRecord>,
}

impl BenchResult {
    pub fn successful_ks(&self) -> Vec<usize> {
        self.per_run.iter().filter_map(|r| r.k).collect()
    }

    pub fn failures(&self) -> usize {
        self.per_run.iter().filter(|r| r.error.is_some()).count()
    }

    /// All successful reports passed `EstimationReport::validate`.
    pub fn all_valid(&self) -> bool {
        self.per_run.iter().all(|r| r.valid != Some(false))
    }

    /// `"X.XXX (Y.YYY)"`, or `"failed"`.
    pub fn cell(&self) -> String {
        match (self.mean_k, self.sd_k) {
            (Some(m), Some(s)) => format_cell(m, s),
            _ => "failed".into(),
        }
    }
}

pub fn format_cell(mean: f64, sd: f64) -> String {
    format!("{mean:.3} ({sd:.3})")
}

/// Mean and population SD.
pub fn mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// One estimation with the given method on the given data.
pub fn run_method(
    method: Method,
    unit: &PointSet,
    raw: Option<&RawPoints>,
    limits: LoopLimits,
    seed: u64,
) -> Result<EstimationReport> {
    match method {
        Method::Sx => estimate(unit, &SxConfig { limits, seed, ..SxConfig::default() }),
        Method::Fixed { kappa } => estimate(
            unit,
            &SxConfig { limits, seed, ..SxConfig::default() }.with_fixed_kappa(kappa),
        ),
        Method::Xmeans => {
            let config = XMeansConfig { limits, seed, ..XMeansConfig::default() };
            match raw {
                Some(raw) => xmeans_baseline(raw, &config),
                None => xmeans_baseline(&raw_from_points(unit), &config),
            }
        }
    }
}

/// Runs seeds `base_seed..base_seed + runs`; failed runs are recorded,
/// not propagated.
pub fn run_benchmark(
    method: Method,
    source: &DataSource,
    true_k: usize,
    runs: usize,
    base_seed: u64,
    limits: LoopLimits,
) -> Result<BenchResult> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be at least 1".into()));
    }
    let per_run: Vec<RunRecord> = (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let outcome = source
                .data(seed)
                .and_then(|(unit, raw)| run_method(method, &unit, raw.as_ref(), limits, seed));
            match outcome {
                Ok(report) => RunRecord {
                    seed,
                    k: Some(report.k),
                    rounds: Some(report.rounds),
                    valid: Some(report.validate().is_ok()),
                    error: None,
                },
                Err(e) => RunRecord { seed, k: None, rounds: None, valid: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let ks: Vec<f64> = per_run.iter().filter_map(|r| r.k.map(|k| k as f64)).collect();
    let stats = mean_sd(&ks);
    Ok(BenchResult {
        method,
        source: source.describe(),
        true_k,
        runs,
        mean_k: stats.map(|s| s.0),
        sd_k: stats.map(|s| s.1),
        per_run,
    })
}

/// One CSV row per run: method, source, true_k, seed, k, rounds, error.
pub fn write_runs_csv<W: Write>(out: W, results: &[BenchResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "source", "true_k", "seed", "k", "rounds", "error"])?;
    for r in results {
        for run in &r.per_run {
            w.write_record([
                r.method.slug(),
                r.source.clone(),
                r.true_k.to_string(),
                run.seed.to_string(),
                run.k.map(|k| k.to_string()).unwrap_or_default(),
                run.rounds.map(|k| k.to_string()).unwrap_or_default(),
                run.error.clone().unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(k: usize) -> DataSource {
        DataSource::Synthetic { d: 3, k, n_per_cluster: 200, kappa: 100.0 }
    }

    #[test]
    fn population_sd() {
        let (m, s) = mean_sd(&[2.0, 4.0]).unwrap();
        assert_eq!((m, s), (3.0, 1.0));
        assert_eq!(mean_sd(&[5.0]).unwrap().1, 0.0);
        assert!(mean_sd(&[]).is_none());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_cell(3.05, 0.2179), "3.050 (0.218)");
        assert_eq!(format_cell(2.0, 0.0), "2.000 (0.000)");
    }

    #[test]
    fn single_run_has_zero_sd() {
        let r = run_benchmark(Method::Sx, &synthetic(2), 2, 1, 5, LoopLimits::default()).unwrap();
        assert_eq!(r.sd_k, Some(0.0));
        assert_eq!(r.per_run.len(), 1);
    }

    #[test]
    fn reproducible_and_recomputable() {
        let a = run_benchmark(Method::Sx, &synthetic(3), 3, 4, 11, LoopLimits::default()).unwrap();
        let b = run_benchmark(Method::Sx, &synthetic(3), 3, 4, 11, LoopLimits::default()).unwrap();
        assert_eq!(a, b);
        let seeds: Vec<u64> = a.per_run.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![11, 12, 13, 14]);
        let ks: Vec<f64> = a.successful_ks().iter().map(|&k| k as f64).collect();
        let (m, s) = mean_sd(&ks).unwrap();
        assert!((a.mean_k.unwrap() - m).abs() < 1e-9 && (a.sd_k.unwrap() - s).abs() < 1e-9);
        assert!(a.all_valid());
    }

    #[test]
    fn failures_are_recorded() {
        let unit = PointSet::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let raw = RawPoints::new(vec![vec![1.0, 0.0]]).unwrap();
        let src = DataSource::Fixed { name: "one".into(), unit, raw };
        let r = run_benchmark(Method::Sx, &src, 1, 3, 0, LoopLimits::default()).unwrap();
        assert_eq!(r.failures(), 3);
        assert_eq!(r.mean_k, None);
        assert_eq!(r.cell(), "failed");
        assert!(run_benchmark(Method::Sx, &src, 1, 0, 0, LoopLimits::default()).is_err());
    }

    #[test]
    fn csv_has_one_row_per_run() {
        let r = run_benchmark(Method::Sx, &synthetic(2), 2, 3, 0, LoopLimits::default()).unwrap();
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("method,source,true_k,seed,k,rounds,error"));
    }

    #[test]
    fn json_uses_flat_method_tag() {
        let r = run_benchmark(Method::Fixed { kappa: 10.0 }, &synthetic(2), 2, 1, 0, LoopLimits::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "fixed");
        assert_eq!(v["kappa"], 10.0);
        let back: BenchResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
