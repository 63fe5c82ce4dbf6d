//! Named benchmark suites and their Markdown tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::ingest::{ingest_csv, IngestOptions, LabelColumn};
use crate::bench::run::{run_benchmark, BenchResult, DataSource};
use crate::bench::synth::BlobsSpec;
use crate::error::Result;
use crate::search::LoopLimits;
use crate::sxmeans::Method;

/// The four estimator columns, in table order.
pub fn standard_methods() -> Vec<Method> {
    vec![
        Method::Sx,
        Method::Fixed { kappa: 10.0 },
        Method::Fixed { kappa: 40.0 },
        Method::Xmeans,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub runs: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    pub limits: LoopLimits,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            runs: 20,
            base_seed: 0,
            methods: standard_methods(),
            limits: LoopLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Cell {
    Done { result: BenchResult },
    Missing { reason: String },
}

impl Cell {
    pub fn text(&self) -> String {
        match self {
            Cell::Done { result } => result.cell(),
            Cell::Missing { .. } => "missing".into(),
        }
    }

    pub fn result(&self) -> Option<&BenchResult> {
        match self {
            Cell::Done { result } => Some(result),
            Cell::Missing { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Dataset name; `None` for synthetic rows keyed by true k alone.
    pub dataset: Option<String>,
    pub true_k: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub methods: Vec<Method>,
    pub rows: Vec<Row>,
}

impl SuiteReport {
    pub fn results(&self) -> impl Iterator<Item = &BenchResult> {
        self.rows.iter().flat_map(|r| r.cells.iter().filter_map(Cell::result))
    }

    /// Rebuilds a table from loose results, keyed by (source, true_k) in
    /// first-seen order. Absent combinations become missing cells.
    pub fn from_results(suite: &str, results: &[BenchResult]) -> Self {
        let mut methods: Vec<Method> = Vec::new();
        let mut keys: Vec<(String, usize)> = Vec::new();
        for r in results {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
            let key = (r.source.clone(), r.true_k);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        methods.sort_by(|a, b| method_rank(a).total_cmp(&method_rank(b)));
        let rows = keys
            .into_iter()
            .map(|(source, true_k)| Row {
                dataset: (!source.starts_with("synthetic(")).then(|| source.clone()),
                true_k,
                cells: methods
                    .iter()
                    .map(|m| {
                        results
                            .iter()
                            .find(|r| r.method == *m && r.source == source && r.true_k == true_k)
                            .map(|r| Cell::Done { result: r.clone() })
                            .unwrap_or(Cell::Missing { reason: "no result".into() })
                    })
                    .collect(),
            })
            .collect();
        SuiteReport { suite: suite.to_string(), methods, rows }
    }

    pub fn to_markdown(&self) -> String {
        let with_names = self.rows.iter().any(|r| r.dataset.is_some());
        let mut head = Vec::new();
        if with_names {
            head.push("Dataset".to_string());
        }
        head.push("True k".to_string());
        head.extend(self.methods.iter().map(Method::label));
        let mut out = format!("| {} |\n|{}\n", head.join(" | "), "---|".repeat(head.len()));
        for row in &self.rows {
            let mut cells = Vec::new();
            if with_names {
                cells.push(row.dataset.clone().unwrap_or_default());
            }
            cells.push(row.true_k.to_string());
            cells.extend(row.cells.iter().map(Cell::text));
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        out
    }
}

fn method_rank(m: &Method) -> f64 {
    match m {
        Method::Sx => -1.0,
        Method::Fixed { kappa } => *kappa,
        Method::Xmeans => f64::INFINITY,
    }
}

fn run_row(source: &DataSource, dataset: Option<String>, true_k: usize, opts: &SuiteOptions) -> Result<Row> {
    let cells = opts
        .methods
        .iter()
        .map(|&m| {
            run_benchmark(m, source, true_k, opts.runs, opts.base_seed, opts.limits)
                .map(|result| Cell::Done { result })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Row { dataset, true_k, cells })
}

/// Random vMF mixtures on the 2-sphere, one row per true k.
pub fn synthetic_suite(
    name: &str,
    true_ks: &[usize],
    n_per_cluster: usize,
    kappa: f64,
    d: usize,
    opts: &SuiteOptions,
) -> Result<SuiteReport> {
    let rows = true_ks
        .iter()
        .map(|&k| {
            let source = DataSource::Synthetic { d, k, n_per_cluster, kappa };
            run_row(&source, None, k, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { suite: name.to_string(), methods: opts.methods.clone(), rows })
}

/// True k = 2..=12, 500 points per cluster, κ = 100, d = 3.
pub fn table3(opts: &SuiteOptions) -> Result<SuiteReport> {
    let ks: Vec<usize> = (2..=12).collect();
    synthetic_suite("table3", &ks, 500, 100.0, 3, opts)
}

/// Real-data rows with their reference cluster counts. Files are looked up
/// as `<name>.csv` with the label in the last column.
pub const TABLE5_DATASETS: [(&str, usize); 6] =
    [("iris", 3), ("wine", 3), ("ecoli", 8), ("yeast", 10), ("mnist", 10), ("cnae9", 9)];

/// Generated blobs plus whichever dataset files exist under `datasets_dir`.
/// Every source is centered; the vMF methods also get normalized rows.
pub fn table5(datasets_dir: Option<&Path>, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    let blob_spec = BlobsSpec { seed: opts.base_seed, ..BlobsSpec::default() };
    rows.push(run_row(&DataSource::blobs(&blob_spec)?, Some("blobs".into()), blob_spec.centers, opts)?);
    for (name, true_k) in TABLE5_DATASETS {
        let missing = |reason: String| Row {
            dataset: Some(name.to_string()),
            true_k,
            cells: opts.methods.iter().map(|_| Cell::Missing { reason: reason.clone() }).collect(),
        };
        let Some(dir) = datasets_dir else {
            rows.push(missing("no datasets directory".into()));
            continue;
        };
        let path = dir.join(format!("{name}.csv"));
        if !path.exists() {
            rows.push(missing(format!("{} not found", path.display())));
            continue;
        }
        match load_dataset(&path) {
            Ok(source) => rows.push(run_row(&source, Some(name.to_string()), true_k, opts)?),
            Err(e) => rows.push(missing(e.to_string())),
        }
    }
    Ok(SuiteReport { suite: "table5".into(), methods: opts.methods.clone(), rows })
}

/// Centered rows for X-means and centered, normalized rows for the rest.
pub fn load_dataset(path: &Path) -> Result<DataSource> {
    let base = IngestOptions { center: true, label_column: Some(LabelColumn::Last), ..Default::default() };
    let raw = ingest_csv(path, &base)?;
    let unit = ingest_csv(path, &IngestOptions { normalize: true, ..base })?;
    Ok(DataSource::Fixed {
        name: raw.record.name.clone(),
        unit: unit.point_set()?,
        raw: raw.raw()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SuiteOptions {
        SuiteOptions { runs: 1, methods: vec![Method::Sx, Method::Fixed { kappa: 10.0 }], ..Default::default() }
    }

    #[test]
    fn markdown_layout() {
        let rep = synthetic_suite("t", &[2, 3], 100, 100.0, 3, &tiny()).unwrap();
        let md = rep.to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "| True k | SX-means | fixed (κ = 10) |");
        assert!(lines[2].starts_with("| 2 | "));
        for (row, line) in rep.rows.iter().zip(&lines[2..]) {
            for cell in &row.cells {
                assert!(line.contains(&cell.text()));
                assert!(cell.text().ends_with("(0.000)"));
            }
        }
    }

    #[test]
    fn rebuild_from_results() {
        let rep = synthetic_suite("t", &[2], 100, 100.0, 3, &tiny()).unwrap();
        let results: Vec<BenchResult> = rep.results().cloned().collect();
        let again = SuiteReport::from_results("t", &results);
        assert_eq!(again.to_markdown(), rep.to_markdown());
    }

    #[test]
    fn missing_datasets_marked() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SuiteOptions { runs: 1, methods: vec![Method::Fixed { kappa: 10.0 }], ..Default::default() };
        let rep = table5(Some(dir.path()), &opts).unwrap();
        assert_eq!(rep.rows.len(), 7);
        assert!(rep.rows[0].cells[0].result().is_some());
        assert!(rep.rows[1..].iter().all(|r| r.cells[0].text() == "missing"));
        assert!(rep.to_markdown().contains("| iris | 3 | missing |"));
    }
}
