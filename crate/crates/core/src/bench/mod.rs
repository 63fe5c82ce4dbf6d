//! Experiment harness: synthetic data, the Gaussian X-means baseline,
//! CSV ingestion, repeated-seed benchmarks and table reporting.

pub mod evaluate;
pub mod ingest;
pub mod run;
pub mod suites;
pub mod synth;
pub mod xmeans;

pub use evaluate::{evaluate_against_components, evaluate_against_labels, Evaluation, TrueComponent};
pub use ingest::{ingest_csv, Dataset, DatasetRecord, IngestOptions, LabelColumn};
pub use run::{format_cell, run_benchmark, BenchResult, DataSource};
pub use synth::{blobs, generate, BlobsSpec, ComponentSpec, Synthetic, SyntheticSpec};
pub use xmeans::{xmeans_baseline, RawPoints, XMeansConfig};
