//! Estimating the number of clusters of unit-norm data.
//!
//! [`sxmeans::estimate`] grows k from a small start. Each round it refits
//! a spherical k-means partition and keeps a 2-way split of a cluster
//! whenever the split's von Mises-Fisher BIC beats the unsplit one.
//! [`bench`](mod@bench) holds synthetic data, a Euclidean X-means baseline, CSV
//! ingestion and the benchmark suites; [`cli`] backs the `sxmeans` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod model_selection;
pub mod search;
pub mod seed;
pub mod skmeans;
pub mod sphere;
pub mod sxmeans;
pub mod vmf;

pub use error::{Error, Result};
