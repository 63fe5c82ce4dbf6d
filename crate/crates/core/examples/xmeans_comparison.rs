//! SX-means against the Euclidean X-means baseline on directional data.
//! The Gaussian BIC sees each tight cap as a very low-variance blob and
//! keeps splitting it.

use sxmeans::bench::synth::{generate, SyntheticSpec};
use sxmeans::bench::xmeans::{raw_from_points, xmeans_baseline, XMeansConfig};
use sxmeans::search::LoopLimits;
use sxmeans::sxmeans::{estimate, SxConfig};

fn main() -> sxmeans::Result<()> {
    for (k, seed) in [(3, 1), (5, 2), (5, 3)] {
        let data = generate(&SyntheticSpec::random_mixture(3, k, 500, 100.0, seed))?;
        let sx = estimate(&data.points, &SxConfig::default().with_seed(seed))?;
        let config = XMeansConfig {
            limits: LoopLimits { max_k: Some(60), ..LoopLimits::default() },
            ..XMeansConfig::default().with_seed(seed)
        };
        let x = xmeans_baseline(&raw_from_points(&data.points), &config)?;
        println!(
            "true k = {k}: SX-means {} | X-means {} (stopped: {:?})",
            sx.k, x.k, x.stop
        );
    }
    Ok(())
}
