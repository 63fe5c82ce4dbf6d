//! Load Iris from CSV, apply the centering / normalization pipeline and
//! estimate k in each mode. Pass a path to use another labelled CSV
//! (label in the last column).

use sxmeans::bench::ingest::{ingest_csv, IngestOptions, LabelColumn};
use sxmeans::bench::xmeans::{xmeans_baseline, XMeansConfig};
use sxmeans::sxmeans::{estimate, fit_fixed, SxConfig};

fn main() -> sxmeans::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/iris.csv").to_string());
    let unit = ingest_csv(
        &path,
        &IngestOptions {
            center: true,
            normalize: true,
            label_column: Some(LabelColumn::Last),
            ..Default::default()
        },
    )?;
    println!("{}", serde_json::to_string(&unit.record)?);
    if unit.dropped > 0 {
        println!("dropped {} zero rows", unit.dropped);
    }
    let points = unit.point_set()?;

    let config = SxConfig::default();
    println!("SX-means:          k = {}", estimate(&points, &config)?.k);
    for kappa in [10.0, 40.0] {
        println!("fixed kappa = {kappa:>3}:  k = {}", fit_fixed(&points, kappa, &config)?.k);
    }

    let centered = ingest_csv(
        &path,
        &IngestOptions { center: true, label_column: Some(LabelColumn::Last), ..Default::default() },
    )?;
    let x = xmeans_baseline(&centered.raw()?, &XMeansConfig::default())?;
    println!("X-means (raw):     k = {}", x.k);
    Ok(())
}
