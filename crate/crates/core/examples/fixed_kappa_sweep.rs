//! Hold κ fixed at several values on the same six-cluster data. Small κ
//! makes every cluster look diffuse, so fewer splits pay for themselves.

use sxmeans::bench::synth::{generate, SyntheticSpec};
use sxmeans::sxmeans::{estimate, fit_fixed, SxConfig};

fn main() -> sxmeans::Result<()> {
    let data = generate(&SyntheticSpec::random_mixture(3, 6, 500, 100.0, 21))?;
    let config = SxConfig::default().with_seed(21);
    println!("true k = 6, kappa = 100");
    println!("free kappa: k = {}", estimate(&data.points, &config)?.k);
    for kappa in [2.0, 5.0, 10.0, 20.0, 40.0, 100.0, 400.0] {
        let report = fit_fixed(&data.points, kappa, &config)?;
        println!("kappa = {kappa:>5}: k = {}", report.k);
    }
    Ok(())
}
