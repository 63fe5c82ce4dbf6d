//! The naive normalizer C_d(κ) under- or overflows in f64 long before
//! d = 856. Both log-domain evaluations stay finite there, so BIC scores
//! remain usable.

use sxmeans::model_selection::{pre_bic, BicOptions};
use sxmeans::seed::rng_from_seed;
use sxmeans::sphere::UnitVector;
use sxmeans::vmf::{self, log_norm_const, NormMode, VmfParams};

fn main() -> sxmeans::Result<()> {
    let (d, kappa) = (856, 500.0);
    let exact = log_norm_const(d, kappa, NormMode::Exact)?;
    let approx = log_norm_const(d, kappa, NormMode::Approx)?;
    println!("d = {d}, kappa = {kappa}");
    println!("log C exact  = {exact:.4}");
    println!("log C approx = {approx:.4}");
    println!("exp(log C)   = {:e}  (as a raw f64)", exact.exp());

    let params = VmfParams::new(UnitVector::axis(d, 0)?, kappa)?;
    let points = vmf::sample(&params, 300, &mut rng_from_seed(1))?;
    let ids: Vec<usize> = (0..points.len()).collect();
    let fit = pre_bic(&points, &ids, &BicOptions::default())?;
    println!(
        "300 samples: kappa_hat = {:.1}, BIC = {:.2}",
        fit.params.kappa(),
        fit.score.value
    );
    Ok(())
}
