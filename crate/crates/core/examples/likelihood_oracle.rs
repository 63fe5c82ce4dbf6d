//! Exact vs approximated vMF log normalizers, and the mean resultant
//! length A_d(κ) against the closed-form inverse used for κ.

use sxmeans::vmf::{bessel_ratio, estimate_kappa, log_norm_const, NormMode};

fn main() -> sxmeans::Result<()> {
    println!("   d     kappa        exact       approx       diff");
    for d in [2, 3, 5, 20, 100] {
        for kappa in [1.0, 10.0, 100.0, 1000.0] {
            let exact = log_norm_const(d, kappa, NormMode::Exact)?;
            let approx = log_norm_const(d, kappa, NormMode::Approx)?;
            println!("{d:>4} {kappa:>9} {exact:>12.5} {approx:>12.5} {:>10.2e}", exact - approx);
        }
    }

    println!("\n   d   r_bar   kappa_hat   A_d(kappa_hat)");
    for d in [3, 10] {
        for r in [0.1, 0.5, 0.9, 0.99] {
            let kappa = estimate_kappa(r, d);
            println!("{d:>4} {r:>7} {kappa:>11.4} {:>16.6}", bessel_ratio(d, kappa)?);
        }
    }
    Ok(())
}
