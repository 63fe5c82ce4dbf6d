//! Recover a four-component mixture on the 2-sphere and compare each
//! estimated cluster with the component that generated it.

use sxmeans::bench::evaluate::{evaluate_against_components, TrueComponent};
use sxmeans::bench::synth::{generate, SyntheticSpec};
use sxmeans::sxmeans::{estimate, SxConfig};

fn main() -> sxmeans::Result<()> {
    let spec = SyntheticSpec::four_cluster_demo(0);
    let data = generate(&spec)?;
    let report = estimate(&data.points, &SxConfig::default())?;

    println!("estimated k = {} after {} rounds ({:?})", report.k, report.rounds, report.stop);
    for (i, round) in report.trace.iter().enumerate() {
        println!("  round {i}: k {} -> {}", round.k_before, round.k_after);
    }

    let truth: Vec<TrueComponent> = spec
        .components
        .iter()
        .map(|c| TrueComponent { size: c.n, mu: c.mu.clone().expect("fixed direction") })
        .collect();
    let eval = evaluate_against_components(&report, &truth);
    println!("\n true n   est n   angle (rad)   kappa est / true");
    for m in &eval.matches {
        let est = &report.clusters[m.estimated];
        let kappa = match &est.params {
            sxmeans::model_selection::ComponentParams::Vmf(p) => p.kappa(),
            _ => f64::NAN,
        };
        println!(
            " {:>6}  {:>6}   {:>10.4}   {:>7.1} / {}",
            truth[m.truth].size,
            est.size,
            m.angular_error,
            kappa,
            spec.components[m.truth].kappa
        );
    }
    Ok(())
}
