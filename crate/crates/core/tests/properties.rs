use proptest::prelude::*;

use sxmeans::bench::ingest::{ingest_reader, IngestOptions};
use sxmeans::bench::synth::{generate, SyntheticSpec};
use sxmeans::bench::xmeans::{raw_from_points, xmeans_baseline, XMeansConfig};
use sxmeans::model_selection::{
    log_likelihood_single, log_likelihood_split, post_bic, pre_bic, BicOptions, BicScore,
};
use sxmeans::skmeans::{self, Init, SkMeansConfig};
use sxmeans::sphere::PointSet;
use sxmeans::sxmeans::{estimate, SxConfig};
use sxmeans::vmf::{self, bessel_ratio};

fn mixture(d: usize, k: usize, n: usize, kappa: f64, seed: u64) -> PointSet {
    generate(&SyntheticSpec::random_mixture(d, k, n, kappa, seed)).unwrap().points
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn skmeans_commutes_with_permutation(seed in 0u64..1000, k in 1usize..5, shift in 1usize..50) {
        let pts = mixture(3, 3, 40, 30.0, seed);
        let base = skmeans::run(&pts, &SkMeansConfig::new(k, seed)).unwrap();
        let n = pts.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let shuffled = pts.subset(&perm).unwrap();
        let cfg = SkMeansConfig::new(k, seed).with_init(Init::Given(base.centroids.clone()));
        let again = skmeans::run(&shuffled, &cfg).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            prop_assert_eq!(again.assignment[i], base.assignment[p]);
        }
        prop_assert!((again.objective - base.objective).abs() < 1e-9);
    }

    #[test]
    fn skmeans_objective_never_decreases(seed in 0u64..1000, k in 1usize..6, kappa in 1.0f64..200.0) {
        let pts = mixture(4, 3, 30, kappa, seed);
        let c = skmeans::run(&pts, &SkMeansConfig::new(k, seed)).unwrap();
        for w in c.objective_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        for mu in &c.centroids {
            let norm: f64 = mu.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bic_and_split_identities(seed in 0u64..1000, d in 2usize..8, kappa in 5.0f64..300.0) {
        let pts = mixture(d, 2, 25, kappa, seed);
        let all: Vec<usize> = (0..pts.len()).collect();
        let opts = BicOptions::default();
        let single = pre_bic(&pts, &all, &opts).unwrap();
        prop_assert!((single.score.value - single.score.recomputed()).abs() < 1e-9);

        let split = post_bic(&pts, &all, seed, &opts).unwrap();
        let s = &split.score;
        prop_assert!((s.value - s.recomputed()).abs() < 1e-9);
        let expected = s.log_likelihood - 0.5 * s.param_count as f64 * (s.n as f64).ln();
        prop_assert!((s.value - expected).abs() < 1e-9);

        let [a, b] = &split.members;
        let [pa, pb] = &split.params;
        let joint = log_likelihood_split(&pts, a, pa, b, pb).unwrap();
        let n = pts.len() as f64;
        let parts = log_likelihood_single(&pts, a, pa).unwrap()
            + log_likelihood_single(&pts, b, pb).unwrap()
            + a.len() as f64 * (a.len() as f64 / n).ln()
            + b.len() as f64 * (b.len() as f64 / n).ln();
        prop_assert!((joint - parts).abs() < 1e-9 * joint.abs().max(1.0));
        prop_assert!((joint - s.log_likelihood).abs() < 1e-9 * joint.abs().max(1.0));
    }

    #[test]
    fn kappa_inverts_ratio(d in 2usize..12, r in 0.05f64..0.95) {
        let kappa = vmf::estimate_kappa(r, d);
        prop_assert!((bessel_ratio(d, kappa).unwrap() - r).abs() <= 0.05);
    }

    #[test]
    fn reports_satisfy_invariants(seed in 0u64..200, k in 1usize..5, initial_k in 1usize..4) {
        let pts = mixture(3, k, 60, 80.0, seed);
        let rep = estimate(&pts, &SxConfig::default().with_seed(seed).with_initial_k(initial_k)).unwrap();
        prop_assert!(rep.validate().is_ok(), "{:?}", rep.validate());
        prop_assert!(rep.k >= initial_k);
        let raw = raw_from_points(&pts);
        let rep = xmeans_baseline(&raw, &XMeansConfig::default().with_seed(seed).with_initial_k(initial_k)).unwrap();
        prop_assert!(rep.validate().is_ok(), "{:?}", rep.validate());
    }

    #[test]
    fn identity_ingestion(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..30)) {
        let text: String = rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
            .collect();
        let d = ingest_reader("p", text.as_bytes(), &IngestOptions::default()).unwrap();
        prop_assert_eq!(d.rows, rows);
    }
}

#[test]
fn bic_score_formula() {
    let s = BicScore::new(-120.5, 3, 50);
    assert!((s.value - (-120.5 - 1.5 * 50f64.ln())).abs() < 1e-12);
}
