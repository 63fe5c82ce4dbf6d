//! vMF sampling: Wood's rejection scheme for the cosine `w = μᵀx`, then a
//! uniformly random tangent direction orthogonal to μ.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use super::VmfParams;
use crate::error::Result;
use crate::sphere::{self, PointSet, UnitVector};

/// Uniform point on the sphere in R^d (normalized standard Gaussian).
pub fn uniform_on_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitVector {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = sphere::normalize(&g) {
            if sphere::norm(&g) > 1e-12 {
                return u;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct VmfSampler {
    params: VmfParams,
    b: f64,
    x0: f64,
    c: f64,
    beta: Option<Beta<f64>>,
}

impl VmfSampler {
    pub fn new(params: VmfParams) -> Self {
        let d = params.dim() as f64;
        let kappa = params.kappa();
        let m1 = d - 1.0;
        let b = m1 / (2.0 * kappa + (4.0 * kappa * kappa + m1 * m1).sqrt());
        let x0 = (1.0 - b) / (1.0 + b);
        let c = kappa * x0 + m1 * (1.0 - x0 * x0).ln();
        let beta = (kappa > 0.0).then(|| Beta::new(m1 / 2.0, m1 / 2.0).expect("d >= 2"));
        VmfSampler {
            params,
            b,
            x0,
            c,
            beta,
        }
    }

    fn sample_cosine<R: Rng + ?Sized>(&self, beta: &Beta<f64>, rng: &mut R) -> f64 {
        let m1 = self.params.dim() as f64 - 1.0;
        let kappa = self.params.kappa();
        loop {
            let z: f64 = beta.sample(rng);
            let w = (1.0 - (1.0 + self.b) * z) / (1.0 - (1.0 - self.b) * z);
            let u: f64 = rng.gen();
            if kappa * w + m1 * (1.0 - self.x0 * w).ln() - self.c >= u.ln() {
                return w.clamp(-1.0, 1.0);
            }
        }
    }
}

impl Distribution<UnitVector> for VmfSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVector {
        let d = self.params.dim();
        let Some(beta) = &self.beta else {
            return uniform_on_sphere(d, rng);
        };
        let w = self.sample_cosine(beta, rng);
        let mu = self.params.mu().as_slice();
        let tangent = loop {
            let mut g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let proj = sphere::dot(&g, mu);
            for (gi, mi) in g.iter_mut().zip(mu) {
                *gi -= proj * mi;
            }
            if sphere::norm(&g) > 1e-12 {
                break sphere::normalize(&g).expect("nonzero tangent");
            }
        };
        let s = (1.0 - w * w).max(0.0).sqrt();
        let x: Vec<f64> = mu
            .iter()
            .zip(tangent.as_slice())
            .map(|(m, t)| w * m + s * t)
            .collect();
        // renormalize to absorb rounding in w·μ + s·t
        sphere::normalize(&x).expect("sample is nonzero")
    }
}

/// `n` independent draws from `params`.
pub fn sample<R: Rng + ?Sized>(params: &VmfParams, n: usize, rng: &mut R) -> Result<PointSet> {
    let sampler = VmfSampler::new(params.clone());
    PointSet::new((0..n).map(|_| sampler.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use crate::sphere::resultant_all;
    use crate::vmf::{estimate_kappa, estimate_mu};

    fn r_bar(ps: &PointSet) -> f64 {
        sphere::norm(&resultant_all(ps)) / ps.len() as f64
    }

    fn params(axis: usize, kappa: f64) -> VmfParams {
        VmfParams::new(UnitVector::axis(3, axis).unwrap(), kappa).unwrap()
    }

    #[test]
    fn zero_kappa_is_uniform() {
        let ps = sample(&params(2, 0.0), 10_000, &mut rng_from_seed(1)).unwrap();
        assert!(r_bar(&ps) < 0.05);
    }

    #[test]
    fn concentration_matches_langevin() {
        let ps = sample(&params(2, 100.0), 10_000, &mut rng_from_seed(2)).unwrap();
        let expected = 1.0 / 100f64.tanh() - 0.01;
        assert!((r_bar(&ps) - expected).abs() < 0.01);
        for p in &ps {
            assert!((sphere::norm(p.as_slice()) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn mean_direction_is_consistent() {
        let truth = params(0, 50.0);
        let ps = sample(&truth, 10_000, &mut rng_from_seed(3)).unwrap();
        let ids: Vec<usize> = (0..ps.len()).collect();
        let mu = estimate_mu(&ps, &ids).unwrap();
        assert!(mu.angle_to(truth.mu()).unwrap() < 0.03);
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = sample(&params(1, 7.0), 100, &mut rng_from_seed(9)).unwrap();
        let b = sample(&params(1, 7.0), 100, &mut rng_from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round_trip_recovers_parameters() {
        for (seed, &kappa) in [40.0, 100.0].iter().enumerate() {
            let truth = params(2, kappa);
            let ps = sample(&truth, 5000, &mut rng_from_seed(seed as u64 + 20)).unwrap();
            let ids: Vec<usize> = (0..ps.len()).collect();
            let mu = estimate_mu(&ps, &ids).unwrap();
            assert!(mu.angle_to(truth.mu()).unwrap() < 0.05);
            let k = estimate_kappa(r_bar(&ps), 3);
            assert!((k - kappa).abs() / kappa < 0.25, "kappa {kappa} -> {k}");
        }
    }

    #[test]
    fn works_in_other_dimensions() {
        for d in [2usize, 5, 50] {
            let p = VmfParams::new(UnitVector::axis(d, 0).unwrap(), 20.0).unwrap();
            let ps = sample(&p, 4000, &mut rng_from_seed(d as u64)).unwrap();
            let expected = crate::vmf::bessel_ratio(d, 20.0).unwrap();
            assert!((r_bar(&ps) - expected).abs() < 0.02, "d={d}");
        }
    }
}
