//! Synthetic data: vMF mixtures with fixed or uniformly random mean
//! directions, and isotropic Gaussian blobs in a box.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_from_seed, TAG_DATA};
use crate::sphere::{PointSet, UnitVector};
use crate::vmf::{uniform_on_sphere, VmfParams, VmfSampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub n: usize,
    /// `None` draws the direction uniformly on the sphere.
    pub mu: Option<UnitVector>,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub d: usize,
    pub components: Vec<ComponentSpec>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub points: PointSet,
    pub labels: Vec<usize>,
    /// Realized parameters, one per component.
    pub components: Vec<VmfParams>,
}

impl Synthetic {
    pub fn true_k(&self) -> usize {
        self.components.len()
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::DimensionTooSmall(self.d));
        }
        if self.components.is_empty() {
            return Err(Error::InvalidConfig("at least one component is required".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.n == 0 {
                return Err(Error::InvalidConfig(format!("component {i} has n = 0")));
            }
            if !(c.kappa >= 0.0) {
                return Err(Error::InvalidConfig(format!("component {i} has kappa < 0")));
            }
            if let Some(mu) = &c.mu {
                if mu.dim() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: self.d,
                        found: mu.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Four components on the 2-sphere: sizes 700/600/400/300 around
    /// −z, +x, −x, +z with κ = 100, 40, 60, 80.
    pub fn four_cluster_demo(seed: u64) -> Self {
        let axis = |c: [f64; 3]| Some(UnitVector::new(c.to_vec()).expect("axis"));
        SyntheticSpec {
            d: 3,
            components: vec![
                ComponentSpec { n: 700, mu: axis([0.0, 0.0, -1.0]), kappa: 100.0 },
                ComponentSpec { n: 600, mu: axis([1.0, 0.0, 0.0]), kappa: 40.0 },
                ComponentSpec { n: 400, mu: axis([-1.0, 0.0, 0.0]), kappa: 60.0 },
                ComponentSpec { n: 300, mu: axis([0.0, 0.0, 1.0]), kappa: 80.0 },
            ],
            seed,
        }
    }

    /// `k` components of `n` points each with random directions and a
    /// shared κ.
    pub fn random_mixture(d: usize, k: usize, n: usize, kappa: f64, seed: u64) -> Self {
        SyntheticSpec {
            d,
            components: (0..k).map(|_| ComponentSpec { n, mu: None, kappa }).collect(),
            seed,
        }
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<Synthetic> {
    spec.validate()?;
    let mut rng = rng_from_seed(derive_seed(spec.seed, &[TAG_DATA]));
    let components = spec
        .components
        .iter()
        .map(|c| {
            let mu = match &c.mu {
                Some(mu) => mu.clone(),
                None => uniform_on_sphere(spec.d, &mut rng),
            };
            VmfParams::new(mu, c.kappa)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: usize = spec.components.iter().map(|c| c.n).sum();
    let mut points = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (label, (c, params)) in spec.components.iter().zip(&components).enumerate() {
        let sampler = VmfSampler::new(params.clone());
        for _ in 0..c.n {
            points.push(sampler.sample(&mut rng));
            labels.push(label);
        }
    }
    Ok(Synthetic {
        points: PointSet::new(points)?,
        labels,
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobsSpec {
    pub n: usize,
    pub d: usize,
    pub centers: usize,
    pub sd: f64,
    /// Centers are uniform in `[−half_width, half_width]^d`.
    pub half_width: f64,
    pub seed: u64,
}

impl Default for BlobsSpec {
    fn default() -> Self {
        BlobsSpec {
            n: 1500,
            d: 3,
            centers: 3,
            sd: 1.0,
            half_width: 10.0,
            seed: 0,
        }
    }
}

/// Isotropic Gaussian blobs; points are split as evenly as possible
/// across centers, earlier centers taking the remainder.
pub fn blobs(spec: &BlobsSpec) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    if spec.centers == 0 || spec.n < spec.centers || spec.d == 0 || !(spec.sd > 0.0) {
        return Err(Error::InvalidConfig(format!("invalid blobs spec {spec:?}")));
    }
    let mut rng = rng_from_seed(derive_seed(spec.seed, &[TAG_DATA, 1]));
    let centers: Vec<Vec<f64>> = (0..spec.centers)
        .map(|_| {
            (0..spec.d)
                .map(|_| rng.gen_range(-spec.half_width..=spec.half_width))
                .collect()
        })
        .collect();
    let noise = Normal::new(0.0, spec.sd).expect("sd > 0");
    let mut rows = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for (c, center) in centers.iter().enumerate() {
        let count = spec.n / spec.centers + usize::from(c < spec.n % spec.centers);
        for _ in 0..count {
            rows.push(center.iter().map(|m| m + noise.sample(&mut rng)).collect());
            labels.push(c);
        }
    }
    Ok((rows, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{self, resultant};
    use crate::vmf::bessel_ratio;

    #[test]
    fn demo_sizes() {
        let s = generate(&SyntheticSpec::four_cluster_demo(1)).unwrap();
        assert_eq!(s.points.len(), 2000);
        let mut counts = [0; 4];
        for &l in &s.labels {
            counts[l] += 1;
        }
        assert_eq!(counts, [700, 600, 400, 300]);
    }

    #[test]
    fn uniform_component() {
        let spec = SyntheticSpec {
            d: 3,
            components: vec![ComponentSpec { n: 10_000, mu: None, kappa: 0.0 }],
            seed: 3,
        };
        let s = generate(&spec).unwrap();
        let ids: Vec<usize> = (0..s.points.len()).collect();
        let r = sphere::norm(&resultant(&s.points, &ids).unwrap()) / 10_000.0;
        assert!(r < 0.05);
    }

    #[test]
    fn deterministic() {
        let spec = SyntheticSpec::random_mixture(3, 4, 50, 100.0, 11);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SyntheticSpec { seed: 12, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().points, generate(&other).unwrap().points);
    }

    #[test]
    fn labels_match_components() {
        let s = generate(&SyntheticSpec::four_cluster_demo(5)).unwrap();
        for (label, params) in s.components.iter().enumerate() {
            let ids: Vec<usize> = (0..s.labels.len()).filter(|&i| s.labels[i] == label).collect();
            let r = sphere::norm(&resultant(&s.points, &ids).unwrap()) / ids.len() as f64;
            let expected = bessel_ratio(3, params.kappa()).unwrap();
            assert!((r - expected).abs() < 0.05);
        }
    }

    #[test]
    fn rejects_empty_component() {
        let mut spec = SyntheticSpec::random_mixture(3, 2, 10, 1.0, 0);
        spec.components[1].n = 0;
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn blob_layout() {
        let (rows, labels) = blobs(&BlobsSpec::default()).unwrap();
        assert_eq!(rows.len(), 1500);
        assert!(rows.iter().all(|r| r.len() == 3));
        assert_eq!(labels.iter().filter(|&&l| l == 2).count(), 500);
    }
}
