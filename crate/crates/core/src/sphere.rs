//! Unit-sphere vector primitives: normalization, cosine similarity and
//! resultant vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|‖x‖ − 1|` accepted by [`UnitVector::new`].
pub const UNIT_TOLERANCE: f64 = 1e-9;
const ZERO_NORM: f64 = 1e-300;

/// A direction on the (d−1)-sphere embedded in R^d, d ≥ 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Wraps `coords` after checking the norm is already within
    /// [`UNIT_TOLERANCE`] of one.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let norm = norm(&coords);
        if (norm - 1.0).abs() > UNIT_TOLERANCE || !norm.is_finite() {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    /// Angle in radians between two directions.
    pub fn angle_to(&self, other: &UnitVector) -> Result<f64> {
        Ok(cosine_similarity(self, other)?.acos())
    }

    /// Standard basis vector `e_axis` in R^dim.
    pub fn axis(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: axis + 1,
            });
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        UnitVector::new(v)
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(v: UnitVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Scales `v` to unit length.
pub fn normalize(v: &[f64]) -> Result<UnitVector> {
    if v.len() < 2 {
        return Err(Error::DimensionTooSmall(v.len()));
    }
    let n = norm(v);
    if !(n > ZERO_NORM) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(UnitVector(v.iter().map(|x| x / n).collect()))
}

/// Dot product of two unit vectors, clamped to [−1, 1].
pub fn cosine_similarity(a: &UnitVector, b: &UnitVector) -> Result<f64> {
    Ok(a.dot(b)?.clamp(-1.0, 1.0))
}

/// An ordered collection of unit vectors sharing one dimension. Point ids
/// are their positions `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    points: Vec<UnitVector>,
}

impl PointSet {
    pub fn new(points: Vec<UnitVector>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptySelection)?.dim();
        for p in &points {
            check_dim(dim, p.dim())?;
        }
        Ok(PointSet { dim, points })
    }

    /// Builds a point set from raw rows, normalizing each one.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| normalize(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn get(&self, id: usize) -> &UnitVector {
        &self.points[id]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitVector> {
        self.points.iter()
    }

    /// Concatenates two point sets of equal dimension.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet> {
        check_dim(self.dim, other.dim)?;
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(PointSet {
            dim: self.dim,
            points,
        })
    }

    pub fn subset(&self, ids: &[usize]) -> Result<PointSet> {
        PointSet::new(ids.iter().map(|&i| self.points[i].clone()).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a UnitVector;
    type IntoIter = std::slice::Iter<'a, UnitVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Componentwise sum of the points selected by `ids`.
pub fn resultant(points: &PointSet, ids: &[usize]) -> Result<Vec<f64>> {
    if ids.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut sum = vec![0.0; points.dim()];
    for &i in ids {
        for (s, x) in sum.iter_mut().zip(points.get(i).as_slice()) {
            *s += x;
        }
    }
    Ok(sum)
}

/// Resultant over every point in the set.
pub fn resultant_all(points: &PointSet) -> Vec<f64> {
    let mut sum = vec![0.0; points.dim()];
    for p in points {
        for (s, x) in sum.iter_mut().zip(p.as_slice()) {
            *s += x;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn uv(c: &[f64]) -> UnitVector {
        UnitVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[3.0, 4.0]).unwrap().as_slice(), &[0.6, 0.8]);
        assert_eq!(
            normalize(&[0.0, 0.0, -5.0]).unwrap().as_slice(),
            &[0.0, 0.0, -1.0]
        );
        assert_eq!(
            normalize(&[1.0, 1.0, 1.0, 1.0]).unwrap().as_slice(),
            &[0.5; 4]
        );
    }

    #[test]
    fn normalize_rejects_zero() {
        assert!(matches!(normalize(&[0.0, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(normalize(&[1e-301, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(normalize(&[1.0]), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn unit_vector_checks_norm() {
        assert!(UnitVector::new(vec![1.0, 1e-10]).is_ok());
        assert!(matches!(
            UnitVector::new(vec![1.0, 0.1]),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn cosine_examples() {
        let x = uv(&[1.0, 0.0, 0.0]);
        assert_eq!(cosine_similarity(&x, &x).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&x, &uv(&[-1.0, 0.0, 0.0])).unwrap(), -1.0);
        assert_eq!(cosine_similarity(&x, &uv(&[0.0, 1.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            cosine_similarity(&x, &uv(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cosine_is_clamped() {
        let a = UnitVector(vec![1.0 + 5e-10, 0.0]);
        assert_eq!(cosine_similarity(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn resultant_examples() {
        let ps = PointSet::new(vec![
            uv(&[1.0, 0.0, 0.0]),
            uv(&[0.0, 1.0, 0.0]),
            uv(&[-1.0, 0.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(resultant(&ps, &[0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(resultant(&ps, &[0, 1]).unwrap(), vec![1.0, 1.0, 0.0]);
        assert_eq!(resultant(&ps, &[0, 2]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(matches!(resultant(&ps, &[]), Err(Error::EmptySelection)));
    }

    #[test]
    fn point_set_rejects_mixed_dims() {
        let r = PointSet::new(vec![uv(&[1.0, 0.0]), uv(&[1.0, 0.0, 0.0])]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    fn nonzero_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 2..8).prop_filter("nonzero", |v| norm(v) > 1e-3)
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(v in nonzero_vec()) {
            let once = normalize(&v).unwrap();
            let twice = normalize(once.as_slice()).unwrap();
            prop_assert!((norm(once.as_slice()) - 1.0).abs() <= UNIT_TOLERANCE);
            for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn cosine_is_symmetric(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
            prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
            let (a, b) = (normalize(&a).unwrap(), normalize(&b).unwrap());
            prop_assert_eq!(cosine_similarity(&a, &b).unwrap(), cosine_similarity(&b, &a).unwrap());
        }

        #[test]
        fn resultant_is_bounded_by_count(rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3).prop_filter("nonzero", |v| norm(v) > 1e-3), 1..30)) {
            let ps = PointSet::from_rows(&rows).unwrap();
            let ids: Vec<usize> = (0..ps.len()).collect();
            let r = resultant(&ps, &ids).unwrap();
            prop_assert!(norm(&r) <= ps.len() as f64 + 1e-9);
        }
    }

    #[test]
    fn serde_enforces_invariant() {
        let ok: UnitVector = serde_json::from_str("[0.6, 0.8]").unwrap();
        assert_abs_diff_eq!(ok.as_slice()[1], 0.8);
        assert!(serde_json::from_str::<UnitVector>("[1.0, 1.0]").is_err());
    }
}
