//! Points, unit directions and point clouds.
//!
//! All coordinates are `f64`. Constructors validate finiteness and dimension
//! so that downstream code can index without re-checking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated deviation of a [`UnitDirection`] from unit norm.
pub const UNIT_NORM_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_finite(coords: &[f64]) -> Result<()> {
    match coords.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// A point in `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("vector must have dimension >= 1"));
        }
        check_finite(&coords)?;
        Ok(Vector(coords))
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "dimension must be >= 1");
        Vector(vec![0.0; d])
    }

    /// `e_axis` scaled by `value`.
    pub fn on_axis(d: usize, axis: usize, value: f64) -> Self {
        let mut v = Vector::zeros(d);
        v.0[axis] = value;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, a: f64) -> Vector {
        Vector(self.0.iter().map(|c| a * c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// A direction on the unit sphere `S^{d-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitDirection(Vec<f64>);

impl UnitDirection {
    /// Accepts coordinates that are already unit norm (within [`UNIT_NORM_TOL`]).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        let n = norm(&coords);
        if coords.is_empty() || (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!("not a unit vector (norm {n})")));
        }
        Ok(UnitDirection(coords))
    }

    /// The `axis`-th standard basis vector, negated when `negative`.
    pub fn axis(d: usize, axis: usize, negative: bool) -> Self {
        let mut coords = vec![0.0; d];
        coords[axis] = if negative { -1.0 } else { 1.0 };
        UnitDirection(coords)
    }

    /// Normalizes a raw coordinate buffer.
    pub fn from_raw(mut coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        let n = norm(&coords);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateDirection);
        }
        coords.iter_mut().for_each(|c| *c /= n);
        // A second pass brings the norm within a couple of ulps of one even for
        // badly scaled inputs.
        let n2 = norm(&coords);
        if (n2 - 1.0).abs() > UNIT_NORM_TOL / 4.0 {
            coords.iter_mut().for_each(|c| *c /= n2);
        }
        Ok(UnitDirection(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn neg(&self) -> UnitDirection {
        UnitDirection(self.0.iter().map(|c| -c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for UnitDirection {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitDirection::new(v)
    }
}

impl From<UnitDirection> for Vec<f64> {
    fn from(v: UnitDirection) -> Self {
        v.0
    }
}

/// `v / ‖v‖`.
pub fn normalize(v: &Vector) -> Result<UnitDirection> {
    UnitDirection::from_raw(v.as_slice().to_vec())
}

/// `n` points in `R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointCloud {
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        if data.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if data.len() % d != 0 {
            return Err(Error::DimensionMismatch { expected: d, got: data.len() % d });
        }
        check_finite(&data)?;
        let n = data.len() / d;
        Ok(PointCloud { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().ok_or(Error::EmptyCloud)?.len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        PointCloud::from_flat(data, d)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Coordinate-wise mean.
    pub fn mean(&self) -> Vector {
        let mut m = vec![0.0; self.d];
        for p in self.points() {
            m.iter_mut().zip(p).for_each(|(a, b)| *a += b);
        }
        m.iter_mut().for_each(|a| *a /= self.n as f64);
        Vector(m)
    }

    /// `max_i ‖x_i‖_∞`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<PointCloud> {
        let mut out = vec![0.0; self.data.len()];
        for (src, dst) in self.points().zip(out.chunks_exact_mut(self.d)) {
            f(src, dst);
        }
        PointCloud::from_flat(out, self.d)
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: d });
        }
        Ok(())
    }
}

/// Projections `⟨x_j, u⟩` in cloud order.
pub fn project(cloud: &PointCloud, u: &UnitDirection) -> Result<Vec<f64>> {
    cloud.check_dim(u.dim())?;
    Ok(cloud.points().map(|p| dot(p, u.as_slice())).collect())
}
