//! Finite product probability spaces and tables of function values on them.
//!
//! Points of a [`ProductSpace`] are addressed row-major over coordinate
//! indices: coordinate 0 varies slowest, the last coordinate fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of points a product space may enumerate.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A single value a coordinate can take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Point {
    fn is_finite(&self) -> bool {
        match self {
            Point::Scalar(x) => x.is_finite(),
            Point::Vector(v) => v.iter().all(|x| x.is_finite()),
        }
    }

    /// The scalar value, or `None` for vector points.
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Point::Scalar(x) => Some(*x),
            Point::Vector(_) => None,
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::Scalar(x)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Vector(v)
    }
}

/// The law of one coordinate: a finite list of distinct points with
/// probability weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinateSpace {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl CoordinateSpace {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("coordinate has no points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite point {p:?}")));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::Domain(format!("duplicate point {p:?}")));
            }
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Domain(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    /// Equal weights over the given points.
    pub fn uniform<P: Into<Point>>(points: impl IntoIterator<Item = P>) -> Result<Self> {
        let points: Vec<Point> = points.into_iter().map(Into::into).collect();
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<'de> Deserialize<'de> for CoordinateSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            points: Vec<Point>,
            weights: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        CoordinateSpace::new(raw.points, raw.weights).map_err(serde::de::Error::custom)
    }
}

/// An ordered product of coordinate spaces carrying the product measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    coordinates: Vec<CoordinateSpace>,
    strides: Vec<usize>,
    total: usize,
}

impl ProductSpace {
    pub fn new(coordinates: Vec<CoordinateSpace>) -> Result<Self> {
        Self::with_cap(coordinates, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(coordinates: Vec<CoordinateSpace>, cap: usize) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::Domain(
                "product space needs at least one coordinate".into(),
            ));
        }
        Self::build(coordinates, cap)
    }

    fn build(coordinates: Vec<CoordinateSpace>, cap: usize) -> Result<Self> {
        let requested = coordinates
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
        if requested > cap as u128 {
            return Err(Error::Capacity {
                what: "product space",
                requested,
                cap,
            });
        }
        let mut strides = vec![1usize; coordinates.len()];
        for i in (0..coordinates.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * coordinates[i + 1].len();
        }
        Ok(Self {
            coordinates,
            strides,
            total: requested as usize,
        })
    }

    /// Number of coordinates.
    pub fn arity(&self) -> usize {
        self.coordinates.len()
    }

    /// Number of points in the space.
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn coordinates(&self) -> &[CoordinateSpace] {
        &self.coordinates
    }

    pub fn coordinate(&self, axis: usize) -> &CoordinateSpace {
        &self.coordinates[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.arity());
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Multi-index of a flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.arity());
        for s in &self.strides {
            out.push(flat / s);
            flat %= s;
        }
        out
    }

    /// Position of a flat index along one axis.
    pub fn axis_position(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.coordinates[axis].len()
    }

    /// Flat index of the point with position 0 along `axis` whose other
    /// coordinates match the `reduced`-th point of `self.without(axis)`.
    pub fn fiber_base(&self, axis: usize, reduced: usize) -> usize {
        let stride = self.strides[axis];
        let size = self.coordinates[axis].len();
        (reduced / stride) * size * stride + reduced % stride
    }

    /// Product-measure weight of every point, in flat order.
    pub fn point_weights(&self) -> Vec<f64> {
        let mut weights = vec![1.0; self.total];
        for (axis, coord) in self.coordinates.iter().enumerate() {
            let stride = self.strides[axis];
            let size = coord.len();
            for (flat, w) in weights.iter_mut().enumerate() {
                *w *= coord.weights()[(flat / stride) % size];
            }
        }
        weights
    }

    /// The space with coordinate `axis` removed. Removing the only
    /// coordinate yields the one-point space.
    pub fn without(&self, axis: usize) -> ProductSpace {
        let mut coords = self.coordinates.clone();
        coords.remove(axis);
        Self::build(coords, usize::MAX).expect("a sub-space of a capped space fits")
    }

    /// Checks that two spaces are identical, returning a shape error otherwise.
    pub fn ensure_same(&self, other: &ProductSpace) -> Result<()> {
        if self.coordinates != other.coordinates {
            return Err(Error::Shape(
                "function tables live on different spaces".into(),
            ));
        }
        Ok(())
    }
}

/// Values of a real function at every point of a [`ProductSpace`], in flat
/// (row-major) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    space: ProductSpace,
    values: Vec<f64>,
    positive: bool,
}

impl FunctionTable {
    /// A table of arbitrary finite reals.
    pub fn new(space: ProductSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Shape(format!(
                "{} values for a space of {} points",
                values.len(),
                space.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at point {i}")));
        }
        Ok(Self {
            space,
            values,
            positive: false,
        })
    }

    /// A table of strictly positive values, usable as `G` in entropy functionals.
    pub fn positive(space: ProductSpace, values: Vec<f64>) -> Result<Self> {
        let mut table = Self::new(space, values)?;
        table.require_positive()?;
        table.positive = true;
        Ok(table)
    }

    pub fn from_fn(space: ProductSpace, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let values = (0..space.len()).map(|i| f(&space.multi_index(i))).collect();
        Self::new(space, values)
    }

    /// Tabulates a function of the coordinate values (rather than indices).
    pub fn from_point_fn(space: ProductSpace, mut f: impl FnMut(&[&Point]) -> f64) -> Result<Self> {
        let values = (0..space.len())
            .map(|i| {
                let multi = space.multi_index(i);
                let pts: Vec<&Point> = multi
                    .iter()
                    .enumerate()
                    .map(|(axis, j)| &space.coordinate(axis).points()[*j])
                    .collect();
                f(&pts)
            })
            .collect();
        Self::new(space, values)
    }

    /// Marks this table as positive after validating every value.
    pub fn into_positive(mut self) -> Result<Self> {
        self.require_positive()?;
        self.positive = true;
        Ok(self)
    }

    fn require_positive(&self) -> Result<()> {
        match self.values.iter().position(|v| *v <= 0.0) {
            Some(i) => Err(Error::Domain(format!(
                "value {} at point {i} is not strictly positive",
                self.values[i]
            ))),
            None => Ok(()),
        }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, multi: &[usize]) -> f64 {
        self.values[self.space.flat_index(multi)]
    }

    /// Expectation under the product measure.
    pub fn mean(&self) -> f64 {
        self.expect(|v| v)
    }

    /// `E[f(value)]` under the product measure.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.space
            .point_weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * f(*v))
            .sum()
    }

    /// Pointwise image of the table. The result is not flagged positive.
    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<FunctionTable> {
        FunctionTable::new(
            self.space.clone(),
            self.values.iter().copied().map(f).collect(),
        )
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when the value does not change along `axis`.
    pub fn is_constant_along(&self, axis: usize) -> bool {
        let stride = self.space.stride(axis);
        (0..self.len()).all(|flat| {
            let base = flat - self.space.axis_position(flat, axis) * stride;
            self.values[flat] == self.values[base]
        })
    }

    pub(crate) fn ensure_positive(&self) -> Result<()> {
        if !self.positive {
            return Err(Error::Domain(
                "table is not flagged strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// On-disk form: `{coordinates: [{points, weights}], values: [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    coordinates: Vec<CoordinateSpace>,
    values: Vec<f64>,
}

impl Serialize for FunctionTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableFile {
            coordinates: self.space.coordinates.clone(),
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = TableFile::deserialize(d)?;
        let space = ProductSpace::new(file.coordinates).map_err(serde::de::Error::custom)?;
        FunctionTable::new(space, file.values).map_err(serde::de::Error::custom)
    }
}
