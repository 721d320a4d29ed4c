//! Shared builders for integration tests.
#![allow(dead_code)]

use rand::Rng;
use tailforge::{CoordinateSpace, FunctionTable, ProductSpace};

/// Coordinate with points `0, 1, ..` and weights proportional to `raw`.
pub fn coordinate(raw: &[f64]) -> CoordinateSpace {
    let total: f64 = raw.iter().sum();
    let points = (0..raw.len()).map(|i| (i as f64).into()).collect();
    CoordinateSpace::new(points, raw.iter().map(|w| w / total).collect()).unwrap()
}

pub fn space(raw_weights: &[Vec<f64>]) -> ProductSpace {
    ProductSpace::new(raw_weights.iter().map(|w| coordinate(w)).collect()).unwrap()
}

/// Random space with 1..=max_coords coordinates of 1..=max_points points
/// each, non-uniform weights.
pub fn random_space<R: Rng>(rng: &mut R, max_coords: usize, max_points: usize) -> ProductSpace {
    let arity = rng.random_range(1..=max_coords);
    let raw: Vec<Vec<f64>> = (0..arity)
        .map(|_| {
            let len = rng.random_range(1..=max_points);
            (0..len).map(|_| rng.random_range(0.05..1.0)).collect()
        })
        .collect();
    space(&raw)
}

/// Positive table with values spread over several orders of magnitude.
pub fn random_positive<R: Rng>(rng: &mut R, max_coords: usize, max_points: usize) -> FunctionTable {
    let s = random_space(rng, max_coords, max_points);
    let values = (0..s.len())
        .map(|_| 10f64.powf(rng.random_range(-2.0..2.0)))
        .collect();
    FunctionTable::positive(s, values).unwrap()
}

pub fn random_real<R: Rng>(rng: &mut R, max_coords: usize, max_points: usize) -> FunctionTable {
    let s = random_space(rng, max_coords, max_points);
    let values = (0..s.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
    FunctionTable::new(s, values).unwrap()
}
