#![allow(dead_code)]

use std::sync::Arc;

use apme::{Field, Grid, MediumParams};
use proptest::prelude::*;

/// Exponents in `[1.3, 3]` with `H2` satisfied.
pub fn medium(dim: usize) -> impl Strategy<Value = MediumParams> {
    proptest::collection::vec(1.3f64..3.0, dim)
        .prop_filter_map("H2", |m| MediumParams::new(m).ok())
}

/// Grid on `[-1, 1]^N` with `n` cells per axis.
pub fn grid(dim: usize, n: usize) -> Arc<Grid> {
    Grid::uniform(dim, 1.0, n).unwrap().shared()
}

/// Random nonnegative values on the central half of the box, zero elsewhere.
pub fn compact_values(grid: &Grid, raw: &[f64]) -> Vec<f64> {
    (0..grid.len())
        .map(|flat| {
            let inside = grid.point(flat).iter().all(|x| x.abs() < 0.5);
            if inside {
                raw[flat]
            } else {
                0.0
            }
        })
        .collect()
}

/// One of three small grids (1D, 2D, 3D) with a medium and compact random data.
pub fn case() -> impl Strategy<Value = (MediumParams, Field)> {
    prop_oneof![Just((1usize, 32usize)), Just((2, 16)), Just((3, 8))].prop_flat_map(|(dim, n)| {
        let g = grid(dim, n);
        let len = g.len();
        (
            medium(dim),
            proptest::collection::vec(0.0f64..1.5, len),
            Just(g),
        )
            .prop_map(|(p, raw, g)| {
                let values = compact_values(&g, &raw);
                (p, Field::new(g, values, 0.0).unwrap())
            })
    })
}

/// A case plus a second field dominated by the first.
pub fn ordered_case() -> impl Strategy<Value = (MediumParams, Field, Field)> {
    case().prop_flat_map(|(p, upper)| {
        let len = upper.values().len();
        (
            Just(p),
            Just(upper),
            proptest::collection::vec(0.0f64..=1.0, len),
        )
            .prop_map(|(p, upper, w)| {
                let lower: Vec<f64> = upper.values().iter().zip(&w).map(|(u, w)| u * w).collect();
                let lower = Field::new(upper.grid().clone(), lower, 0.0).unwrap();
                (p, lower, upper)
            })
    })
}
