//! Order-fixed summation.
//!
//! Reductions over cells are split into fixed-size blocks, each block is summed
//! pairwise, and the block partials are summed pairwise in index order. The
//! result does not depend on the number of worker threads.

use rayon::prelude::*;

const BLOCK: usize = 4096;
const PAR_THRESHOLD: usize = 1 << 16;

/// Pairwise sum of a slice.
pub fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Deterministic sum of `f(i, x_i)` over a slice.
pub fn sum_map<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(usize, f64) -> f64 + Sync,
{
    let partials: Vec<f64> = if xs.len() >= PAR_THRESHOLD {
        xs.par_chunks(BLOCK)
            .enumerate()
            .map(|(b, chunk)| block_sum(b * BLOCK, chunk, &f))
            .collect()
    } else {
        xs.chunks(BLOCK)
            .enumerate()
            .map(|(b, chunk)| block_sum(b * BLOCK, chunk, &f))
            .collect()
    };
    pairwise(&partials)
}

fn block_sum<F>(offset: usize, chunk: &[f64], f: &F) -> f64
where
    F: Fn(usize, f64) -> f64,
{
    let mapped: Vec<f64> = chunk
        .iter()
        .enumerate()
        .map(|(i, &x)| f(offset + i, x))
        .collect();
    pairwise(&mapped)
}
