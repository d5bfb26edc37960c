// Shared helpers for the integration tests. Not every binary uses every
// helper, so silence per-binary dead-code warnings.
#![allow(dead_code)]

use mmpr::{standardize, Dataset, StandardizedDesign};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Iteratively refined grid minimizer for smooth-enough convex objectives in
/// up to ~4 dimensions. Each pass evaluates a 21-per-axis grid centered on
/// the current best point, then zooms in (or, if the winner sits on the
/// boundary, zooms out) until the cell size reaches `target_step`. The
/// returned point is within one final cell of the true minimizer for convex
/// objectives.
pub fn refine_grid_min<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    mut half_width: f64,
    target_step: f64,
) -> Vec<f64> {
    const SIDE: usize = 10;
    let width = 2 * SIDE + 1;
    let dims = start.len();
    let mut center = start.to_vec();
    let mut point = vec![0.0; dims];
    for _pass in 0..200 {
        let step = half_width / SIDE as f64;
        let total = width.pow(dims as u32);
        let mut best_flat = 0usize;
        let mut best_val = f64::INFINITY;
        for flat in 0..total {
            let mut rem = flat;
            for d in 0..dims {
                let idx = rem % width;
                rem /= width;
                point[d] = center[d] + (idx as f64 - SIDE as f64) * step;
            }
            let v = f(&point);
            if v < best_val {
                best_val = v;
                best_flat = flat;
            }
        }
        let mut on_boundary = false;
        let mut rem = best_flat;
        for d in 0..dims {
            let idx = rem % width;
            rem /= width;
            center[d] += (idx as f64 - SIDE as f64) * step;
            on_boundary |= idx == 0 || idx == width - 1;
        }
        if on_boundary {
            half_width *= 2.0;
            continue;
        }
        if step <= target_step {
            return center;
        }
        // Keep a margin of two cells around the winner.
        half_width = 2.0 * step;
    }
    panic!("grid refinement did not reach step {target_step}");
}

/// A reproducible dataset: standard-normal covariates, response built from
/// `signal` (raw-scale coefficients over the first signal.len() columns)
/// plus Gaussian noise.
pub fn random_dataset(n: usize, p: usize, seed: u64, signal: &[f64], noise_sd: f64) -> Dataset {
    assert!(signal.len() <= p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, p), |_| StandardNormal.sample(&mut rng));
    let mut y = Array1::zeros(n);
    for (k, &w) in signal.iter().enumerate() {
        for l in 0..n {
            y[l] += w * x[[l, k]];
        }
    }
    for v in y.iter_mut() {
        let e: f64 = StandardNormal.sample(&mut rng);
        *v += noise_sd * e;
    }
    let names = (1..=p).map(|k| format!("x{k}")).collect();
    Dataset::new(x, y, names).unwrap()
}

pub fn random_design(n: usize, p: usize, seed: u64, signal: &[f64], noise_sd: f64) -> StandardizedDesign {
    standardize(&random_dataset(n, p, seed, signal, noise_sd)).unwrap()
}
