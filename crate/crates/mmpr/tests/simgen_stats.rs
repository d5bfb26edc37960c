//! Large-sample statistical checks of the data generator: realized
//! covariances and correlations must match the requested block structure.

use mmpr::{preset_case, preset_case_spec, sample};
use ndarray::ArrayView2;

fn sample_correlation(x: ArrayView2<f64>, a: usize, b: usize) -> f64 {
    let n = x.nrows() as f64;
    let ma = x.column(a).sum() / n;
    let mb = x.column(b).sum() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for l in 0..x.nrows() {
        let da = x[[l, a]] - ma;
        let db = x[[l, b]] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    cov / (va.sqrt() * vb.sqrt())
}

fn sample_covariance(x: ArrayView2<f64>, a: usize, b: usize) -> f64 {
    let n = x.nrows() as f64;
    let ma = x.column(a).sum() / n;
    let mb = x.column(b).sum() / n;
    let mut cov = 0.0;
    for l in 0..x.nrows() {
        cov += (x[[l, a]] - ma) * (x[[l, b]] - mb);
    }
    cov / n
}

#[test]
fn uncorrelated_case_has_identity_covariance_at_large_n() {
    let mut case = preset_case_spec(1).unwrap();
    case.n = 10_000;
    case.seed = 42;
    let sim = sample(&case).unwrap();
    let x = sim.dataset.x();
    for a in 0..6 {
        for b in 0..6 {
            let target = if a == b { 1.0 } else { 0.0 };
            let got = sample_covariance(x, a, b);
            assert!(
                (got - target).abs() < 0.05,
                "covariance ({a},{b}) = {got}, expected {target}"
            );
        }
    }
}

#[test]
fn two_block_case_has_the_requested_correlations_at_large_n() {
    let mut case = preset_case_spec(4).unwrap();
    case.n = 10_000;
    case.seed = 7;
    let sim = sample(&case).unwrap();
    let x = sim.dataset.x();
    let within = sample_correlation(x, 0, 1);
    assert!(
        (within - 0.5).abs() < 0.05,
        "within-block correlation {within}, expected 0.5"
    );
    let between = sample_correlation(x, 0, 3);
    assert!(
        between.abs() < 0.05,
        "between-block correlation {between}, expected 0"
    );
}

#[test]
fn autoregressive_case_decays_with_lag_at_large_n() {
    let mut case = preset_case_spec(3).unwrap();
    case.n = 20_000;
    case.seed = 13;
    let sim = sample(&case).unwrap();
    let x = sim.dataset.x();
    assert!((sample_correlation(x, 0, 1) - 0.9).abs() < 0.05);
    assert!((sample_correlation(x, 0, 2) - 0.81).abs() < 0.05);
    assert!((sample_correlation(x, 0, 5) - 0.9f64.powi(5)).abs() < 0.05);
}

#[test]
fn response_matches_signal_plus_noise_variance() {
    // var(y) = beta' Gamma beta + sigma^2; for the uncorrelated preset that
    // is 3 + 9 = 12.
    let mut case = preset_case_spec(1).unwrap();
    case.n = 20_000;
    case.seed = 29;
    let sim = sample(&case).unwrap();
    let y = sim.dataset.y();
    let n = y.len() as f64;
    let mean = y.sum() / n;
    let var = y.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
    assert!((var - 12.0).abs() < 0.5, "response variance {var}, expected 12");
}

#[test]
fn preset_sampling_equals_spec_sampling() {
    let direct = preset_case(3, 9).unwrap();
    let mut spec = preset_case_spec(3).unwrap();
    spec.seed = 9;
    let via_spec = sample(&spec).unwrap();
    assert_eq!(direct.dataset.x(), via_spec.dataset.x());
    assert_eq!(direct.dataset.y(), via_spec.dataset.y());
}
