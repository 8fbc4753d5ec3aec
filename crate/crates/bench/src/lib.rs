//! Shared fixtures for the benchmark targets.

use ribbonlab_core::lattice::RibbonSpec;

/// Ribbon with a deterministic pseudo-random potential.
pub fn sample_spec(n: usize, b: f64) -> RibbonSpec {
    let p = 2 * n + 1;
    let v: Vec<f64> = (0..p).map(|i| (1.3 * i as f64 + 0.7).sin() * 0.5).collect();
    RibbonSpec::new(n, b, v).unwrap()
}

/// Strictly increasing potential in [0, 1] for the inverse problems.
pub fn increasing_potential(n: usize) -> Vec<f64> {
    let p = 2 * n + 1;
    (1..=p).map(|k| k as f64 / (p + 1) as f64).collect()
}
