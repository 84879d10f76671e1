//! Shared inputs for the pipeline benchmarks.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use roadspline::converter::ControlPoint;

/// A winding but non-degenerate control polyline of `n` points.
pub fn winding_control_points(n: usize, seed: u64) -> Vec<ControlPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0f64;
    (0..n)
        .map(|i| {
            x += rng.random_range(3.0..9.0);
            ControlPoint {
                x,
                y: 15.0 * (i as f64 / 7.0).sin() + rng.random_range(-1.0..1.0),
                z: 0.1 * i as f64,
                width: 8.0,
            }
        })
        .collect()
}

/// Random open polyline for intersection benchmarks.
pub fn random_polyline(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect()
}
