//! Seeded dataset generators shared by the CLI and the test suites.

use rand::prelude::*;
use rand_distr::Normal;

use crate::geom::Point;

/// `n` points uniform in `[0,1]^d`.
pub fn uniform(n: usize, dim: usize, rng: &mut impl Rng) -> Vec<Point<f64>> {
    (0..n)
        .map(|_| Point::new((0..dim).map(|_| rng.random_range(0.0..1.0)).collect()))
        .collect()
}

/// `n` points in Gaussian blobs around `blobs` uniformly placed centers,
/// clamped to the unit cube.
pub fn clusters(n: usize, dim: usize, blobs: usize, rng: &mut impl Rng) -> Vec<Point<f64>> {
    let blobs = blobs.max(1);
    let centers: Vec<Vec<f64>> = (0..blobs)
        .map(|_| (0..dim).map(|_| rng.random_range(0.15..0.85)).collect())
        .collect();
    let noise = Normal::new(0.0, 0.04).expect("valid std dev");
    (0..n)
        .map(|i| {
            let c = &centers[i % blobs];
            Point::new(
                c.iter()
                    .map(|&x| (x + noise.sample(rng)).clamp(0.0, 1.0))
                    .collect(),
            )
        })
        .collect()
}

/// `n` points evenly spaced on the circle of radius 0.4 around (0.5, 0.5).
pub fn circle(n: usize) -> Vec<Point<f64>> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
            Point::new(vec![0.5 + 0.4 * t.cos(), 0.5 + 0.4 * t.sin()])
        })
        .collect()
}
