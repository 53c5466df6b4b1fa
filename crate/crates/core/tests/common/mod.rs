#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Entries drawn from [-1, 2] and divided by their sum. Draws whose sum is
/// below 0.25 in magnitude are redrawn so the normalized entries stay bounded.
pub fn random_unit_sum(rng: &mut StdRng, depth: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..depth).map(|_| rng.gen_range(-1.0..=2.0)).collect();
        let sum: f64 = raw.iter().sum();
        if sum.abs() >= 0.25 {
            return raw.iter().map(|x| x / sum).collect();
        }
    }
}

pub fn random_complex(rng: &mut StdRng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect()
}

pub fn tan2(depth: usize) -> f64 {
    (std::f64::consts::PI / (2.0 * (depth as f64 + 1.0))).tan().powi(2)
}

/// Neville's scheme: value at `x` of the interpolant through `points`.
pub fn neville(points: &[(f64, f64)], x: f64) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = ((x - xj) * p[i] + (xi - x) * p[i + 1]) / (xi - xj);
        }
    }
    p[0]
}
