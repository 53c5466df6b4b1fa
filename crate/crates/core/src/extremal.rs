//! Brute-force optimality oracles and property checks for the extremal
//! trigonometric inequalities behind the optimal weights.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{egervary_szasz, fejer_kernel_t2_cosine, CoeffError, CoefficientVector};
use crate::margin::{margin_t1, margin_t2, MarginReport};

pub const GRID_BOX: f64 = 2.0;
pub const MAX_RESOLUTION: f64 = 1e-2;
pub const DISC_BOUNDARY_SAMPLES: usize = 100_000;
pub const DISC_TEST_POINTS: usize = 64;
pub const FEJER_GRID: usize = 10_000;
pub const NONNEGATIVE_TOL: f64 = 1e-10;
pub const BOUND_TOL: f64 = 1e-9;

/// Grid value and the coefficient list attaining it.
type Candidate = (f64, Vec<f64>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremalError {
    #[error("grid search supports depth 2 or 3, got {0}")]
    UnsupportedDepth(usize),
    #[error("resolution must lie in (0, 1e-2], got {0}")]
    InvalidResolution(f64),
    #[error("polynomial has no nonzero coefficient")]
    AllZero,
    #[error("cosine polynomial dips to {value} at θ = {theta}")]
    NotNonnegative { theta: f64, value: f64 },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_value: f64,
    pub best_coeffs: Vec<f64>,
    pub grid_resolution: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    CycleOne,
    CycleTwo,
}

impl Objective {
    fn period(self) -> usize {
        match self {
            Objective::CycleOne => 1,
            Objective::CycleTwo => 2,
        }
    }

    fn eval(self, coeffs: &CoefficientVector) -> Option<f64> {
        let report: Result<MarginReport, _> = match self {
            Objective::CycleOne => margin_t1(coeffs),
            Objective::CycleTwo => margin_t2(coeffs),
        };
        report.ok().map(|r| r.witness_value)
    }
}

/// Grid search for the best T=1 `witness_value` (`min C` over `S = 0`).
pub fn grid_search_t1(depth: usize, resolution: f64) -> Result<SearchResult, ExtremalError> {
    grid_search(Objective::CycleOne, depth, resolution)
}

/// Grid search for the best T=2 `witness_value` (`-M²`).
pub fn grid_search_t2(depth: usize, resolution: f64) -> Result<SearchResult, ExtremalError> {
    grid_search(Objective::CycleTwo, depth, resolution)
}

/// Larger value wins; ties go to the lexicographically smaller list.
fn better(candidate: &Candidate, incumbent: &Candidate) -> bool {
    match candidate.0.total_cmp(&incumbent.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            candidate.1.iter().zip(&incumbent.1).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
                == Some(Ordering::Less)
        }
    }
}

fn grid_search(objective: Objective, depth: usize, resolution: f64) -> Result<SearchResult, ExtremalError> {
    if !(2..=3).contains(&depth) {
        return Err(ExtremalError::UnsupportedDepth(depth));
    }
    if !(resolution > 0.0 && resolution <= MAX_RESOLUTION) {
        return Err(ExtremalError::InvalidResolution(resolution));
    }
    let steps = (2.0 * GRID_BOX / resolution).round() as usize;
    let node = |k: usize| -GRID_BOX + k as f64 * resolution;

    // The first free coordinate indexes the outer rows processed in parallel.
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(steps + 1);
    let rows_per_worker = (steps + 1).div_ceil(workers);

    let scan_rows = |first: usize, last: usize| {
        let mut best: Option<Candidate> = None;
        let mut evaluations = 0usize;
        let mut consider = |free: &[f64]| {
            let last_weight = 1.0 - free.iter().sum::<f64>();
            if last_weight.abs() > GRID_BOX + 1e-12 {
                return;
            }
            let mut a = free.to_vec();
            a.push(last_weight);
            let Ok(cv) = CoefficientVector::new(objective.period(), a.clone(), 0.0) else {
                return;
            };
            evaluations += 1;
            if let Some(value) = objective.eval(&cv) {
                let cand = (value, a);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
        };
        for i in first..last {
            if depth == 2 {
                consider(&[node(i)]);
            } else {
                for j in 0..=steps {
                    consider(&[node(i), node(j)]);
                }
            }
        }
        (best, evaluations)
    };

    let partials: Vec<(Option<Candidate>, usize)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let first = w * rows_per_worker;
                let last = ((w + 1) * rows_per_worker).min(steps + 1);
                let scan = &scan_rows;
                scope.spawn(move || scan(first, last))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("grid worker panicked")).collect()
    });

    let mut best: Option<Candidate> = None;
    let mut evaluations = 0;
    for (candidate, count) in partials {
        evaluations += count;
        if let Some(c) = candidate {
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                best = Some(c);
            }
        }
    }
    let (best_value, best_coeffs) = best.expect("grid always contains a feasible point");
    Ok(SearchResult { best_value, best_coeffs, grid_resolution: resolution, evaluations })
}

/// Outcome of the disc-covering check for `F(z) = Σ_(j=1)^n a_j z^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscCheck {
    pub covered: bool,
    /// `Σ|a_j| / 2^n`.
    pub radius: f64,
    /// `min |F(e^(it))| / Σ|a_j|` over the boundary samples.
    pub min_boundary_ratio: f64,
}

fn eval_no_constant(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| (acc + c) * z)
}

/// Checks that `F` maps the closed unit disc onto a set containing the disc of
/// radius `Σ|a_j| / 2^n`: each of 64 points on that circle must have nonzero
/// winding number under `F(∂D)`, or lie within sampling distance of it.
pub fn lemma2_disc_report(coeffs: &[Complex64]) -> Result<DiscCheck, ExtremalError> {
    let abs_sum: f64 = coeffs.iter().map(|c| c.norm()).sum();
    if abs_sum == 0.0 {
        return Err(ExtremalError::AllZero);
    }
    let n = coeffs.len() as i32;
    let radius = abs_sum / 2f64.powi(n);
    let boundary: Vec<Complex64> = (0..DISC_BOUNDARY_SAMPLES)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / DISC_BOUNDARY_SAMPLES as f64;
            eval_no_constant(coeffs, Complex64::from_polar(1.0, t))
        })
        .collect();
    let min_boundary_ratio = boundary.iter().map(|f| f.norm()).fold(f64::INFINITY, f64::min) / abs_sum;

    // |F'| ≤ Σ j|a_j| bounds how far the curve moves between samples.
    let step = 2.0 * PI / DISC_BOUNDARY_SAMPLES as f64;
    let slope: f64 = coeffs.iter().enumerate().map(|(j, c)| (j + 1) as f64 * c.norm()).sum();
    let chord = slope * step;

    let covered = (0..DISC_TEST_POINTS).all(|k| {
        let w = Complex64::from_polar(radius, 2.0 * PI * k as f64 / DISC_TEST_POINTS as f64);
        winding_number(&boundary, w, chord) != 0 || nearest_distance(&boundary, w) <= chord
    });
    Ok(DiscCheck { covered, radius, min_boundary_ratio })
}

/// Winding number of the sampled closed curve about `w`, by signed crossings
/// of the horizontal ray right of `w`. A vertex at distance `d` from `w` is
/// followed by the sample `d / chord` steps ahead: the curve cannot reach `w`
/// in between, so the skipped arc and the chord are homotopic around `w`.
fn winding_number(path: &[Complex64], w: Complex64, chord: f64) -> i64 {
    let len = path.len();
    let mut winding = 0;
    let mut i = 0;
    let mut p = path[0] - w;
    while i < len {
        let skip = ((p.norm() / chord) as usize).max(1);
        i = (i + skip).min(len);
        let q = path[i % len] - w;
        if (p.im <= 0.0) != (q.im <= 0.0) {
            let cross = p.re * q.im - q.re * p.im;
            if p.im <= 0.0 && cross > 0.0 {
                winding += 1;
            } else if p.im > 0.0 && cross < 0.0 {
                winding -= 1;
            }
        }
        p = q;
    }
    winding
}

fn nearest_distance(path: &[Complex64], w: Complex64) -> f64 {
    path.iter().map(|f| (f - w).norm_sqr()).fold(f64::INFINITY, f64::min).sqrt()
}

pub fn lemma2_disc_check(coeffs: &[Complex64]) -> Result<bool, ExtremalError> {
    Ok(lemma2_disc_report(coeffs)?.covered)
}

/// Checks `|λ_1| ≤ 2 cos(π/(n+2))` and `max g ≤ n + 1` for the cosine
/// polynomial `g(θ) = 1 + Σ_(k=1)^n λ_k cos kθ`, after confirming `g ≥ 0` on
/// a 10000-point grid.
pub fn fejer_bound_check(lambda: &[f64]) -> Result<bool, ExtremalError> {
    let n = lambda.len();
    let g = |theta: f64| 1.0 + lambda.iter().enumerate().map(|(k, l)| l * ((k + 1) as f64 * theta).cos()).sum::<f64>();
    let mut max_value = f64::NEG_INFINITY;
    for i in 0..=FEJER_GRID {
        let theta = PI * i as f64 / FEJER_GRID as f64;
        let value = g(theta);
        if value < -NONNEGATIVE_TOL {
            return Err(ExtremalError::NotNonnegative { theta, value });
        }
        max_value = max_value.max(value);
    }
    let first = lambda.first().copied().unwrap_or(0.0);
    let coefficient_ok = first.abs() <= 2.0 * (PI / (n as f64 + 2.0)).cos() + BOUND_TOL;
    Ok(coefficient_ok && max_value <= n as f64 + 1.0 + BOUND_TOL)
}

/// `λ_1..λ_(N-1)` of the Egerváry–Szász polynomial.
pub fn egervary_szasz_lambdas(depth: usize) -> Result<Vec<f64>, ExtremalError> {
    Ok(egervary_szasz(depth)?.b[1..].to_vec())
}

/// `λ_k = 2(N-k)/N`, the Fejér kernel `(sin(Nθ/2) / (N sin(θ/2)))²` scaled to
/// constant term 1.
pub fn fejer_kernel_lambdas(depth: usize) -> Result<Vec<f64>, ExtremalError> {
    let gamma = fejer_kernel_t2_cosine(depth)?.b;
    Ok(gamma[1..].iter().map(|g| 2.0 * g / gamma[0]).collect())
}
