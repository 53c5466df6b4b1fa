//! One-dimensional maps, periodic orbits, and simulation of the controlled
//! system `x(k+1) = f(x(k)) + u(k)`.

use std::io::{self, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpoly::RealPolynomial;
use crate::coeffs::CoefficientVector;

pub const MAX_CYCLE_PERIOD: usize = 8;
pub const NEWTON_SEEDS: usize = 512;
pub const NEWTON_ITERATIONS: usize = 50;
pub const NEWTON_ACCEPT: f64 = 1e-13;
pub const ORBIT_DEDUP_TOL: f64 = 1e-8;
pub const SUBPERIOD_TOL: f64 = 1e-6;
pub const MAX_CYCLE_RESIDUAL: f64 = 1e-10;
pub const DIVERGENCE_BOUND: f64 = 1e6;
pub const CONVERGENCE_WINDOW: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("cycle period must lie in 1..={MAX_CYCLE_PERIOD}, got {0}")]
    InvalidPeriod(usize),
    #[error("invalid map domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("no cycle of period {0} found")]
    NoCycleFound(usize),
    #[error("history must hold {expected} values, got {found}")]
    HistoryLength { expected: usize, found: usize },
    #[error("cycle has period {cycle} but coefficients are for period {coeffs}")]
    DimensionMismatch { cycle: usize, coeffs: usize },
    #[error("cycle residual {0} exceeds {MAX_CYCLE_RESIDUAL}")]
    ResidualTooLarge(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// `r x (1 - x)`
    Logistic { r: f64 },
    /// `x² + c`
    Quadratic { c: f64 },
    /// `Σ c_k x^k`, ascending coefficients.
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub kind: MapKind,
    /// Interval seeded when searching for cycles.
    pub domain: (f64, f64),
}

impl MapSpec {
    pub fn new(kind: MapKind, domain: (f64, f64)) -> Result<Self, DynamicsError> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(DynamicsError::InvalidDomain(lo, hi));
        }
        Ok(Self { kind, domain })
    }

    pub fn logistic(r: f64) -> Self {
        Self { kind: MapKind::Logistic { r }, domain: (0.0, 1.0) }
    }

    /// `x² + c` seeded on `[-β, β]`, `β` the larger fixed point (the filled
    /// invariant interval when `c ≤ 1/4`).
    pub fn quadratic(c: f64) -> Self {
        let beta = if c <= 0.25 { 0.5 + (0.25 - c).sqrt() } else { 2.0 };
        Self { kind: MapKind::Quadratic { c }, domain: (-beta, beta) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Logistic { r } => r * x * (1.0 - x),
            MapKind::Quadratic { c } => x * x + c,
            MapKind::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Logistic { r } => r * (1.0 - 2.0 * x),
            MapKind::Quadratic { .. } => 2.0 * x,
            MapKind::Polynomial { coeffs } => {
                coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
            }
        }
    }

    /// `(f^n(x), (f^n)'(x))` by the chain rule.
    fn iterate_with_derivative(&self, x: f64, n: usize) -> (f64, f64) {
        let mut value = x;
        let mut slope = 1.0;
        for _ in 0..n {
            slope *= self.derivative(value);
            value = self.eval(value);
        }
        (value, slope)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDescriptor {
    pub period: usize,
    /// Orbit starting at its smallest point.
    pub points: Vec<f64>,
    pub mu: f64,
    pub residual: f64,
}

impl CycleDescriptor {
    pub fn distance(&self, x: f64) -> f64 {
        self.points.iter().map(|p| (x - p).abs()).fold(f64::INFINITY, f64::min)
    }
}

fn newton_cycle_point(map: &MapSpec, period: usize, seed: f64) -> Option<f64> {
    let mut x = seed;
    for _ in 0..NEWTON_ITERATIONS {
        let (fx, slope) = map.iterate_with_derivative(x, period);
        let h = fx - x;
        if !h.is_finite() {
            return None;
        }
        if h.abs() <= NEWTON_ACCEPT {
            return Some(x);
        }
        let dh = slope - 1.0;
        if dh == 0.0 || !dh.is_finite() {
            return None;
        }
        x -= h / dh;
    }
    let (fx, _) = map.iterate_with_derivative(x, period);
    ((fx - x).abs() <= NEWTON_ACCEPT).then_some(x)
}

fn describe_orbit(map: &MapSpec, period: usize, start: f64) -> Option<CycleDescriptor> {
    let mut points = Vec::with_capacity(period);
    let mut x = start;
    for _ in 0..period {
        points.push(x);
        x = map.eval(x);
    }
    for i in 0..period {
        for j in i + 1..period {
            if (points[i] - points[j]).abs() < SUBPERIOD_TOL {
                return None;
            }
        }
    }
    let first = points.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    points.rotate_left(first);
    let residual = (0..period).map(|j| (map.eval(points[j]) - points[(j + 1) % period]).abs()).fold(0.0, f64::max);
    let mu = points.iter().map(|&p| map.derivative(p)).product();
    Some(CycleDescriptor { period, points, mu, residual })
}

/// All cycles of exact period `period`, found by Newton iteration on
/// `f^T(x) - x` from 512 uniform seeds over the map domain. Sorted by their
/// smallest point.
pub fn find_cycle(map: &MapSpec, period: usize) -> Result<Vec<CycleDescriptor>, DynamicsError> {
    if !(1..=MAX_CYCLE_PERIOD).contains(&period) {
        return Err(DynamicsError::InvalidPeriod(period));
    }
    let (lo, hi) = map.domain;
    let mut cycles: Vec<CycleDescriptor> = Vec::new();
    for i in 0..NEWTON_SEEDS {
        let seed = lo + (hi - lo) * i as f64 / (NEWTON_SEEDS - 1) as f64;
        let Some(x) = newton_cycle_point(map, period, seed) else {
            continue;
        };
        let Some(cycle) = describe_orbit(map, period, x) else {
            continue;
        };
        let duplicate =
            cycles.iter().any(|c| c.points.iter().zip(&cycle.points).all(|(a, b)| (a - b).abs() <= ORBIT_DEDUP_TOL));
        if !duplicate {
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Err(DynamicsError::NoCycleFound(period));
    }
    cycles.sort_by(|a, b| a.points[0].total_cmp(&b.points[0]));
    Ok(cycles)
}

/// Delay-line length `(N-1)T + 1`.
pub fn history_len(coeffs: &CoefficientVector) -> usize {
    (coeffs.depth() - 1) * coeffs.period() + 1
}

/// Chronological history (oldest first, `x(0)` last) lying on `cycle`, with
/// every entry shifted by `delta`. `x(0) = x_0* + delta`.
pub fn perturbed_history(cycle: &CycleDescriptor, coeffs: &CoefficientVector, delta: f64) -> Vec<f64> {
    let len = history_len(coeffs);
    let period = cycle.period;
    (0..len)
        .map(|s| {
            let phase = (period - (len - 1 - s) % period) % period;
            cycle.points[phase] + delta
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub k: usize,
    pub x: f64,
    pub u: f64,
    /// Distance from `x` to the reference cycle, when one was supplied.
    pub dist: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub steps: Vec<TraceStep>,
    /// Set when `|x|` left `[-1e6, 1e6]`; the trace stops before that step.
    pub diverged: bool,
}

/// Runs the controlled system for `steps` steps from a chronological history
/// of length `(N-1)T + 1`. Row `k` holds `x(k)`, `u(k)` and the orbit
/// distance of `x(k)`.
pub fn simulate(
    map: &MapSpec,
    coeffs: &CoefficientVector,
    history: &[f64],
    steps: usize,
    reference: Option<&CycleDescriptor>,
) -> Result<SimulationTrace, DynamicsError> {
    let len = history_len(coeffs);
    if history.len() != len {
        return Err(DynamicsError::HistoryLength { expected: len, found: history.len() });
    }
    let weights = coeffs.weights();
    let period = coeffs.period();
    // f-values, ring indexed by k mod len; slot of f(x(k - m)) is (k - m) mod len.
    let mut ring: Vec<f64> = history.iter().map(|&x| map.eval(x)).collect();
    let mut head = len - 1;
    let mut x = history[len - 1];
    let mut out = Vec::with_capacity(steps);
    let mut diverged = false;
    for k in 0..steps {
        if !x.is_finite() || x.abs() > DIVERGENCE_BOUND {
            diverged = true;
            break;
        }
        let delayed = |i: usize| ring[(head + len - i * period) % len];
        let mut u = (weights[0] - 1.0) * delayed(0);
        for (i, a) in weights.iter().enumerate().skip(1) {
            u += a * delayed(i);
        }
        out.push(TraceStep { k, x, u, dist: reference.map(|c| c.distance(x)) });
        x = delayed(0) + u;
        head = (head + 1) % len;
        ring[head] = map.eval(x);
    }
    Ok(SimulationTrace { steps: out, diverged })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    Converged { at: usize },
    NotConverged,
}

/// First step after which the distance to `cycle` stays below `tol` for 100
/// consecutive recorded steps.
pub fn detect_convergence(trace: &SimulationTrace, cycle: &CycleDescriptor, tol: f64) -> ConvergenceVerdict {
    if trace.diverged {
        return ConvergenceVerdict::NotConverged;
    }
    let mut run_start = None;
    for step in &trace.steps {
        if cycle.distance(step.x) < tol {
            let start = *run_start.get_or_insert(step.k);
            if step.k + 1 - start >= CONVERGENCE_WINDOW {
                return ConvergenceVerdict::Converged { at: start };
            }
        } else {
            run_start = None;
        }
    }
    ConvergenceVerdict::NotConverged
}

/// Characteristic polynomial of the Jacobian of `G^T` at the cycle, where `G`
/// advances the delay state `(x(k-L+1), …, x(k))` by one step.
pub fn augmented_charpoly(
    map: &MapSpec,
    cycle: &CycleDescriptor,
    coeffs: &CoefficientVector,
) -> Result<RealPolynomial, DynamicsError> {
    if cycle.period != coeffs.period() {
        return Err(DynamicsError::DimensionMismatch { cycle: cycle.period, coeffs: coeffs.period() });
    }
    if cycle.residual > MAX_CYCLE_RESIDUAL {
        return Err(DynamicsError::ResidualTooLarge(cycle.residual));
    }
    let len = history_len(coeffs);
    let period = coeffs.period();
    let weights = coeffs.weights();
    let mut state = perturbed_history(cycle, coeffs, 0.0);
    let mut jacobian = DMatrix::<f64>::identity(len, len);
    for _ in 0..period {
        let mut step = DMatrix::<f64>::zeros(len, len);
        for i in 0..len - 1 {
            step[(i, i + 1)] = 1.0;
        }
        let mut next = 0.0;
        for (i, a) in weights.iter().enumerate() {
            let slot = len - 1 - i * period;
            step[(len - 1, slot)] = a * map.derivative(state[slot]);
            next += a * map.eval(state[slot]);
        }
        jacobian = step * jacobian;
        state.rotate_left(1);
        state[len - 1] = next;
    }
    Ok(faddeev_leverrier(&jacobian))
}

/// `det(λI - A)` by the Faddeev–LeVerrier recursion.
fn faddeev_leverrier(a: &DMatrix<f64>) -> RealPolynomial {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::<f64>::identity(n, n) * coeffs[n - k + 1];
        coeffs[n - k] = -(a * &m).trace() / k as f64;
    }
    RealPolynomial::new(coeffs)
}

/// Writes `k,x,u,dist` rows with 17 significant digits; `dist` is empty when
/// no reference cycle was supplied.
pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "k,x,u,dist")?;
    for s in &trace.steps {
        match s.dist {
            Some(d) => writeln!(out, "{},{:.16e},{:.16e},{:.16e}", s.k, s.x, s.u, d)?,
            None => writeln!(out, "{},{:.16e},{:.16e},", s.k, s.x, s.u)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::build_char_poly;
    use crate::coeffs::fejer_coeffs_t1;

    fn cv(period: usize, a: &[f64]) -> CoefficientVector {
        CoefficientVector::new(period, a.to_vec(), 0.0).unwrap()
    }

    fn nontrivial(map: &MapSpec, period: usize) -> CycleDescriptor {
        find_cycle(map, period).unwrap().into_iter().find(|c| c.points[0] > 1e-6).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let maps = [
            MapSpec::logistic(3.7),
            MapSpec::quadratic(-1.3),
            MapSpec::new(MapKind::Polynomial { coeffs: vec![0.1, -0.5, 0.0, 2.0] }, (-1.0, 1.0)).unwrap(),
        ];
        for map in &maps {
            let (lo, hi) = map.domain;
            for i in 0..100 {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
                let h = 1e-6;
                let fd = (map.eval(x + h) - map.eval(x - h)) / (2.0 * h);
                let d = map.derivative(x);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{map:?} x={x}");
            }
        }
    }

    #[test]
    fn logistic_fixed_point() {
        let c = nontrivial(&MapSpec::logistic(3.9), 1);
        assert!((c.points[0] - (1.0 - 1.0 / 3.9)).abs() < 1e-12);
        assert!((c.mu + 1.9).abs() < 1e-12);
        assert!(c.residual <= MAX_CYCLE_RESIDUAL);
    }

    #[test]
    fn logistic_two_cycles() {
        for r in [3.2f64, 3.8] {
            let cycles = find_cycle(&MapSpec::logistic(r), 2).unwrap();
            assert_eq!(cycles.len(), 1);
            let c = &cycles[0];
            let disc = ((r + 1.0) * (r - 3.0)).sqrt();
            let lo = (r + 1.0 - disc) / (2.0 * r);
            let hi = (r + 1.0 + disc) / (2.0 * r);
            assert!((c.points[0] - lo).abs() < 1e-12 && (c.points[1] - hi).abs() < 1e-12);
            assert!((c.mu - (-r * r + 2.0 * r + 4.0)).abs() < 1e-10);
        }
        let c = &find_cycle(&MapSpec::logistic(3.2), 2).unwrap()[0];
        assert!((c.points[0] - 0.513045).abs() < 1e-6 && (c.points[1] - 0.799455).abs() < 1e-6);
    }

    #[test]
    fn no_cycle_and_bad_period() {
        assert_eq!(find_cycle(&MapSpec::logistic(2.5), 2), Err(DynamicsError::NoCycleFound(2)));
        assert_eq!(find_cycle(&MapSpec::logistic(2.5), 9), Err(DynamicsError::InvalidPeriod(9)));
    }

    #[test]
    fn history_layout() {
        let cycle = CycleDescriptor { period: 2, points: vec![0.1, 0.2], mu: 0.0, residual: 0.0 };
        let coeffs = cv(2, &[0.5, 0.3, 0.2]);
        // L = 5, oldest first, x(0) = x_0*
        assert_eq!(perturbed_history(&cycle, &coeffs, 0.0), vec![0.1, 0.2, 0.1, 0.2, 0.1]);
    }

    #[test]
    fn uncontrolled_matches_map() {
        let map = MapSpec::logistic(3.9);
        let trace = simulate(&map, &cv(1, &[1.0]), &[0.3], 50, None).unwrap();
        let mut x = 0.3;
        for s in &trace.steps {
            assert_eq!(s.x, x);
            assert_eq!(s.u, 0.0);
            x = map.eval(x);
        }
    }

    #[test]
    fn control_vanishes_on_orbit() {
        let map = MapSpec::logistic(3.8);
        let cycle = nontrivial(&map, 2);
        let coeffs = cv(2, &[0.5, 0.3, 0.2]);
        let history = perturbed_history(&cycle, &coeffs, 0.0);
        let trace = simulate(&map, &coeffs, &history, 1000, Some(&cycle)).unwrap();
        assert!(trace.steps.iter().all(|s| s.u.abs() <= 1e-12));
        assert_eq!(detect_convergence(&trace, &cycle, 1e-6), ConvergenceVerdict::Converged { at: 0 });
    }

    #[test]
    fn stabilizes_logistic_fixed_point() {
        let map = MapSpec::logistic(3.9);
        let cycle = nontrivial(&map, 1);
        let coeffs = fejer_coeffs_t1(2, 1e-2).unwrap();
        let history = perturbed_history(&cycle, &coeffs, 1e-3);
        let trace = simulate(&map, &coeffs, &history, 10_000, Some(&cycle)).unwrap();
        assert!(matches!(detect_convergence(&trace, &cycle, 1e-6), ConvergenceVerdict::Converged { .. }));
    }

    #[test]
    fn divergence_is_flagged() {
        let map = MapSpec::logistic(3.9);
        let trace = simulate(&map, &cv(1, &[1.0]), &[2.0], 100, None).unwrap();
        assert!(trace.diverged);
        assert!(trace.steps.len() < 100);
        let cycle = nontrivial(&map, 1);
        assert_eq!(detect_convergence(&trace, &cycle, 1e-6), ConvergenceVerdict::NotConverged);
    }

    #[test]
    fn history_length_checked() {
        let map = MapSpec::logistic(3.9);
        let err = simulate(&map, &cv(1, &[0.5, 0.5]), &[0.3], 10, None).unwrap_err();
        assert_eq!(err, DynamicsError::HistoryLength { expected: 2, found: 1 });
    }

    #[test]
    fn jacobian_examples() {
        let map = MapSpec::logistic(3.9);
        let fixed = nontrivial(&map, 1);
        let p = augmented_charpoly(&map, &fixed, &cv(1, &[1.0])).unwrap();
        assert!((p.coefficients()[0] - 1.9).abs() < 1e-12 && p.coefficients()[1] == 1.0);

        let a = cv(1, &[2.0 / 3.0, 1.0 / 3.0]);
        let p = augmented_charpoly(&map, &fixed, &a).unwrap();
        let expected = build_char_poly(a.weights(), 1, fixed.mu);
        for (x, y) in p.coefficients().iter().zip(expected.coefficients()) {
            assert!((x - y).abs() < 1e-10);
        }

        let map = MapSpec::logistic(3.8);
        let cycle = nontrivial(&map, 2);
        let a = cv(2, &[0.75, 0.25]);
        let p = augmented_charpoly(&map, &cycle, &a).unwrap();
        let expected = build_char_poly(a.weights(), 2, -2.84);
        assert_eq!(p.degree(), 3);
        for (x, y) in p.coefficients().iter().zip(expected.coefficients()) {
            assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", p, expected);
        }

        assert!(matches!(
            augmented_charpoly(&map, &cycle, &cv(1, &[1.0])),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_format() {
        let trace =
            SimulationTrace { steps: vec![TraceStep { k: 0, x: 0.1, u: 0.0, dist: Some(0.5) }], diverged: false };
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("k,x,u,dist"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(row[0], "0");
    }
}
