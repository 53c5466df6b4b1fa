//! Stability margin `mu_tilde`: the controlled cycle is stable for every
//! multiplier in `(mu_tilde, 1)`.
//!
//! Roots of `p(λ) = λ^L - mu q(λ)^T` can only reach the unit circle at
//! `mu = 1/Φ(t)` where `Φ(t) = q(e^(it))^T / e^(itL)` is real. The margin is
//! therefore the reciprocal of the most negative real value taken by `Φ` on
//! the circle. For `T = 1` this is `min C` over the zeros of `S`; for `T = 2`
//! it is `-(max |S|)²` over the zeros of the odd-frequency `C`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpoly::{build_char_poly, build_q, schur_stable, CharPolyError, RealPolynomial};
use crate::coeffs::CoefficientVector;
use crate::trigpoly::{constraint_zeros_t1, constraint_zeros_t2, ConjugateTrigPair, TrigError, TrigMode};

/// Smallest |M| accepted by [`margin_t2`].
pub const ZERO_MAX_TOL: f64 = 1e-12;
/// Bisection width on the curve parameter.
pub const CURVE_T_TOL: f64 = 1e-13;
/// Tangential Im Φ threshold, relative to `(Σ|a_j|)^T`.
pub const TANGENTIAL_REL: f64 = 1e-9;
/// Crossings this close to a tangential point are treated as its split copies.
pub const TANGENT_MERGE: f64 = 1e-6;
/// Starting multiplier for the downward doubling in [`margin_bisect`].
pub const BISECT_START: f64 = -1e-6;
pub const BISECT_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarginError {
    #[error("expected period {expected} coefficients, got period {found}")]
    PeriodMismatch { expected: usize, found: usize },
    #[error("minimum of C over the constraint set is {0}, not negative")]
    NonNegativeInfimum(f64),
    #[error("max |S| over the constraint set is {0}")]
    ZeroMax(f64),
    #[error("boundary curve never crosses the negative real axis")]
    NoNegativeCrossing(Box<MarginReport>),
    #[error("characteristic polynomial stays stable down to mu = {0}")]
    NeverUnstable(f64),
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error(transparent)]
    CharPoly(#[from] CharPolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginMethod {
    ClosedT1,
    ClosedT2,
    Curve,
    Bisect,
}

/// One examined boundary point. For the closed forms `c`, `s` are the pair
/// values; for the curve method they are `Re Φ` and `Im Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintPoint {
    pub t: f64,
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub mu_tilde: f64,
    pub witness_t: f64,
    /// `1 / mu_tilde`, the attained infimum.
    pub witness_value: f64,
    pub method: MarginMethod,
    pub constraint_points: Vec<ConstraintPoint>,
}

/// One sample `Φ(t) = q(e^(it))^T / e^(itL)` of the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

fn require_period(coeffs: &CoefficientVector, expected: usize) -> Result<(), MarginError> {
    if coeffs.period() != expected {
        return Err(MarginError::PeriodMismatch { expected, found: coeffs.period() });
    }
    Ok(())
}

/// Closed-form margin for a 1-cycle.
pub fn margin_t1(coeffs: &CoefficientVector) -> Result<MarginReport, MarginError> {
    require_period(coeffs, 1)?;
    let pair = ConjugateTrigPair::new(TrigMode::T1, coeffs.weights().to_vec());
    let zeros = constraint_zeros_t1(&pair)?;
    let points: Vec<ConstraintPoint> = zeros
        .angles()
        .map(|t| {
            let (c, s) = pair.eval(t);
            ConstraintPoint { t, c, s }
        })
        .collect();
    let witness = points
        .iter()
        .copied()
        .reduce(|best, p| if p.c < best.c { p } else { best })
        .expect("constraint set always holds the endpoints");
    if witness.c >= 0.0 {
        return Err(MarginError::NonNegativeInfimum(witness.c));
    }
    Ok(MarginReport {
        mu_tilde: 1.0 / witness.c,
        witness_t: witness.t,
        witness_value: witness.c,
        method: MarginMethod::ClosedT1,
        constraint_points: points,
    })
}

/// Closed-form margin for a 2-cycle: `mu_tilde = -1/M²` with `M` the largest
/// `|S|` over zeros of `C` in `[0, π/2]`. The symmetries
/// `S(π - t) = S(t)` and `S(-t) = -S(t)` make that quarter period exhaustive.
pub fn margin_t2(coeffs: &CoefficientVector) -> Result<MarginReport, MarginError> {
    require_period(coeffs, 2)?;
    let pair = ConjugateTrigPair::new(TrigMode::T2, coeffs.weights().to_vec());
    let zeros = constraint_zeros_t2(&pair)?;
    let points: Vec<ConstraintPoint> = zeros
        .angles()
        .map(|t| {
            let (c, s) = pair.eval(t);
            ConstraintPoint { t, c, s }
        })
        .collect();
    let witness = points
        .iter()
        .copied()
        .reduce(|best, p| if p.s.abs() > best.s.abs() { p } else { best })
        .expect("constraint set always holds π/2");
    let m = witness.s.abs();
    if m <= ZERO_MAX_TOL {
        return Err(MarginError::ZeroMax(m));
    }
    Ok(MarginReport {
        mu_tilde: -1.0 / (m * m),
        witness_t: witness.t,
        witness_value: -m * m,
        method: MarginMethod::ClosedT2,
        constraint_points: points,
    })
}

/// Closed form for periods 1 and 2, boundary curve otherwise.
pub fn margin_auto(coeffs: &CoefficientVector) -> Result<MarginReport, MarginError> {
    match coeffs.period() {
        1 => margin_t1(coeffs),
        2 => margin_t2(coeffs),
        t => margin_curve(coeffs, t),
    }
}

struct BoundaryCurve {
    q: RealPolynomial,
    dq: RealPolynomial,
    period: usize,
    order: usize,
}

impl BoundaryCurve {
    fn new(weights: &[f64], period: usize) -> Self {
        let q = build_q(weights);
        let dq = q.derivative();
        let order = (weights.len() - 1) * period + 1;
        Self { q, dq, period, order }
    }

    fn unit(t: f64) -> Complex64 {
        if t == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if t == PI {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(t.cos(), t.sin())
        }
    }

    fn rotation(&self, t: f64) -> Complex64 {
        let angle = -(self.order as f64) * t;
        if t == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if t == PI {
            let sign = if self.order.is_multiple_of(2) { 1.0 } else { -1.0 };
            Complex64::new(sign, 0.0)
        } else {
            Complex64::new(angle.cos(), angle.sin())
        }
    }

    fn value(&self, t: f64) -> Complex64 {
        let z = Self::unit(t);
        self.q.eval_complex(z).powu(self.period as u32) * self.rotation(t)
    }

    /// `dΦ/dt = i e^(-iLt) (T e^(it) q^(T-1) q' - L q^T)`.
    fn derivative(&self, t: f64) -> Complex64 {
        let z = Self::unit(t);
        let qz = self.q.eval_complex(z);
        let dqz = self.dq.eval_complex(z);
        let t_f = self.period as f64;
        let q_pow_less = qz.powu(self.period as u32 - 1);
        let inner = z * dqz * q_pow_less * t_f - qz * q_pow_less * self.order as f64;
        Complex64::new(0.0, 1.0) * self.rotation(t) * inner
    }
}

/// Samples of `Φ` on `[0, π]`.
pub fn sample_curve(coeffs: &CoefficientVector, period: usize, samples: usize) -> Vec<CurveSample> {
    let curve = BoundaryCurve::new(coeffs.weights(), period);
    (0..=samples)
        .map(|i| {
            let t = grid_point(i, samples);
            let v = curve.value(t);
            CurveSample { t, re: v.re, im: v.im }
        })
        .collect()
}

fn grid_point(i: usize, samples: usize) -> f64 {
    if i == samples {
        PI
    } else {
        PI * i as f64 / samples as f64
    }
}

pub fn curve_sample_count(depth: usize, period: usize) -> usize {
    4096.max(64 * depth * period)
}

/// Generic boundary-curve margin for any period.
///
/// `Φ` is sampled on `[0, π]` (conjugate symmetry covers the rest). Real
/// crossings come from sign changes of `Im Φ` refined by bisection, from
/// exact zeros on the grid, and from grid minima of `|Im Φ|` whose refined
/// extremum lies below `1e-9 (Σ|a_j|)^T` (tangential touches). The endpoints
/// `t = 0, π` are always real points.
pub fn margin_curve(coeffs: &CoefficientVector, period: usize) -> Result<MarginReport, MarginError> {
    margin_curve_partitioned(coeffs, period, 1)
}

/// [`margin_curve`] with the grid split into `parts` contiguous blocks scanned
/// on separate threads and merged by a min reduction. The report does not
/// depend on `parts`.
pub fn margin_curve_partitioned(
    coeffs: &CoefficientVector,
    period: usize,
    parts: usize,
) -> Result<MarginReport, MarginError> {
    assert!(period >= 1, "period must be positive");
    let curve = BoundaryCurve::new(coeffs.weights(), period);
    let samples = curve_sample_count(coeffs.depth(), period);
    let values: Vec<Complex64> = (0..=samples).map(|i| curve.value(grid_point(i, samples))).collect();
    let tangential_tol = TANGENTIAL_REL * coeffs.abs_sum().powi(period as i32);

    let parts = parts.clamp(1, samples);
    let block = samples.div_ceil(parts);
    let ranges: Vec<(usize, usize)> =
        (0..parts).map(|p| (p * block, ((p + 1) * block).min(samples))).filter(|(a, b)| a < b).collect();

    let located: Vec<Located> = if ranges.len() == 1 {
        scan_block(&curve, &values, samples, ranges[0], tangential_tol)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|&range| {
                    let curve = &curve;
                    let values = &values;
                    scope.spawn(move || scan_block(curve, values, samples, range, tangential_tol))
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("curve scan panicked")).collect()
        })
    };
    let mut points = merge_located(located);
    for t in [0.0, PI] {
        let v = curve.value(t);
        points.push(ConstraintPoint { t, c: v.re, s: v.im });
    }
    points.sort_by(|a, b| a.t.total_cmp(&b.t));
    points.dedup_by(|a, b| a.t == b.t);

    let witness = points.iter().copied().filter(|p| p.c < 0.0).reduce(|best, p| if p.c < best.c { p } else { best });
    match witness {
        Some(w) => Ok(MarginReport {
            mu_tilde: 1.0 / w.c,
            witness_t: w.t,
            witness_value: w.c,
            method: MarginMethod::Curve,
            constraint_points: points,
        }),
        None => Err(MarginError::NoNegativeCrossing(Box::new(MarginReport {
            mu_tilde: f64::NEG_INFINITY,
            witness_t: f64::NAN,
            witness_value: 0.0,
            method: MarginMethod::Curve,
            constraint_points: points,
        }))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Located {
    Crossing(ConstraintPoint),
    Tangent(ConstraintPoint),
}

/// Scans grid intervals `[i, i+1]` for `i` in `range` and grid points `i` in
/// `range` for exact and tangential zeros of `Im Φ`.
#[allow(clippy::needless_range_loop)]
fn scan_block(
    curve: &BoundaryCurve,
    values: &[Complex64],
    samples: usize,
    (start, end): (usize, usize),
    tangential_tol: f64,
) -> Vec<Located> {
    let mut out = Vec::new();
    let im = |i: usize| values[i].im;
    for i in start..end {
        let (t0, t1) = (grid_point(i, samples), grid_point(i + 1, samples));
        if i > 0 && im(i) == 0.0 {
            out.push(Located::Crossing(ConstraintPoint { t: t0, c: values[i].re, s: 0.0 }));
        }
        if im(i) * im(i + 1) < 0.0 {
            let t = bisect_im(curve, t0, t1, im(i));
            let v = curve.value(t);
            out.push(Located::Crossing(ConstraintPoint { t, c: v.re, s: v.im }));
        }
        // Grid minima of |Im Φ| of either sign: rounding can split a double
        // root into two close simple ones straddling a grid point.
        if i > 0 && i < samples {
            let (a, b, c) = (im(i - 1).abs(), im(i).abs(), im(i + 1).abs());
            if b <= a && b <= c {
                let lo = grid_point(i - 1, samples);
                let hi = grid_point(i + 1, samples);
                if let Some(t) = extremum_of_im(curve, lo, hi) {
                    let v = curve.value(t);
                    if v.im.abs() <= tangential_tol {
                        out.push(Located::Tangent(ConstraintPoint { t, c: v.re, s: v.im }));
                    }
                }
            }
        }
    }
    out
}

/// Drops crossings lying within [`TANGENT_MERGE`] of an accepted tangential
/// point (split copies of one double root) and duplicate tangents.
fn merge_located(located: Vec<Located>) -> Vec<ConstraintPoint> {
    let mut tangents: Vec<ConstraintPoint> = located
        .iter()
        .filter_map(|l| match l {
            Located::Tangent(p) => Some(*p),
            Located::Crossing(_) => None,
        })
        .collect();
    tangents.sort_by(|a, b| a.t.total_cmp(&b.t));
    tangents.dedup_by(|a, b| (a.t - b.t).abs() <= 10.0 * CURVE_T_TOL);
    let mut points: Vec<ConstraintPoint> = located
        .iter()
        .filter_map(|l| match l {
            Located::Crossing(p) => Some(*p),
            Located::Tangent(_) => None,
        })
        .filter(|p| tangents.iter().all(|t| (t.t - p.t).abs() > TANGENT_MERGE))
        .collect();
    points.extend(tangents);
    points
}

fn bisect_im(curve: &BoundaryCurve, mut a: f64, mut b: f64, im_a: f64) -> f64 {
    let sign = im_a.signum();
    while b - a > CURVE_T_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = curve.value(mid).im;
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Stationary point of `Im Φ` in `[lo, hi]`, located by bisection on
/// `d Im Φ / dt`.
fn extremum_of_im(curve: &BoundaryCurve, lo: f64, hi: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let da = curve.derivative(a).im;
    let db = curve.derivative(b).im;
    if da == 0.0 {
        return Some(a);
    }
    if da * db > 0.0 {
        return None;
    }
    let sign = da.signum();
    while b - a > CURVE_T_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let d = curve.derivative(mid).im;
        if d == 0.0 {
            return Some(mid);
        }
        if d.signum() == sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

fn is_stable(weights: &[f64], period: usize, mu: f64) -> Result<bool, MarginError> {
    Ok(schur_stable(&build_char_poly(weights, period, mu))?.stable)
}

/// Independent margin oracle: the stable/unstable transition of the
/// Schur–Cohn verdict, bracketed by doubling down from `-1e-6` and refined
/// by 200 bisection steps. Fails with `NeverUnstable` when still stable at
/// `-4 · 2^(N+T)`.
pub fn margin_bisect(coeffs: &CoefficientVector, period: usize) -> Result<f64, MarginError> {
    let weights = coeffs.weights();
    let limit = -4.0 * 2f64.powi((coeffs.depth() + period) as i32);
    let mut stable_mu = 0.0;
    let mut unstable_mu = BISECT_START;
    while is_stable(weights, period, unstable_mu)? {
        if unstable_mu < limit {
            return Err(MarginError::NeverUnstable(unstable_mu));
        }
        stable_mu = unstable_mu;
        unstable_mu *= 2.0;
    }
    for _ in 0..BISECT_STEPS {
        let mid = 0.5 * (stable_mu + unstable_mu);
        if mid == stable_mu || mid == unstable_mu {
            break;
        }
        if is_stable(weights, period, mid)? {
            stable_mu = mid;
        } else {
            unstable_mu = mid;
        }
    }
    Ok(0.5 * (stable_mu + unstable_mu))
}

/// [`margin_bisect`] wrapped as a report; no witness angle is available.
pub fn margin_bisect_report(coeffs: &CoefficientVector, period: usize) -> Result<MarginReport, MarginError> {
    let mu_tilde = margin_bisect(coeffs, period)?;
    Ok(MarginReport {
        mu_tilde,
        witness_t: f64::NAN,
        witness_value: 1.0 / mu_tilde,
        method: MarginMethod::Bisect,
        constraint_points: Vec::new(),
    })
}
