//! Conjugate trigonometric polynomial pairs `(C, S)` and their zero sets.
//!
//! In mode [`TrigMode::T1`] the pair is `C(t) = Σ a_j cos jt`,
//! `S(t) = Σ a_j sin jt`; in mode [`TrigMode::T2`] only the odd frequencies
//! `2j-1` appear. Zeros are located algebraically through the Chebyshev
//! identities `sin jt = sin t · U_(j-1)(cos t)` and
//! `cos (2j-1)t = cos t · W_(j-1)(cos² t)`, so even-multiplicity zeros are
//! found as reliably as sign changes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpoly::RealPolynomial;

/// Residual bound for constraint zeros, relative to `Σ|a_j|`.
pub const ZERO_RESIDUAL_REL: f64 = 1e-9;
/// Relative residual accepted by [`real_roots_in_interval`].
pub const ROOT_RESIDUAL_REL: f64 = 1e-10;
/// Tolerance for the hypotheses of [`factor_pair`].
pub const FACTOR_HYPOTHESIS_TOL: f64 = 1e-8;
/// Division remainder bound for [`factor_pair`], relative to `Σ|a_j|`.
pub const FACTOR_REMAINDER_REL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrigError {
    #[error("all coefficients are zero")]
    AllZero,
    #[error("polynomial is identically zero")]
    DegenerateInput,
    #[error("operation requires mode {expected:?}, pair is {found:?}")]
    WrongMode { expected: TrigMode, found: TrigMode },
    #[error("t = {t} is not a common point: S = {s}, C - gamma = {c_offset}")]
    NotAZero { t: f64, s: f64, c_offset: f64 },
    #[error("division remainder {norm:e} exceeds tolerance")]
    RemainderTooLarge { norm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigMode {
    T1,
    T2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateTrigPair {
    mode: TrigMode,
    coeffs: Vec<f64>,
}

impl ConjugateTrigPair {
    pub fn new(mode: TrigMode, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a trigonometric pair needs at least one coefficient");
        Self { mode, coeffs }
    }

    pub fn mode(&self) -> TrigMode {
        self.mode
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|a| a.abs()).sum()
    }

    fn frequency(&self, j: usize) -> f64 {
        match self.mode {
            TrigMode::T1 => j as f64,
            TrigMode::T2 => (2 * j - 1) as f64,
        }
    }

    /// `(C(t), S(t))` with Neumaier-compensated summation.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let mut c = CompensatedSum::default();
        let mut s = CompensatedSum::default();
        for (j, &a) in self.coeffs.iter().enumerate() {
            let (sin, cos) = (self.frequency(j + 1) * t).sin_cos();
            c.add(a * cos);
            s.add(a * sin);
        }
        (c.value(), s.value())
    }

    fn require(&self, mode: TrigMode) -> Result<(), TrigError> {
        if self.mode != mode {
            return Err(TrigError::WrongMode { expected: mode, found: self.mode });
        }
        if self.coeffs.iter().all(|&a| a == 0.0) {
            return Err(TrigError::AllZero);
        }
        Ok(())
    }
}

pub fn eval_pair(pair: &ConjugateTrigPair, t: f64) -> (f64, f64) {
    pair.eval(t)
}

#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Integer coefficient tables (ascending powers of x) for Chebyshev
/// polynomials of the second kind `U_0 .. U_(count-1)`.
fn chebyshev_u_table(count: usize) -> Vec<Vec<i128>> {
    let mut table: Vec<Vec<i128>> = Vec::with_capacity(count);
    for k in 0..count {
        let row = match k {
            0 => vec![1],
            1 => vec![0, 2],
            _ => next_chebyshev(&table[k - 1], &table[k - 2]),
        };
        table.push(row);
    }
    table
}

/// Integer coefficient tables for Chebyshev polynomials of the first kind
/// `T_0 .. T_(count-1)`.
fn chebyshev_t_table(count: usize) -> Vec<Vec<i128>> {
    let mut table: Vec<Vec<i128>> = Vec::with_capacity(count);
    for k in 0..count {
        let row = match k {
            0 => vec![1],
            1 => vec![0, 1],
            _ => next_chebyshev(&table[k - 1], &table[k - 2]),
        };
        table.push(row);
    }
    table
}

/// `2x·prev - prevprev`.
fn next_chebyshev(prev: &[i128], prevprev: &[i128]) -> Vec<i128> {
    let mut row = vec![0; prev.len() + 1];
    for (i, &c) in prev.iter().enumerate() {
        row[i + 1] += 2 * c;
    }
    for (i, &c) in prevprev.iter().enumerate() {
        row[i] -= c;
    }
    row
}

/// `P` with `S(t) = sin t · P(cos t)`, in monomials of `x = cos t`.
pub fn reduce_sine_t1(pair: &ConjugateTrigPair) -> Result<RealPolynomial, TrigError> {
    if pair.mode != TrigMode::T1 {
        return Err(TrigError::WrongMode { expected: TrigMode::T1, found: pair.mode });
    }
    let n = pair.len();
    let table = chebyshev_u_table(n);
    let mut out = vec![0.0; n];
    for (a, u) in pair.coeffs.iter().zip(&table) {
        for (k, &c) in u.iter().enumerate() {
            out[k] += a * c as f64;
        }
    }
    Ok(RealPolynomial::new(out))
}

/// `R` with `C(t) = cos t · R(cos² t)` for a mode-T2 pair.
pub fn reduce_cosine_t2(pair: &ConjugateTrigPair) -> Result<RealPolynomial, TrigError> {
    if pair.mode != TrigMode::T2 {
        return Err(TrigError::WrongMode { expected: TrigMode::T2, found: pair.mode });
    }
    let n = pair.len();
    let table = chebyshev_t_table(2 * n);
    let mut out = vec![0.0; n];
    for (j, a) in pair.coeffs.iter().enumerate() {
        // T_(2j+1) is odd: x^(2k+1) contributes to u^k.
        for (power, &c) in table[2 * j + 1].iter().enumerate().skip(1).step_by(2) {
            out[(power - 1) / 2] += a * c as f64;
        }
    }
    Ok(RealPolynomial::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Simple,
    Tangential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub x: f64,
    pub multiplicity: Multiplicity,
}

/// All real roots of `p` in `[lo, hi]`, ascending.
///
/// Roots are isolated recursively: the real critical points of `p` (roots of
/// `p'`, found the same way) cut the interval into monotone pieces, each
/// holding at most one sign change, which is refined by bisection. A
/// breakpoint where `|p| <= 1e-10 · max|c_k|` is itself reported as a root;
/// interior critical points reported this way are tangential.
pub fn real_roots_in_interval(p: &RealPolynomial, lo: f64, hi: f64) -> Result<Vec<RealRoot>, TrigError> {
    real_roots_with_tolerance(p, lo, hi, ROOT_RESIDUAL_REL * p.max_abs_coefficient())
}

/// [`real_roots_in_interval`] with an explicit absolute residual threshold for
/// accepting breakpoints as roots.
pub fn real_roots_with_tolerance(p: &RealPolynomial, lo: f64, hi: f64, tol: f64) -> Result<Vec<RealRoot>, TrigError> {
    assert!(lo < hi, "empty search interval [{lo}, {hi}]");
    if p.is_zero() {
        return Err(TrigError::DegenerateInput);
    }
    Ok(isolate(p, lo, hi, tol))
}

fn isolate(p: &RealPolynomial, lo: f64, hi: f64, tol: f64) -> Vec<RealRoot> {
    match p.degree() {
        0 => return Vec::new(),
        1 => {
            let c = p.coefficients();
            let x = -c[0] / c[1];
            return if (lo..=hi).contains(&x) {
                vec![RealRoot { x, multiplicity: Multiplicity::Simple }]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }

    let dp = p.derivative();
    let dtol = ROOT_RESIDUAL_REL * dp.max_abs_coefficient();
    let critical: Vec<f64> =
        isolate(&dp, lo, hi, dtol).into_iter().map(|r| r.x).filter(|&x| x > lo && x < hi).collect();

    let mut breaks = Vec::with_capacity(critical.len() + 2);
    breaks.push((lo, false));
    breaks.extend(critical.iter().map(|&x| (x, true)));
    breaks.push((hi, false));
    breaks.dedup_by(|a, b| a.0 == b.0);

    let signed: Vec<f64> = breaks
        .iter()
        .map(|&(x, _)| {
            let v = p.eval(x);
            if v.abs() <= tol {
                0.0
            } else {
                v
            }
        })
        .collect();

    let mut roots = Vec::new();
    for (i, &(x, is_critical)) in breaks.iter().enumerate() {
        if signed[i] == 0.0 {
            let multiplicity = if is_critical { Multiplicity::Tangential } else { Multiplicity::Simple };
            roots.push(RealRoot { x, multiplicity });
        }
        if i + 1 < breaks.len() && signed[i] * signed[i + 1] < 0.0 {
            let x = bisect(p, x, breaks[i + 1].0, signed[i]);
            roots.push(RealRoot { x, multiplicity: Multiplicity::Simple });
        }
    }
    roots
}

/// Bisection on a monotone bracket until the floating-point interval is
/// exhausted; returns whichever end has the smaller residual.
fn bisect(p: &RealPolynomial, mut a: f64, mut b: f64, value_at_a: f64) -> f64 {
    let sign_a = value_at_a.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = p.eval(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    if p.eval(a).abs() <= p.eval(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigZero {
    pub t: f64,
    pub multiplicity: Multiplicity,
    pub residual: f64,
}

/// Sorted zeros of one member of a pair on a closed angular interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealRootSet {
    pub lo: f64,
    pub hi: f64,
    pub points: Vec<TrigZero>,
}

impl RealRootSet {
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|z| z.t)
    }
}

fn threshold_for(pair: &ConjugateTrigPair, reduced: &RealPolynomial) -> f64 {
    (ROOT_RESIDUAL_REL * reduced.max_abs_coefficient()).min(ZERO_RESIDUAL_REL * pair.abs_sum())
}

fn finish(mut points: Vec<TrigZero>, lo: f64, hi: f64) -> RealRootSet {
    points.sort_by(|a, b| a.t.total_cmp(&b.t));
    points.dedup_by(|a, b| a.t == b.t);
    RealRootSet { lo, hi, points }
}

/// Every zero of `S` on `[0, π]`. The endpoints are always present; interior
/// zeros come from the roots of `P` in `(-1, 1)` with `S = sin t · P(cos t)`.
pub fn constraint_zeros_t1(pair: &ConjugateTrigPair) -> Result<RealRootSet, TrigError> {
    pair.require(TrigMode::T1)?;
    let reduced = reduce_sine_t1(pair)?;
    let tol = threshold_for(pair, &reduced);
    let mut points = vec![
        TrigZero { t: 0.0, multiplicity: Multiplicity::Simple, residual: 0.0 },
        TrigZero { t: PI, multiplicity: Multiplicity::Simple, residual: 0.0 },
    ];
    for root in real_roots_with_tolerance(&reduced, -1.0, 1.0, tol)? {
        if root.x <= -1.0 || root.x >= 1.0 {
            continue;
        }
        let t = root.x.acos();
        if t <= 0.0 || t >= PI {
            continue;
        }
        let residual = pair.eval(t).1.abs();
        points.push(TrigZero { t, multiplicity: root.multiplicity, residual });
    }
    Ok(finish(points, 0.0, PI))
}

/// Every zero of `C` on `[0, π/2]` for a mode-T2 pair. `π/2` is always a
/// zero; the rest come from roots of `R` in `(0, 1]` with
/// `C = cos t · R(cos² t)`.
pub fn constraint_zeros_t2(pair: &ConjugateTrigPair) -> Result<RealRootSet, TrigError> {
    pair.require(TrigMode::T2)?;
    let reduced = reduce_cosine_t2(pair)?;
    let tol = threshold_for(pair, &reduced);
    let mut points = vec![TrigZero { t: FRAC_PI_2, multiplicity: Multiplicity::Simple, residual: 0.0 }];
    for root in real_roots_with_tolerance(&reduced, 0.0, 1.0, tol)? {
        if root.x <= 0.0 {
            continue;
        }
        let t = root.x.min(1.0).sqrt().acos();
        if t >= FRAC_PI_2 {
            continue;
        }
        let residual = pair.eval(t).0.abs();
        points.push(TrigZero { t, multiplicity: root.multiplicity, residual });
    }
    Ok(finish(points, 0.0, FRAC_PI_2))
}

/// Factors a mode-T1 pair through common points `t_1..t_m` where `S = 0` and
/// `C = gamma`:
///
/// ```text
/// C(t) = gamma + Π (cos t - cos t_k) Σ_(k=m)^(n-m) α_k cos kt
/// S(t) =         Π (cos t - cos t_k) Σ_(k=m)^(n-m) α_k sin kt
/// ```
///
/// Computed by dividing `F(z) = -gamma + Σ a_j z^j` by
/// `Π (z² - 2z cos t_k + 1)`. Returns `α_m .. α_(n-m)`, with
/// `α_m = -2^m gamma`.
pub fn factor_pair(pair: &ConjugateTrigPair, zeros: &[f64], gamma: f64) -> Result<Vec<f64>, TrigError> {
    if pair.mode != TrigMode::T1 {
        return Err(TrigError::WrongMode { expected: TrigMode::T1, found: pair.mode });
    }
    let n = pair.len();
    let m = zeros.len();
    for &t in zeros {
        let (c, s) = pair.eval(t);
        let bad_point = !(t > 0.0 && t < PI);
        if bad_point || s.abs() > FACTOR_HYPOTHESIS_TOL || (c - gamma).abs() > FACTOR_HYPOTHESIS_TOL {
            return Err(TrigError::NotAZero { t, s, c_offset: c - gamma });
        }
    }
    if 2 * m > n {
        let t = zeros[0];
        let (c, s) = pair.eval(t);
        return Err(TrigError::NotAZero { t, s, c_offset: c - gamma });
    }

    let mut dividend = Vec::with_capacity(n + 1);
    dividend.push(-gamma);
    dividend.extend_from_slice(&pair.coeffs);

    let mut divisor = vec![1.0];
    for &t in zeros {
        let quad = [1.0, -2.0 * t.cos(), 1.0];
        let mut next = vec![0.0; divisor.len() + 2];
        for (i, &d) in divisor.iter().enumerate() {
            for (j, &q) in quad.iter().enumerate() {
                next[i + j] += d * q;
            }
        }
        divisor = next;
    }

    let (quotient, remainder) = divide(&dividend, &divisor);
    let norm = remainder.iter().map(|r| r.abs()).fold(0.0, f64::max);
    if norm > FACTOR_REMAINDER_REL * pair.abs_sum().max(gamma.abs()) {
        return Err(TrigError::RemainderTooLarge { norm });
    }
    let scale = 2f64.powi(m as i32);
    Ok(quotient.iter().map(|q| scale * q).collect())
}

/// Long division of ascending coefficient lists; the divisor is monic.
fn divide(dividend: &[f64], divisor: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dd = divisor.len() - 1;
    if dividend.len() <= dd {
        return (vec![0.0], dividend.to_vec());
    }
    let mut rem = dividend.to_vec();
    let qlen = dividend.len() - dd;
    let mut quotient = vec![0.0; qlen];
    let lead = divisor[dd];
    for k in (0..qlen).rev() {
        let coef = rem[k + dd] / lead;
        quotient[k] = coef;
        for (i, &d) in divisor.iter().enumerate() {
            rem[k + i] -= coef * d;
        }
    }
    rem.truncate(dd);
    (quotient, rem)
}

/// Re-expands `gamma + Π(cos t - cos t_k) Σ α_k cos kt` into the coefficient
/// list `a_1 .. a_n` (inverse of [`factor_pair`]).
pub fn expand_factored(zeros: &[f64], gamma: f64, alphas: &[f64]) -> Vec<f64> {
    let m = zeros.len();
    // Work with F(z) = Π(z² - 2 z cos t_k + 1) · 2^(-m) Σ α_k z^(k-m), then add gamma.
    let mut poly: Vec<f64> = alphas.iter().map(|a| a / 2f64.powi(m as i32)).collect();
    for &t in zeros {
        let quad = [1.0, -2.0 * t.cos(), 1.0];
        let mut next = vec![0.0; poly.len() + 2];
        for (i, &d) in poly.iter().enumerate() {
            for (j, &q) in quad.iter().enumerate() {
                next[i + j] += d * q;
            }
        }
        poly = next;
    }
    poly[0] += gamma;
    poly.into_iter().skip(1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn t1(a: &[f64]) -> ConjugateTrigPair {
        ConjugateTrigPair::new(TrigMode::T1, a.to_vec())
    }

    fn t2(a: &[f64]) -> ConjugateTrigPair {
        ConjugateTrigPair::new(TrigMode::T2, a.to_vec())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        assert_eq!(t1(&[1.0]).eval(0.0), (1.0, 0.0));
        let (c, s) = t1(&[2.0 / 3.0, 1.0 / 3.0]).eval(PI);
        assert!(close(c, -1.0 / 3.0, EPS) && close(s, 0.0, EPS));
        let (c, s) = t2(&[1.0]).eval(FRAC_PI_2);
        assert!(close(c, 0.0, EPS) && close(s, 1.0, EPS));
    }

    #[test]
    fn unit_sum_gives_unit_cosine_at_zero() {
        let (c, s) = t1(&[0.2, -0.5, 1.3]).eval(0.0);
        assert!(close(c, 1.0, 1e-15) && s == 0.0);
        let (c, s) = t2(&[0.2, -0.5, 1.3]).eval(0.0);
        assert!(close(c, 1.0, 1e-15) && s == 0.0);
    }

    #[test]
    fn sine_reduction_examples() {
        assert_eq!(reduce_sine_t1(&t1(&[1.0])).unwrap().coefficients(), &[1.0]);
        assert_eq!(reduce_sine_t1(&t1(&[0.0, 1.0])).unwrap().coefficients(), &[0.0, 2.0]);
        let p = reduce_sine_t1(&t1(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!(close(p.coefficients()[0], 2.0 / 3.0, EPS));
        assert!(close(p.coefficients()[1], 2.0 / 3.0, EPS));
    }

    #[test]
    fn sine_reduction_rejects_t2() {
        assert!(matches!(reduce_sine_t1(&t2(&[1.0])), Err(TrigError::WrongMode { .. })));
    }

    #[test]
    fn cosine_reduction_example() {
        // cos t (3/4 + 1/4 (4 cos² t - 3)) = cos³ t
        let r = reduce_cosine_t2(&t2(&[0.75, 0.25])).unwrap();
        assert!(close(r.coefficients()[0], 0.0, EPS));
        assert!(close(r.coefficients()[1], 1.0, EPS));
    }

    #[test]
    fn chebyshev_tables() {
        assert_eq!(chebyshev_u_table(4)[3], vec![0, -4, 0, 8]);
        assert_eq!(chebyshev_t_table(6)[5], vec![0, 5, 0, -20, 0, 16]);
    }

    #[test]
    fn zeros_t1_examples() {
        let z: Vec<f64> = constraint_zeros_t1(&t1(&[1.0])).unwrap().angles().collect();
        assert_eq!(z, vec![0.0, PI]);
        let z: Vec<f64> = constraint_zeros_t1(&t1(&[2.0 / 3.0, 1.0 / 3.0])).unwrap().angles().collect();
        assert_eq!(z, vec![0.0, PI]);
        let z: Vec<f64> = constraint_zeros_t1(&t1(&[0.0, 1.0])).unwrap().angles().collect();
        assert_eq!(z.len(), 3);
        assert!(close(z[1], FRAC_PI_2, EPS));
        assert_eq!(constraint_zeros_t1(&t1(&[0.0, 0.0])), Err(TrigError::AllZero));
    }

    #[test]
    fn zeros_t2_examples() {
        let z: Vec<f64> = constraint_zeros_t2(&t2(&[1.0])).unwrap().angles().collect();
        assert_eq!(z, vec![FRAC_PI_2]);
        let z: Vec<f64> = constraint_zeros_t2(&t2(&[0.75, 0.25])).unwrap().angles().collect();
        assert_eq!(z, vec![FRAC_PI_2]);
        let z: Vec<f64> = constraint_zeros_t2(&t2(&[0.0, 1.0])).unwrap().angles().collect();
        assert_eq!(z.len(), 2);
        assert!(close(z[0], PI / 6.0, EPS));
        assert_eq!(constraint_zeros_t2(&t2(&[0.0])), Err(TrigError::AllZero));
    }

    #[test]
    fn tangential_zero_is_found() {
        // S(t) = sin t (1 + cos 2t... ) built so that P(x) = (x - 0.3)^2.
        // P = 0.09 - 0.6x + x^2; U_0 = 1, U_1 = 2x, U_2 = 4x^2 - 1
        // a_3 = 1/4, a_2 = -0.3, a_1 = 0.09 + 0.25
        let pair = t1(&[0.34, -0.3, 0.25]);
        let set = constraint_zeros_t1(&pair).unwrap();
        assert_eq!(set.points.len(), 3);
        assert!(close(set.points[1].t, 0.3f64.acos(), 1e-7));
        assert_eq!(set.points[1].multiplicity, Multiplicity::Tangential);
    }

    #[test]
    fn real_roots_examples() {
        let r = real_roots_in_interval(&RealPolynomial::new(vec![-1.0, 0.0, 1.0]), -2.0, 2.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r[0].x, -1.0, EPS) && close(r[1].x, 1.0, EPS));

        let r = real_roots_in_interval(&RealPolynomial::new(vec![0.25, -1.0, 1.0]), 0.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!(close(r[0].x, 0.5, 1e-12));
        assert_eq!(r[0].multiplicity, Multiplicity::Tangential);

        let r = real_roots_in_interval(&RealPolynomial::new(vec![2.0 / 3.0, 2.0 / 3.0]), -1.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!(close(r[0].x, -1.0, EPS));

        assert_eq!(real_roots_in_interval(&RealPolynomial::zero(), 0.0, 1.0), Err(TrigError::DegenerateInput));
    }

    #[test]
    fn real_roots_multiple_and_clustered() {
        // (x - 0.2)^3 (x + 0.5)(x - 0.9)
        let p = RealPolynomial::new(vec![-0.2, 1.0])
            .powi(3)
            .mul(&RealPolynomial::new(vec![0.5, 1.0]))
            .mul(&RealPolynomial::new(vec![-0.9, 1.0]));
        let r = real_roots_in_interval(&p, -1.0, 1.0).unwrap();
        let xs: Vec<f64> = r.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3, "{xs:?}");
        assert!(close(xs[0], -0.5, 1e-12));
        assert!(close(xs[1], 0.2, 1e-4));
        assert!(close(xs[2], 0.9, 1e-12));
    }

    #[test]
    fn factor_empty_zero_list_is_identity() {
        let alphas = factor_pair(&t1(&[1.0]), &[], 0.0).unwrap();
        assert_eq!(alphas, vec![0.0, 1.0]);
    }

    #[test]
    fn factor_recovers_constructed_pair() {
        // Forward expansion of 0.25 + (cos t - 1/2)(-0.5 cos t + 2 cos 2t) by the
        // product-to-sum identities gives a = (1.25, -1.25, 1).
        let gamma = 0.25;
        let pair = t1(&[1.25, -1.25, 1.0]);
        let alphas = factor_pair(&pair, &[PI / 3.0], gamma).unwrap();
        assert_eq!(alphas.len(), 2);
        assert!(close(alphas[0], -0.5, 1e-12));
        assert!(close(alphas[1], 2.0, 1e-12));
    }

    #[test]
    fn factor_sin_2t() {
        let pair = t1(&[0.0, 1.0]);
        let gamma = pair.eval(FRAC_PI_2).0;
        let alphas = factor_pair(&pair, &[FRAC_PI_2], gamma).unwrap();
        assert_eq!(alphas.len(), 1);
        assert!(close(alphas[0], 2.0, 1e-12));
    }

    #[test]
    fn factor_rejects_non_zero() {
        let err = factor_pair(&t1(&[0.0, 1.0]), &[1.0], 0.0).unwrap_err();
        assert!(matches!(err, TrigError::NotAZero { .. }));
    }

    #[test]
    fn factor_reports_inconsistent_division() {
        // Two nearly coincident points pass the hypothesis check within tolerance
        // but sin 3t has only a simple zero there.
        let pair = t1(&[0.0, 0.0, 1.0, 0.0]);
        let t = PI / 3.0;
        let gamma = pair.eval(t).0;
        let result = factor_pair(&pair, &[t, t + 1e-9], gamma);
        assert!(matches!(result, Err(TrigError::RemainderTooLarge { .. })), "{result:?}");
    }
}
