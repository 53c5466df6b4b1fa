//! Closed-loop characteristic polynomial `p(λ) = λ^L - mu q(λ)^T` with
//! `L = (N-1)T + 1`, and Schur stability of real polynomials.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

/// Half-width of the band around `|r| = 1` in which a Schur–Cohn reflection
/// coefficient marks the polynomial as marginal.
pub const MARGINAL_BAND: f64 = 1e-10;

/// Relative threshold below which leading coefficients are trimmed.
const TRIM_REL: f64 = 1e-14;

/// Iteration cap for the simultaneous root finder.
pub const ROOT_ITERATION_CAP: usize = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharPolyError {
    #[error("polynomial is identically zero")]
    DegenerateInput,
    #[error("root iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Dense polynomial with real coefficients stored in ascending powers.
///
/// The zero polynomial is represented by a single `0.0` coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial from ascending coefficients, trimming leading
    /// entries below `1e-14 * max|c_k|`.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let threshold = TRIM_REL * scale;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= threshold) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// `c * λ^k`.
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for &c in self.coeffs.iter().rev() {
            slope = slope * x + value;
            value = value * x + c;
        }
        (value, slope)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) - other.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn powi(&self, exponent: usize) -> Self {
        let mut out = Self::new(vec![1.0]);
        for _ in 0..exponent {
            out = out.mul(self);
        }
        out
    }
}

/// `q(λ) = a_1 λ^(N-1) + ... + a_(N-1) λ + a_N`.
pub fn build_q(weights: &[f64]) -> RealPolynomial {
    RealPolynomial::new(weights.iter().rev().copied().collect())
}

/// `p(λ) = λ^((N-1)T+1) - mu q(λ)^T`, expanded by repeated convolution.
pub fn build_char_poly(weights: &[f64], period: usize, mu: f64) -> RealPolynomial {
    assert!(period >= 1, "cycle period must be positive");
    let depth = weights.len().max(1);
    let order = (depth - 1) * period + 1;
    let controlled = build_q(weights).powi(period).scale(mu);
    RealPolynomial::monomial(order, 1.0).sub(&controlled)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMethod {
    SchurCohn,
    Roots,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub marginal: bool,
    pub max_modulus: Option<f64>,
    pub method: StabilityMethod,
}

/// Schur–Cohn reduction. Each step removes one degree via
/// `(p(λ) - r λ^d p(1/λ)) / λ` with `r = c_0 / c_d`; the polynomial is Schur
/// stable iff every `|r| < 1`. A reflection coefficient within
/// [`MARGINAL_BAND`] of the unit circle ends the recursion with a marginal,
/// unstable verdict.
///
/// The recursion runs in double-double arithmetic: near a multiple root on the
/// circle the steps cancel to about half of f64 precision.
pub fn schur_stable(p: &RealPolynomial) -> Result<StabilityVerdict, CharPolyError> {
    if p.is_zero() {
        return Err(CharPolyError::DegenerateInput);
    }
    let lead = TwoFloat::from(p.leading());
    let mut c: Vec<TwoFloat> = p.coefficients().iter().map(|&x| TwoFloat::from(x) / lead).collect();
    let verdict =
        |stable, marginal| StabilityVerdict { stable, marginal, max_modulus: None, method: StabilityMethod::SchurCohn };
    let one = TwoFloat::from(1.0);
    while c.len() > 1 {
        let d = c.len() - 1;
        let r = c[0];
        let mag = r.abs();
        if f64::from((mag - one).abs()) <= MARGINAL_BAND {
            return Ok(verdict(false, true));
        }
        if mag > one {
            return Ok(verdict(false, false));
        }
        let norm = (one - r) * (one + r);
        c = (0..d).map(|i| (c[i + 1] - r * c[d - 1 - i]) / norm).collect();
    }
    Ok(verdict(true, false))
}

/// Verdict read off the computed roots: stable when every modulus is below
/// `1 - MARGINAL_BAND`, marginal when the largest lies inside the band.
pub fn root_verdict(p: &RealPolynomial) -> Result<StabilityVerdict, CharPolyError> {
    let max_modulus = roots(p)?.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    Ok(StabilityVerdict {
        stable: max_modulus < 1.0 - MARGINAL_BAND,
        marginal: (max_modulus - 1.0).abs() <= MARGINAL_BAND,
        max_modulus: Some(max_modulus),
        method: StabilityMethod::Roots,
    })
}

/// All complex roots by Aberth–Ehrlich simultaneous iteration.
///
/// Exact zero roots are split off first. A root estimate is frozen once its
/// residual reaches the rounding level of the Horner evaluation or its
/// correction falls below machine precision.
pub fn roots(p: &RealPolynomial) -> Result<Vec<Complex64>, CharPolyError> {
    if p.is_zero() {
        return Err(CharPolyError::DegenerateInput);
    }
    let mut out = Vec::with_capacity(p.degree());
    let coeffs = p.coefficients();
    let zeros = coeffs.iter().take_while(|&&c| c == 0.0).count();
    out.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
    let lead = p.leading();
    let c: Vec<f64> = coeffs[zeros..].iter().map(|x| x / lead).collect();
    let d = c.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    if d == 1 {
        out.push(Complex64::new(-c[0], 0.0));
        return Ok(out);
    }

    let abs_c: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    let radius = c[0].abs().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4)).collect();
    let mut done = vec![false; d];

    for _ in 0..ROOT_ITERATION_CAP {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let mut value = Complex64::new(0.0, 0.0);
            let mut slope = Complex64::new(0.0, 0.0);
            let mut bound = 0.0;
            let zi_abs = zi.norm();
            for k in (0..=d).rev() {
                slope = slope * zi + value;
                value = value * zi + c[k];
                bound = bound * zi_abs + abs_c[k];
            }
            if value.norm() <= 4.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let newton = value / slope;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = zi - step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            out.extend(z);
            return Ok(out);
        }
    }
    Err(CharPolyError::NoConvergence(ROOT_ITERATION_CAP))
}
