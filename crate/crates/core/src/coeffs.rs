//! Control weights `a_1..a_N` and the auxiliary nonnegative cosine
//! polynomials they are built from.
//!
//! The optimal T=1 weights come from the Egerváry–Szász polynomial, which
//! attains Fejér's bound `|λ_1| <= 2 cos(π/(n+2))`. The optimal T=2 weights
//! come from the Fejér kernel `(sin Nt / (N sin t))²`. Both are regularized by
//! mixing in `ε` on the first weight so the relevant trigonometric factor is
//! strictly positive on the open interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of `Σ a_j` from 1.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("invalid prehistory depth {depth} (minimum {min})")]
    InvalidDepth { depth: usize, min: usize },
    #[error("epsilon must be finite and nonnegative, got {0}")]
    InvalidEpsilon(f64),
    #[error("period must be positive")]
    InvalidPeriod,
    #[error("weights sum to {0}, expected 1")]
    NotUnitSum(f64),
    #[error("weights must be finite")]
    NonFinite,
    #[error("N = {declared} but {found} weights given")]
    DepthMismatch { declared: usize, found: usize },
}

/// Control weights for a `T`-cycle with prehistory depth `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UncheckedCoefficients")]
pub struct CoefficientVector {
    #[serde(rename = "T")]
    period: usize,
    #[serde(rename = "N")]
    depth: usize,
    a: Vec<f64>,
    epsilon: f64,
}

#[derive(Deserialize)]
struct UncheckedCoefficients {
    #[serde(rename = "T")]
    period: usize,
    #[serde(rename = "N")]
    depth: usize,
    a: Vec<f64>,
    epsilon: f64,
}

impl TryFrom<UncheckedCoefficients> for CoefficientVector {
    type Error = CoeffError;

    fn try_from(raw: UncheckedCoefficients) -> Result<Self, CoeffError> {
        if raw.depth != raw.a.len() {
            return Err(CoeffError::DepthMismatch { declared: raw.depth, found: raw.a.len() });
        }
        Self::new(raw.period, raw.a, raw.epsilon)
    }
}

impl CoefficientVector {
    /// Validates a user-supplied weight list; `Σ a_j` must equal 1 within
    /// [`SUM_TOLERANCE`].
    pub fn new(period: usize, a: Vec<f64>, epsilon: f64) -> Result<Self, CoeffError> {
        if period == 0 {
            return Err(CoeffError::InvalidPeriod);
        }
        if a.is_empty() {
            return Err(CoeffError::InvalidDepth { depth: 0, min: 1 });
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(CoeffError::NonFinite);
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(CoeffError::InvalidEpsilon(epsilon));
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(CoeffError::NotUnitSum(sum));
        }
        Ok(Self { period, depth: a.len(), a, epsilon })
    }

    /// Rescales an arbitrary list to unit sum.
    pub fn normalized(period: usize, a: Vec<f64>) -> Result<Self, CoeffError> {
        let sum: f64 = a.iter().sum();
        if sum == 0.0 || !sum.is_finite() {
            return Err(CoeffError::NotUnitSum(sum));
        }
        Self::new(period, a.into_iter().map(|x| x / sum).collect(), 0.0)
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn abs_sum(&self) -> f64 {
        self.a.iter().map(|x| x.abs()).sum()
    }
}

/// Cosine polynomial `Σ_(k=0)^(N-1) b_k cos kt` with `b_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineCoefficients {
    pub b: Vec<f64>,
}

impl CosineCoefficients {
    pub fn eval(&self, t: f64) -> f64 {
        self.b.iter().enumerate().map(|(k, b)| b * (k as f64 * t).cos()).sum()
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), CoeffError> {
    if epsilon.is_finite() && epsilon >= 0.0 {
        Ok(())
    } else {
        Err(CoeffError::InvalidEpsilon(epsilon))
    }
}

/// `a_1^ε = (a_1^0 + ε)/(1 + ε)`, `a_j^ε = a_j^0/(1 + ε)`.
fn regularize(mut a: Vec<f64>, epsilon: f64) -> Vec<f64> {
    if epsilon > 0.0 {
        let denom = 1.0 + epsilon;
        a[0] += epsilon;
        for x in &mut a {
            *x /= denom;
        }
    }
    a
}

/// Optimal T=1 weights
/// `a_j^0 = 2 tan(π/(2(N+1))) (1 - j/(N+1)) sin(πj/(N+1))`, regularized by `ε`.
pub fn fejer_coeffs_t1(depth: usize, epsilon: f64) -> Result<CoefficientVector, CoeffError> {
    if depth == 0 {
        return Err(CoeffError::InvalidDepth { depth, min: 1 });
    }
    check_epsilon(epsilon)?;
    let n1 = (depth + 1) as f64;
    let lead = 2.0 * (PI / (2.0 * n1)).tan();
    let raw = (1..=depth)
        .map(|j| {
            let j = j as f64;
            lead * (1.0 - j / n1) * (PI * j / n1).sin()
        })
        .collect();
    let a = regularize(raw, epsilon);
    Ok(CoefficientVector { period: 1, depth, a, epsilon })
}

/// Optimal T=2 weights `a_j^0 = (2(N-j)+1)/N²`, regularized by `ε`.
///
/// Numerator and denominator are exact integers, so each weight carries a
/// single rounding.
pub fn fejer_coeffs_t2(depth: usize, epsilon: f64) -> Result<CoefficientVector, CoeffError> {
    if depth == 0 {
        return Err(CoeffError::InvalidDepth { depth, min: 1 });
    }
    check_epsilon(epsilon)?;
    let denom = (depth * depth) as u64;
    let raw = (1..=depth).map(|j| (2 * (depth - j) + 1) as u64 as f64 / denom as f64).collect();
    let a = regularize(raw, epsilon);
    Ok(CoefficientVector { period: 2, depth, a, epsilon })
}

/// Egerváry–Szász cosine coefficients: `b_0 = 1` and
/// `b_k = ((N-k+2) sin((k+1)θ) - (N-k) sin((k-1)θ)) / ((N+1) sin θ)`,
/// `θ = π/(N+1)`, for `k = 1..N-1`. Equals
/// `(2/(N+1)) |Σ_(k<N) sin((k+1)θ) e^(ikt)|²`.
pub fn egervary_szasz(depth: usize) -> Result<CosineCoefficients, CoeffError> {
    if depth < 2 {
        return Err(CoeffError::InvalidDepth { depth, min: 2 });
    }
    let n = depth as f64;
    let theta = PI / (n + 1.0);
    let denom = (n + 1.0) * theta.sin();
    let mut b = Vec::with_capacity(depth);
    b.push(1.0);
    for k in 1..depth {
        let kf = k as f64;
        let num = (n - kf + 2.0) * ((kf + 1.0) * theta).sin() - (n - kf) * ((kf - 1.0) * theta).sin();
        b.push(num / denom);
    }
    Ok(CosineCoefficients { b })
}

/// The `γ` coefficients of the T=1 construction, 1-based with two sentinel
/// zeros: `γ_1 = 1/(1 + cos θ)`, `γ_k = b_(k-1) / (2(1 + cos θ))`.
/// The optimal weights are `a_j = γ_j - γ_(j+2)`.
pub fn egervary_szasz_gammas(depth: usize) -> Result<Vec<f64>, CoeffError> {
    if depth == 0 {
        return Err(CoeffError::InvalidDepth { depth, min: 1 });
    }
    let cos_theta = (PI / (depth + 1) as f64).cos();
    let mut gamma = vec![0.0; depth + 3];
    gamma[1] = 1.0 / (1.0 + cos_theta);
    if depth >= 2 {
        let b = egervary_szasz(depth)?.b;
        for k in 2..=depth {
            gamma[k] = b[k - 1] / (2.0 * (1.0 + cos_theta));
        }
    }
    Ok(gamma)
}

/// `γ_1 = 1/N`, `γ_j = (N-j+1)/N²`, so that
/// `cos t (γ_1 + 2 Σ_(j>=2) γ_j cos 2(j-1)t) = (sin Nt / (N sin t))² cos t`.
/// Entry `j-1` of the result holds `γ_j`.
pub fn fejer_kernel_t2_cosine(depth: usize) -> Result<CosineCoefficients, CoeffError> {
    if depth == 0 {
        return Err(CoeffError::InvalidDepth { depth, min: 1 });
    }
    let n2 = (depth * depth) as f64;
    let mut b = Vec::with_capacity(depth);
    b.push(1.0 / depth as f64);
    for j in 2..=depth {
        b.push((depth - j + 1) as f64 / n2);
    }
    Ok(CosineCoefficients { b })
}
