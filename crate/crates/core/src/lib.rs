//! Delayed-feedback control (DFC) design for stabilizing 1- and 2-cycles of
//! one-dimensional discrete maps.
//!
//! The control
//!
//! ```text
//! u(k) = (a_1 - 1) f(x(k)) + a_2 f(x(k-T)) + ... + a_N f(x(k-(N-1)T)),   a_1 + ... + a_N = 1
//! ```
//!
//! stabilizes a `T`-cycle with multiplier `mu` exactly when
//! `p(λ) = λ^((N-1)T+1) - mu q(λ)^T` is Schur stable. This crate builds the
//! optimal Fejér-type weights, computes the stability margin `mu_tilde` for a
//! weight vector, and cross-checks everything by bisection, brute-force search
//! and direct simulation.

pub mod charpoly;
pub mod coeffs;
pub mod dynamics;
pub mod extremal;
pub mod margin;
pub mod trigpoly;

pub use charpoly::{RealPolynomial, StabilityVerdict};
pub use coeffs::CoefficientVector;
pub use margin::MarginReport;
pub use trigpoly::{ConjugateTrigPair, TrigMode};
