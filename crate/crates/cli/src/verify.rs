//! Property suites behind `dfc verify`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use dfc_core::charpoly::{build_char_poly, schur_stable};
use dfc_core::coeffs::{fejer_coeffs_t1, fejer_coeffs_t2, CoefficientVector};
use dfc_core::dynamics::{augmented_charpoly, find_cycle, MapSpec};
use dfc_core::extremal::lemma2_disc_report;
use dfc_core::margin::{margin_bisect, margin_t1, margin_t2};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::Suite;

const EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const FORMULA_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-6;
const T1_LIMIT_TOL: f64 = 1e-6;
const T2_LIMIT_REL_TOL: f64 = 1e-5;
const LEMMA3_TOL: f64 = 1e-9;
const JACOBIAN_REL_TOL: f64 = 1e-8;
const LEMMA2_LISTS: usize = 200;
const LEMMA2_MAX_DEGREE: usize = 8;
const LEMMA3_LISTS: usize = 500;
const INTERVAL_SAMPLES: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    #[serde(rename = "N")]
    pub depth: usize,
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub max_depth: usize,
    pub pass: bool,
    pub cases: Vec<CaseResult>,
}

pub fn run(suite: Suite, max_depth: usize, seed: u64) -> VerifyReport {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Thm5, Suite::Thm6, Suite::Lemma2, Suite::Lemma3, Suite::Jacobian, Suite::Interval],
        s => vec![s],
    };
    let mut cases = Vec::new();
    for s in suites {
        match s {
            Suite::Thm5 => cases.extend((1..=max_depth).map(t1_design)),
            Suite::Thm6 => cases.extend((1..=max_depth).map(t2_design)),
            Suite::Lemma2 => cases.extend(lemma2(max_depth, seed)),
            Suite::Lemma3 => cases.extend(lemma3(max_depth, seed.wrapping_add(1))),
            Suite::Jacobian => cases.extend((1..=max_depth.min(3)).map(jacobian)),
            Suite::Interval => cases.extend((1..=max_depth).map(|n| interval(n, seed.wrapping_add(2)))),
            Suite::All => unreachable!("expanded above"),
        }
    }
    cases.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.case.cmp(&b.case)));
    let pass = cases.iter().all(|c| c.pass);
    VerifyReport { seed, max_depth, pass, cases }
}

fn case(depth: usize, name: &str, outcome: Result<(bool, String), String>) -> CaseResult {
    let (pass, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, e),
    };
    CaseResult { depth, case: name.to_string(), pass, detail }
}

fn tan2(depth: usize) -> f64 {
    (PI / (2.0 * (depth as f64 + 1.0))).tan().powi(2)
}

/// Value at 0 of the quadratic through three points.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (points[i].0, points[i + level].0);
            p[i] = (-xj * p[i] + xi * p[i + 1]) / (xi - xj);
        }
    }
    p[0]
}

fn random_unit_sum(rng: &mut StdRng, depth: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..depth).map(|_| rng.gen_range(-1.0..=2.0)).collect();
        let sum: f64 = raw.iter().sum();
        if sum.abs() >= 0.25 {
            return raw.iter().map(|x| x / sum).collect();
        }
    }
}

/// Regularized T=1 designs: `C(π) = (-tan²(π/(2(N+1))) - ε)/(1+ε)`, bisection
/// agreement, and the ε → 0 limit.
fn t1_design(depth: usize) -> CaseResult {
    let outcome = (|| {
        let tan2 = tan2(depth);
        let mut formula = 0.0f64;
        let mut oracle = 0.0f64;
        let mut witnesses = Vec::new();
        for eps in EPSILONS {
            let a = fejer_coeffs_t1(depth, eps).map_err(|e| e.to_string())?;
            let r = margin_t1(&a).map_err(|e| e.to_string())?;
            formula = formula.max((r.mu_tilde - (1.0 + eps) / (-tan2 - eps)).abs());
            oracle = oracle.max((margin_bisect(&a, 1).map_err(|e| e.to_string())? - r.mu_tilde).abs());
            witnesses.push((eps, r.witness_value));
        }
        let limit = (extrapolate_to_zero(&witnesses) + tan2).abs();
        Ok((
            formula <= FORMULA_TOL && oracle <= ORACLE_TOL && limit <= T1_LIMIT_TOL,
            format!("closed-form error {formula:.3e}, bisection gap {oracle:.3e}, limit error {limit:.3e}"),
        ))
    })();
    case(depth, "thm5", outcome)
}

fn t2_design(depth: usize) -> CaseResult {
    let outcome = (|| {
        let n = depth as f64;
        let mut formula = 0.0f64;
        let mut oracle = 0.0f64;
        let mut witnesses = Vec::new();
        for eps in EPSILONS {
            let a = fejer_coeffs_t2(depth, eps).map_err(|e| e.to_string())?;
            let r = margin_t2(&a).map_err(|e| e.to_string())?;
            let m = (-r.witness_value).sqrt();
            formula = formula.max((m - (1.0 / n + eps) / (1.0 + eps)).abs());
            oracle = oracle.max((margin_bisect(&a, 2).map_err(|e| e.to_string())? - r.mu_tilde).abs());
            witnesses.push((eps, r.witness_value));
        }
        let limit = ((1.0 / extrapolate_to_zero(&witnesses) + n * n) / (n * n)).abs();
        Ok((
            formula <= FORMULA_TOL && oracle <= ORACLE_TOL && limit <= T2_LIMIT_REL_TOL,
            format!("witness error {formula:.3e}, bisection gap {oracle:.3e}, relative limit error {limit:.3e}"),
        ))
    })();
    case(depth, "thm6", outcome)
}

/// Random complex lists grouped by degree.
fn lemma2(max_depth: usize, seed: u64) -> Vec<CaseResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let top = max_depth.clamp(1, LEMMA2_MAX_DEGREE);
    let mut by_degree: BTreeMap<usize, (usize, usize, f64)> = BTreeMap::new();
    for _ in 0..LEMMA2_LISTS {
        let n = rng.gen_range(1..=top);
        let a: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
        let entry = by_degree.entry(n).or_insert((0, 0, f64::INFINITY));
        entry.0 += 1;
        if let Ok(r) = lemma2_disc_report(&a) {
            entry.1 += usize::from(r.covered);
            entry.2 = entry.2.min(r.min_boundary_ratio);
        }
    }
    by_degree
        .into_iter()
        .map(|(n, (total, covered, ratio))| {
            let detail = format!("{covered}/{total} covered, min boundary ratio {ratio:.3e}");
            case(n, "lemma2", Ok((covered == total, detail)))
        })
        .collect()
}

fn lemma3(max_depth: usize, seed: u64) -> Vec<CaseResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut by_depth: BTreeMap<usize, (usize, f64, Option<String>)> = BTreeMap::new();
    for _ in 0..LEMMA3_LISTS {
        let depth = rng.gen_range(1..=max_depth.max(1));
        let a = random_unit_sum(&mut rng, depth);
        let entry = by_depth.entry(depth).or_insert((0, f64::NEG_INFINITY, None));
        entry.0 += 1;
        let result = CoefficientVector::new(1, a, 0.0)
            .map_err(|e| e.to_string())
            .and_then(|cv| margin_t1(&cv).map_err(|e| e.to_string()));
        match result {
            Ok(r) => entry.1 = entry.1.max(r.witness_value + 0.5f64.powi(depth as i32)),
            Err(e) => entry.2 = Some(e),
        }
    }
    by_depth
        .into_iter()
        .map(|(n, (total, excess, error))| match error {
            Some(e) => case(n, "lemma3", Err(e)),
            None => {
                case(n, "lemma3", Ok((excess <= LEMMA3_TOL, format!("{total} lists, max (min C + 2^-N) {excess:.3e}"))))
            }
        })
        .collect()
}

fn jacobian(depth: usize) -> CaseResult {
    let outcome = (|| {
        let mut worst = 0.0f64;
        let mut pairs = 0;
        for r in [3.2, 3.8, 3.9] {
            let map = MapSpec::logistic(r);
            for period in [1, 2] {
                let coeffs = match period {
                    1 => fejer_coeffs_t1(depth, 1e-2),
                    _ => fejer_coeffs_t2(depth, 1e-2),
                }
                .map_err(|e| e.to_string())?;
                for cycle in find_cycle(&map, period).map_err(|e| e.to_string())? {
                    let p = augmented_charpoly(&map, &cycle, &coeffs).map_err(|e| e.to_string())?;
                    let expected = build_char_poly(coeffs.weights(), period, cycle.mu);
                    if p.degree() != expected.degree() {
                        return Ok((false, format!("degree {} vs {}", p.degree(), expected.degree())));
                    }
                    let scale = expected.max_abs_coefficient();
                    for (x, y) in p.coefficients().iter().zip(expected.coefficients()) {
                        worst = worst.max((x - y).abs() / scale);
                    }
                    pairs += 1;
                }
            }
        }
        Ok((worst <= JACOBIAN_REL_TOL, format!("{pairs} cycles, max relative deviation {worst:.3e}")))
    })();
    case(depth, "jacobian", outcome)
}

/// Stability on `(mu_tilde, 1)` and instability just below `mu_tilde`.
fn interval(depth: usize, seed: u64) -> CaseResult {
    let outcome = (|| {
        let mut rng = StdRng::seed_from_u64(seed.wrapping_add(depth as u64));
        let a = fejer_coeffs_t1(depth, 1e-3).map_err(|e| e.to_string())?;
        let mu_tilde = margin_t1(&a).map_err(|e| e.to_string())?.mu_tilde;
        let stable =
            |mu: f64| schur_stable(&build_char_poly(a.weights(), 1, mu)).map(|v| v.stable).map_err(|e| e.to_string());
        let mut inside = 0;
        for _ in 0..INTERVAL_SAMPLES {
            if stable(rng.gen_range(mu_tilde + 1e-4..1.0 - 1e-4))? {
                inside += 1;
            }
        }
        let below = stable(mu_tilde - 1e-4)?;
        Ok((
            inside == INTERVAL_SAMPLES && !below,
            format!("mu_tilde {mu_tilde:.12}, {inside}/{INTERVAL_SAMPLES} stable inside, stable below: {below}"),
        ))
    })();
    case(depth, "interval", outcome)
}
