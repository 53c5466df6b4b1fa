//! Acceptance criteria 1-8. Runs as a plain binary and prints one line per
//! criterion; exits nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dfc_core::charpoly::build_char_poly;
use dfc_core::coeffs::{egervary_szasz, fejer_coeffs_t1, fejer_coeffs_t2, CoefficientVector};
use dfc_core::dynamics::{
    augmented_charpoly, detect_convergence, find_cycle, perturbed_history, simulate, ConvergenceVerdict, MapSpec,
};
use dfc_core::extremal::{
    egervary_szasz_lambdas, fejer_bound_check, fejer_kernel_lambdas, grid_search_t1, grid_search_t2, lemma2_disc_report,
};
use dfc_core::margin::{margin_auto, margin_bisect, margin_t1, margin_t2};
use rand::Rng;

const EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

const C1_FORMULA_TOL: f64 = 1e-8;
const C1_LIMIT_TOL: f64 = 1e-6;
const C2_WITNESS_TOL: f64 = 1e-8;
const C2_LIMIT_REL_TOL: f64 = 1e-5;
const C3_BOUND_TOL: f64 = 1e-8;
const C4_ONE_SIDED_TOL: f64 = 1e-6;
const C4_FINE_TOL: f64 = 5e-3;
const C4_COARSE_TOL: f64 = 5e-2;
const C5_ORACLE_TOL: f64 = 1e-6;
const C6_REL_TOL: f64 = 1e-8;
const C7_DIST_TOL: f64 = 1e-6;
const C7_CONTROL_TOL: f64 = 1e-10;
const C7_FIXED_POINT_TOL: f64 = 1e-6;
const C8_LEMMA3_TOL: f64 = 1e-9;
const C8_IDENTITY_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (usize, u64, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(id: usize, budget: Duration, criterion: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = criterion();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let (pass, detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    println!(
        "criterion {id}: {} | {detail} | {:.3}s of {}s{}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { " (over budget)" },
    );
    pass
}

/// T=1 margins of the regularized designs against the closed form
/// `C^ε(π) = (-tan²(π/(2(N+1))) + ε)/(1+ε)`, and the ε → 0 limit.
fn criterion_1() -> Outcome {
    let mut worst_stated = 0.0f64;
    let mut worst_mixture = 0.0f64;
    let mut worst_limit = 0.0f64;
    for depth in 1..=10 {
        let tan2 = common::tan2(depth);
        let mut witnesses = Vec::new();
        for eps in EPSILONS {
            let report = margin_t1(&fejer_coeffs_t1(depth, eps).unwrap()).map_err(|e| e.to_string())?;
            let stated = (-tan2 + eps) / (1.0 + eps);
            // a_1 gains ε, and cos π = -1.
            let mixture = (-tan2 - eps) / (1.0 + eps);
            worst_stated = worst_stated.max((report.mu_tilde - 1.0 / stated).abs());
            worst_mixture = worst_mixture.max((report.mu_tilde - 1.0 / mixture).abs());
            witnesses.push((eps, report.witness_value));
        }
        worst_limit = worst_limit.max((common::neville(&witnesses, 0.0) + tan2).abs());
    }
    check(
        worst_stated <= C1_FORMULA_TOL && worst_limit <= C1_LIMIT_TOL,
        format!(
            "max |mu - 1/C(pi)| with C(pi)=(-tan^2+eps)/(1+eps): {worst_stated:.3e}; \
             with C(pi)=(-tan^2-eps)/(1+eps): {worst_mixture:.3e}; eps->0 witness error {worst_limit:.3e}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst_witness = 0.0f64;
    let mut worst_limit = 0.0f64;
    for depth in 1..=10 {
        let n = depth as f64;
        let mut witnesses = Vec::new();
        for eps in EPSILONS {
            let report = margin_t2(&fejer_coeffs_t2(depth, eps).unwrap()).map_err(|e| e.to_string())?;
            let m = (-report.witness_value).sqrt();
            worst_witness = worst_witness.max((m - (1.0 / n + eps) / (1.0 + eps)).abs());
            witnesses.push((eps, report.witness_value));
        }
        let mu_limit = 1.0 / common::neville(&witnesses, 0.0);
        worst_limit = worst_limit.max(((mu_limit + n * n) / (n * n)).abs());
    }
    check(
        worst_witness <= C2_WITNESS_TOL && worst_limit <= C2_LIMIT_REL_TOL,
        format!("max |M - (1/N+eps)/(1+eps)| {worst_witness:.3e}; eps->0 mu relative error {worst_limit:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut count = 0;
    for period in [1, 2] {
        for depth in 1..=8 {
            let bound = if period == 1 { -1.0 / common::tan2(depth) } else { -((depth * depth) as f64) };
            for _ in 0..500 {
                let a = common::random_unit_sum(&mut rng, depth);
                let cv = CoefficientVector::new(period, a.clone(), 0.0).map_err(|e| e.to_string())?;
                let mu = margin_auto(&cv).map_err(|e| format!("{e} for {a:?}"))?.mu_tilde;
                worst_excess = worst_excess.max(bound - mu);
                count += 1;
                if mu < bound - C3_BOUND_TOL {
                    return Err(format!("T={period} N={depth} a={a:?}: mu {mu} below bound {bound}"));
                }
            }
        }
    }
    check(true, format!("{count} lists; max (bound - mu) = {worst_excess:.3e}"))
}

fn criterion_4() -> Outcome {
    let cases = [
        ("t1 N=2", grid_search_t1(2, 1e-3), -1.0 / 3.0, C4_FINE_TOL),
        ("t2 N=2", grid_search_t2(2, 1e-3), -0.25, C4_FINE_TOL),
        ("t1 N=3", grid_search_t1(3, 1e-2), -common::tan2(3), C4_COARSE_TOL),
        ("t2 N=3", grid_search_t2(3, 1e-2), -1.0 / 9.0, C4_COARSE_TOL),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, result, bound, tol) in cases {
        let r = result.map_err(|e| e.to_string())?;
        let sums_to_one = (r.best_coeffs.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
        ok &= r.best_value <= bound + C4_ONE_SIDED_TOL && (r.best_value - bound).abs() <= tol && sums_to_one;
        detail.push(format!("{name}: {:.6} vs {:.6}", r.best_value, bound));
    }
    check(ok, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = common::rng(5);
    let mut vectors = Vec::new();
    for period in [1, 2] {
        for _ in 0..50 {
            let depth = rng.gen_range(1..=8);
            let a = common::random_unit_sum(&mut rng, depth);
            vectors.push(CoefficientVector::new(period, a, 0.0).map_err(|e| e.to_string())?);
        }
    }
    for depth in 1..=10 {
        for eps in EPSILONS {
            vectors.push(fejer_coeffs_t1(depth, eps).unwrap());
            vectors.push(fejer_coeffs_t2(depth, eps).unwrap());
        }
    }
    let mut worst = 0.0f64;
    for cv in &vectors {
        let closed = margin_auto(cv).map_err(|e| e.to_string())?.mu_tilde;
        let bisect = margin_bisect(cv, cv.period()).map_err(|e| e.to_string())?;
        worst = worst.max((closed - bisect).abs());
    }
    check(worst <= C5_ORACLE_TOL, format!("{} vectors; max |bisect - closed| = {worst:.3e}", vectors.len()))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for r in [3.2, 3.8, 3.9] {
        let map = MapSpec::logistic(r);
        for period in [1, 2] {
            let cycles = find_cycle(&map, period).map_err(|e| e.to_string())?;
            for depth in 1..=3 {
                let coeffs = match period {
                    1 => fejer_coeffs_t1(depth, 1e-2),
                    _ => fejer_coeffs_t2(depth, 1e-2),
                }
                .unwrap();
                for cycle in &cycles {
                    let p = augmented_charpoly(&map, cycle, &coeffs).map_err(|e| e.to_string())?;
                    let expected = build_char_poly(coeffs.weights(), period, cycle.mu);
                    if p.degree() != expected.degree() {
                        return Err(format!("degree {} vs {}", p.degree(), expected.degree()));
                    }
                    let scale = expected.max_abs_coefficient();
                    for (x, y) in p.coefficients().iter().zip(expected.coefficients()) {
                        worst = worst.max((x - y).abs() / scale);
                    }
                    cases += 1;
                }
            }
        }
    }
    check(worst <= C6_REL_TOL, format!("{cases} cycle/design pairs; max relative deviation {worst:.3e}"))
}

fn criterion_7() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (r, period) in [(3.9, 1), (3.8, 2)] {
        let map = MapSpec::logistic(r);
        let cycle = find_cycle(&map, period)
            .map_err(|e| e.to_string())?
            .into_iter()
            .find(|c| c.points[0] > 0.1)
            .ok_or("cycle not found")?;
        let coeffs = match period {
            1 => fejer_coeffs_t1(2, 1e-2),
            _ => fejer_coeffs_t2(2, 1e-2),
        }
        .unwrap();
        let history = perturbed_history(&cycle, &coeffs, 1e-3);
        let trace = simulate(&map, &coeffs, &history, 10_000, Some(&cycle)).map_err(|e| e.to_string())?;
        let verdict = detect_convergence(&trace, &cycle, C7_DIST_TOL);
        let final_u = trace.steps.last().map_or(f64::INFINITY, |s| s.u.abs());
        let converged = matches!(verdict, ConvergenceVerdict::Converged { at } if at <= 10_000);
        ok &= converged && final_u < C7_CONTROL_TOL;
        if period == 1 {
            ok &= (cycle.points[0] - 0.743590).abs() < C7_FIXED_POINT_TOL;
        }

        let free = CoefficientVector::new(period, vec![1.0], 0.0).unwrap();
        let free_history = perturbed_history(&cycle, &free, 1e-3);
        let free_trace = simulate(&map, &free, &free_history, 10_000, Some(&cycle)).map_err(|e| e.to_string())?;
        let free_verdict = detect_convergence(&free_trace, &cycle, C7_DIST_TOL);
        ok &= free_verdict == ConvergenceVerdict::NotConverged;
        detail.push(format!(
            "r={r} T={period} mu={:.4}: controlled {verdict:?} final |u| {final_u:.1e}, uncontrolled {free_verdict:?}",
            cycle.mu
        ));
    }
    check(ok, detail.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = common::rng(8);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let a = common::random_complex(&mut rng, n);
        let report = lemma2_disc_report(&a).map_err(|e| e.to_string())?;
        if !report.covered {
            return Err(format!("disc not covered for {a:?}"));
        }
        min_ratio = min_ratio.min(report.min_boundary_ratio);
    }

    let mut worst_lemma3 = f64::NEG_INFINITY;
    for _ in 0..500 {
        let depth = rng.gen_range(1..=10);
        let a = common::random_unit_sum(&mut rng, depth);
        let cv = CoefficientVector::new(1, a.clone(), 0.0).unwrap();
        let w = margin_t1(&cv).map_err(|e| e.to_string())?.witness_value;
        let excess = w + 0.5f64.powi(depth as i32);
        worst_lemma3 = worst_lemma3.max(excess);
        if excess > C8_LEMMA3_TOL {
            return Err(format!("min C = {w} above -2^-N for {a:?}"));
        }
    }

    let mut worst_identity = 0.0f64;
    let mut worst_equality = 0.0f64;
    for depth in 2..=32 {
        let es = egervary_szasz(depth).unwrap();
        let theta = PI / (depth as f64 + 1.0);
        for i in 0..=2000 {
            let t = PI * i as f64 / 2000.0;
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..depth {
                let w = ((k + 1) as f64 * theta).sin();
                re += w * (k as f64 * t).cos();
                im += w * (k as f64 * t).sin();
            }
            let closed = 2.0 / (depth as f64 + 1.0) * (re * re + im * im);
            worst_identity = worst_identity.max((es.eval(t) - closed).abs());
        }
        let lambda = egervary_szasz_lambdas(depth).unwrap();
        let n = lambda.len() as f64;
        worst_equality = worst_equality.max((lambda[0] - 2.0 * (PI / (n + 2.0)).cos()).abs());
        if !fejer_bound_check(&lambda).map_err(|e| e.to_string())? {
            return Err(format!("Fejér bound fails for Egerváry–Szász N={depth}"));
        }
        let kernel = fejer_kernel_lambdas(depth).unwrap();
        let peak = 1.0 + kernel.iter().sum::<f64>();
        worst_equality = worst_equality.max((peak - (kernel.len() as f64 + 1.0)).abs());
        if !fejer_bound_check(&kernel).map_err(|e| e.to_string())? {
            return Err(format!("Fejér bound fails for Fejér kernel N={depth}"));
        }
    }
    check(
        worst_identity <= C8_IDENTITY_TOL && worst_equality <= C8_IDENTITY_TOL,
        format!(
            "lemma 2 min boundary ratio {min_ratio:.3e}; lemma 3 max (minC + 2^-N) {worst_lemma3:.3e}; \
             identity error {worst_identity:.3e}; equality-case error {worst_equality:.3e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, 1, criterion_1),
        (2, 1, criterion_2),
        (3, 30, criterion_3),
        (4, 300, criterion_4),
        (5, 60, criterion_5),
        (6, 1, criterion_6),
        (7, 5, criterion_7),
        (8, 30, criterion_8),
    ];
    let mut all = true;
    for (id, budget, criterion) in criteria {
        all &= run(id, Duration::from_secs(budget), criterion);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
