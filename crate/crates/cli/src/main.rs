mod config;
mod verify;

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dfc_core::charpoly::{build_char_poly, root_verdict, schur_stable};
use dfc_core::coeffs::{fejer_coeffs_t1, fejer_coeffs_t2, CoefficientVector};
use dfc_core::dynamics::{
    detect_convergence, find_cycle, perturbed_history, simulate, write_trace_csv, ConvergenceVerdict, CycleDescriptor,
    MapSpec,
};
use dfc_core::margin::{
    margin_auto, margin_bisect_report, margin_curve, margin_t1, margin_t2, MarginError, MarginReport,
};
use serde::Serialize;

use config::{ExperimentConfig, MapArg, MarginMethodArg, Suite};

const DEFAULT_EPSILON: f64 = 1e-3;
const DEFAULT_PERTURB: f64 = 1e-3;
const DEFAULT_STEPS: usize = 10_000;
const DEFAULT_TOL: f64 = 1e-6;
const DEFAULT_MAX_DEPTH: usize = 10;
const DEFAULT_DEPTHS: &str = "1..10";

/// Delayed-feedback controller design and analysis.
#[derive(Debug, Parser)]
#[command(name = "dfc", version)]
struct Cli {
    /// JSON file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal coefficients for a given period and depth.
    Design(DesignArgs),
    /// Stability margin of a coefficient vector.
    Margin(MarginArgs),
    /// Stability verdict for one multiplier.
    Schur(SchurArgs),
    /// Simulate the controlled map near one of its cycles.
    Stabilize(StabilizeArgs),
    /// Run property suites.
    Verify(VerifyArgs),
    /// Margins of the optimal designs over a range of depths.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[arg(long)]
    period: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Args)]
struct CoeffArgs {
    #[arg(long)]
    period: Option<usize>,
    /// Comma-separated weights summing to 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "coeffs_file")]
    coeffs: Option<Vec<f64>>,
    /// Coefficient JSON as printed by `design`.
    #[arg(long)]
    coeffs_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MarginArgs {
    #[command(flatten)]
    input: CoeffArgs,
    #[arg(long, value_enum)]
    method: Option<MarginMethodArg>,
}

#[derive(Debug, Args)]
struct SchurArgs {
    #[command(flatten)]
    input: CoeffArgs,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Decide from computed roots and report the largest modulus.
    #[arg(long)]
    roots: bool,
}

#[derive(Debug, Args)]
struct StabilizeArgs {
    #[arg(long, value_enum)]
    map: Option<MapArg>,
    /// `r` for the logistic map, `c` for `x² + c`.
    #[arg(long, allow_hyphen_values = true)]
    param: Option<f64>,
    #[arg(long)]
    period: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Convergence distance.
    #[arg(long)]
    tol: Option<f64>,
    /// Index into the cycles sorted by smallest point.
    #[arg(long)]
    cycle_index: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    period: Option<usize>,
    /// Inclusive range `a..b` or a comma-separated list.
    #[arg(long)]
    depths: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Success,
    Failure,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    match cli.command {
        Command::Design(args) => design(args, &config),
        Command::Margin(args) => margin(args, &config),
        Command::Schur(args) => schur(args, &config),
        Command::Stabilize(args) => stabilize(args, &config),
        Command::Verify(args) => run_verify(args, &config),
        Command::Sweep(args) => sweep(args, &config),
    }
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file).ok_or_else(|| anyhow!("missing --{name}"))
}

fn finite(value: f64, name: &str) -> Result<f64> {
    if !value.is_finite() {
        bail!("--{name} must be finite");
    }
    Ok(value)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

fn optimal_design(period: usize, depth: usize, epsilon: f64) -> Result<CoefficientVector> {
    let cv = match period {
        1 => fejer_coeffs_t1(depth, epsilon)?,
        2 => fejer_coeffs_t2(depth, epsilon)?,
        _ => bail!("optimal designs exist for period 1 or 2, got {period}"),
    };
    Ok(cv)
}

fn design(args: DesignArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let period = required(args.period, config.period, "period")?;
    let depth = required(args.depth, config.depth, "depth")?;
    let epsilon = finite(args.epsilon.or(config.epsilon).unwrap_or(DEFAULT_EPSILON), "epsilon")?;
    print_json(&optimal_design(period, depth, epsilon)?)?;
    Ok(Outcome::Success)
}

fn load_coeffs(args: CoeffArgs, config: &ExperimentConfig) -> Result<CoefficientVector> {
    let period = args.period.or(config.period);
    // A flag on the command line beats either source in the config file.
    let (coeffs, file) = match (args.coeffs, args.coeffs_file) {
        (Some(a), _) => (Some(a), None),
        (None, Some(f)) => (None, Some(f)),
        (None, None) => (config.coeffs.clone(), config.coeffs_file.clone()),
    };
    if let Some(a) = coeffs {
        let period = period.ok_or_else(|| anyhow!("missing --period"))?;
        if a.iter().any(|x| !x.is_finite()) {
            bail!("--coeffs must be finite");
        }
        return Ok(CoefficientVector::new(period, a, 0.0)?);
    }
    let path = file.ok_or_else(|| anyhow!("missing --coeffs or --coeffs-file"))?;
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let cv: CoefficientVector = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(p) = period {
        if p != cv.period() {
            bail!("--period {p} disagrees with period {} in {}", cv.period(), path.display());
        }
    }
    Ok(cv)
}

fn margin(args: MarginArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let method = args.method.or(config.method);
    let cv = load_coeffs(args.input, config)?;
    let period = cv.period();
    let result = match method {
        None => margin_auto(&cv),
        Some(MarginMethodArg::Closed) => match period {
            1 => margin_t1(&cv),
            2 => margin_t2(&cv),
            _ => bail!("closed forms cover period 1 or 2, got {period}"),
        },
        Some(MarginMethodArg::Curve) => margin_curve(&cv, period),
        Some(MarginMethodArg::Bisect) => margin_bisect_report(&cv, period),
    };
    report_margin(result)
}

fn report_margin(result: Result<MarginReport, MarginError>) -> Result<Outcome> {
    match result {
        Ok(report) => {
            print_json(&report)?;
            Ok(Outcome::Success)
        }
        Err(MarginError::NoNegativeCrossing(report)) => {
            print_json(&report)?;
            eprintln!("boundary curve never crosses the negative real axis");
            Ok(Outcome::Failure)
        }
        Err(e @ (MarginError::NonNegativeInfimum(_) | MarginError::ZeroMax(_) | MarginError::NeverUnstable(_))) => {
            eprintln!("{e}");
            Ok(Outcome::Failure)
        }
        Err(e) => Err(e.into()),
    }
}

fn schur(args: SchurArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let mu = finite(required(args.mu, config.mu, "mu")?, "mu")?;
    let use_roots = args.roots || config.roots.unwrap_or(false);
    let cv = load_coeffs(args.input, config)?;
    let p = build_char_poly(cv.weights(), cv.period(), mu);
    let verdict = if use_roots { root_verdict(&p)? } else { schur_stable(&p)? };
    print_json(&verdict)?;
    Ok(if verdict.stable { Outcome::Success } else { Outcome::Failure })
}

#[derive(Debug, Serialize)]
struct StabilizeSummary<'a> {
    map: &'a MapSpec,
    coeffs: &'a CoefficientVector,
    mu_tilde: f64,
    cycle: &'a CycleDescriptor,
    perturb: f64,
    steps: usize,
    recorded: usize,
    diverged: bool,
    tol: f64,
    verdict: ConvergenceVerdict,
    final_x: Option<f64>,
    final_u: Option<f64>,
    out: Option<&'a Path>,
}

fn stabilize(args: StabilizeArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let kind = required(args.map, config.map, "map")?;
    let param = finite(required(args.param, config.param, "param")?, "param")?;
    let period = required(args.period, config.period, "period")?;
    let depth = required(args.depth, config.depth, "depth")?;
    let epsilon = finite(args.epsilon.or(config.epsilon).unwrap_or(DEFAULT_EPSILON), "epsilon")?;
    let perturb = finite(args.perturb.or(config.perturb).unwrap_or(DEFAULT_PERTURB), "perturb")?;
    let steps = args.steps.or(config.steps).unwrap_or(DEFAULT_STEPS);
    let tol = finite(args.tol.or(config.tol).unwrap_or(DEFAULT_TOL), "tol")?;
    let cycle_index = args.cycle_index.or(config.cycle_index);
    let out = args.out.or_else(|| config.out.clone());

    let map = match kind {
        MapArg::Logistic => MapSpec::logistic(param),
        MapArg::Quadratic => MapSpec::quadratic(param),
    };
    let coeffs = optimal_design(period, depth, epsilon)?;
    let mu_tilde = margin_auto(&coeffs)?.mu_tilde;
    let cycles = find_cycle(&map, period)?;
    let cycle = match cycle_index {
        Some(i) => {
            cycles.get(i).ok_or_else(|| anyhow!("--cycle-index {i} out of range, {} cycles found", cycles.len()))?
        }
        None => choose_cycle(&cycles, mu_tilde).ok_or_else(|| anyhow!("no {period}-cycle found"))?,
    };

    let history = perturbed_history(cycle, &coeffs, perturb);
    let trace = simulate(&map, &coeffs, &history, steps, Some(cycle))?;
    if let Some(path) = &out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut writer = BufWriter::new(file);
        write_trace_csv(&trace, &mut writer)?;
        writer.flush()?;
    }
    let verdict = detect_convergence(&trace, cycle, tol);
    let last = trace.steps.last();
    print_json(&StabilizeSummary {
        map: &map,
        coeffs: &coeffs,
        mu_tilde,
        cycle,
        perturb,
        steps,
        recorded: trace.steps.len(),
        diverged: trace.diverged,
        tol,
        verdict,
        final_x: last.map(|s| s.x),
        final_u: last.map(|s| s.u),
        out: out.as_deref(),
    })?;
    Ok(match verdict {
        ConvergenceVerdict::Converged { .. } => Outcome::Success,
        ConvergenceVerdict::NotConverged => Outcome::Failure,
    })
}

/// Cycle the design can stabilize, `mu` in `(mu_tilde, 1)`, with the smallest
/// `|mu|`; otherwise the first cycle found.
fn choose_cycle(cycles: &[CycleDescriptor], mu_tilde: f64) -> Option<&CycleDescriptor> {
    cycles
        .iter()
        .filter(|c| c.mu > mu_tilde && c.mu < 1.0)
        .min_by(|a, b| a.mu.abs().total_cmp(&b.mu.abs()))
        .or_else(|| cycles.first())
}

fn run_verify(args: VerifyArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let suite = args.suite.or(config.suite).unwrap_or(Suite::All);
    let max_depth = args.max_depth.or(config.max_depth).unwrap_or(DEFAULT_MAX_DEPTH);
    let seed = args.seed.or(config.seed).unwrap_or(0);
    if max_depth == 0 {
        bail!("--max-depth must be at least 1");
    }
    let report = verify::run(suite, max_depth, seed);
    print_json(&report)?;
    Ok(if report.pass { Outcome::Success } else { Outcome::Failure })
}

fn parse_depths(text: &str) -> Result<Vec<usize>> {
    let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad depth {s:?}"));
    let depths: Vec<usize> = match text.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
            if lo > hi {
                bail!("empty depth range {text}");
            }
            (lo..=hi).collect()
        }
        None => text.split(',').map(parse).collect::<Result<_>>()?,
    };
    if depths.contains(&0) {
        bail!("depths start at 1");
    }
    Ok(depths)
}

fn optimal_bound(period: usize, depth: usize) -> f64 {
    match period {
        1 => -1.0 / (PI / (2.0 * (depth as f64 + 1.0))).tan().powi(2),
        _ => -((depth * depth) as f64),
    }
}

fn sweep(args: SweepArgs, config: &ExperimentConfig) -> Result<Outcome> {
    let period = required(args.period, config.period, "period")?;
    let depths = parse_depths(&args.depths.or_else(|| config.depths.clone()).unwrap_or(DEFAULT_DEPTHS.into()))?;
    let epsilon = finite(args.epsilon.or(config.epsilon).unwrap_or(DEFAULT_EPSILON), "epsilon")?;
    let out = args.out.or_else(|| config.out.clone());

    let mut table = String::from("N,mu_tilde,bound,gap\n");
    for depth in depths {
        let cv = optimal_design(period, depth, epsilon)?;
        let mu_tilde = margin_auto(&cv)?.mu_tilde;
        let bound = optimal_bound(period, depth);
        table.push_str(&format!("{depth},{mu_tilde:.16e},{bound:.16e},{:.16e}\n", mu_tilde - bound));
    }
    match out {
        Some(path) => fs::write(&path, &table).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(table.as_bytes())?,
    }
    Ok(Outcome::Success)
}
