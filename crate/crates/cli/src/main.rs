//! Command-line front end: solve instances from JSON files, cross-check
//! against the oracles, run the built-in reference suite, the Klee-Minty
//! scaling benchmark, and the random instance generator.
//!
//! Exit codes: 0 optimal (or all checks passed), 2 no-solution, 3 anomaly or
//! iteration limit, 4 input error, 5 disagreement with the oracle or the
//! reference data.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cgjlp::arith::format_significant;
use cgjlp::harness;
use cgjlp::lp_model::{random_instance, LpInstance};
use cgjlp::oracle::{simplex_solve, OracleKind};
use cgjlp::pivot_rules::AdjustPolicy;
use cgjlp::solver_driver::{
    solve, Outcome, OutcomeKind, SnapshotLevel, SolveRun, SolverConfig, Trace,
};
use cgjlp::tableau::{ArithmeticMode, DEFAULT_FLOAT_EPSILON};
use cgjlp::Scalar;

const EXIT_OK: u8 = 0;
const EXIT_NO_SOLUTION: u8 = 2;
const EXIT_ANOMALY: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_DISAGREEMENT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "cgjlp",
    about = "LP solver based on complementary Gauss-Jordan pivoting, with oracle cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Solve and cross-check against the simplex oracle; without --input,
    /// runs a seeded random campaign.
    Verify(VerifyArgs),
    /// Run the built-in reference suite and print a pass/fail table.
    Fixtures(OutputArgs),
    /// Klee-Minty scaling: one-iteration claim and oracle value per size.
    Bench(BenchArgs),
    /// Generate random instances as JSON.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Rational,
    Float64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdjustArg {
    Direct,
    Positivize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SnapshotsArg {
    None,
    Q,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SolverFlags {
    /// Arithmetic mode.
    #[arg(long, value_enum, default_value = "rational")]
    mode: ModeArg,
    /// Zero tolerance for float64 mode (must stay 0 in rational mode).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pre-pivot row adjustment policy.
    #[arg(long, value_enum, default_value = "direct")]
    adjust: AdjustArg,
    /// Iteration cap multiplier: cap = (m+n) * this.
    #[arg(long = "cap-mult", default_value_t = 4)]
    cap_mult: u32,
    /// Trace verbosity recorded per event.
    #[arg(long, value_enum, default_value = "q")]
    snapshots: SnapshotsArg,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write the run trace as JSON to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance JSON file; omit to run a random campaign instead.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Campaign size (random mode).
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Campaign seed (random mode).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Largest constraint count m (random mode draws from 1..=m).
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Largest variable count n (random mode draws from 1..=n).
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Args)]
struct BenchArgs {
    /// Largest Klee-Minty size to run.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// How many instances to emit (one object, or an array when > 1).
    #[arg(long, default_value_t = 1)]
    count: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Fixtures(args) => run_fixtures(args),
        Command::Bench(args) => run_bench(args),
        Command::Gen(args) => run_gen(args),
    };
    ExitCode::from(code)
}

fn input_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_INPUT
}

fn build_config(flags: &SolverFlags) -> Result<SolverConfig, String> {
    let mode = match flags.mode {
        ModeArg::Rational => {
            if let Some(eps) = flags.epsilon {
                if eps != 0.0 {
                    return Err(format!(
                        "rational mode requires epsilon = 0, got {eps}"
                    ));
                }
            }
            ArithmeticMode::rational()
        }
        ModeArg::Float64 => {
            ArithmeticMode::float64(flags.epsilon.unwrap_or(DEFAULT_FLOAT_EPSILON))
        }
    };
    mode.validate()?;
    Ok(SolverConfig {
        mode,
        adjust: match flags.adjust {
            AdjustArg::Direct => AdjustPolicy::Direct,
            AdjustArg::Positivize => AdjustPolicy::Positivize,
        },
        cap_multiplier: flags.cap_mult,
        snapshots: match flags.snapshots {
            SnapshotsArg::None => SnapshotLevel::None,
            SnapshotsArg::Q => SnapshotLevel::QVectors,
            SnapshotsArg::Full => SnapshotLevel::Full,
        },
    })
}

fn load_instance(path: &PathBuf) -> Result<LpInstance, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    LpInstance::from_json_str(&text).map_err(|e| e.to_string())
}

/// Numeric rendering shared by text output: 6 significant digits.
fn fmt_scalar<N: Scalar>(v: &N) -> String {
    format_significant(v.to_f64_lossy(), 6)
}

fn fmt_vector<N: Scalar>(values: &[N]) -> String {
    let body: Vec<String> = values.iter().map(fmt_scalar).collect();
    format!("({})", body.join(", "))
}

struct RunSummary {
    kind: OutcomeKind,
    iterations: usize,
    x: Option<Vec<serde_json::Value>>,
    y: Option<Vec<serde_json::Value>>,
    objective: Option<serde_json::Value>,
    x_text: Option<String>,
    y_text: Option<String>,
    objective_text: Option<String>,
    anomaly: Option<String>,
    trace_json: serde_json::Value,
    objective_rational: Option<cgjlp::Rational>,
}

fn summarize<N: Scalar>(outcome: &Outcome<N>, trace: &Trace<N>) -> RunSummary {
    let solution = outcome.solution.as_ref();
    RunSummary {
        kind: outcome.kind,
        iterations: outcome.iterations,
        x: solution.map(|s| s.x.iter().map(Scalar::to_json).collect()),
        y: solution.map(|s| s.y.iter().map(Scalar::to_json).collect()),
        objective: solution.map(|s| s.objective.to_json()),
        x_text: solution.map(|s| fmt_vector(&s.x)),
        y_text: solution.map(|s| fmt_vector(&s.y)),
        objective_text: solution.map(|s| fmt_scalar(&s.objective)),
        anomaly: outcome.anomaly.clone(),
        trace_json: trace.to_json(outcome),
        objective_rational: solution.map(|s| s.objective.to_rational()),
    }
}

fn run_to_summary(run: &SolveRun) -> RunSummary {
    match run {
        SolveRun::Rational(outcome, trace) => summarize(outcome, trace),
        SolveRun::Float64(outcome, trace) => summarize(outcome, trace),
    }
}

fn exit_for(kind: OutcomeKind) -> u8 {
    match kind {
        OutcomeKind::Optimal => EXIT_OK,
        OutcomeKind::NoSolutionEq => EXIT_NO_SOLUTION,
        OutcomeKind::Anomaly | OutcomeKind::IterationLimit => EXIT_ANOMALY,
    }
}

fn run_solve(args: SolveArgs) -> u8 {
    let config = match build_config(&args.solver) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let instance = match load_instance(&args.input) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let run = solve(&instance, &config);
    let summary = run_to_summary(&run);
    let trace_path = match &args.trace {
        Some(path) => {
            if let Err(e) = fs::write(path, summary.trace_json.to_string()) {
                return input_error(format!("cannot write trace {}: {e}", path.display()));
            }
            Some(path.display().to_string())
        }
        None => None,
    };
    match args.output {
        OutputFormat::Json => {
            let value = json!({
                "outcome": summary.kind.as_str(),
                "x": summary.x,
                "y": summary.y,
                "objective": summary.objective,
                "iterations": summary.iterations,
                "trace_path": trace_path,
            });
            println!("{value}");
        }
        OutputFormat::Text => {
            println!("instance: {}", instance.name());
            println!("outcome: {}", summary.kind.as_str());
            println!("iterations: {}", summary.iterations);
            if let Some(x) = &summary.x_text {
                println!("x: {x}");
            }
            if let Some(y) = &summary.y_text {
                println!("y: {y}");
            }
            if let Some(obj) = &summary.objective_text {
                println!("objective: {obj}");
            }
            if let Some(anomaly) = &summary.anomaly {
                println!("anomaly: {anomaly}");
            }
            if let Some(path) = &trace_path {
                println!("trace: {path}");
            }
        }
    }
    exit_for(summary.kind)
}

fn run_verify(args: VerifyArgs) -> u8 {
    let config = match build_config(&args.solver) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    match &args.input {
        Some(path) => {
            let instance = match load_instance(path) {
                Ok(i) => i,
                Err(e) => return input_error(e),
            };
            verify_single(&instance, &config, args.output)
        }
        None => verify_campaign(&args),
    }
}

fn verify_single(instance: &LpInstance, config: &SolverConfig, output: OutputFormat) -> u8 {
    let run = solve(instance, config);
    let summary = run_to_summary(&run);
    let oracle = simplex_solve(instance);
    let oracle_kind = match oracle.kind {
        OracleKind::Optimal => "optimal",
        OracleKind::Unbounded => "unbounded",
        OracleKind::Infeasible => "infeasible",
    };
    let agreement = match summary.kind {
        OutcomeKind::Optimal => {
            oracle.kind == OracleKind::Optimal
                && match (&summary.objective_rational, &oracle.value) {
                    (Some(solver_value), Some(oracle_value)) => {
                        match config.mode.kind {
                            cgjlp::ArithmeticKind::Rational => solver_value == oracle_value,
                            cgjlp::ArithmeticKind::Float64 => {
                                (solver_value.to_f64_lossy() - oracle_value.to_f64_lossy()).abs()
                                    <= 1e-6
                            }
                        }
                    }
                    _ => false,
                }
        }
        OutcomeKind::NoSolutionEq => oracle.kind != OracleKind::Optimal,
        _ => false,
    };
    match output {
        OutputFormat::Json => {
            let value = json!({
                "outcome": summary.kind.as_str(),
                "x": summary.x,
                "y": summary.y,
                "objective": summary.objective,
                "iterations": summary.iterations,
                "oracle": {
                    "kind": oracle_kind,
                    "value": oracle.value.as_ref().map(|v| v.to_json()),
                },
                "agreement": agreement,
            });
            println!("{value}");
        }
        OutputFormat::Text => {
            println!("solver: {} ({} iterations)", summary.kind.as_str(), summary.iterations);
            if let Some(obj) = &summary.objective_text {
                println!("solver objective: {obj}");
            }
            println!(
                "oracle: {oracle_kind}{}",
                oracle
                    .value
                    .as_ref()
                    .map(|v| format!(" (value {})", format_significant(v.to_f64_lossy(), 6)))
                    .unwrap_or_default()
            );
            println!("agreement: {agreement}");
        }
    }
    if !agreement {
        if matches!(summary.kind, OutcomeKind::Anomaly | OutcomeKind::IterationLimit) {
            return EXIT_ANOMALY;
        }
        return EXIT_DISAGREEMENT;
    }
    exit_for(summary.kind)
}

fn verify_campaign(args: &VerifyArgs) -> u8 {
    if args.m == 0 || args.n == 0 {
        return input_error("campaign dimensions must be positive");
    }
    let report = harness::run_random_batch(args.count, (1, args.m), (1, args.n), args.seed);
    match args.output {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Text => {
            println!(
                "campaign: {} runs, seed {} (m in 1..={}, n in 1..={})",
                report.runs, report.seed, args.m, args.n
            );
            println!("agreements: {}", report.agreements);
            println!("value mismatches: {}", report.value_mismatches.len());
            println!("kind mismatches: {}", report.kind_mismatches.len());
            println!("anomalies: {}", report.anomalies.len());
            println!("bound violations: {}", report.bound_violations.len());
            for finding in report
                .value_mismatches
                .iter()
                .chain(&report.kind_mismatches)
                .take(20)
            {
                println!("  disagreement seed {}: {}", finding.seed, finding.detail);
            }
        }
    }
    if report.value_mismatches.len() + report.kind_mismatches.len() > 0 {
        EXIT_DISAGREEMENT
    } else if !report.anomalies.is_empty() {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    }
}

fn run_fixtures(args: OutputArgs) -> u8 {
    let reports = harness::run_all_fixtures();
    let all_pass = reports.iter().all(|r| r.passed());
    match args.output {
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "passed": r.passed(),
                        "kind_ok": r.kind_ok,
                        "pivots_ok": r.pivots_ok,
                        "solution_ok": r.solution_ok,
                        "certificate_ok": r.certificate_ok,
                        "iterations": r.iterations,
                        "bound_violation": r.bound_violation,
                        "details": r.details,
                    })
                })
                .collect();
            println!("{}", json!({ "fixtures": rows, "all_pass": all_pass }));
        }
        OutputFormat::Text => {
            println!(
                "{:<8} {:<6} {:<6} {:<6} {:<6} {:<6} status",
                "id", "kind", "pivots", "sol", "cert", "iters"
            );
            for r in &reports {
                println!(
                    "{:<8} {:<6} {:<6} {:<6} {:<6} {:<6} {}",
                    r.id,
                    r.kind_ok,
                    r.pivots_ok,
                    r.solution_ok,
                    r.certificate_ok,
                    r.iterations,
                    if r.passed() { "PASS" } else { "FAIL" }
                );
                for d in &r.details {
                    println!("    {d}");
                }
            }
            println!("{}", if all_pass { "all fixtures PASS" } else { "FAILURES present" });
        }
    }
    if all_pass {
        EXIT_OK
    } else {
        EXIT_DISAGREEMENT
    }
}

fn run_bench(args: BenchArgs) -> u8 {
    if args.n == 0 {
        return input_error("bench size must be positive");
    }
    let rows = harness::run_klee_minty_scaling(args.n);
    match args.output {
        OutputFormat::Json => {
            let body: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "iterations": r.iterations,
                        "pivots": r.pivots,
                        "pivot_claim_holds": r.pivot_claim_holds,
                        "oracle_value_ok": r.oracle_value_ok,
                    })
                })
                .collect();
            println!("{}", json!({ "klee_minty": body }));
        }
        OutputFormat::Text => {
            println!("{:<4} {:<7} {:<18} {:<12} oracle", "n", "iters", "pivots", "claim");
            for r in &rows {
                let pivots: Vec<String> = r
                    .pivots
                    .iter()
                    .map(|(minor, major)| {
                        format!(
                            "({},{})",
                            minor.map_or("-".into(), |c| c.to_string()),
                            major.map_or("-".into(), |c| c.to_string())
                        )
                    })
                    .collect();
                println!(
                    "{:<4} {:<7} {:<18} {:<12} {}",
                    r.n,
                    r.iterations,
                    pivots.join(" "),
                    r.pivot_claim_holds,
                    r.oracle_value_ok
                );
            }
        }
    }
    EXIT_OK
}

fn run_gen(args: GenArgs) -> u8 {
    if args.m == 0 || args.n == 0 || args.count == 0 {
        return input_error("gen requires positive --m, --n and --count");
    }
    let mut master = cgjlp::lp_model::SplitMix64::new(args.seed);
    let mut values = Vec::with_capacity(args.count);
    for _ in 0..args.count {
        let seed = master.next_u64();
        match random_instance(args.m, args.n, seed, (-9, 9)) {
            Ok(instance) => values.push(instance.to_json()),
            Err(e) => return input_error(e),
        }
    }
    if args.count == 1 {
        println!("{}", values[0]);
    } else {
        println!("{}", serde_json::Value::Array(values));
    }
    EXIT_OK
}
