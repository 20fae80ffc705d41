//! Fixture registry for the built-in reference problems with their expected
//! pivot sequences and solutions, the Klee-Minty scaling experiment, and the
//! randomized solver-versus-oracle campaign.

use serde_json::{json, Value};

use crate::arith::{format_exact, parse_number, Rational, Scalar};
use crate::lp_model::{random_instance, LpInstance, SplitMix64};
use crate::oracle::{classify_no_solution, simplex_solve, NoSolutionClass, OracleKind};
use crate::solver_driver::{
    solve_rational, Outcome, OutcomeKind, SolverConfig, Trace,
};

/// Embedded fixture file; see `fixtures/builtin.json`. A checksum test pins
/// its content so expectations cannot drift silently.
pub const FIXTURE_FILE: &str = include_str!("../fixtures/builtin.json");

/// One reference problem with its expected run.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub id: String,
    pub instance: LpInstance,
    /// Per-iteration (MinorP column, MajorP column); `None` marks a phase
    /// that did not run.
    pub expected_pivots: Vec<(Option<usize>, Option<usize>)>,
    pub expected_x: Option<Vec<Rational>>,
    pub expected_y: Option<Vec<Rational>>,
    pub expected_kind: OutcomeKind,
    /// Comparison tolerance for solutions printed in rounded decimals.
    pub tolerance: Rational,
    pub note: Option<String>,
}

/// All fixtures, in file order.
pub fn fixtures() -> Vec<Fixture> {
    let value: Value =
        serde_json::from_str(FIXTURE_FILE).expect("embedded fixture file is valid JSON");
    value
        .as_array()
        .expect("fixture file is a JSON array")
        .iter()
        .map(parse_fixture)
        .collect()
}

pub fn fixture(id: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.id == id)
}

fn parse_fixture(value: &Value) -> Fixture {
    let id = value["id"].as_str().expect("fixture id").to_string();
    let instance =
        LpInstance::from_json(&value["instance"]).unwrap_or_else(|e| panic!("fixture {id}: {e}"));
    let expected_pivots = value["expected_pivots"]
        .as_array()
        .expect("expected_pivots array")
        .iter()
        .map(|pair| {
            let cols = pair.as_array().expect("pivot pair");
            let read = |v: &Value| v.as_u64().map(|c| c as usize);
            (read(&cols[0]), read(&cols[1]))
        })
        .collect();
    let read_vector = |field: &str| -> Option<Vec<Rational>> {
        value[field].as_array().map(|items| {
            items
                .iter()
                .map(|v| match v {
                    Value::String(s) => parse_number(s).expect("fixture number"),
                    Value::Number(n) => {
                        parse_number(&n.to_string()).expect("fixture number")
                    }
                    other => panic!("fixture {id}: bad number {other}"),
                })
                .collect()
        })
    };
    let expected_kind = match value["expected_kind"].as_str() {
        Some("optimal") => OutcomeKind::Optimal,
        Some("no-solution") => OutcomeKind::NoSolutionEq,
        other => panic!("fixture {id}: bad kind {other:?}"),
    };
    Fixture {
        expected_x: read_vector("expected_x"),
        expected_y: read_vector("expected_y"),
        expected_kind,
        tolerance: parse_number(value["tolerance"].as_str().expect("tolerance"))
            .expect("tolerance parses"),
        note: value["note"].as_str().map(str::to_string),
        id,
        instance,
        expected_pivots,
    }
}

/// Per-fixture comparison outcome; every check is reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureReport {
    pub id: String,
    pub kind_ok: bool,
    pub pivots_ok: bool,
    pub solution_ok: bool,
    pub certificate_ok: bool,
    pub iterations: usize,
    pub bound_violation: bool,
    pub expected_pivots: Vec<(Option<usize>, Option<usize>)>,
    pub actual_pivots: Vec<(Option<usize>, Option<usize>)>,
    pub oracle_class: Option<NoSolutionClass>,
    pub details: Vec<String>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.kind_ok && self.pivots_ok && self.solution_ok && self.certificate_ok
    }
}

fn vector_within(
    label: &str,
    actual: &[Rational],
    expected: &[Rational],
    tolerance: &Rational,
    details: &mut Vec<String>,
) -> bool {
    if actual.len() != expected.len() {
        details.push(format!(
            "{label}: length {} != expected {}",
            actual.len(),
            expected.len()
        ));
        return false;
    }
    let mut ok = true;
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        if (a - e).abs_value() > *tolerance {
            details.push(format!(
                "{label}[{}] = {} differs from expected {} beyond {}",
                i + 1,
                format_exact(a),
                format_exact(e),
                format_exact(tolerance)
            ));
            ok = false;
        }
    }
    ok
}

/// Runs one fixture in exact arithmetic under the default configuration and
/// compares outcome kind, the full pivot-column sequence, the printed
/// solutions within the fixture tolerance, and the certificate.
pub fn run_fixture(fixture: &Fixture) -> FixtureReport {
    let (outcome, trace) = solve_rational(&fixture.instance, &SolverConfig::default());
    let mut details = Vec::new();
    let kind_ok = outcome.kind == fixture.expected_kind;
    if !kind_ok {
        details.push(format!(
            "outcome {} != expected {}{}",
            outcome.kind.as_str(),
            fixture.expected_kind.as_str(),
            outcome
                .anomaly
                .as_deref()
                .map(|a| format!(" ({a})"))
                .unwrap_or_default()
        ));
    }
    let actual_pivots = trace.pivot_columns();
    let pivots_ok = actual_pivots == fixture.expected_pivots;
    if !pivots_ok {
        details.push(format!(
            "pivot columns {actual_pivots:?} != expected {:?}",
            fixture.expected_pivots
        ));
    }
    let mut solution_ok = true;
    let mut certificate_ok = true;
    match (&outcome.solution, &fixture.expected_x) {
        (Some(solution), Some(expected_x)) => {
            solution_ok &= vector_within(
                "x",
                &solution.x,
                expected_x,
                &fixture.tolerance,
                &mut details,
            );
            if let Some(expected_y) = &fixture.expected_y {
                solution_ok &= vector_within(
                    "y",
                    &solution.y,
                    expected_y,
                    &fixture.tolerance,
                    &mut details,
                );
            }
        }
        (None, Some(_)) => {
            solution_ok = false;
            details.push("no solution extracted but one was expected".to_string());
        }
        _ => {}
    }
    if fixture.expected_kind == OutcomeKind::Optimal {
        certificate_ok = outcome
            .certificate
            .as_ref()
            .map(|c| c.pass())
            .unwrap_or(false);
        if !certificate_ok {
            details.push("certificate failed".to_string());
        }
    }
    let oracle_class = if outcome.kind == OutcomeKind::NoSolutionEq {
        Some(classify_no_solution(&fixture.instance))
    } else {
        None
    };
    FixtureReport {
        id: fixture.id.clone(),
        kind_ok,
        pivots_ok,
        solution_ok,
        certificate_ok,
        iterations: outcome.iterations,
        bound_violation: trace.bound_violation,
        expected_pivots: fixture.expected_pivots.clone(),
        actual_pivots,
        oracle_class,
        details,
    }
}

pub fn run_all_fixtures() -> Vec<FixtureReport> {
    fixtures().iter().map(run_fixture).collect()
}

/// One row of the Klee-Minty scaling experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct KleeMintyRow {
    pub n: usize,
    pub iterations: usize,
    pub pivots: Vec<(Option<usize>, Option<usize>)>,
    /// One iteration with columns (2n, n). Asserted for n >= 2; recorded
    /// as-is for n = 1.
    pub pivot_claim_holds: bool,
    /// Independent simplex confirms the optimal value 100^(n-1).
    pub oracle_value_ok: bool,
}

/// Solves the n-variable Klee-Minty family for `n = 1..=n_max` and checks
/// the single-iteration claim and the oracle value for each size.
pub fn run_klee_minty_scaling(n_max: usize) -> Vec<KleeMintyRow> {
    (1..=n_max)
        .map(|n| {
            let instance = crate::lp_model::klee_minty(n).expect("n >= 1");
            let (outcome, trace) = solve_rational(&instance, &SolverConfig::default());
            let pivots = trace.pivot_columns();
            let pivot_claim_holds = outcome.kind == OutcomeKind::Optimal
                && outcome.iterations == 1
                && pivots == vec![(Some(2 * n), Some(n))];
            let expected_value = Rational::from_integer(
                num_bigint::BigInt::from(100u32).pow((n - 1) as u32),
            );
            let oracle = simplex_solve(&instance);
            let oracle_value_ok = oracle.kind == OracleKind::Optimal
                && oracle.value.as_ref() == Some(&expected_value)
                && outcome
                    .solution
                    .as_ref()
                    .map(|s| s.objective == expected_value)
                    .unwrap_or(false);
            KleeMintyRow {
                n,
                iterations: outcome.iterations,
                pivots,
                pivot_claim_holds,
                oracle_value_ok,
            }
        })
        .collect()
}

/// How one random run compared against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum RunClass {
    Agreement,
    ValueMismatch(String),
    KindMismatch(String),
    Anomaly(String),
}

/// Solves and classifies one instance against the simplex oracle. Optimal
/// outcomes must match the oracle value exactly; no-solution outcomes must
/// correspond to an infeasible or unbounded LP.
pub fn classify_against_oracle(
    instance: &LpInstance,
) -> (RunClass, Outcome<Rational>, Trace<Rational>) {
    let (outcome, trace) = solve_rational(instance, &SolverConfig::default());
    let oracle = simplex_solve(instance);
    let class = match outcome.kind {
        OutcomeKind::Optimal => {
            let objective = &outcome
                .solution
                .as_ref()
                .expect("optimal outcome carries a solution")
                .objective;
            match oracle.kind {
                OracleKind::Optimal => {
                    let oracle_value = oracle.value.as_ref().expect("optimal oracle value");
                    if oracle_value == objective {
                        RunClass::Agreement
                    } else {
                        RunClass::ValueMismatch(format!(
                            "solver objective {} != oracle {}",
                            format_exact(objective),
                            format_exact(oracle_value)
                        ))
                    }
                }
                other => RunClass::KindMismatch(format!(
                    "solver optimal but oracle says {other:?}"
                )),
            }
        }
        OutcomeKind::NoSolutionEq => match oracle.kind {
            OracleKind::Infeasible | OracleKind::Unbounded => RunClass::Agreement,
            OracleKind::Optimal => RunClass::KindMismatch(
                "solver found no solution but the LP is feasible and bounded".to_string(),
            ),
        },
        OutcomeKind::Anomaly | OutcomeKind::IterationLimit => RunClass::Anomaly(
            outcome
                .anomaly
                .clone()
                .unwrap_or_else(|| "unspecified anomaly".to_string()),
        ),
    };
    (class, outcome, trace)
}

/// One disagreement, anomaly, or bound violation, with enough context to
/// replay it offline.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignFinding {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub detail: String,
    pub instance: Value,
    pub trace: Value,
}

/// Tally of a random campaign. Every run lands in exactly one of
/// agreements, value mismatches, kind mismatches, or anomalies; bound
/// violations overlay that partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub seed: u64,
    pub runs: usize,
    pub agreements: usize,
    pub value_mismatches: Vec<CampaignFinding>,
    pub kind_mismatches: Vec<CampaignFinding>,
    pub anomalies: Vec<CampaignFinding>,
    pub bound_violations: Vec<CampaignFinding>,
}

impl CampaignReport {
    pub fn disagreements(&self) -> usize {
        self.value_mismatches.len() + self.kind_mismatches.len() + self.anomalies.len()
    }

    /// The accounting identity: every run counted exactly once.
    pub fn consistent(&self) -> bool {
        self.runs == self.agreements + self.disagreements()
    }

    pub fn offending_seeds(&self) -> Vec<u64> {
        self.value_mismatches
            .iter()
            .chain(&self.kind_mismatches)
            .chain(&self.anomalies)
            .map(|f| f.seed)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let findings = |list: &[CampaignFinding]| -> Vec<Value> {
            list.iter()
                .map(|f| {
                    json!({
                        "seed": f.seed,
                        "m": f.m,
                        "n": f.n,
                        "detail": f.detail,
                        "instance": f.instance,
                        "trace": f.trace,
                    })
                })
                .collect()
        };
        json!({
            "seed": self.seed,
            "runs": self.runs,
            "agreements": self.agreements,
            "value_mismatches": findings(&self.value_mismatches),
            "kind_mismatches": findings(&self.kind_mismatches),
            "anomalies": findings(&self.anomalies),
            "bound_violations": findings(&self.bound_violations),
        })
    }
}

/// Runs `count` random instances (dimensions drawn from the inclusive
/// ranges, integer entries in [-9, 9]) against the oracle. Deterministic in
/// `seed`: the master stream draws m, n, then a per-instance seed.
pub fn run_random_batch(
    count: usize,
    m_range: (usize, usize),
    n_range: (usize, usize),
    seed: u64,
) -> CampaignReport {
    let mut master = SplitMix64::new(seed);
    let mut report = CampaignReport {
        seed,
        runs: 0,
        agreements: 0,
        value_mismatches: Vec::new(),
        kind_mismatches: Vec::new(),
        anomalies: Vec::new(),
        bound_violations: Vec::new(),
    };
    for _ in 0..count {
        let m = master.next_in_range(m_range.0 as i64, m_range.1 as i64) as usize;
        let n = master.next_in_range(n_range.0 as i64, n_range.1 as i64) as usize;
        let instance_seed = master.next_u64();
        let instance = random_instance(m, n, instance_seed, (-9, 9))
            .expect("dimensions are positive and the range is nonempty");
        let (class, outcome, trace) = classify_against_oracle(&instance);
        report.runs += 1;
        let finding = |detail: String| CampaignFinding {
            seed: instance_seed,
            m,
            n,
            detail,
            instance: instance.to_json(),
            trace: trace.to_json(&outcome),
        };
        if trace.bound_violation {
            report.bound_violations.push(finding(format!(
                "finished in {} iterations, above the nominal bound {}",
                outcome.iterations,
                m + n
            )));
        }
        match class {
            RunClass::Agreement => report.agreements += 1,
            RunClass::ValueMismatch(detail) => report.value_mismatches.push(finding(detail)),
            RunClass::KindMismatch(detail) => report.kind_mismatches.push(finding(detail)),
            RunClass::Anomaly(detail) => report.anomalies.push(finding(detail)),
        }
    }
    report
}
