//! Orchestrates a solve: build the equation system, initialize, then loop
//! stop checks, MinorP, sign normalization, and MajorP until the tableau
//! shows a solution, shows evidence of no solution, hits an anomaly, or
//! exceeds the iteration cap. Produces the ordered pivot trace alongside the
//! outcome.
//!
//! A solution can appear only at initialization or right after a MajorP
//! pivot, while no-solution evidence can appear only right after a MinorP
//! pivot, so the loop re-checks for it exactly there. One iteration is one
//! MajorP pivot plus its optional preceding MinorP; the nominal bound of
//! `m + n` iterations is instrumented, not assumed: runs that exceed it are
//! flagged in the trace and only the configurable cap actually stops them.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{Rational, Scalar};
use crate::certify::{
    check_certificate, default_tolerance, extract_solution, CertificateReport, Solution,
};
use crate::eq_builder::{build_eq, initialize};
use crate::lp_model::LpInstance;
use crate::pivot_rules::{
    select_majorp, select_minorp, AdjustPolicy, MajorHistory, PivotSelection, ProvisoNote,
};
use crate::tableau::{
    ArithmeticKind, ArithmeticMode, Tableau, TableauError, TableauSnapshot,
    DEFAULT_FLOAT_EPSILON,
};

/// How much tableau state each trace event keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotLevel {
    None,
    #[default]
    QVectors,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: ArithmeticMode,
    pub adjust: AdjustPolicy,
    pub cap_multiplier: u32,
    pub snapshots: SnapshotLevel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: ArithmeticMode::rational(),
            adjust: AdjustPolicy::Direct,
            cap_multiplier: 4,
            snapshots: SnapshotLevel::QVectors,
        }
    }
}

impl SolverConfig {
    pub fn float64() -> Self {
        SolverConfig {
            mode: ArithmeticMode::float64(DEFAULT_FLOAT_EPSILON),
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Optimal,
    NoSolutionEq,
    Anomaly,
    IterationLimit,
}

impl OutcomeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeKind::Optimal => "optimal",
            OutcomeKind::NoSolutionEq => "no-solution",
            OutcomeKind::Anomaly => "anomaly",
            OutcomeKind::IterationLimit => "iteration-limit",
        }
    }
}

/// Terminal classification plus, for optimal runs, the extracted solution
/// and its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<N> {
    pub kind: OutcomeKind,
    pub solution: Option<Solution<N>>,
    pub certificate: Option<CertificateReport<N>>,
    pub anomaly: Option<String>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventPhase {
    MinorP,
    MajorP,
    Negate,
}

impl EventPhase {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventPhase::MinorP => "MinorP",
            EventPhase::MajorP => "MajorP",
            EventPhase::Negate => "Negate",
        }
    }
}

/// One step of the run. Pairs and columns are 1-based; `alpha` is the row
/// adjustment applied before the pivot, kept exact regardless of mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent<N> {
    pub iteration: usize,
    pub phase: EventPhase,
    pub pair: Option<usize>,
    pub column: Option<usize>,
    pub alpha: Option<Rational>,
    pub proviso: ProvisoNote,
    pub q_before: Option<Vec<N>>,
    pub q_after: Option<Vec<N>>,
    pub snapshot: Option<TableauSnapshot<N>>,
}

/// The ordered pivot log of one run plus the final tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<N> {
    pub instance_name: String,
    pub pair_count: usize,
    pub iterations: usize,
    pub bound_violation: bool,
    pub events: Vec<TraceEvent<N>>,
    pub final_snapshot: TableauSnapshot<N>,
}

/// One replayable step distilled from a trace event.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayStep {
    pub phase: EventPhase,
    pub pair: Option<usize>,
    pub column: Option<usize>,
    pub alpha: Option<Rational>,
}

impl<N: Scalar> Trace<N> {
    /// Per-iteration (MinorP column, MajorP column) pairs, as printed in the
    /// reference tables.
    pub fn pivot_columns(&self) -> Vec<(Option<usize>, Option<usize>)> {
        let mut grouped: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); self.iterations];
        for event in &self.events {
            if event.iteration == 0 || event.iteration > self.iterations {
                continue;
            }
            let slot = &mut grouped[event.iteration - 1];
            match event.phase {
                EventPhase::MinorP => slot.0 = event.column,
                EventPhase::MajorP => slot.1 = event.column,
                EventPhase::Negate => {}
            }
        }
        grouped
    }

    pub fn replay_steps(&self) -> Vec<ReplayStep> {
        self.events
            .iter()
            .map(|e| ReplayStep {
                phase: e.phase,
                pair: e.pair,
                column: e.column,
                alpha: e.alpha.clone(),
            })
            .collect()
    }

    /// Trace file schema: stable field names, 1-based columns, `q` vectors
    /// after each event.
    pub fn to_json(&self, outcome: &Outcome<N>) -> Value {
        let events: Vec<Value> = self
            .events
            .iter()
            .map(|e| {
                let mut obj = json!({
                    "iter": e.iteration,
                    "phase": e.phase.as_str(),
                    "pair": e.pair,
                    "column": e.column,
                    "alpha": e.alpha.as_ref().map(|a| a.to_json()),
                    "proviso": e.proviso.as_str(),
                    "q": e.q_after.as_ref().map(|q| {
                        q.iter().map(Scalar::to_json).collect::<Vec<_>>()
                    }),
                });
                if let Some(snapshot) = &e.snapshot {
                    obj["snapshot"] = snapshot.to_json();
                }
                obj
            })
            .collect();
        json!({
            "instance": self.instance_name,
            "events": events,
            "outcome": outcome_to_json(outcome, self),
        })
    }
}

pub fn outcome_to_json<N: Scalar>(outcome: &Outcome<N>, trace: &Trace<N>) -> Value {
    json!({
        "kind": outcome.kind.as_str(),
        "x": outcome.solution.as_ref().map(|s| {
            s.x.iter().map(Scalar::to_json).collect::<Vec<_>>()
        }),
        "y": outcome.solution.as_ref().map(|s| {
            s.y.iter().map(Scalar::to_json).collect::<Vec<_>>()
        }),
        "objective": outcome.solution.as_ref().map(|s| s.objective.to_json()),
        "iterations": outcome.iterations,
        "anomaly": outcome.anomaly,
        "bound_violation": trace.bound_violation,
    })
}

/// Iteration cap: `(m + n) * cap_multiplier`.
pub fn iteration_cap(instance: &LpInstance, config: &SolverConfig) -> usize {
    (instance.m() + instance.n()) * config.cap_multiplier.max(1) as usize
}

/// The nominal bound is `m + n` iterations; a finished run beyond it is
/// flagged rather than failed.
pub fn flags_bound_violation(iterations: usize, pairs: usize) -> bool {
    iterations > pairs
}

/// Result of a solve in whichever arithmetic the config selected.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum SolveRun {
    Rational(Outcome<Rational>, Trace<Rational>),
    Float64(Outcome<f64>, Trace<f64>),
}

pub fn solve(instance: &LpInstance, config: &SolverConfig) -> SolveRun {
    match config.mode.kind {
        ArithmeticKind::Rational => {
            let (outcome, trace) = solve_rational(instance, config);
            SolveRun::Rational(outcome, trace)
        }
        ArithmeticKind::Float64 => {
            let (outcome, trace) = solve_float64(instance, config);
            SolveRun::Float64(outcome, trace)
        }
    }
}

pub fn solve_rational(
    instance: &LpInstance,
    config: &SolverConfig,
) -> (Outcome<Rational>, Trace<Rational>) {
    solve_generic(instance, config, Rational::zero())
}

pub fn solve_float64(instance: &LpInstance, config: &SolverConfig) -> (Outcome<f64>, Trace<f64>) {
    solve_generic(instance, config, config.mode.epsilon)
}

enum Stop<N> {
    Optimal(Solution<N>, CertificateReport<N>),
    NoSolution,
    Limit,
    Anomaly(String),
}

fn solve_generic<N: Scalar>(
    instance: &LpInstance,
    config: &SolverConfig,
    epsilon: N,
) -> (Outcome<N>, Trace<N>) {
    let eq = build_eq(instance);
    let mut tableau = initialize(&eq, epsilon);
    let pairs = tableau.pairs();
    let cap = iteration_cap(instance, config);
    let mut history = MajorHistory::new();
    let mut events: Vec<TraceEvent<N>> = Vec::new();
    let mut iterations = 0usize;

    let stop = loop {
        if tableau.is_solution_state() {
            break match extract_solution(&tableau, instance) {
                Ok(solution) => {
                    let report =
                        check_certificate(instance, &solution, &default_tolerance::<N>());
                    if report.pass() {
                        Stop::Optimal(solution, report)
                    } else {
                        Stop::Anomaly(format!(
                            "solution state failed its certificate: {:?}",
                            report
                        ))
                    }
                }
                Err(e) => Stop::Anomaly(e.to_string()),
            };
        }
        if tableau.is_no_solution_state() {
            break Stop::NoSolution;
        }
        if iterations >= cap {
            break Stop::Limit;
        }
        iterations += 1;

        if tableau.is_zero(tableau.q_last()) {
            let selection = match select_minorp(&tableau, &history, config.adjust) {
                Ok(s) => s,
                Err(e) => break Stop::Anomaly(e.to_string()),
            };
            if let Err(e) = execute_pivot(
                &mut tableau,
                &selection,
                &mut history,
                iterations,
                config.snapshots,
                &mut events,
            ) {
                break Stop::Anomaly(e);
            }
            history.record_minor(selection.column);
            // No-solution evidence shows up only here, at the end of a MinorP.
            if tableau.is_no_solution_state() {
                break Stop::NoSolution;
            }
        }

        if tableau.is_negative(tableau.q_last()) {
            record_negate(&mut tableau, iterations, config.snapshots, &mut events);
        }

        let selection = match select_majorp(&tableau, &history, config.adjust) {
            Ok(s) => s,
            Err(e) => break Stop::Anomaly(e.to_string()),
        };
        if let Err(e) = execute_pivot(
            &mut tableau,
            &selection,
            &mut history,
            iterations,
            config.snapshots,
            &mut events,
        ) {
            break Stop::Anomaly(e);
        }
        history.record(selection.column);
    };

    let trace = Trace {
        instance_name: instance.name().to_string(),
        pair_count: pairs,
        iterations,
        bound_violation: flags_bound_violation(iterations, pairs),
        events,
        final_snapshot: tableau.snapshot(),
    };
    let outcome = match stop {
        Stop::Optimal(solution, certificate) => Outcome {
            kind: OutcomeKind::Optimal,
            solution: Some(solution),
            certificate: Some(certificate),
            anomaly: None,
            iterations,
        },
        Stop::NoSolution => Outcome {
            kind: OutcomeKind::NoSolutionEq,
            solution: None,
            certificate: None,
            anomaly: None,
            iterations,
        },
        Stop::Limit => Outcome {
            kind: OutcomeKind::IterationLimit,
            solution: None,
            certificate: None,
            anomaly: Some(format!("iteration cap {cap} reached")),
            iterations,
        },
        Stop::Anomaly(detail) => Outcome {
            kind: OutcomeKind::Anomaly,
            solution: None,
            certificate: None,
            anomaly: Some(detail),
            iterations,
        },
    };
    (outcome, trace)
}

/// Applies one selection: optional row adjustment, the pivot itself, basis
/// bookkeeping, invariant checks, and the trace event.
fn execute_pivot<N: Scalar>(
    tableau: &mut Tableau<N>,
    selection: &PivotSelection<N>,
    history: &mut MajorHistory,
    iteration: usize,
    snapshots: SnapshotLevel,
    events: &mut Vec<TraceEvent<N>>,
) -> Result<(), String> {
    let q_before = capture_q(tableau, snapshots);
    let displaced = tableau
        .basic_column(selection.pair)
        .map_err(|e| e.to_string())?;
    if let Some(alpha) = &selection.adjustment {
        tableau.add_row_multiple(selection.pair, alpha);
    }
    tableau
        .gj_pivot(selection.pair, selection.column)
        .map_err(|e| e.to_string())?;
    tableau.assert_pair_basis().map_err(|e| e.to_string())?;
    let now_basic = tableau
        .basic_column(selection.pair)
        .map_err(|e| e.to_string())?;
    if now_basic != selection.column {
        return Err(format!(
            "pivot on column {} left column {} basic in pair {}",
            selection.column, now_basic, selection.pair
        ));
    }
    if history.remove(displaced) && selection.proviso != ProvisoNote::LookaheadStop {
        return Err(format!(
            "column {displaced} was reversed without a sanctioning lookahead"
        ));
    }
    events.push(TraceEvent {
        iteration,
        phase: match selection.phase {
            crate::pivot_rules::Phase::MinorP => EventPhase::MinorP,
            crate::pivot_rules::Phase::MajorP => EventPhase::MajorP,
        },
        pair: Some(selection.pair),
        column: Some(selection.column),
        alpha: selection.adjustment.as_ref().map(Scalar::to_rational),
        proviso: selection.proviso,
        q_before,
        q_after: capture_q(tableau, snapshots),
        snapshot: match snapshots {
            SnapshotLevel::Full => Some(tableau.snapshot()),
            _ => None,
        },
    });
    Ok(())
}

fn record_negate<N: Scalar>(
    tableau: &mut Tableau<N>,
    iteration: usize,
    snapshots: SnapshotLevel,
    events: &mut Vec<TraceEvent<N>>,
) {
    let q_before = capture_q(tableau, snapshots);
    tableau.negate_last_row();
    events.push(TraceEvent {
        iteration,
        phase: EventPhase::Negate,
        pair: None,
        column: None,
        alpha: None,
        proviso: ProvisoNote::None,
        q_before,
        q_after: capture_q(tableau, snapshots),
        snapshot: match snapshots {
            SnapshotLevel::Full => Some(tableau.snapshot()),
            _ => None,
        },
    });
}

fn capture_q<N: Scalar>(tableau: &Tableau<N>, snapshots: SnapshotLevel) -> Option<Vec<N>> {
    match snapshots {
        SnapshotLevel::None => None,
        _ => Some(tableau.q_vector()),
    }
}

/// Feeds a recorded pivot sequence back through the kernel, starting from a
/// fresh initialization of the instance. In rational mode the result must be
/// bit-identical to the run that produced the trace.
pub fn replay<N: Scalar>(
    instance: &LpInstance,
    steps: &[ReplayStep],
    epsilon: N,
) -> Result<Tableau<N>, TableauError> {
    let eq = build_eq(instance);
    let mut tableau = initialize(&eq, epsilon);
    for step in steps {
        match step.phase {
            EventPhase::Negate => tableau.negate_last_row(),
            EventPhase::MinorP | EventPhase::MajorP => {
                let pair = step.pair.ok_or_else(|| TableauError::Shape(
                    "pivot step without a pair".to_string(),
                ))?;
                let column = step.column.ok_or_else(|| TableauError::Shape(
                    "pivot step without a column".to_string(),
                ))?;
                if let Some(alpha) = &step.alpha {
                    tableau.add_row_multiple(pair, &N::from_rational(alpha));
                }
                tableau.gj_pivot(pair, column)?;
            }
        }
    }
    Ok(tableau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lp_model::tests::walkthrough;
    use crate::lp_model::LpInstance;
    use num_traits::Zero;

    fn rats(vals: &[i64]) -> Vec<Rational> {
        vals.iter().copied().map(rat).collect()
    }

    fn unbounded_instance() -> LpInstance {
        LpInstance::validate(
            "unbounded",
            rats(&[2, 1]),
            vec![rats(&[-1, -1]), rats(&[1, -1])],
            rats(&[-4, 6]),
        )
        .unwrap()
    }

    #[test]
    fn walkthrough_solves_in_two_iterations() {
        let (outcome, trace) = solve_rational(&walkthrough(), &SolverConfig::default());
        assert_eq!(outcome.kind, OutcomeKind::Optimal);
        assert_eq!(outcome.iterations, 2);
        let solution = outcome.solution.unwrap();
        assert_eq!(solution.x, rats(&[5, 5]));
        assert_eq!(solution.y, rats(&[1, 2]));
        assert_eq!(solution.objective, rat(0));
        assert_eq!(
            trace.pivot_columns(),
            vec![(Some(4), Some(1)), (Some(2), Some(3))]
        );
        assert!(!trace.bound_violation);
        assert!(outcome.certificate.unwrap().pass());
    }

    #[test]
    fn unbounded_instance_stops_after_first_minorp() {
        let (outcome, trace) = solve_rational(&unbounded_instance(), &SolverConfig::default());
        assert_eq!(outcome.kind, OutcomeKind::NoSolutionEq);
        assert_eq!(outcome.iterations, 1);
        assert_eq!(trace.pivot_columns(), vec![(Some(4), None)]);
        assert_eq!(trace.events.last().unwrap().phase, EventPhase::MinorP);
    }

    #[test]
    fn klee_minty_three_solves_in_one_iteration() {
        let instance = crate::lp_model::klee_minty(3).unwrap();
        let (outcome, trace) = solve_rational(&instance, &SolverConfig::default());
        assert_eq!(outcome.kind, OutcomeKind::Optimal);
        assert_eq!(outcome.iterations, 1);
        assert_eq!(trace.pivot_columns(), vec![(Some(6), Some(3))]);
        let solution = outcome.solution.unwrap();
        assert_eq!(solution.x, rats(&[0, 0, 10000]));
        assert_eq!(solution.y, rats(&[0, 0, 1]));
    }

    #[test]
    fn iteration_cap_scales_with_multiplier() {
        let config = SolverConfig {
            cap_multiplier: 1,
            ..SolverConfig::default()
        };
        assert_eq!(iteration_cap(&walkthrough(), &config), 4);
        assert_eq!(iteration_cap(&walkthrough(), &SolverConfig::default()), 16);
    }

    #[test]
    fn bound_violation_flag_fires_past_pair_count() {
        assert!(!flags_bound_violation(4, 4));
        assert!(flags_bound_violation(5, 4));
        assert!(!flags_bound_violation(0, 4));
    }

    #[test]
    fn stop_placement_matches_detectability() {
        // Optimal only at initialization or after MajorP; no-solution only
        // after MinorP. Checked across every built-in reference problem.
        let mut instances = vec![walkthrough(), unbounded_instance()];
        instances.extend(crate::harness::fixtures().into_iter().map(|f| f.instance));
        for instance in instances {
            let (outcome, trace) = solve_rational(&instance, &SolverConfig::default());
            match outcome.kind {
                OutcomeKind::Optimal => {
                    if let Some(event) = trace.events.last() {
                        assert_eq!(event.phase, EventPhase::MajorP);
                    }
                }
                OutcomeKind::NoSolutionEq => {
                    assert_eq!(trace.events.last().unwrap().phase, EventPhase::MinorP);
                }
                other => panic!("unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn minorp_is_followed_by_majorp_or_termination() {
        let (_, trace) = solve_rational(&walkthrough(), &SolverConfig::default());
        let pivots: Vec<_> = trace
            .events
            .iter()
            .filter(|e| e.phase != EventPhase::Negate)
            .collect();
        for pair in pivots.windows(2) {
            if pair[0].phase == EventPhase::MinorP {
                assert_eq!(pair[1].phase, EventPhase::MajorP);
                assert_eq!(pair[0].iteration, pair[1].iteration);
            }
        }
    }

    #[test]
    fn replaying_the_trace_reproduces_the_final_tableau() {
        let (_, trace) = solve_rational(&walkthrough(), &SolverConfig::default());
        let replayed = replay::<Rational>(
            &walkthrough(),
            &trace.replay_steps(),
            Rational::zero(),
        )
        .unwrap();
        assert_eq!(replayed.snapshot(), trace.final_snapshot);
    }

    #[test]
    fn solve_is_deterministic() {
        let a = solve_rational(&walkthrough(), &SolverConfig::default());
        let b = solve_rational(&walkthrough(), &SolverConfig::default());
        assert_eq!(a.1, b.1);
        assert_eq!(a.0.kind, b.0.kind);
    }

    #[test]
    fn float_mode_agrees_on_the_walkthrough() {
        let (outcome, _) = solve_float64(&walkthrough(), &SolverConfig::float64());
        assert_eq!(outcome.kind, OutcomeKind::Optimal);
        let solution = outcome.solution.unwrap();
        assert!((solution.x[0] - 5.0).abs() < 1e-6);
        assert!((solution.x[1] - 5.0).abs() < 1e-6);
        assert!((solution.objective).abs() < 1e-6);
    }

    #[test]
    fn solved_at_initialization_reports_zero_iterations() {
        // b >= 0 and c <= 0: the origin is optimal and no pivot happens.
        let instance = LpInstance::validate(
            "origin-optimal",
            rats(&[-1, -2]),
            vec![rats(&[1, 1])],
            rats(&[4]),
        )
        .unwrap();
        let (outcome, trace) = solve_rational(&instance, &SolverConfig::default());
        assert_eq!(outcome.kind, OutcomeKind::Optimal);
        assert_eq!(outcome.iterations, 0);
        assert!(trace.events.is_empty());
        assert_eq!(outcome.solution.unwrap().objective, rat(0));
    }

    #[test]
    fn trace_json_has_stable_fields() {
        let (outcome, trace) = solve_rational(&walkthrough(), &SolverConfig::default());
        let value = trace.to_json(&outcome);
        assert_eq!(value["instance"], "intro");
        let event = &value["events"][0];
        for key in ["iter", "phase", "pair", "column", "alpha", "proviso", "q"] {
            assert!(event.get(key).is_some(), "missing {key}");
        }
        assert_eq!(event["phase"], "MinorP");
        assert_eq!(event["column"], 4);
        assert_eq!(value["outcome"]["kind"], "optimal");
        assert_eq!(value["outcome"]["x"][0], "5");
        assert_eq!(value["outcome"]["bound_violation"], false);
    }
}
