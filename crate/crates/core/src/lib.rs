//! A linear-programming solver built around complementary Gauss-Jordan
//! pivoting on a primal-dual equation system, in exact rational arithmetic
//! by default, with independent simplex and vertex-enumeration oracles for
//! cross-validation.
//!
//! The solver accepts instances in symmetric max form (`max c'x` subject to
//! `Ax <= b`, `x >= 0`), embeds primal and dual into one square system with
//! a strong-duality row, and alternates two pivot phases until the tableau
//! either exhibits an optimal solution or evidence that none exists. Every
//! optimal outcome carries a full certificate (primal and dual feasibility,
//! zero duality gap, complementarity) checked against the original data.
//!
//! Because the pivoting method's general termination claim is not proven
//! here, the crate doubles as a probing instrument: a built-in reference
//! suite pins expected pivot sequences, the iteration bound is instrumented
//! rather than assumed, and a randomized campaign compares every outcome
//! against the oracles and records replayable traces of any disagreement.
//!
//! ```
//! use cgjlp::arith::rat;
//! use cgjlp::{solve_rational, LpInstance, OutcomeKind, SolverConfig};
//!
//! // max -x1 + x2  s.t.  x1 + x2 <= 10,  -x1 <= -5,  x >= 0
//! let instance = LpInstance::validate(
//!     "example",
//!     vec![rat(-1), rat(1)],
//!     vec![vec![rat(1), rat(1)], vec![rat(-1), rat(0)]],
//!     vec![rat(10), rat(-5)],
//! )?;
//! let (outcome, trace) = solve_rational(&instance, &SolverConfig::default());
//! assert_eq!(outcome.kind, OutcomeKind::Optimal);
//! assert_eq!(outcome.iterations, 2);
//! let solution = outcome.solution.unwrap();
//! assert_eq!(solution.x, vec![rat(5), rat(5)]);
//! assert_eq!(solution.objective, rat(0));
//! assert!(!trace.bound_violation);
//! # Ok::<(), cgjlp::InstanceError>(())
//! ```

// Indexed loops are clearer for tableau and matrix operations.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod certify;
pub mod eq_builder;
pub mod harness;
pub mod lp_model;
pub mod oracle;
pub mod pivot_rules;
pub mod solver_driver;
pub mod tableau;

pub use arith::{parse_number, Rational, Scalar};
pub use certify::{check_certificate, extract_solution, objective_value, CertificateReport, Solution};
pub use eq_builder::{build_eq, initialize, EqSystem};
pub use lp_model::{encode_equalities, klee_minty, random_instance, InstanceError, LpInstance};
pub use oracle::{
    classify_no_solution, enumerate_vertices, simplex_solve, NoSolutionClass, OracleKind,
    OracleResult,
};
pub use pivot_rules::{
    lookahead_stop, select_majorp, select_minorp, AdjustPolicy, Candidate, MajorHistory,
    PivotSelection, ProvisoNote,
};
pub use solver_driver::{
    iteration_cap, replay, solve, solve_float64, solve_rational, Outcome, OutcomeKind, SolveRun,
    SolverConfig, SnapshotLevel, Trace, TraceEvent,
};
pub use tableau::{ArithmeticKind, ArithmeticMode, Tableau, TableauError, TableauSnapshot};
