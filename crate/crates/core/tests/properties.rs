//! Property-based checks of the numeric kernel and the model layer.
#![allow(clippy::needless_range_loop)]

use cgjlp::arith::{ratio, Rational};
use cgjlp::eq_builder::{build_eq, initialize};
use cgjlp::harness::fixture;
use cgjlp::lp_model::{encode_equalities, random_instance, LpInstance};
use cgjlp::oracle::{enumerate_vertices, simplex_solve, OracleKind};
use cgjlp::solver_driver::{solve_rational, OutcomeKind, SnapshotLevel, SolverConfig};
use cgjlp::tableau::Tableau;
use num_traits::Zero;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(
        proptest::collection::vec(small_rational(), cols),
        rows,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Gauss-Jordan pivot against an independently computed update: the
    /// pivot column becomes the unit vector and every other entry follows
    /// the textbook elimination formula evaluated on the original matrix.
    #[test]
    fn gj_pivot_matches_direct_formula(
        pairs in 1usize..=3,
        seed_rows in small_matrix(4, 7),
        row_pick in 0usize..3,
        col_pick in 0usize..6,
    ) {
        let width = 2 * pairs + 1;
        let rows: Vec<Vec<Rational>> = seed_rows
            .iter()
            .take(pairs + 1)
            .map(|r| r.iter().take(width).cloned().collect())
            .collect();
        let row = 1 + row_pick % pairs;
        let col = 1 + col_pick % (2 * pairs);
        let original = rows.clone();
        prop_assume!(!original[row - 1][col - 1].is_zero());

        let mut t = Tableau::from_rows(rows, pairs, Rational::zero()).unwrap();
        t.gj_pivot(row, col).unwrap();
        let updated = t.snapshot().rows;

        let pivot = original[row - 1][col - 1].clone();
        for i in 0..=pairs {
            for j in 0..width {
                let expected = if i == row - 1 {
                    &original[i][j] / &pivot
                } else {
                    &original[i][j] - &original[row - 1][j] * &original[i][col - 1] / &pivot
                };
                prop_assert_eq!(&updated[i][j], &expected, "entry ({}, {})", i + 1, j + 1);
            }
        }
        // The pivot column is now e_row.
        for i in 0..=pairs {
            let v = &updated[i][col - 1];
            if i == row - 1 {
                prop_assert_eq!(v, &ratio(1, 1));
            } else {
                prop_assert!(v.is_zero());
            }
        }
    }

    /// Complementary pivots preserve the pair-basis invariant from any
    /// freshly initialized instance.
    #[test]
    fn complementary_pivots_preserve_pair_basis(
        m in 1usize..=3,
        n in 1usize..=3,
        seed in 0u64..1000,
        picks in proptest::collection::vec(0usize..6, 1..5),
    ) {
        let instance = random_instance(m, n, seed, (-9, 9)).unwrap();
        let mut t = initialize::<Rational>(&build_eq(&instance), Rational::zero());
        for pick in picks {
            let pair = 1 + pick % t.pairs();
            let column = t.nonbasic_column(pair).unwrap();
            if t.at(pair, column).is_zero() {
                continue;
            }
            t.gj_pivot(pair, column).unwrap();
            prop_assert!(t.assert_pair_basis().is_ok());
        }
    }

    /// A point is feasible for the equality-encoded instance exactly when it
    /// satisfies every original inequality and equality.
    #[test]
    fn equality_encoding_preserves_feasibility(
        n in 1usize..=3,
        ineq in small_matrix(2, 4),
        eq in small_matrix(2, 4),
        point in proptest::collection::vec((0i64..=9, 1i64..=3), 3),
    ) {
        let ineq_rows: Vec<(Vec<Rational>, Rational)> = ineq
            .iter()
            .map(|r| (r[..n].to_vec(), r[n].clone()))
            .collect();
        let eq_rows: Vec<(Vec<Rational>, Rational)> = eq
            .iter()
            .map(|r| (r[..n].to_vec(), r[n].clone()))
            .collect();
        let c = vec![Rational::zero(); n];
        let instance = encode_equalities("prop", &ineq_rows, &eq_rows, c).unwrap();

        let x: Vec<Rational> = point[..n].iter().map(|(p, q)| ratio(*p, *q)).collect();
        let dot = |row: &[Rational]| -> Rational {
            row.iter().zip(&x).map(|(a, b)| a * b).sum()
        };
        let original_ok = ineq_rows.iter().all(|(row, rhs)| dot(row) <= *rhs)
            && eq_rows.iter().all(|(row, rhs)| dot(row) == *rhs);
        let encoded_ok = instance
            .a()
            .iter()
            .zip(instance.b())
            .all(|(row, rhs)| dot(row) <= *rhs);
        prop_assert_eq!(original_ok, encoded_ok);
    }

    /// Instance JSON round trip is the identity.
    #[test]
    fn instance_json_round_trip(
        m in 1usize..=3,
        n in 1usize..=3,
        entries in small_matrix(4, 4),
    ) {
        let a: Vec<Vec<Rational>> = entries
            .iter()
            .take(m)
            .map(|r| r[..n].to_vec())
            .collect();
        let b: Vec<Rational> = (0..m).map(|i| entries[i][n % 4].clone()).collect();
        let c: Vec<Rational> = (0..n).map(|j| entries[3][j].clone()).collect();
        let instance = LpInstance::validate("round-trip", c, a, b).unwrap();
        let text = instance.to_json().to_string();
        let back = LpInstance::from_json_str(&text).unwrap();
        prop_assert_eq!(instance, back);
    }

    /// The two oracles agree on kind and exact optimal value.
    #[test]
    fn oracles_agree_on_small_instances(
        m in 1usize..=3,
        n in 1usize..=3,
        seed in 0u64..10_000,
    ) {
        let instance = random_instance(m, n, seed, (-9, 9)).unwrap();
        let fast = simplex_solve(&instance);
        let slow = enumerate_vertices(&instance).unwrap();
        prop_assert_eq!(fast.kind, slow.kind);
        if fast.kind == OracleKind::Optimal {
            prop_assert_eq!(fast.value, slow.value);
        }
    }

    /// An optimal oracle result is internally consistent: the reported value
    /// is c.x for a primal-feasible x.
    #[test]
    fn simplex_results_are_internally_consistent(
        m in 1usize..=4,
        n in 1usize..=4,
        seed in 0u64..10_000,
    ) {
        let instance = random_instance(m, n, seed, (-9, 9)).unwrap();
        let result = simplex_solve(&instance);
        if result.kind == OracleKind::Optimal {
            let x = result.x.unwrap();
            let value: Rational = instance.c().iter().zip(&x).map(|(c, v)| c * v).sum();
            prop_assert_eq!(&value, result.value.as_ref().unwrap());
            prop_assert!(x.iter().all(|v| *v >= Rational::zero()));
            for (row, rhs) in instance.a().iter().zip(instance.b()) {
                let lhs: Rational = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                prop_assert!(lhs <= *rhs);
            }
        }
    }

    /// Whenever the pivoting solver reaches a verdict, it matches the
    /// oracle: exact objective on optimal, infeasible-or-unbounded on
    /// no-solution. (Anomalies carry no verdict and are campaign findings.)
    #[test]
    fn solver_verdicts_match_oracle(
        m in 1usize..=3,
        n in 1usize..=3,
        seed in 0u64..10_000,
    ) {
        let instance = random_instance(m, n, seed, (-9, 9)).unwrap();
        let (outcome, _) = solve_rational(&instance, &SolverConfig::default());
        match outcome.kind {
            OutcomeKind::Optimal => {
                let oracle = simplex_solve(&instance);
                prop_assert_eq!(oracle.kind, OracleKind::Optimal);
                prop_assert_eq!(
                    oracle.value.unwrap(),
                    outcome.solution.unwrap().objective
                );
            }
            OutcomeKind::NoSolutionEq => {
                let oracle = simplex_solve(&instance);
                prop_assert!(oracle.kind != OracleKind::Optimal);
            }
            OutcomeKind::Anomaly | OutcomeKind::IterationLimit => {}
        }
    }
}

/// Float64 full solves agree with exact mode on every reference problem:
/// same outcome kinds, same complete pivot sequences (near-tie
/// stabilization makes float noise respect exact ties), and objectives
/// within 1e-6.
#[test]
fn float_solves_track_exact_solves_on_fixtures() {
    use cgjlp::harness::fixtures;
    use cgjlp::solver_driver::solve_float64;
    use cgjlp::Scalar;
    for fx in fixtures() {
        let (exact, trace_r) = solve_rational(&fx.instance, &SolverConfig::default());
        let (float, trace_f) = solve_float64(&fx.instance, &SolverConfig::float64());
        assert_eq!(exact.kind, float.kind, "{} kind diverged", fx.id);
        if exact.kind == OutcomeKind::Optimal {
            assert_eq!(
                trace_r.pivot_columns(),
                trace_f.pivot_columns(),
                "{} pivots diverged",
                fx.id
            );
            let drift = (exact.solution.unwrap().objective.to_f64_lossy()
                - float.solution.unwrap().objective)
                .abs();
            assert!(drift <= 1e-6, "{} objective drift {drift}", fx.id);
        }
    }
}

/// Solution-set preservation along a whole run: the final verified solution
/// satisfies every intermediate tableau's rows exactly.
#[test]
fn intermediate_tableaus_preserve_the_solution_set() {
    for id in ["intro", "ex9", "ex12"] {
        let fx = fixture(id).unwrap();
        let config = SolverConfig {
            snapshots: SnapshotLevel::Full,
            ..SolverConfig::default()
        };
        let (outcome, trace) = solve_rational(&fx.instance, &config);
        let z = outcome.solution.expect("fixture is optimal").z;
        let mut tableaus: Vec<Vec<Vec<Rational>>> = vec![
            initialize::<Rational>(&build_eq(&fx.instance), Rational::zero())
                .snapshot()
                .rows,
        ];
        tableaus.extend(
            trace
                .events
                .iter()
                .map(|e| e.snapshot.as_ref().expect("full snapshots").rows.clone()),
        );
        for (step, rows) in tableaus.iter().enumerate() {
            for (i, row) in rows.iter().enumerate() {
                let lhs: Rational = row[..row.len() - 1]
                    .iter()
                    .zip(&z)
                    .map(|(a, b)| a * b)
                    .sum();
                assert_eq!(
                    lhs,
                    row[row.len() - 1],
                    "{id}: step {step} row {} does not hold for z*",
                    i + 1
                );
            }
        }
    }
}
