//! Extracts `(z, y, x, s, t)` from a solution-state tableau and verifies the
//! full optimality certificate — primal feasibility, dual feasibility, zero
//! duality gap, and complementarity — directly against the original instance
//! data, independently of how the tableau got there.

use serde_json::{json, Value};

use crate::arith::{ratio, Rational, Scalar};
use crate::lp_model::LpInstance;
use crate::tableau::{Tableau, TableauError};

/// A candidate optimal point: the `2(m+n)` vector `z = (y, x, s, t)` split
/// into dual values, primal values, primal slacks and dual surpluses.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<N> {
    pub z: Vec<N>,
    pub y: Vec<N>,
    pub x: Vec<N>,
    pub s: Vec<N>,
    pub t: Vec<N>,
    pub objective: N,
}

/// Per-check summary of an optimality certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<N> {
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub duality_gap: N,
    pub gap_is_zero: bool,
    pub complementary: bool,
    pub residuals: ResidualSummary<N>,
}

/// Extremal residuals backing each verdict; all are signed so a reader can
/// see how close a failed check came.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSummary<N> {
    /// Smallest `b_i - (Ax)_i`.
    pub primal_slack_min: N,
    /// Smallest `x_j`.
    pub x_min: N,
    /// Smallest `(A'y)_j - c_j`.
    pub dual_surplus_min: N,
    /// Smallest `y_i`.
    pub y_min: N,
    /// Largest `|z_j * z_(p+j)|`.
    pub complementarity_max: N,
}

impl<N: Scalar> CertificateReport<N> {
    pub fn pass(&self) -> bool {
        self.primal_feasible && self.dual_feasible && self.complementary && self.gap_is_zero
    }

    pub fn to_json(&self) -> Value {
        json!({
            "primal_feasible": self.primal_feasible,
            "dual_feasible": self.dual_feasible,
            "gap": self.duality_gap.to_json(),
            "complementary": self.complementary,
            "residuals": {
                "primal_slack_min": self.residuals.primal_slack_min.to_json(),
                "x_min": self.residuals.x_min.to_json(),
                "dual_surplus_min": self.residuals.dual_surplus_min.to_json(),
                "y_min": self.residuals.y_min.to_json(),
                "complementarity_max": self.residuals.complementarity_max.to_json(),
            },
        })
    }
}

/// Default certificate tolerance: zero for exact arithmetic, 1e-6 for floats.
pub fn default_tolerance<N: Scalar>() -> N {
    if N::EXACT {
        N::zero()
    } else {
        N::from_rational(&ratio(1, 1_000_000))
    }
}

/// Reads the solution off a solution-state tableau: for every pair the basic
/// column's variable takes its `q` value and the non-basic member is zero;
/// the `z` vector then splits by column blocks into `(y, x, s, t)`.
pub fn extract_solution<N: Scalar>(
    tableau: &Tableau<N>,
    instance: &LpInstance,
) -> Result<Solution<N>, TableauError> {
    let p = tableau.pairs();
    let (m, n) = (instance.m(), instance.n());
    debug_assert_eq!(p, m + n);
    if !tableau.is_solution_state() {
        return Err(TableauError::InvariantBreach {
            pair: 0,
            detail: "extraction requires a solution-state tableau".to_string(),
        });
    }
    let mut z = vec![N::zero(); 2 * p];
    for pair in 1..=p {
        let basic = tableau.basic_column(pair)?;
        z[basic - 1] = tableau.q(pair).clone();
    }
    let y = z[..m].to_vec();
    let x = z[m..p].to_vec();
    let s = z[p..p + m].to_vec();
    let t = z[p + m..].to_vec();
    let objective = objective_value(instance, &x);
    Ok(Solution {
        z,
        y,
        x,
        s,
        t,
        objective,
    })
}

/// The objective `c . x` in the solution's arithmetic.
pub fn objective_value<N: Scalar>(instance: &LpInstance, x: &[N]) -> N {
    assert_eq!(x.len(), instance.n(), "x has wrong length");
    dot_rational(instance.c(), x)
}

fn dot_rational<N: Scalar>(coeffs: &[Rational], values: &[N]) -> N {
    coeffs
        .iter()
        .zip(values)
        .fold(N::zero(), |acc, (c, v)| acc + N::from_rational(c) * v.clone())
}

/// Evaluates every certificate condition against the instance within
/// `tolerance` (use zero in exact mode; see [`default_tolerance`]).
pub fn check_certificate<N: Scalar>(
    instance: &LpInstance,
    solution: &Solution<N>,
    tolerance: &N,
) -> CertificateReport<N> {
    let (m, n) = (instance.m(), instance.n());
    assert_eq!(solution.x.len(), n, "x has wrong length");
    assert_eq!(solution.y.len(), m, "y has wrong length");
    let neg_tol = -tolerance.clone();

    // Primal: Ax <= b and x >= 0.
    let mut primal_slack_min: Option<N> = None;
    for i in 0..m {
        let row_value = dot_rational(&instance.a()[i], &solution.x);
        let slack = N::from_rational(&instance.b()[i]) - row_value;
        primal_slack_min = Some(min_of(primal_slack_min, slack));
    }
    let x_min = solution
        .x
        .iter()
        .cloned()
        .fold(None, |acc, v| Some(min_of(acc, v)))
        .expect("n >= 1");
    let primal_slack_min = primal_slack_min.expect("m >= 1");
    let primal_feasible = primal_slack_min >= neg_tol && x_min >= neg_tol;

    // Dual: A'y >= c and y >= 0.
    let mut dual_surplus_min: Option<N> = None;
    for j in 0..n {
        let col: Vec<Rational> = (0..m).map(|i| instance.a()[i][j].clone()).collect();
        let surplus = dot_rational(&col, &solution.y) - N::from_rational(&instance.c()[j]);
        dual_surplus_min = Some(min_of(dual_surplus_min, surplus));
    }
    let y_min = solution
        .y
        .iter()
        .cloned()
        .fold(None, |acc, v| Some(min_of(acc, v)))
        .expect("m >= 1");
    let dual_surplus_min = dual_surplus_min.expect("n >= 1");
    let dual_feasible = dual_surplus_min >= neg_tol && y_min >= neg_tol;

    // Strong duality: b'y - c'x = 0.
    let duality_gap = dot_rational(instance.b(), &solution.y) - solution.objective.clone();
    let gap_is_zero = duality_gap.abs_value() <= *tolerance;

    // Complementarity across the z pairs.
    let p = m + n;
    let mut complementarity_max = N::zero();
    if solution.z.len() == 2 * p {
        for j in 0..p {
            let product = (solution.z[j].clone() * solution.z[p + j].clone()).abs_value();
            if product > complementarity_max {
                complementarity_max = product;
            }
        }
    }
    let complementary = complementarity_max <= *tolerance;

    CertificateReport {
        primal_feasible,
        dual_feasible,
        duality_gap,
        complementary,
        gap_is_zero,
        residuals: ResidualSummary {
            primal_slack_min,
            x_min,
            dual_surplus_min,
            y_min,
            complementarity_max,
        },
    }
}

fn min_of<N: Scalar>(acc: Option<N>, v: N) -> N {
    match acc {
        Some(current) if current <= v => current,
        _ => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_traits::Zero;
    use crate::eq_builder::{build_eq, initialize};
    use crate::lp_model::tests::walkthrough;
    use crate::lp_model::LpInstance;

    fn rats(vals: &[i64]) -> Vec<Rational> {
        vals.iter().copied().map(rat).collect()
    }

    fn knapsack_instance() -> LpInstance {
        LpInstance::validate(
            "knapsack",
            rats(&[3, 4, 6, 8, 10]),
            vec![
                rats(&[1, 1, 1, 1, 1]),
                rats(&[0, -1, 0, 0, 0]),
                rats(&[0, 0, -1, 0, 0]),
                rats(&[0, 0, 0, 1, 0]),
            ],
            rats(&[40, -4, -8, 3]),
        )
        .unwrap()
    }

    /// Builds z = (y, x, s, t) with slacks/surpluses consistent with x, y.
    fn solution_from(
        instance: &LpInstance,
        x: Vec<Rational>,
        y: Vec<Rational>,
    ) -> Solution<Rational> {
        let (m, n) = (instance.m(), instance.n());
        let mut s = Vec::with_capacity(m);
        for i in 0..m {
            let mut slack = instance.b()[i].clone();
            for j in 0..n {
                slack -= &instance.a()[i][j] * &x[j];
            }
            s.push(slack);
        }
        let mut t = Vec::with_capacity(n);
        for j in 0..n {
            let mut surplus = -instance.c()[j].clone();
            for i in 0..m {
                surplus += &instance.a()[i][j] * &y[i];
            }
            t.push(surplus);
        }
        let z = [y.clone(), x.clone(), s.clone(), t.clone()].concat();
        let objective = objective_value(instance, &x);
        Solution {
            z,
            y,
            x,
            s,
            t,
            objective,
        }
    }

    #[test]
    fn extracts_walkthrough_solution() {
        let instance = walkthrough();
        let mut t = initialize::<Rational>(&build_eq(&instance), Rational::zero());
        for (row, col) in [(4, 4), (1, 1), (2, 2), (3, 3)] {
            t.gj_pivot(row, col).unwrap();
        }
        let sol = extract_solution(&t, &instance).unwrap();
        assert_eq!(sol.y, rats(&[1, 2]));
        assert_eq!(sol.x, rats(&[5, 5]));
        assert_eq!(sol.s, rats(&[0, 0]));
        assert_eq!(sol.t, rats(&[0, 0]));
        assert_eq!(sol.objective, rat(0));
        let report = check_certificate(&instance, &sol, &Rational::zero());
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn extraction_requires_solution_state() {
        let instance = walkthrough();
        let t = initialize::<Rational>(&build_eq(&instance), Rational::zero());
        assert!(extract_solution(&t, &instance).is_err());
    }

    #[test]
    fn degenerate_origin_extracts_all_zero() {
        let instance =
            LpInstance::validate("origin", rats(&[0]), vec![rats(&[1])], rats(&[0])).unwrap();
        let t = initialize::<Rational>(&build_eq(&instance), Rational::zero());
        assert!(t.is_solution_state());
        let sol = extract_solution(&t, &instance).unwrap();
        assert!(sol.z.iter().all(|v| v.is_zero()));
        assert_eq!(sol.objective, rat(0));
    }

    #[test]
    fn knapsack_certificate_passes_exactly() {
        let instance = knapsack_instance();
        let sol = solution_from(&instance, rats(&[0, 4, 8, 0, 28]), rats(&[10, 6, 4, 0]));
        let report = check_certificate(&instance, &sol, &Rational::zero());
        assert!(report.pass(), "{report:?}");
        assert_eq!(sol.objective, rat(344));
        assert_eq!(report.duality_gap, rat(0));
    }

    #[test]
    fn perturbed_solution_fails_primal_feasibility() {
        let instance = knapsack_instance();
        let sol = solution_from(&instance, rats(&[1, 4, 8, 0, 28]), rats(&[10, 6, 4, 0]));
        let report = check_certificate(&instance, &sol, &Rational::zero());
        assert!(!report.pass());
        assert!(!report.primal_feasible);
        assert_eq!(report.residuals.primal_slack_min, rat(-1));
    }

    #[test]
    fn four_decimal_dual_passes_at_loose_float_tolerance() {
        let instance = LpInstance::validate(
            "band",
            rats(&[3, 1, 3, 1]),
            vec![
                rats(&[1, 1, 4, 1]),
                rats(&[-2, 0, -6, -2]),
                rats(&[20, 2, 47, 11]),
            ],
            rats(&[6, -8, 48]),
        )
        .unwrap();
        let x: Vec<f64> = vec![0.0, 2.0, 0.0, 4.0];
        let y: Vec<f64> = vec![0.5556, 1.0, 0.2222];
        let (m, n) = (instance.m(), instance.n());
        let mut z = vec![0.0f64; 2 * (m + n)];
        z[..m].copy_from_slice(&y);
        z[m..m + n].copy_from_slice(&x);
        let sol = Solution {
            z,
            y: y.clone(),
            x: x.clone(),
            s: vec![0.0; m],
            t: vec![0.0; n],
            objective: objective_value(&instance, &x),
        };
        let loose = check_certificate(&instance, &sol, &1e-3);
        assert!(loose.pass(), "{loose:?}");
        assert!((sol.objective - 6.0).abs() < 1e-9);
        let tight = check_certificate(&instance, &sol, &1e-6);
        assert!(!tight.pass());
    }

    #[test]
    fn report_json_has_stable_fields() {
        let instance = knapsack_instance();
        let sol = solution_from(&instance, rats(&[0, 4, 8, 0, 28]), rats(&[10, 6, 4, 0]));
        let report = check_certificate(&instance, &sol, &Rational::zero());
        let value = report.to_json();
        for key in ["primal_feasible", "dual_feasible", "gap", "complementary", "residuals"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert_eq!(value["gap"], serde_json::Value::String("0".into()));
        assert_eq!(value["residuals"]["x_min"], serde_json::Value::String("0".into()));
    }

    #[test]
    fn objective_values_match_reference_data() {
        let many_iterations = LpInstance::validate(
            "steps",
            rats(&[-9, 1, -1]),
            vec![rats(&[-1, -2, 1]), rats(&[-4, 3, -2])],
            rats(&[-7, -3]),
        )
        .unwrap();
        assert_eq!(
            objective_value(&many_iterations, &rats(&[0, 17, 27])),
            rat(-10)
        );
        assert_eq!(objective_value(&many_iterations, &rats(&[0, 0, 0])), rat(0));

        let instructive = LpInstance::validate(
            "instructive",
            vec![rat(2), rat(7), rat(6), rat(4)],
            vec![
                vec![rat(1), rat(1), ratio(83, 100), ratio(1, 2)],
                vec![ratio(6, 5), rat(1), rat(1), ratio(6, 5)],
                vec![ratio(1, 2), ratio(7, 10), ratio(6, 5), ratio(2, 5)],
            ],
            rats(&[65, 96, 80]),
        )
        .unwrap();
        let x = vec![0.0, 5.1601, 53.2015, 31.3653];
        let value = objective_value(&instructive, &x);
        assert!((value - 480.79).abs() < 0.01, "objective {value}");
        let y = [6.2147, 0.7062, 0.1130];
        let by: f64 = instructive
            .b()
            .iter()
            .zip(y.iter())
            .map(|(b, y)| f64::from_rational(b) * y)
            .sum();
        assert!((by - value).abs() < 1e-2);
    }
}
