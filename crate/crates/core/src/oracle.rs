//! Independent ground truth for cross-checking solver outcomes: a textbook
//! two-phase primal simplex with Bland's smallest-index rule, a brute-force
//! vertex enumerator for tiny instances, and a classifier separating
//! infeasible from unbounded.
//!
//! Nothing here touches the main tableau kernel; the elimination code is
//! deliberately separate so a kernel bug cannot confirm itself.

use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::lp_model::LpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub kind: OracleKind,
    pub value: Option<Rational>,
    pub x: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexStats {
    pub pivots: usize,
    pub repeated_basis: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for vertex enumeration: m+n = {actual} > {limit}")]
    SizeGuard { limit: usize, actual: usize },
}

/// How an instance the solver called unsolvable actually classifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoSolutionClass {
    Infeasible,
    Unbounded,
    /// The LP has an optimal solution; a no-solution verdict against it is a
    /// correctness counterexample.
    FeasibleBounded,
}

/// Two-phase primal simplex, Bland's rule throughout, exact arithmetic.
pub fn simplex_solve(instance: &LpInstance) -> OracleResult {
    simplex_solve_with_stats(instance).0
}

pub fn simplex_solve_with_stats(instance: &LpInstance) -> (OracleResult, SimplexStats) {
    let mut worker = SimplexWorker::new(instance);
    let result = worker.run(instance);
    (
        result,
        SimplexStats {
            pivots: worker.pivots,
            repeated_basis: worker.repeated_basis,
        },
    )
}

struct SimplexWorker {
    m: usize,
    n: usize,
    cols: usize,
    artificial_start: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
    repeated_basis: bool,
    seen_bases: std::collections::BTreeSet<Vec<usize>>,
}

impl SimplexWorker {
    fn new(instance: &LpInstance) -> Self {
        let m = instance.m();
        let n = instance.n();
        // Columns: originals, slacks, then one artificial per negated row.
        let negated: Vec<bool> = instance.b().iter().map(Rational::is_negative).collect();
        let artificial_start = n + m;
        let artificial_count = negated.iter().filter(|&&v| v).count();
        let cols = artificial_start + artificial_count;
        let mut rows = vec![vec![Rational::zero(); cols]; m];
        let mut rhs = vec![Rational::zero(); m];
        let mut basis = vec![0usize; m];
        let mut next_artificial = artificial_start;
        for i in 0..m {
            for j in 0..n {
                rows[i][j] = instance.a()[i][j].clone();
            }
            rows[i][n + i] = Rational::one();
            rhs[i] = instance.b()[i].clone();
            if negated[i] {
                for v in rows[i].iter_mut() {
                    *v = -v.clone();
                }
                rhs[i] = -rhs[i].clone();
                rows[i][next_artificial] = Rational::one();
                basis[i] = next_artificial;
                next_artificial += 1;
            } else {
                basis[i] = n + i;
            }
        }
        SimplexWorker {
            m,
            n,
            cols,
            artificial_start,
            rows,
            rhs,
            basis,
            pivots: 0,
            repeated_basis: false,
            seen_bases: std::collections::BTreeSet::new(),
        }
    }

    fn run(&mut self, instance: &LpInstance) -> OracleResult {
        if self.cols > self.artificial_start {
            // Phase 1: maximize minus the artificial sum.
            let mut costs = vec![Rational::zero(); self.cols];
            for c in costs.iter_mut().skip(self.artificial_start) {
                *c = -Rational::one();
            }
            match self.maximize(&costs, self.cols) {
                SimplexEnd::Optimal(value) => {
                    if value.is_negative() {
                        return OracleResult {
                            kind: OracleKind::Infeasible,
                            value: None,
                            x: None,
                        };
                    }
                }
                SimplexEnd::Unbounded => {
                    unreachable!("phase-1 objective is bounded above by zero")
                }
            }
            self.evict_basic_artificials();
        }
        // Phase 2 over original costs; artificial columns may not re-enter.
        let mut costs = vec![Rational::zero(); self.cols];
        costs[..self.n].clone_from_slice(instance.c());
        match self.maximize(&costs, self.artificial_start) {
            SimplexEnd::Optimal(value) => {
                let mut x = vec![Rational::zero(); self.n];
                for (i, &var) in self.basis.iter().enumerate() {
                    if var < self.n {
                        x[var] = self.rhs[i].clone();
                    }
                }
                OracleResult {
                    kind: OracleKind::Optimal,
                    value: Some(value),
                    x: Some(x),
                }
            }
            SimplexEnd::Unbounded => OracleResult {
                kind: OracleKind::Unbounded,
                value: None,
                x: None,
            },
        }
    }

    fn reduced_cost(&self, costs: &[Rational], col: usize) -> Rational {
        let mut value = costs[col].clone();
        for i in 0..self.m {
            let basic_cost = &costs[self.basis[i]];
            if !basic_cost.is_zero() && !self.rows[i][col].is_zero() {
                value -= basic_cost * &self.rows[i][col];
            }
        }
        value
    }

    /// Bland's rule: enter the smallest-index improving column, leave by the
    /// minimum ratio with ties broken by the smallest basic variable index.
    fn maximize(&mut self, costs: &[Rational], enterable: usize) -> SimplexEnd {
        // Repetition counts within a single phase; the phase boundary
        // legitimately revisits the phase-1 final basis.
        self.seen_bases.clear();
        self.note_basis();
        loop {
            let entering = (0..enterable)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(costs, j).is_positive());
            let Some(col) = entering else {
                let value = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, &var)| {
                        acc + &costs[var] * &self.rhs[i]
                    });
                return SimplexEnd::Optimal(value);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.m {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leave {
                        None => true,
                        Some((row, best)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*row])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return SimplexEnd::Unbounded;
            };
            self.pivot(row, col);
            self.note_basis();
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        debug_assert!(!pivot.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &pivot;
        }
        self.rhs[row] /= &pivot;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let delta = &factor * &self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
        self.pivots += 1;
        assert!(
            self.pivots < 1_000_000,
            "simplex failed to terminate; Bland's rule invariant broken"
        );
    }

    fn note_basis(&mut self) {
        let mut key = self.basis.clone();
        key.sort_unstable();
        if !self.seen_bases.insert(key) {
            self.repeated_basis = true;
        }
    }

    /// After a feasible phase 1, pivots any artificial still basic out on a
    /// structural column; an all-zero row marks a redundant constraint and
    /// its artificial stays parked at zero.
    fn evict_basic_artificials(&mut self) {
        for i in 0..self.m {
            if self.basis[i] < self.artificial_start {
                continue;
            }
            debug_assert!(self.rhs[i].is_zero());
            if let Some(col) =
                (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero())
            {
                self.pivot(i, col);
            }
        }
    }
}

enum SimplexEnd {
    Optimal(Rational),
    Unbounded,
}

const ENUMERATION_GUARD: usize = 14;

/// Brute-force oracle: enumerates every basic solution of the slack form,
/// keeps the feasible ones, and detects unboundedness by optimizing over a
/// truncated recession cone. Exact and slow; guarded to `m + n <= 14`.
pub fn enumerate_vertices(instance: &LpInstance) -> Result<OracleResult, OracleError> {
    let size = instance.m() + instance.n();
    if size > ENUMERATION_GUARD {
        return Err(OracleError::SizeGuard {
            limit: ENUMERATION_GUARD,
            actual: size,
        });
    }
    let best = best_vertex(instance.a(), instance.b(), instance.c());
    let Some((value, x)) = best else {
        return Ok(OracleResult {
            kind: OracleKind::Infeasible,
            value: None,
            x: None,
        });
    };
    // Recession directions: A d <= 0, d >= 0, normalized by sum(d) <= 1. Any
    // direction with positive objective certifies unboundedness.
    let mut ray_rows = instance.a().to_vec();
    ray_rows.push(vec![Rational::one(); instance.n()]);
    let mut ray_rhs = vec![Rational::zero(); instance.m()];
    ray_rhs.push(Rational::one());
    let ray_best = best_vertex(&ray_rows, &ray_rhs, instance.c())
        .expect("the zero direction is always feasible");
    if ray_best.0.is_positive() {
        return Ok(OracleResult {
            kind: OracleKind::Unbounded,
            value: None,
            x: None,
        });
    }
    Ok(OracleResult {
        kind: OracleKind::Optimal,
        value: Some(value),
        x: Some(x),
    })
}

/// Maximizes `c . x` over the vertices of `{x : Ax <= b, x >= 0}` by trying
/// every basis of the slack form. Returns `None` when no feasible basic
/// solution exists (the feasible set, being pointed, is then empty).
fn best_vertex(
    a: &[Vec<Rational>],
    b: &[Rational],
    c: &[Rational],
) -> Option<(Rational, Vec<Rational>)> {
    let m = a.len();
    let n = c.len();
    let total = n + m;
    let mut combo: Vec<usize> = (0..m).collect();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    loop {
        if let Some(solution) = basic_solution(a, b, n, &combo) {
            if solution.iter().all(|v| !v.is_negative()) {
                let mut value = Rational::zero();
                let mut x = vec![Rational::zero(); n];
                for (k, &col) in combo.iter().enumerate() {
                    if col < n {
                        value += &c[col] * &solution[k];
                        x[col] = solution[k].clone();
                    }
                }
                if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                    best = Some((value, x));
                }
            }
        }
        if !next_combination(&mut combo, total) {
            break;
        }
    }
    best
}

/// Solves the m-by-m basis system of the slack form `[A | I]` for the given
/// column set; `None` if the basis matrix is singular.
fn basic_solution(
    a: &[Vec<Rational>],
    b: &[Rational],
    n: usize,
    combo: &[usize],
) -> Option<Vec<Rational>> {
    let m = a.len();
    let mut mat: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            combo
                .iter()
                .map(|&col| {
                    if col < n {
                        a[i][col].clone()
                    } else if col - n == i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut rhs: Vec<Rational> = b.to_vec();
    // Plain Gaussian elimination with row swaps.
    for col in 0..m {
        let pivot_row = (col..m).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &pivot;
        }
        rhs[col] /= &pivot;
        for r in 0..m {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let factor = mat[r][col].clone();
            for j in 0..m {
                let delta = &factor * &mat[col][j];
                mat[r][j] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some(rhs)
}

fn next_combination(combo: &mut [usize], total: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < total - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Classifies an instance the pivoting solver reported as having no
/// equation-system solution; `FeasibleBounded` flags a counterexample.
pub fn classify_no_solution(instance: &LpInstance) -> NoSolutionClass {
    match simplex_solve(instance).kind {
        OracleKind::Infeasible => NoSolutionClass::Infeasible,
        OracleKind::Unbounded => NoSolutionClass::Unbounded,
        OracleKind::Optimal => NoSolutionClass::FeasibleBounded,
    }
}
