//! The numeric kernel: the augmented tableau `[M q]`, Gauss-Jordan pivoting,
//! elementary row operations, pair-basis queries, and the two stopping-state
//! predicates.
//!
//! Rows, columns and pairs are 1-based throughout the public API so that
//! states read exactly like the printed tables they are checked against;
//! storage is 0-based internally.

use serde_json::{json, Value};

use crate::arith::Scalar;

/// Arithmetic mode selector used by solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticKind {
    Rational,
    Float64,
}

/// Arithmetic mode plus zero tolerance. Exact mode always carries epsilon 0;
/// float mode treats `|x| <= epsilon` as zero in every sign test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArithmeticMode {
    pub kind: ArithmeticKind,
    pub epsilon: f64,
}

pub const DEFAULT_FLOAT_EPSILON: f64 = 1e-9;

impl ArithmeticMode {
    pub fn rational() -> Self {
        ArithmeticMode {
            kind: ArithmeticKind::Rational,
            epsilon: 0.0,
        }
    }

    pub fn float64(epsilon: f64) -> Self {
        ArithmeticMode {
            kind: ArithmeticKind::Float64,
            epsilon,
        }
    }

    /// Epsilon must be zero exactly when the arithmetic is exact.
    pub fn validate(&self) -> Result<(), String> {
        match self.kind {
            ArithmeticKind::Rational if self.epsilon != 0.0 => Err(format!(
                "rational mode requires epsilon = 0, got {}",
                self.epsilon
            )),
            ArithmeticKind::Float64 if self.epsilon < 0.0 => {
                Err(format!("epsilon must be nonnegative, got {}", self.epsilon))
            }
            _ => Ok(()),
        }
    }
}

impl Default for ArithmeticMode {
    fn default() -> Self {
        ArithmeticMode::rational()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("zero pivot at row {row}, column {column}")]
    ZeroPivot { row: usize, column: usize },
    #[error("pair-basis invariant breach at pair {pair}: {detail}")]
    InvariantBreach { pair: usize, detail: String },
    #[error("malformed tableau: {0}")]
    Shape(String),
}

/// The `(p+1) x (2p+1)` augmented tableau; the last column is `q` and the
/// last row carries the strong-duality equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau<N> {
    rows: Vec<Vec<N>>,
    pairs: usize,
    epsilon: N,
    last_row_negated: bool,
}

/// Serializable point-in-time copy of a tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct TableauSnapshot<N> {
    pub rows: Vec<Vec<N>>,
    pub negated: bool,
}

impl<N: Scalar> TableauSnapshot<N> {
    /// `{"rows": [[Num, ...]], "negated": bool}` with exact strings in
    /// rational mode.
    pub fn to_json(&self) -> Value {
        json!({
            "rows": self
                .rows
                .iter()
                .map(|row| row.iter().map(Scalar::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "negated": self.negated,
        })
    }
}

impl<N: Scalar> Tableau<N> {
    /// Wraps raw rows (shape-checked only; pair-basis is asserted separately
    /// by the callers that rely on it).
    pub fn from_rows(rows: Vec<Vec<N>>, pairs: usize, epsilon: N) -> Result<Self, TableauError> {
        if rows.len() != pairs + 1 {
            return Err(TableauError::Shape(format!(
                "expected {} rows, got {}",
                pairs + 1,
                rows.len()
            )));
        }
        let width = 2 * pairs + 1;
        if let Some(bad) = rows.iter().position(|r| r.len() != width) {
            return Err(TableauError::Shape(format!(
                "row {} has {} entries, expected {}",
                bad + 1,
                rows[bad].len(),
                width
            )));
        }
        Ok(Tableau {
            rows,
            pairs,
            epsilon,
            last_row_negated: false,
        })
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn epsilon(&self) -> &N {
        &self.epsilon
    }

    pub fn last_row_negated(&self) -> bool {
        self.last_row_negated
    }

    /// Matrix entry, 1-based; `col` may not address the q column.
    pub fn at(&self, row: usize, col: usize) -> &N {
        debug_assert!((1..=self.pairs + 1).contains(&row));
        debug_assert!((1..=2 * self.pairs).contains(&col));
        &self.rows[row - 1][col - 1]
    }

    /// Right-hand-side entry `q_row`, 1-based.
    pub fn q(&self, row: usize) -> &N {
        debug_assert!((1..=self.pairs + 1).contains(&row));
        &self.rows[row - 1][2 * self.pairs]
    }

    pub fn q_last(&self) -> &N {
        self.q(self.pairs + 1)
    }

    // Sign tests honoring the zero tolerance.

    pub fn is_zero(&self, v: &N) -> bool {
        v.abs_value() <= self.epsilon
    }

    pub fn is_positive(&self, v: &N) -> bool {
        *v > self.epsilon
    }

    pub fn is_negative(&self, v: &N) -> bool {
        *v < -self.epsilon.clone()
    }

    /// Gauss-Jordan pivot at (`row`, `col`): scales the pivot row so the
    /// pivot entry becomes 1, then eliminates `col` from every other row
    /// (including the last). The pivot entry may be of either sign but not
    /// zero.
    pub fn gj_pivot(&mut self, row: usize, col: usize) -> Result<(), TableauError> {
        assert!((1..=self.pairs).contains(&row), "pivot row out of range");
        assert!((1..=2 * self.pairs).contains(&col), "pivot column out of range");
        let pivot = self.rows[row - 1][col - 1].clone();
        if self.is_zero(&pivot) {
            return Err(TableauError::ZeroPivot { row, column: col });
        }
        for v in &mut self.rows[row - 1] {
            *v = v.clone() / pivot.clone();
        }
        for r in 0..=self.pairs {
            if r == row - 1 {
                continue;
            }
            let factor = self.rows[r][col - 1].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=2 * self.pairs {
                let delta = factor.clone() * self.rows[row - 1][j].clone();
                self.rows[r][j] = self.rows[r][j].clone() - delta;
            }
        }
        Ok(())
    }

    /// Adds `alpha` times the last row to row `target` (`1 <= target <= p`).
    pub fn add_row_multiple(&mut self, target: usize, alpha: &N) {
        assert!((1..=self.pairs).contains(&target), "target row out of range");
        for j in 0..=2 * self.pairs {
            let delta = alpha.clone() * self.rows[self.pairs][j].clone();
            let v = self.rows[target - 1][j].clone() + delta;
            self.rows[target - 1][j] = v;
        }
    }

    /// Multiplies the last row by -1 and toggles the orientation flag.
    pub fn negate_last_row(&mut self) {
        for v in &mut self.rows[self.pairs] {
            *v = -v.clone();
        }
        self.last_row_negated = !self.last_row_negated;
    }

    fn is_unit_column(&self, col: usize, pair: usize) -> bool {
        for r in 1..=self.pairs + 1 {
            let v = self.at(r, col);
            let ok = if r == pair {
                (v.clone() - N::one()).abs_value() <= self.epsilon
            } else {
                self.is_zero(v)
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Returns whichever of columns `{pair, p+pair}` is the unit vector
    /// `e_pair`; errors if neither or both are (an invariant breach that
    /// must abort the run).
    pub fn basic_column(&self, pair: usize) -> Result<usize, TableauError> {
        assert!((1..=self.pairs).contains(&pair), "pair index out of range");
        let left = self.is_unit_column(pair, pair);
        let right = self.is_unit_column(self.pairs + pair, pair);
        match (left, right) {
            (true, false) => Ok(pair),
            (false, true) => Ok(self.pairs + pair),
            (true, true) => Err(TableauError::InvariantBreach {
                pair,
                detail: "both pair columns are unit vectors".to_string(),
            }),
            (false, false) => Err(TableauError::InvariantBreach {
                pair,
                detail: "neither pair column is a unit vector".to_string(),
            }),
        }
    }

    /// The non-basic member of a pair.
    pub fn nonbasic_column(&self, pair: usize) -> Result<usize, TableauError> {
        let basic = self.basic_column(pair)?;
        Ok(if basic == pair { self.pairs + pair } else { pair })
    }

    /// Checks the pair-basis invariant for every pair.
    pub fn assert_pair_basis(&self) -> Result<(), TableauError> {
        for j in 1..=self.pairs {
            self.basic_column(j)?;
        }
        Ok(())
    }

    /// Solution state: `q_j >= 0` for all pair rows and `q_(p+1) = 0`.
    pub fn is_solution_state(&self) -> bool {
        if !self.is_zero(self.q_last()) {
            return false;
        }
        (1..=self.pairs).all(|j| !self.is_negative(self.q(j)))
    }

    /// No-solution evidence: the last row has `q > 0` with every matrix
    /// entry nonpositive, in either sign orientation.
    pub fn is_no_solution_state(&self) -> bool {
        let q = self.q_last();
        if self.is_positive(q) {
            (1..=2 * self.pairs).all(|j| !self.is_positive(self.at(self.pairs + 1, j)))
        } else if self.is_negative(q) {
            (1..=2 * self.pairs).all(|j| !self.is_negative(self.at(self.pairs + 1, j)))
        } else {
            false
        }
    }

    pub fn q_vector(&self) -> Vec<N> {
        (1..=self.pairs + 1).map(|r| self.q(r).clone()).collect()
    }

    pub fn snapshot(&self) -> TableauSnapshot<N> {
        TableauSnapshot {
            rows: self.rows.clone(),
            negated: self.last_row_negated,
        }
    }
}
