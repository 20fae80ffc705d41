//! Builds the primal-dual equation system `Mz = q` from an instance and
//! performs the initialization row operation that produces the starting
//! tableau.
//!
//! With `p = m + n`, the system couples the primal and dual of the instance
//! through block structure
//!
//! ```text
//! M = |  0    A    I_m   0  |        q = |  b |
//!     | -A'   0    0    I_n |            | -c |
//!     |  b'  -c'   0'    0' |            |  0 |
//! ```
//!
//! over `z = (y, x, s, t) >= 0` with the complementarity condition
//! `z_j * z_(p+j) = 0`. The final row encodes strong duality `b'y = c'x`.

use num_traits::Zero;

use crate::arith::{Rational, Scalar};
use crate::lp_model::LpInstance;
use crate::tableau::Tableau;

/// The assembled `(m+n+1) x 2(m+n)` system plus right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqSystem {
    m: usize,
    n: usize,
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl EqSystem {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pair count `p = m + n`.
    pub fn pairs(&self) -> usize {
        self.m + self.n
    }

    /// Matrix rows, `(m+n+1)` of them, each `2(m+n)` wide.
    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }
}

/// Assembles `M` and `q` from the instance blocks.
pub fn build_eq(instance: &LpInstance) -> EqSystem {
    let m = instance.m();
    let n = instance.n();
    let p = m + n;
    let width = 2 * p;
    let mut matrix = vec![vec![Rational::zero(); width]; p + 1];
    let mut rhs = vec![Rational::zero(); p + 1];

    // Rows 1..m:  [ 0  A  I_m  0 ],  rhs b.
    for i in 0..m {
        for j in 0..n {
            matrix[i][m + j] = instance.a()[i][j].clone();
        }
        matrix[i][p + i] = Rational::from_integer(1.into());
        rhs[i] = instance.b()[i].clone();
    }
    // Rows m+1..m+n:  [ -A'  0  0  I_n ],  rhs -c.
    for j in 0..n {
        for i in 0..m {
            matrix[m + j][i] = -instance.a()[i][j].clone();
        }
        matrix[m + j][p + m + j] = Rational::from_integer(1.into());
        rhs[m + j] = -instance.c()[j].clone();
    }
    // Row m+n+1:  [ b'  -c'  0'  0' ],  rhs 0.
    for i in 0..m {
        matrix[p][i] = instance.b()[i].clone();
    }
    for j in 0..n {
        matrix[p][m + j] = -instance.c()[j].clone();
    }

    EqSystem { m, n, matrix, rhs }
}

/// The initialization operation: add row `m+n+1` of `[M q]` to every other
/// row, leaving the last row itself unchanged. The slack/surplus identity
/// columns have a zero last-row entry, so they stay unit vectors and the
/// returned tableau starts with every pair basic on its right-hand member.
pub fn initialize<N: Scalar>(eq: &EqSystem, epsilon: N) -> Tableau<N> {
    let p = eq.pairs();
    let width = 2 * p + 1;
    let mut rows: Vec<Vec<N>> = Vec::with_capacity(p + 1);
    for i in 0..=p {
        let mut row: Vec<N> = Vec::with_capacity(width);
        for j in 0..2 * p {
            let mut v = eq.matrix()[i][j].clone();
            if i < p {
                v += &eq.matrix()[p][j];
            }
            row.push(N::from_rational(&v));
        }
        let mut q = eq.rhs()[i].clone();
        if i < p {
            q += &eq.rhs()[p];
        }
        row.push(N::from_rational(&q));
        rows.push(row);
    }
    let tableau = Tableau::from_rows(rows, p, epsilon)
        .expect("initialization always produces a well-shaped tableau");
    tableau
        .assert_pair_basis()
        .expect("initial pair basis holds by construction");
    tableau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lp_model::tests::walkthrough;
    use num_traits::Zero;

    fn rats(vals: &[i64]) -> Vec<Rational> {
        vals.iter().copied().map(rat).collect()
    }

    #[test]
    fn walkthrough_system_matches_reference() {
        let eq = build_eq(&walkthrough());
        assert_eq!(
            eq.matrix(),
            &[
                rats(&[0, 0, 1, 1, 1, 0, 0, 0]),
                rats(&[0, 0, -1, 0, 0, 1, 0, 0]),
                rats(&[-1, 1, 0, 0, 0, 0, 1, 0]),
                rats(&[-1, 0, 0, 0, 0, 0, 0, 1]),
                rats(&[10, -5, 1, -1, 0, 0, 0, 0]),
            ]
        );
        assert_eq!(eq.rhs(), rats(&[10, -5, 1, -1, 0]).as_slice());
    }

    #[test]
    fn dimensions_follow_instance() {
        for (m, n) in [(1, 1), (2, 3), (4, 2)] {
            let inst = crate::lp_model::random_instance(m, n, 11, (-4, 4)).unwrap();
            let eq = build_eq(&inst);
            assert_eq!(eq.matrix().len(), m + n + 1);
            assert!(eq.matrix().iter().all(|row| row.len() == 2 * (m + n)));
            assert_eq!(eq.rhs().len(), m + n + 1);
            assert!(eq.rhs()[m + n].is_zero());
        }
    }

    #[test]
    fn klee_minty_three_last_row_prefix() {
        let eq = build_eq(&crate::lp_model::klee_minty(3).unwrap());
        let last = &eq.matrix()[6];
        assert_eq!(&last[..6], rats(&[1, 100, 10000, -100, -10, -1]).as_slice());
        assert!(last[6..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn initialization_matches_reference_tableau() {
        let eq = build_eq(&walkthrough());
        let t = initialize::<Rational>(&eq, Rational::zero());
        let expected = [
            rats(&[10, -5, 2, 0, 1, 0, 0, 0, 10]),
            rats(&[10, -5, 0, -1, 0, 1, 0, 0, -5]),
            rats(&[9, -4, 1, -1, 0, 0, 1, 0, 1]),
            rats(&[9, -5, 1, -1, 0, 0, 0, 1, -1]),
            rats(&[10, -5, 1, -1, 0, 0, 0, 0, 0]),
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, v) in row.iter().enumerate().take(8) {
                assert_eq!(t.at(i + 1, j + 1), v, "entry ({},{})", i + 1, j + 1);
            }
            assert_eq!(t.q(i + 1), &row[8], "q entry {}", i + 1);
        }
    }

    #[test]
    fn initialization_leaves_last_row_and_rhs_untouched() {
        let eq = build_eq(&walkthrough());
        let t = initialize::<Rational>(&eq, Rational::zero());
        let p = eq.pairs();
        for j in 0..2 * p {
            assert_eq!(*t.at(p + 1, j + 1), eq.matrix()[p][j]);
        }
        // The last rhs entry is zero, so adding the last row changes no q entry.
        for i in 0..=p {
            assert_eq!(*t.q(i + 1), eq.rhs()[i]);
        }
    }

    #[test]
    fn initial_basis_sits_on_right_members() {
        for inst in [
            walkthrough(),
            crate::lp_model::klee_minty(3).unwrap(),
            crate::lp_model::random_instance(3, 2, 5, (-9, 9)).unwrap(),
        ] {
            let eq = build_eq(&inst);
            let t = initialize::<Rational>(&eq, Rational::zero());
            for j in 1..=eq.pairs() {
                assert_eq!(t.basic_column(j).unwrap(), eq.pairs() + j);
            }
        }
    }

    #[test]
    fn doubling_b_touches_only_b_blocks() {
        let base = walkthrough();
        let doubled = LpInstance::validate(
            "doubled",
            base.c().to_vec(),
            base.a().to_vec(),
            base.b().iter().map(|v| v + v).collect(),
        )
        .unwrap();
        let eq0 = build_eq(&base);
        let eq1 = build_eq(&doubled);
        let p = eq0.pairs();
        for i in 0..=p {
            for j in 0..2 * p {
                let differs = eq0.matrix()[i][j] != eq1.matrix()[i][j];
                // b appears only in the last row's first m columns.
                let b_position = i == p && j < eq0.m();
                assert_eq!(differs, b_position && !eq0.matrix()[i][j].is_zero());
            }
            let rhs_differs = eq0.rhs()[i] != eq1.rhs()[i];
            let b_position = i < eq0.m();
            assert_eq!(rhs_differs, b_position && !eq0.rhs()[i].is_zero());
        }
    }

    #[test]
    fn solution_set_preserved_by_initialization() {
        // z* = (1, 2, 5, 5, 0, 0, 0, 0) solves the walkthrough system; every
        // initialized row must still evaluate exactly to its rhs.
        let eq = build_eq(&walkthrough());
        let t = initialize::<Rational>(&eq, Rational::zero());
        let z = rats(&[1, 2, 5, 5, 0, 0, 0, 0]);
        for i in 1..=eq.pairs() + 1 {
            let mut acc = Rational::zero();
            for (j, zj) in z.iter().enumerate() {
                acc += t.at(i, j + 1) * zj;
            }
            assert_eq!(acc, *t.q(i), "row {i}");
        }
    }
}
