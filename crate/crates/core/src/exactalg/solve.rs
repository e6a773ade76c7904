//! Exact linear solving for the constants `C_1..C_n`.
//!
//! Equations are affine forms required to equal zero. Rows are inserted one
//! at a time into a reduced echelon form, so an inconsistency is pinned to
//! the first equation (in input order) that makes the system unsolvable —
//! that index is the commutativity obstruction witness.

use std::collections::BTreeMap;

use crate::exactalg::affine::AffineForm;
use crate::exactalg::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Every unknown pinned to a unique value.
    Unique(BTreeMap<u32, Scalar>),
    /// Rank-deficient but solvable; `assignment` holds the pivot variables
    /// with all free variables set to zero.
    Underdetermined {
        assignment: BTreeMap<u32, Scalar>,
        free: Vec<u32>,
    },
    /// No choice of constants satisfies the system; `witness` is the index
    /// of the first offending equation.
    Inconsistent { witness: usize },
}

struct Row {
    pivot: u32,
    coeffs: BTreeMap<u32, Scalar>,
    rhs: Scalar,
}

/// Solves `equations[i] == 0` for `C_1..C_{n_unknowns}` by exact Gaussian
/// elimination over the scalar field.
pub fn solve_linear(equations: &[AffineForm], n_unknowns: u32) -> Verdict {
    let mut rows: Vec<Row> = Vec::new();
    for (idx, eq) in equations.iter().enumerate() {
        debug_assert!(
            eq.max_index().is_none_or(|i| i >= 1 && i <= n_unknowns),
            "equation references an unknown outside C_1..C_{n_unknowns}"
        );
        let mut coeffs: BTreeMap<u32, Scalar> = eq.linear_part().clone();
        let mut rhs = eq.constant_part().neg();
        // reduce against existing pivots
        for row in &rows {
            if let Some(c) = coeffs.remove(&row.pivot) {
                for (j, rc) in &row.coeffs {
                    let entry = coeffs.entry(*j).or_insert_with(Scalar::zero);
                    *entry = entry.sub(&c.mul(rc));
                }
                rhs = rhs.sub(&c.mul(&row.rhs));
                coeffs.retain(|_, v| !v.is_zero());
            }
        }
        let pivot = match coeffs.keys().next().copied() {
            Some(p) => p,
            None => {
                if rhs.is_zero() {
                    continue; // redundant equation
                }
                return Verdict::Inconsistent { witness: idx };
            }
        };
        let lead = coeffs.remove(&pivot).expect("pivot coefficient present");
        let lead_inv = lead.inv().expect("nonzero pivot");
        let coeffs: BTreeMap<u32, Scalar> =
            coeffs.iter().map(|(j, c)| (*j, c.mul(&lead_inv))).collect();
        let rhs = rhs.mul(&lead_inv);
        // eliminate the new pivot from earlier rows
        for row in &mut rows {
            if let Some(c) = row.coeffs.remove(&pivot) {
                for (j, rc) in &coeffs {
                    let entry = row.coeffs.entry(*j).or_insert_with(Scalar::zero);
                    *entry = entry.sub(&c.mul(rc));
                }
                row.rhs = row.rhs.sub(&c.mul(&rhs));
                row.coeffs.retain(|_, v| !v.is_zero());
            }
        }
        rows.push(Row { pivot, coeffs, rhs });
    }

    let pivots: Vec<u32> = rows.iter().map(|r| r.pivot).collect();
    let free: Vec<u32> = (1..=n_unknowns).filter(|i| !pivots.contains(i)).collect();
    // with free variables at zero, each pivot equals its reduced rhs
    let assignment: BTreeMap<u32, Scalar> =
        rows.iter().map(|r| (r.pivot, r.rhs.clone())).collect();
    if free.is_empty() {
        Verdict::Unique(assignment)
    } else {
        Verdict::Underdetermined { assignment, free }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat;
    use num_rational::BigRational;
    use num_traits::Zero;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(i: u32) -> AffineForm {
        AffineForm::constant_symbol(i)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn single_equation_single_unknown() {
        // 2 C1 + 84 = 0 (g2 = 1)  ->  C1 = -42
        let eq = c(1).scale(&s(2)).add(&s(84).into());
        match solve_linear(&[eq], 1) {
            Verdict::Unique(m) => assert_eq!(m[&1], s(-42)),
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn contradiction_is_witnessed() {
        // C1 = 0 then C1 = 1: the second equation is the witness
        let e0 = c(1);
        let e1 = c(1).add(&s(-1).into());
        match solve_linear(&[e0, e1], 1) {
            Verdict::Inconsistent { witness } => assert_eq!(witness, 1),
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn empty_system_leaves_unknown_free() {
        match solve_linear(&[], 1) {
            Verdict::Underdetermined { assignment, free } => {
                assert!(assignment.is_empty());
                assert_eq!(free, vec![1]);
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_dropped() {
        // C1 + C2 = 1 stated twice, then C1 - C2 = 0
        let e = c(1).add(&c(2)).add(&s(-1).into());
        let f = c(1).sub(&c(2));
        match solve_linear(&[e.clone(), e, f], 2) {
            Verdict::Unique(m) => {
                assert_eq!(m[&1], Scalar::from_ratio(1, 2));
                assert_eq!(m[&2], Scalar::from_ratio(1, 2));
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    // independent oracle: ranks via fraction-free elimination on the
    // rational coefficient matrix
    fn bareiss_rank(mut m: Vec<Vec<BigRational>>) -> usize {
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            for r in 0..rows {
                if r != row && !m[r][col].is_zero() {
                    let factor = &m[r][col] / &m[row][col];
                    for j in 0..cols {
                        let sub = &factor * &m[row][j];
                        m[r][j] = &m[r][j] - sub;
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn verdicts_agree_with_rank_oracle() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..4u32);
            let m = rng.gen_range(0..5usize);
            let eqs: Vec<AffineForm> = (0..m)
                .map(|_| {
                    let mut form = AffineForm::from_scalar(Scalar::from_rational(rat(
                        rng.gen_range(-3..4),
                        1,
                    )));
                    for i in 1..=n {
                        let coeff = rat(rng.gen_range(-2..3), 1);
                        form = form.add(
                            &AffineForm::constant_symbol(i).scale(&Scalar::from_rational(coeff)),
                        );
                    }
                    form
                })
                .collect();
            let coeff_matrix: Vec<Vec<BigRational>> = eqs
                .iter()
                .map(|e| {
                    (1..=n)
                        .map(|i| {
                            e.linear_part()
                                .get(&i)
                                .and_then(|s| s.as_rational().cloned())
                                .unwrap_or_else(BigRational::zero)
                        })
                        .collect()
                })
                .collect();
            let aug_matrix: Vec<Vec<BigRational>> = eqs
                .iter()
                .enumerate()
                .map(|(r, e)| {
                    let mut row = coeff_matrix[r].clone();
                    row.push(e.constant_part().as_rational().unwrap().clone());
                    row
                })
                .collect();
            let rank = bareiss_rank(coeff_matrix);
            let rank_aug = bareiss_rank(aug_matrix);
            let verdict = solve_linear(&eqs, n);
            if rank_aug > rank {
                assert!(matches!(verdict, Verdict::Inconsistent { .. }));
            } else if rank == n as usize {
                assert!(matches!(verdict, Verdict::Unique(_)));
            } else {
                assert!(matches!(verdict, Verdict::Underdetermined { .. }));
            }
            // any returned assignment must actually satisfy the system
            let assignment = match &verdict {
                Verdict::Unique(a) => Some(a.clone()),
                Verdict::Underdetermined { assignment, free } => {
                    let mut a = assignment.clone();
                    for i in free {
                        a.insert(*i, Scalar::zero());
                    }
                    Some(a)
                }
                Verdict::Inconsistent { .. } => None,
            };
            if let Some(a) = assignment {
                for eq in &eqs {
                    assert!(eq.substitute(&a).is_zero());
                }
            }
        }
    }
}
