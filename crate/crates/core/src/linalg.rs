//! Exact determinants, cofactors and rank over `Z[ω]`.
//!
//! Elimination is fraction-free (Bareiss): every intermediate entry is a minor
//! of the input, so each division is exact in the ring. A failed division
//! means a bug and is reported as [`MatrixError::Arithmetic`].

use crate::eisenstein::EisensteinInt;
use crate::matrix::{ExactMatrix, Label, MatrixError};

fn to_grid(m: &ExactMatrix) -> Vec<Vec<EisensteinInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Determinant by fraction-free elimination. The 0×0 determinant is 1.
pub fn det(m: &ExactMatrix) -> Result<EisensteinInt, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    det_grid(to_grid(m))
}

pub(crate) fn det_grid(mut a: Vec<Vec<EisensteinInt>>) -> Result<EisensteinInt, MatrixError> {
    let n = a.len();
    if n == 0 {
        return Ok(EisensteinInt::one());
    }
    let mut negate = false;
    let mut prev = EisensteinInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(EisensteinInt::zero()),
            }
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in rest.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let num = &(&row[j] * pivot) - &(&factor * &pivot_row[j]);
                row[j] = if prev.is_one() {
                    num
                } else {
                    num.exact_div(&prev)?
                };
            }
            row[k] = EisensteinInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Rank over the fraction field of `Z[ω]`.
pub fn rank(m: &ExactMatrix) -> Result<usize, MatrixError> {
    let mut a = to_grid(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    let mut prev = EisensteinInt::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let num = &(&row[j] * pivot) - &(&factor * &pivot_row[j]);
                row[j] = num.exact_div(&prev)?;
            }
            row[c] = EisensteinInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    Ok(r)
}

/// `(−1)^(pos(i) + pos(j)) · det(M with row i and column j removed)`.
pub fn cofactor(m: &ExactMatrix, row: Label, col: Label) -> Result<EisensteinInt, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let i = m.row_position(row)?;
    let j = m.col_position(col)?;
    let rows: Vec<usize> = (0..m.rows()).filter(|&r| r != i).collect();
    let cols: Vec<usize> = (0..m.cols()).filter(|&c| c != j).collect();
    let minor = det(&m.select_positions(&rows, &cols))?;
    Ok(if (i + j) % 2 == 1 { -minor } else { minor })
}

/// All `n²` cofactors, indexed `[row position][col position]`.
pub fn cofactor_matrix(m: &ExactMatrix) -> Result<Vec<Vec<EisensteinInt>>, MatrixError> {
    let rows = m.row_labels().to_vec();
    let cols = m.col_labels().to_vec();
    rows.iter()
        .map(|&r| cols.iter().map(|&c| cofactor(m, r, c)).collect())
        .collect()
}

/// True iff `M(i,j) = conj(M(j,i))` everywhere. Non-square matrices are not Hermitian.
pub fn is_hermitian(m: &ExactMatrix) -> bool {
    m.is_square() && (0..m.rows()).all(|i| (i..m.cols()).all(|j| m[(i, j)] == m[(j, i)].conj()))
}

/// Laplace expansion along the first row. Exponential; only meant as an
/// independent cross-check for small matrices.
pub fn det_by_expansion(m: &ExactMatrix) -> Result<EisensteinInt, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    fn go(a: &[Vec<EisensteinInt>]) -> EisensteinInt {
        let n = a.len();
        if n == 0 {
            return EisensteinInt::one();
        }
        let mut acc = EisensteinInt::zero();
        for j in 0..n {
            if a[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<EisensteinInt>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][j] * &go(&minor);
            if j % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    }
    Ok(go(&to_grid(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::matrix::{build_l, build_s, vertex_set};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn e(a: i64, b: i64) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    #[test]
    fn identity_and_empty() {
        assert_eq!(det(&ExactMatrix::identity(5)).unwrap(), e(1, 0));
        assert_eq!(det(&ExactMatrix::identity(0)).unwrap(), e(1, 0));
        assert_eq!(rank(&ExactMatrix::identity(4)).unwrap(), 4);
    }

    #[test]
    fn not_square_is_rejected() {
        let g = parse_graph("n 3\ne 1 2 --\ne 2 3 --\ne 1 3 --\n").unwrap();
        let l = build_l(&g);
        let sub = l
            .submatrix(&vertex_set([1, 2]), &vertex_set([1, 2, 3]))
            .unwrap();
        assert!(matches!(det(&sub), Err(MatrixError::NotSquare { .. })));
    }

    #[test]
    fn zero_matrix_rank() {
        let z = ExactMatrix::from_rows(vec![vec![e(0, 0); 3]; 2]);
        assert_eq!(rank(&z).unwrap(), 0);
    }

    #[test]
    fn rank_with_skipped_columns() {
        let m = ExactMatrix::from_rows(vec![
            vec![e(0, 0), e(1, 1), e(2, 0), e(0, 1)],
            vec![e(0, 0), e(2, 2), e(4, 0), e(1, 0)],
            vec![e(0, 0), e(3, 3), e(6, 0), e(1, 1)],
        ]);
        // row 3 = row 1 + row 2
        assert_eq!(rank(&m).unwrap(), 2);
        assert_eq!(rank(&m.adjoint()).unwrap(), 2);
    }

    #[test]
    fn cofactor_of_one_by_one() {
        let m = ExactMatrix::from_rows(vec![vec![e(7, 3)]]);
        assert_eq!(
            cofactor(&m, Label::Vertex(1), Label::Vertex(1)).unwrap(),
            e(1, 0)
        );
        assert!(cofactor(&m, Label::Vertex(2), Label::Vertex(1)).is_err());
    }

    #[test]
    fn cofactor_signs_match_adjugate() {
        // M · adj(M) = det(M) · I with adj(M)[j][i] = cofactor(i, j)
        let m = ExactMatrix::from_rows(vec![
            vec![e(2, 1), e(0, 1), e(-1, 0)],
            vec![e(1, -1), e(3, 0), e(0, 2)],
            vec![e(0, 0), e(1, 1), e(1, 0)],
        ]);
        let cof = cofactor_matrix(&m).unwrap();
        let d = det(&m).unwrap();
        for i in 0..3 {
            for (k, row) in cof.iter().enumerate() {
                let s: EisensteinInt = (0..3).map(|j| &m[(i, j)] * &row[j]).sum();
                let want = if i == k { d.clone() } else { e(0, 0) };
                assert_eq!(s, want);
            }
        }
    }

    #[test]
    fn hermitian_checks() {
        let g = parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        assert!(is_hermitian(&build_l(&g)));
        assert!(!is_hermitian(&build_s(&g)));
        let d = ExactMatrix::from_rows(vec![vec![e(2, 0), e(0, 0)], vec![e(0, 0), e(3, 0)]]);
        assert!(is_hermitian(&d));
        let not = ExactMatrix::from_rows(vec![vec![e(0, 1)]]);
        assert!(!is_hermitian(&not));
    }

    #[test]
    fn hermitian_determinant_is_real() {
        let g = parse_graph("n 4\ne 1 2 ->\ne 1 3 <-\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        let d = det(&build_l(&g)).unwrap();
        assert_eq!(d, d.conj());
    }

    fn small_entry() -> impl Strategy<Value = EisensteinInt> {
        prop_oneof![
            (0i64..6).prop_map(EisensteinInt::omega_pow),
            Just(e(0, 0)),
            (-3i64..=3, -3i64..=3).prop_map(|(a, b)| e(a, b)),
        ]
    }

    fn square_matrix(max: usize) -> impl Strategy<Value = ExactMatrix> {
        (0..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(small_entry(), n), n)
                .prop_map(ExactMatrix::from_rows)
        })
    }

    fn rect_matrix(r: usize, c: usize) -> impl Strategy<Value = ExactMatrix> {
        proptest::collection::vec(proptest::collection::vec(small_entry(), c), r)
            .prop_map(ExactMatrix::from_rows)
    }

    fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
        crate::combinatorics::k_subsets(m, k).collect()
    }

    proptest! {
        #[test]
        fn bareiss_matches_expansion(m in square_matrix(5)) {
            prop_assert_eq!(det(&m).unwrap(), det_by_expansion(&m).unwrap());
        }

        #[test]
        fn rank_agrees_with_nonzero_minors(m in rect_matrix(3, 4)) {
            // largest k with a nonzero k×k minor
            let mut expected = 0;
            for k in 1..=3 {
                let any = subsets(3, k).iter().any(|rs| {
                    subsets(4, k).iter().any(|cs| !det_by_expansion(&m.select_positions(rs, cs)).unwrap().is_zero())
                });
                if any { expected = k; }
            }
            prop_assert_eq!(rank(&m).unwrap(), expected);
        }

        #[test]
        fn cauchy_binet_identity(a in rect_matrix(3, 5)) {
            let gram = a.mul(&a.adjoint()).unwrap();
            let lhs = det(&gram).unwrap();
            let rows = [0, 1, 2];
            let mut rhs = BigInt::from(0);
            for cols in subsets(5, 3) {
                rhs += det_by_expansion(&a.select_positions(&rows, &cols)).unwrap().norm();
            }
            prop_assert_eq!(lhs, EisensteinInt::from_int(rhs));
        }
    }
}
