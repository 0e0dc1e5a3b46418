//! Exact linear-system solving: Gaussian elimination over the rationals and
//! an integer solver based on column Hermite reduction. No floating point
//! anywhere; feasibility answers are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The affine solution space of a consistent rational system: a particular
/// solution plus a basis of the homogeneous null space.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vec<BigRational>,
    pub nullspace: Vec<Vec<BigRational>>,
}

/// Solves `rows · x = rhs` over the rationals. Returns `None` when the
/// system is inconsistent.
pub fn solve_rational(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
) -> Option<AffineSolution> {
    assert_eq!(rows.len(), rhs.len(), "row/rhs length mismatch");
    let cols = rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();

    // Reduced row echelon form.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0usize;
    for col in 0..cols {
        let Some(pivot) = (row..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, pivot);
        let inv = aug[row][col].clone();
        for entry in aug[row].iter_mut() {
            *entry /= inv.clone();
        }
        for r in 0..aug.len() {
            if r != row && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=cols {
                    let delta = factor.clone() * aug[row][c].clone();
                    aug[r][c] -= delta;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == aug.len() {
            break;
        }
    }

    // Consistency: no row of the form 0 = nonzero.
    for r in &aug {
        if r[..cols].iter().all(Zero::is_zero) && !r[cols].is_zero() {
            return None;
        }
    }

    let mut particular = vec![BigRational::zero(); cols];
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pivot {
            particular[col] = aug[*r][cols].clone();
        }
    }

    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut vec = vec![BigRational::zero(); cols];
        vec[free] = BigRational::one();
        for (col, pivot) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pivot {
                vec[col] = -aug[*r][free].clone();
            }
        }
        nullspace.push(vec);
    }

    Some(AffineSolution { particular, nullspace })
}

/// Solves `rows · x = rhs` over the integers. Returns `None` when no integer
/// solution exists (the system may still be rationally solvable).
///
/// Column Hermite reduction: unimodular column operations triangularize the
/// matrix row by row; once a row has a single pivot column left, its
/// equation must divide exactly.
pub fn solve_integer(rows: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(rows.len(), rhs.len(), "row/rhs length mismatch");
    let cols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    for row in &a {
        assert_eq!(row.len(), cols, "ragged matrix");
    }
    // Transform tracker: x = v · y for the accumulated column operations.
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut is_pivot = vec![false; cols];
    let mut y = vec![BigInt::zero(); cols];

    let add_col_multiple = |a: &mut Vec<Vec<BigInt>>,
                            v: &mut Vec<Vec<BigInt>>,
                            target: usize,
                            source: usize,
                            factor: &BigInt| {
        for row in a.iter_mut() {
            let delta = factor * &row[source];
            row[target] -= delta;
        }
        for row in v.iter_mut() {
            let delta = factor * &row[source];
            row[target] -= delta;
        }
    };

    for r in 0..a.len() {
        // Reduce the active (non-pivot) columns of row r to at most one
        // nonzero entry via Euclidean column steps.
        loop {
            let mut nonzero: Vec<usize> =
                (0..cols).filter(|&c| !is_pivot[c] && !a[r][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            // Use the column with the smallest magnitude to shrink the rest.
            nonzero.sort_by_key(|&c| a[r][c].abs());
            let small = nonzero[0];
            for &c in &nonzero[1..] {
                let q = &a[r][c] / &a[r][small];
                if !q.is_zero() {
                    add_col_multiple(&mut a, &mut v, c, small, &q);
                }
            }
        }
        let active = (0..cols).find(|&c| !is_pivot[c] && !a[r][c].is_zero());
        let mut residual = rhs[r].clone();
        for c in 0..cols {
            if is_pivot[c] {
                residual -= &a[r][c] * &y[c];
            }
        }
        match active {
            Some(c) => {
                let g = a[r][c].clone();
                if (&residual % &g) != BigInt::zero() {
                    return None;
                }
                y[c] = residual / g;
                is_pivot[c] = true;
            }
            None => {
                if !residual.is_zero() {
                    return None;
                }
            }
        }
    }

    let mut x = vec![BigInt::zero(); cols];
    for (c, yc) in y.iter().enumerate() {
        if yc.is_zero() {
            continue;
        }
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += &v[i][c] * yc;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn rat_rows(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&n| rat(n)).collect()).collect()
    }

    fn int_rows(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&n| BigInt::from(n)).collect()).collect()
    }

    fn assert_solves_rational(rows: &[Vec<BigRational>], rhs: &[BigRational], x: &[BigRational]) {
        for (row, b) in rows.iter().zip(rhs) {
            let lhs: BigRational =
                row.iter().zip(x).map(|(a, xi)| a.clone() * xi.clone()).sum();
            assert_eq!(&lhs, b);
        }
    }

    #[test]
    fn solves_determined_system() {
        let rows = rat_rows(&[&[1, 1], &[1, -1]]);
        let rhs = vec![rat(3), rat(1)];
        let sol = solve_rational(&rows, &rhs).unwrap();
        assert_eq!(sol.particular, vec![rat(2), rat(1)]);
        assert!(sol.nullspace.is_empty());
    }

    #[test]
    fn detects_inconsistency() {
        let rows = rat_rows(&[&[1, 1], &[2, 2]]);
        let rhs = vec![rat(1), rat(3)];
        assert!(solve_rational(&rows, &rhs).is_none());
    }

    #[test]
    fn reports_nullspace() {
        let rows = rat_rows(&[&[1, 1, 1]]);
        let rhs = vec![rat(2)];
        let sol = solve_rational(&rows, &rhs).unwrap();
        assert_eq!(sol.nullspace.len(), 2);
        assert_solves_rational(&rows, &rhs, &sol.particular);
        for dir in &sol.nullspace {
            let shifted: Vec<BigRational> =
                sol.particular.iter().zip(dir).map(|(p, d)| p.clone() + d.clone()).collect();
            assert_solves_rational(&rows, &rhs, &shifted);
        }
    }

    #[test]
    fn half_integral_system_solvable_over_q_not_z() {
        // x+y = 1, y+z = 1, x+z = 1 forces x = y = z = 1/2.
        let rows = &[&[1i64, 1, 0][..], &[0, 1, 1], &[1, 0, 1]];
        let rhs_i = vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)];
        let rhs_q = vec![rat(1), rat(1), rat(1)];
        let q = solve_rational(&rat_rows(rows), &rhs_q).unwrap();
        assert_eq!(q.particular, vec![rat(1) / rat(2), rat(1) / rat(2), rat(1) / rat(2)]);
        assert!(solve_integer(&int_rows(rows), &rhs_i).is_none());
    }

    #[test]
    fn integer_solver_handles_free_variables() {
        // x + y = 3 has integer solutions with one degree of freedom.
        let rows = int_rows(&[&[1, 1]]);
        let rhs = vec![BigInt::from(3)];
        let x = solve_integer(&rows, &rhs).unwrap();
        assert_eq!(&x[0] + &x[1], BigInt::from(3));
    }

    #[test]
    fn integer_solver_detects_parity_obstruction() {
        // 2x = 3 has no integer solution.
        let rows = int_rows(&[&[2]]);
        assert!(solve_integer(&rows, &[BigInt::from(3)]).is_none());
        assert_eq!(solve_integer(&rows, &[BigInt::from(4)]).unwrap(), vec![BigInt::from(2)]);
    }

    #[test]
    fn integer_solutions_substitute_back() {
        // Random-ish fixed cases: build rhs from a known solution and check
        // the solver returns some valid solution.
        let cases: &[(&[&[i64]], &[i64])] = &[
            (&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]], &[2, -1, 3]),
            (&[&[3, 5], &[7, 2]], &[4, -6]),
            (&[&[1, 2, 3, 4]], &[1, 1, 1, 1]),
        ];
        for (rows, x_star) in cases {
            let a = int_rows(rows);
            let rhs: Vec<BigInt> = a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(x_star.iter())
                        .map(|(c, &x)| c * BigInt::from(x))
                        .sum()
                })
                .collect();
            let x = solve_integer(&a, &rhs).expect("consistent by construction");
            for (row, b) in a.iter().zip(&rhs) {
                let lhs: BigInt = row.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                assert_eq!(&lhs, b);
            }
        }
    }
}
