//! Exact rank of integer matrices over the rationals, by fraction-free
//! (Bareiss) Gaussian elimination.
//!
//! Division-free pivoting keeps every intermediate entry an integer (each is
//! a minor of the original matrix), so the rank is exact where a
//! floating-point elimination would have to guess a zero threshold.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rank over the rationals of the given row-major integer matrix.
///
/// Rows may have any common length, including zero; an empty matrix has rank
/// zero. The matrix is consumed because elimination rewrites it in place.
pub fn rank_fraction_free(mut rows: Vec<Vec<BigInt>>) -> usize {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    debug_assert!(rows.iter().all(|r| r.len() == n_cols));

    let mut rank = 0;
    let mut prev_pivot = BigInt::one();
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot_row) = (rank..n_rows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let (pivot_slice, below) = rows.split_at_mut(rank + 1);
        let pivot = &pivot_slice[rank];
        for row in below.iter_mut() {
            if row[col].is_zero() {
                // Still renormalize so later Bareiss divisions stay exact.
                for c in (col + 1)..n_cols {
                    let num = &pivot[col] * &row[c];
                    row[c] = exact_div(num, &prev_pivot);
                }
            } else {
                for c in (col + 1)..n_cols {
                    let num = &pivot[col] * &row[c] - &row[col] * &pivot[c];
                    row[c] = exact_div(num, &prev_pivot);
                }
            }
            row[col] = BigInt::zero();
        }
        prev_pivot = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    debug_assert!((&num % den).is_zero(), "Bareiss division must be exact");
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank_fraction_free(vec![]), 0);
        assert_eq!(rank_fraction_free(mat(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_fraction_free(mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_fraction_free(mat(&[&[1, 2], &[3, 4]])), 2);
        assert_eq!(
            rank_fraction_free(mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])),
            2
        );
        assert_eq!(
            rank_fraction_free(mat(&[&[2, 0, 1], &[0, 3, 0], &[0, 0, 5]])),
            3
        );
    }

    #[test]
    fn rank_sees_rational_dependence_that_floats_could_miss() {
        // Third row = first/3 + second/7, scaled to integers.
        let rows = mat(&[
            &[21, 42, 63],
            &[14, 7, 28],
            &[21 * 7 + 14 * 3, 42 * 7 + 7 * 3, 63 * 7 + 28 * 3],
        ]);
        assert_eq!(rank_fraction_free(rows), 2);
    }

    #[test]
    fn rank_is_invariant_under_row_permutation() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let base = mat(&[
            &[1, 0, 2, 3],
            &[0, 1, 4, 5],
            &[1, 1, 6, 8],
            &[2, 1, 8, 11],
            &[0, 0, 0, 1],
        ]);
        let expected = rank_fraction_free(base.clone());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut shuffled = base.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(rank_fraction_free(shuffled), expected);
        }
    }

    #[test]
    fn rank_matches_rational_elimination_oracle() {
        use num_rational::BigRational;
        use rand::{Rng, SeedableRng};

        fn rank_rational(rows: &[Vec<BigInt>]) -> usize {
            let mut m: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| r.iter().map(|v| BigRational::from(v.clone())).collect())
                .collect();
            let n_cols = m.first().map_or(0, Vec::len);
            let mut rank = 0;
            for col in 0..n_cols {
                let Some(pr) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
                    continue;
                };
                m.swap(rank, pr);
                let pivot = m[rank][col].clone();
                for r in (rank + 1)..m.len() {
                    let factor = &m[r][col] / &pivot;
                    for c in col..n_cols {
                        let sub = &factor * &m[rank][c];
                        m[r][c] = &m[r][c] - sub;
                    }
                }
                rank += 1;
                if rank == m.len() {
                    break;
                }
            }
            rank
        }

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let r = rng.gen_range(1..=6);
            let c = rng.gen_range(1..=6);
            let rows: Vec<Vec<BigInt>> = (0..r)
                .map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect())
                .collect();
            assert_eq!(
                rank_fraction_free(rows.clone()),
                rank_rational(&rows),
                "matrix: {rows:?}"
            );
        }
    }
}
