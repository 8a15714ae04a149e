//! Exact rank over the cyclotomic field by fraction-free (Bareiss)
//! elimination. Shared by the operator truncations and the
//! translate-span-dimension computation.

use crate::scalar::CycScalar;

/// Rank of a dense row-major matrix. Entries are consumed as a working copy.
pub fn exact_rank(rows: usize, cols: usize, entries: &[CycScalar]) -> usize {
    assert_eq!(entries.len(), rows * cols, "entry count mismatch");
    let mut m: Vec<CycScalar> = entries.to_vec();
    let at = |m: &Vec<CycScalar>, i: usize, j: usize| m[i * cols + j].clone();
    let mut rank = 0;
    let mut prev_pivot = CycScalar::one();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let pivot_row = (row..rows).find(|&r| !m[r * cols + col].is_zero());
        let Some(p) = pivot_row else { continue };
        if p != row {
            for j in 0..cols {
                m.swap(row * cols + j, p * cols + j);
            }
        }
        let pivot = at(&m, row, col);
        // Bareiss step: m[i][j] <- (pivot*m[i][j] - m[i][col]*m[row][j]) / prev_pivot
        for i in (row + 1)..rows {
            let factor = at(&m, i, col);
            for j in 0..cols {
                let a = pivot.mul(&at(&m, i, j)).expect("scalar arithmetic");
                let b = factor.mul(&at(&m, row, j)).expect("scalar arithmetic");
                let num = a.sub(&b).expect("scalar arithmetic");
                m[i * cols + j] = num.div(&prev_pivot).expect("exact Bareiss division");
            }
        }
        prev_pivot = pivot;
        row += 1;
        rank += 1;
    }
    rank
}
