use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Diagonal of the Smith normal form of an integer matrix.
///
/// The matrix is read as a map `Z^cols -> Z^rows`, so its cokernel is
/// `Z^rank_free ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub diagonal: Vec<BigInt>,
    pub rank_free: usize,
}

impl SmithDecomposition {
    pub fn nonzero(&self) -> impl Iterator<Item = &BigInt> {
        self.diagonal.iter().filter(|d| !d.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.nonzero().count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let k = rows.min(cols);
    let mut diagonal = Vec::with_capacity(k);

    for t in 0..k {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            diagonal.resize(k, BigInt::zero());
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let qt = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let v = &a[t][j] * &qt;
                    a[i][j] -= v;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let qt = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &qt;
                    row[j] -= v;
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                let (pi, pj) = min_abs_entry_cross(&a, t);
                a.swap(t, pi);
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                continue;
            }
            // Row and column are clear; enforce divisibility on the rest.
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diagonal.push(a[t][t].abs());
    }

    let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
    SmithDecomposition {
        diagonal,
        rank_free: rows - rank,
    }
}

fn min_abs_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smallest nonzero entry in row `t` or column `t` (the pivot included).
fn min_abs_entry_cross(a: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t, a[t][t].abs());
    for (i, row) in a.iter().enumerate().skip(t + 1) {
        let x = row[t].abs();
        if !x.is_zero() && x < best.2 {
            best = (i, t, x);
        }
    }
    for (j, x) in a[t].iter().enumerate().skip(t + 1) {
        let x = x.abs();
        if !x.is_zero() && x < best.2 {
            best = (t, j, x);
        }
    }
    (best.0, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(rows: &[Vec<i64>]) -> (Vec<i64>, usize) {
        let s = smith_normal_form(&IntMatrix::from_rows(rows).unwrap());
        let d = s.diagonal.iter().map(|x| x.try_into().unwrap()).collect();
        (d, s.rank_free)
    }

    #[test]
    fn small_examples() {
        assert_eq!(diag(&[vec![1, 0], vec![0, 1]]), (vec![1, 1], 0));
        assert_eq!(diag(&[vec![2, 4], vec![6, 8]]), (vec![2, 4], 0));
        assert_eq!(diag(&[vec![0]]), (vec![0], 1));
        assert_eq!(diag(&[vec![2, 0], vec![0, 3]]), (vec![1, 6], 0));
        assert_eq!(diag(&[vec![4, 0], vec![0, 6]]), (vec![2, 12], 0));
    }

    #[test]
    fn rectangular() {
        assert_eq!(
            diag(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]),
            (vec![2, 6, 12], 0)
        );
        assert_eq!(diag(&[vec![3], vec![6]]), (vec![3], 1));
        assert_eq!(diag(&[vec![3, 6]]), (vec![3], 0));
        assert_eq!(diag(&[vec![0, 0], vec![0, 0], vec![0, 5]]), (vec![5, 0], 2));
    }
}
