//! Integer row reduction: Hermite normal form and a diagonalisation with
//! tracked column transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

fn sub_multiple(target: &mut [BigInt], source: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Row-style Hermite normal form, pivoting only in the first `pivot_cols`
/// columns. Rows are reduced by unimodular operations; the returned matrix keeps
/// every row (zero rows sink to the bottom).
pub fn row_reduce(mut m: IntMat, pivot_cols: usize) -> (IntMat, usize) {
    let rows = m.len();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        loop {
            let best = (r..rows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
            let Some(p) = best else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let pivot = m[r].clone();
                sub_multiple(&mut m[i], &pivot, &q);
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot = m[r].clone();
            for i in 0..r {
                let q = m[i][c].div_floor(&pivot[c]);
                sub_multiple(&mut m[i], &pivot, &q);
            }
            r += 1;
        }
    }
    (m, r)
}

/// Canonical Hermite basis of the row lattice, zero rows removed.
pub fn hnf(rows: IntMat) -> IntMat {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let (m, _) = row_reduce(rows, cols);
    m.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Diagonalise a square matrix by row and column operations. Returns the
/// diagonal and `W` where `W = V^{-1}` for the accumulated column transform `V`.
pub fn diagonalize(mut m: IntMat) -> (Vec<BigInt>, IntMat) {
    let n = m.len();
    let mut winv = identity(n);
    for k in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(k, bi);
            if bj != k {
                for row in m.iter_mut() {
                    row.swap(k, bj);
                }
                winv.swap(k, bj);
            }
            let mut clean = true;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = m[i][k].div_floor(&m[k][k]);
                let pivot = m[k].clone();
                sub_multiple(&mut m[i], &pivot, &q);
                if !m[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..n {
                if m[k][j].is_zero() {
                    continue;
                }
                // column j -= q * column k, so row k of W gains q * row j
                let q = m[k][j].div_floor(&m[k][k]);
                for row in m.iter_mut() {
                    let t = &q * &row[k];
                    row[j] -= t;
                }
                let rj = winv[j].clone();
                for (x, y) in winv[k].iter_mut().zip(&rj) {
                    *x += &q * y;
                }
                if !m[k][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i].abs()).collect();
    (diag, winv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(mat(&[&[2, 4], &[3, 5]]));
        let b = hnf(mat(&[&[1, 1], &[0, 2]]));
        assert_eq!(a, b);
        assert_eq!(a, mat(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn diagonal_of_relation_matrix() {
        let (d, w) = diagonalize(mat(&[&[2, 4], &[6, 8]]));
        let mut d: Vec<i64> = d.iter().map(|x| i64::try_from(x).unwrap()).collect();
        d.sort();
        assert_eq!(d, vec![2, 4]);
        assert_eq!(w.len(), 2);
    }
}
