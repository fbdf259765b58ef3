//! Brute-force reference computations shared by the integration tests.

#![allow(dead_code)]

use susywalk::matcore::{CMatrix, C64};

/// Rank by Gaussian elimination with full pivoting; pivots of modulus at
/// most `eps` count as zero. Inputs are sums of unitaries, so entries are O(1).
pub fn rank(a: &CMatrix, eps: f64) -> usize {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let mut r = 0;
    for _ in 0..rows.min(cols) {
        let mut best = (r, r, 0.0);
        for i in r..rows {
            for j in r..cols {
                let v = m[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= eps {
            break;
        }
        m.swap_rows(r, best.0);
        m.swap_columns(r, best.1);
        let pivot = m[(r, r)];
        for i in (r + 1)..rows {
            let f: C64 = m[(i, r)] / pivot;
            for j in r..cols {
                let sub = f * m[(r, j)];
                m[(i, j)] -= sub;
            }
        }
        r += 1;
    }
    r
}

pub fn nullity(a: &CMatrix, eps: f64) -> usize {
    a.ncols() - rank(a, eps)
}

/// `dim ker(a - s)`.
pub fn eigen_nullity(a: &CMatrix, s: f64, eps: f64) -> usize {
    let n = a.nrows();
    nullity(&(a - CMatrix::identity(n, n) * C64::new(s, 0.0)), eps)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
