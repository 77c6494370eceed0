//! Small-dimensional lattice tools: LLL reduction and Fincke–Pohst enumeration
//! in floating point, Hermite normal form over the integers.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::Int;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL-reduce the rows of `basis` (δ = 0.99).
///
/// Returns the reduced rows and the unimodular matrix `U` with
/// `reduced = U · basis`.
pub fn lll(basis: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let n = basis.len();
    let mut b: Vec<Vec<f64>> = basis.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let delta = 0.99;
    let gso = |b: &[Vec<f64>]| {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        let mut norms = vec![0.0; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&b[i], &bs[j]) / norms[j];
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            norms[i] = dot(&v, &v);
            bs.push(v);
        }
        (mu, norms)
    };
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL failed to converge");
        let (mut mu, _) = gso(&b);
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != 0.0 {
                let ri = r as i64;
                let (bj, uj) = (b[j].clone(), u[j].clone());
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= r * y;
                }
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= ri * y;
                }
                mu = gso(&b).0;
            }
        }
        let (mu, norms) = gso(&b);
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (b, u)
}

/// Fincke–Pohst: every nonzero integer vector `x` with `|x · basis|² <= bound`
/// (up to a relative slack of `1e-9`), one of each `±x` pair.
///
/// Returns `None` once more than `limit` vectors have been found.
pub fn short_vectors(basis: &[Vec<f64>], bound: f64, limit: usize) -> Option<Vec<Vec<i64>>> {
    let n = basis.len();
    let g: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dot(&basis[i], &basis[j])).collect()).collect();
    // q[i][i] = squared GSO norms, q[i][j] (j > i) = μ coefficients
    let mut q = g.clone();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let slack = bound * 1e-9 + 1e-12;
    let ok = enumerate(&q, n - 1, bound + slack, &mut x, &mut out, limit);
    if !ok {
        return None;
    }
    // keep one of ±x: first nonzero coordinate from the top positive
    out.retain(|v| v.iter().rev().find(|c| **c != 0).is_some_and(|c| *c > 0));
    Some(out)
}

fn enumerate(q: &[Vec<f64>], i: usize, rem: f64, x: &mut [i64], out: &mut Vec<Vec<i64>>, limit: usize) -> bool {
    let n = x.len();
    let c: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let r = (rem.max(0.0) / q[i][i]).sqrt();
    let lo = (c - r - 1e-9).ceil() as i64;
    let hi = (c + r + 1e-9).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        let d = xi as f64 - c;
        let t = rem - q[i][i] * d * d;
        if t < -1e-9 * rem.abs().max(1.0) {
            continue;
        }
        if i == 0 {
            if x.iter().any(|v| *v != 0) {
                out.push(x.to_vec());
                if out.len() > limit {
                    x[i] = 0;
                    return false;
                }
            }
        } else if !enumerate(q, i - 1, t, x, out, limit) {
            x[i] = 0;
            return false;
        }
    }
    x[i] = 0;
    true
}

/// Row Hermite normal form: an upper-triangular basis of the row span, with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped.
pub fn hnf(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return a;
    }
    let ncols = a[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(i0) = piv else { break };
            a.swap(r, i0);
            let mut done = true;
            for i in r + 1..m {
                if !a[i][c].is_zero() {
                    let f = a[i][c].div_floor(&a[r][c]);
                    let pr = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        let pr = a[r].clone();
        for i in 0..r {
            let f = a[i][c].div_floor(&pr[c]);
            if !f.is_zero() {
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ints(v: &[&[i64]]) -> Vec<Vec<Int>> {
        v.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect()
    }

    /// Reduce `v` by the triangular rows; zero iff `v` lies in their span.
    fn reduce_by(h: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
        let mut v = v.to_vec();
        for row in h {
            let c = row.iter().position(|x| !x.is_zero()).unwrap();
            let f = v[c].div_floor(&row[c]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        v
    }

    #[test]
    fn hnf_small() {
        let rows = ints(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let h = hnf(&rows);
        assert_eq!(h.len(), 3);
        // |det| = 624
        let d = &h[0][0] * &h[1][1] * &h[2][2];
        assert_eq!(d, BigInt::from(624));
        for r in &rows {
            assert!(reduce_by(&h, r).iter().all(|x| x.is_zero()));
        }
        for i in 0..3 {
            for j in 0..i {
                assert!(h[i][j].is_zero());
                assert!(!h[j][i].is_negative() && h[j][i] < h[i][i]);
            }
        }
        let h = hnf(&ints(&[&[4, 6], &[6, 9], &[2, 3]]));
        assert_eq!(h, ints(&[&[2, 3]]));
    }

    #[test]
    fn lll_is_unimodular_and_shortens() {
        let b = vec![vec![1.0, 0.0, 0.0], vec![1000.0, 1.0, 0.0], vec![3333.0, 17.0, 1.0]];
        let (r, u) = lll(&b);
        for (i, row) in r.iter().enumerate() {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| u[i][k] as f64 * b[k][j]).sum();
                assert!((v - row[j]).abs() < 1e-9);
            }
            assert!(dot(row, row) <= 2.0);
        }
    }

    #[test]
    fn enumeration_counts_z2_points() {
        let b = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        // points with x² + y² <= 5, up to sign: 10
        let v = short_vectors(&b, 5.0, 1000).unwrap();
        assert_eq!(v.len(), 10);
        assert!(short_vectors(&b, 5.0, 3).is_none());
    }
}
