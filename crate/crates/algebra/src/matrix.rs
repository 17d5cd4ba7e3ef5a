//! Small dense integer matrix helpers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Determinant of a square integer matrix (fraction-free Bareiss).
pub fn det(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), n, "matrix is not square");
            r.iter().map(|&x| BigInt::from(x)).collect()
        })
        .collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|r| {
            assert_eq!(r.len(), inner, "shape mismatch");
            (0..cols)
                .map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), BigInt::from(1));
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), BigInt::from(0));
        assert_eq!(
            det(&[vec![0, 2, 1], vec![3, 0, 1], vec![1, 1, 1]]),
            // first-row expansion: 0·(−1) − 2·2 + 1·3
            BigInt::from(-1)
        );
    }

    #[test]
    fn product_with_transpose() {
        let a = vec![vec![1, 1], vec![-1, -1]];
        assert_eq!(mul(&a, &transpose(&a)), vec![vec![2, -2], vec![-2, 2]]);
    }
}
