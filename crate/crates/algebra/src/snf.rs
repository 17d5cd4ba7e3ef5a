//! Smith normal form over the integers and lattice membership solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal, each
/// diagonal entry nonnegative and dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    /// Diagonal of `d`, length `min(rows, cols)`.
    pub diag: Vec<BigInt>,
    pub rank: usize,
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> Snf {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let Some((pi, pj)) = min_entry(&d, t, t) else {
            break;
        };
        swap_rows(&mut d, &mut u, t, pi);
        swap_cols(&mut d, &mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !d[i][t].is_zero() {
                    let q = &d[i][t] / &d[t][t];
                    add_row(&mut d, &mut u, i, t, &-q);
                    dirty |= !d[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[t][j].is_zero() {
                    let q = &d[t][j] / &d[t][t];
                    add_col(&mut d, &mut v, j, t, &-q);
                    dirty |= !d[t][j].is_zero();
                }
            }
            if dirty {
                let (pi, pj) = min_in_cross(&d, t);
                swap_rows(&mut d, &mut u, t, pi);
                swap_cols(&mut d, &mut v, t, pj);
                continue;
            }
            // Divisibility: pull an offending row into the pivot row.
            let offending = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[i][j].is_multiple_of(&d[t][t]))
            });
            match offending {
                Some(i) => add_row(&mut d, &mut u, t, i, &BigInt::one()),
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diag: Vec<BigInt> = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    Snf { u, v, diag, rank }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn min_entry(d: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(r0) {
        for (j, x) in row.iter().enumerate().skip(c0) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(d: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut val: Option<BigInt> = None;
    let mut consider = |i: usize, j: usize| {
        let x = d[i][j].abs();
        if !x.is_zero() && val.as_ref().is_none_or(|v| x < *v) {
            val = Some(x);
            best = (i, j);
        }
    };
    for i in t..d.len() {
        consider(i, t);
    }
    for j in t..d[0].len() {
        consider(t, j);
    }
    best
}

fn swap_rows(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    d.swap(a, b);
    u.swap(a, b);
}

fn swap_cols(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in d.iter_mut().chain(v.iter_mut()) {
        row.swap(a, b);
    }
}

// row[dst] += k * row[src]
fn add_row(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], dst: usize, src: usize, k: &BigInt) {
    for mat in [d, u] {
        let s = mat[src].clone();
        for (x, y) in mat[dst].iter_mut().zip(s) {
            *x += k * y;
        }
    }
}

// col[dst] += k * col[src]
fn add_col(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], dst: usize, src: usize, k: &BigInt) {
    for mat in [d, v] {
        for row in mat.iter_mut() {
            let s = row[src].clone();
            row[dst] += k * s;
        }
    }
}

/// Integer combination found by [`snf_solve`]:
/// `query = Σ target_coeffs[i]·targets[i] + Σ relation_coeffs[k]·relations[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSolution {
    pub target_coeffs: Vec<BigInt>,
    pub relation_coeffs: Vec<BigInt>,
}

/// Express `query` in the lattice spanned by `targets` and `relations`.
/// Returns `Ok(None)` when `query` is outside the span. The answer is
/// always re-checked by recombination before it is returned.
pub fn snf_solve(
    relations: &[Vec<i64>],
    targets: &[Vec<i64>],
    query: &[i64],
) -> Result<Option<LatticeSolution>, AlgebraError> {
    let dim = query.len();
    for g in targets.iter().chain(relations) {
        if g.len() != dim {
            return Err(AlgebraError::Dimension(format!(
                "generator of length {} for query of length {dim}",
                g.len()
            )));
        }
    }
    let gens: Vec<&Vec<i64>> = targets.iter().chain(relations).collect();
    let k = gens.len();
    if k == 0 {
        return Ok(query.iter().all(|&x| x == 0).then(|| LatticeSolution {
            target_coeffs: Vec::new(),
            relation_coeffs: Vec::new(),
        }));
    }
    // Columns are generators.
    let a: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| gens.iter().map(|g| BigInt::from(g[i])).collect())
        .collect();
    let snf = smith_normal_form(&a);
    let b: Vec<BigInt> = query.iter().map(|&x| BigInt::from(x)).collect();
    let ub: Vec<BigInt> = snf
        .u
        .iter()
        .map(|row| row.iter().zip(&b).map(|(x, y)| x * y).sum())
        .collect();
    let mut y = vec![BigInt::zero(); k];
    for i in 0..dim {
        if i < snf.rank {
            if !ub[i].is_multiple_of(&snf.diag[i]) {
                return Ok(None);
            }
            y[i] = &ub[i] / &snf.diag[i];
        } else if !ub[i].is_zero() {
            return Ok(None);
        }
    }
    let x: Vec<BigInt> = snf
        .v
        .iter()
        .map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum())
        .collect();

    for i in 0..dim {
        let s: BigInt = (0..k).map(|j| &a[i][j] * &x[j]).sum();
        assert_eq!(s, b[i], "lattice solution failed recombination");
    }
    let relation_coeffs = x[targets.len()..].to_vec();
    let mut target_coeffs = x;
    target_coeffs.truncate(targets.len());
    Ok(Some(LatticeSolution {
        target_coeffs,
        relation_coeffs,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn diagonal_divisibility() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn trefoil_angle_rewrite() {
        // 1/c1 over (a1, c1, a2, c2) in terms of lambda, mu and c1 c2 = 1.
        let sol = snf_solve(
            &[vec![0, 1, 0, 1]],
            &[vec![2, -1, -2, 0], vec![-1, 0, 1, 0]],
            &[0, -1, 0, 0],
        )
        .unwrap()
        .unwrap();
        assert_eq!(sol.target_coeffs, vec![BigInt::from(1), BigInt::from(2)]);
        assert_eq!(sol.relation_coeffs, vec![BigInt::from(0)]);
    }

    #[test]
    fn identity_and_outside_span() {
        let t = [vec![2, -1, -2, 0], vec![-1, 0, 1, 0]];
        let sol = snf_solve(&[], &t, &[2, -1, -2, 0]).unwrap().unwrap();
        assert_eq!(sol.target_coeffs, vec![BigInt::from(1), BigInt::from(0)]);
        assert_eq!(snf_solve(&[], &t, &[1, 0, 0, 0]).unwrap(), None);
        // Rational but not integral combination.
        assert_eq!(snf_solve(&[], &[vec![2, 0]], &[1, 0]).unwrap(), None);
    }
}
