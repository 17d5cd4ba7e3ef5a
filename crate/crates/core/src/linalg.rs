//! Floating-point helpers: affine sampling of linear constraint sets,
//! polynomial roots (Aberth with Newton polish) and a small
//! Levenberg–Marquardt solver for complex holomorphic systems.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

/// Random point of `{x : a x = b}`: least-squares particular solution plus
/// a uniform combination (coefficients in `[-spread, spread]`) of an
/// orthonormal null-space basis. `None` when the system is inconsistent.
pub fn affine_sample<R: Rng>(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    rng: &mut R,
    spread: f64,
) -> Option<DVector<f64>> {
    let n = a.ncols();
    let particular = if a.nrows() == 0 {
        DVector::zeros(n)
    } else {
        a.clone().pseudo_inverse(1e-10).ok()? * b
    };
    let scale = 1.0 + b.amax();
    if a.nrows() > 0 && (a * &particular - b).amax() > 1e-9 * scale {
        return None;
    }
    let mut x = particular;
    for v in null_space(a) {
        let t: f64 = rng.gen_range(-1.0..=1.0);
        x += v * (t * spread);
    }
    Some(x)
}

/// Orthonormal basis of the kernel of `a` (eigenvectors of `aᵀa` with
/// negligible eigenvalue).
pub fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let ata = a.transpose() * a;
    let eig = SymmetricEigen::new(ata);
    let top = eig.eigenvalues.amax().max(1.0);
    (0..n)
        .filter(|&i| eig.eigenvalues[i].abs() < 1e-10 * top)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// Value and derivative of `Σ c_k z^k` (ascending coefficients).
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a univariate polynomial given by ascending coefficients.
/// Trailing (leading-degree) zero coefficients are ignored.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    let top = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-14 * top {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = *c.last().unwrap();
    if deg == 1 {
        return vec![newton_polish(&c, -c[0] / lead)];
    }
    // Cauchy bound for the starting circle.
    let radius = 1.0 + c[..deg].iter().map(|z| (z / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for k in 0..deg {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    z.into_iter().map(|r| newton_polish(&c, r)).collect()
}

/// Newton iterations (cap 50) toward a relative step of 1e-13.
pub fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let (p, dp) = horner(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-13 * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

/// Residuals and complex Jacobian (`rows × vars`) of a holomorphic system.
pub type ComplexSystem<'a> = dyn Fn(&[Complex64]) -> (Vec<Complex64>, Vec<Vec<Complex64>>) + 'a;

/// Levenberg–Marquardt on the real 2n-dimensional form of a holomorphic
/// system. Returns the final point and its max-modulus residual.
pub fn levenberg_marquardt(
    system: &ComplexSystem<'_>,
    start: &[Complex64],
    iterations: usize,
) -> (Vec<Complex64>, f64) {
    let n = start.len();
    let mut x = start.to_vec();
    let cost = |r: &[Complex64]| r.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (mut r, mut jac) = system(&x);
    let mut c = cost(&r);
    let mut damping = 1e-3;
    if n == 0 {
        return (x, max_modulus(&r));
    }
    for _ in 0..iterations {
        if !c.is_finite() || c == 0.0 {
            break;
        }
        let rows = r.len();
        let mut jr = DMatrix::<f64>::zeros(2 * rows, 2 * n);
        let mut rr = DVector::<f64>::zeros(2 * rows);
        for i in 0..rows {
            rr[2 * i] = r[i].re;
            rr[2 * i + 1] = r[i].im;
            for k in 0..n {
                let d = jac[i][k];
                jr[(2 * i, 2 * k)] = d.re;
                jr[(2 * i, 2 * k + 1)] = -d.im;
                jr[(2 * i + 1, 2 * k)] = d.im;
                jr[(2 * i + 1, 2 * k + 1)] = d.re;
            }
        }
        let jt = jr.transpose();
        let jtj = &jt * &jr;
        let g = &jt * &rr;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..2 * n {
                a[(k, k)] += damping * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                damping *= 10.0;
                continue;
            };
            let trial: Vec<Complex64> = (0..n)
                .map(|k| x[k] + Complex64::new(step[2 * k], step[2 * k + 1]))
                .collect();
            let (tr, tj) = system(&trial);
            let tc = cost(&tr);
            if tc.is_finite() && tc < c {
                x = trial;
                r = tr;
                jac = tj;
                c = tc;
                damping = (damping * 0.3).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, max_modulus(&r))
}

pub fn max_modulus(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roots_of_cubic() {
        // (z - 1)(z + 2)(z - i)
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let roots_in = [one, Complex64::new(-2.0, 0.0), i];
        let mut c = vec![one];
        for r in roots_in {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        let found = polynomial_roots(&c);
        assert_eq!(found.len(), 3);
        for r in roots_in {
            assert!(found.iter().any(|f| (f - r).norm() < 1e-12), "{r} not in {found:?}");
        }
    }

    #[test]
    fn affine_sample_satisfies_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 3.0]);
        let x = affine_sample(&a, &b, &mut rng, 1.0).unwrap();
        assert!((&a * &x - &b).amax() < 1e-12);
        let bad = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(affine_sample(&bad, &b, &mut rng, 1.0).is_none());
    }

    #[test]
    fn lm_solves_square_system() {
        // z^2 = 2i  (root 1 + i)
        let sys = |x: &[Complex64]| {
            let r = vec![x[0] * x[0] - Complex64::new(0.0, 2.0)];
            let j = vec![vec![x[0] * 2.0]];
            (r, j)
        };
        let (x, res) = levenberg_marquardt(&sys, &[Complex64::new(0.8, 0.9)], 100);
        assert!(res < 1e-12);
        assert!((x[0] - Complex64::new(1.0, 1.0)).norm() < 1e-10);
    }
}
