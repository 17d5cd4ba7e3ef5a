//! Neumann–Zagier gluing matrices, the symplectic check, quad search for an
//! invertible reduced system, and a numeric check of the change of
//! variables `E = (Bᵀ)⁻¹(Q − Ā)` behind the delta-support argument.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;
use zft_algebra::matrix;

use crate::linalg::affine_sample;
use crate::tri::{Angle, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NzError {
    #[error("no quad rotation and dropped row gives an invertible reduced B matrix ({candidates} candidates tried)")]
    NoInvertibleQuad { candidates: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
}

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NzData {
    /// Edge classes × tetrahedra.
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub a_prime: IntMatrix,
    pub b_prime: IntMatrix,
    pub meridian_abc: Vec<[i64; 3]>,
    pub longitude_abc: Vec<[i64; 3]>,
}

fn sub(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    x.iter()
        .zip(y)
        .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect())
        .collect()
}

pub fn gluing_matrices(tri: &Triangulation) -> NzData {
    let m = tri.edge_count();
    let n = tri.tet_count();
    let count = |angle: Angle| -> IntMatrix {
        (0..m)
            .map(|i| (0..n).map(|j| tri.tets[j].angle_count(i, angle)).collect())
            .collect()
    };
    let (a, b, c) = (count(Angle::A), count(Angle::B), count(Angle::C));
    NzData {
        a_prime: sub(&a, &c),
        b_prime: sub(&b, &c),
        a,
        b,
        c,
        meridian_abc: (0..n).map(|j| tri.meridian.triple(j)).collect(),
        longitude_abc: (0..n).map(|j| tri.longitude.triple(j)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymplecticCheck {
    pub symmetric: bool,
    /// `A'B'ᵀ − B'A'ᵀ`.
    pub witness: IntMatrix,
}

pub fn check_symplectic_matrices(a_prime: &IntMatrix, b_prime: &IntMatrix) -> SymplecticCheck {
    let ab = matrix::mul(a_prime, &matrix::transpose(b_prime));
    let ba = matrix::mul(b_prime, &matrix::transpose(a_prime));
    let witness = sub(&ab, &ba);
    SymplecticCheck {
        symmetric: witness.iter().flatten().all(|&x| x == 0),
        witness,
    }
}

impl NzData {
    pub fn check_symplectic(&self) -> SymplecticCheck {
        check_symplectic_matrices(&self.a_prime, &self.b_prime)
    }

    /// Column sums of A, B and C (each should be 2 everywhere).
    pub fn column_sums(&self) -> [Vec<i64>; 3] {
        let sums = |mat: &IntMatrix| -> Vec<i64> {
            let n = mat.first().map_or(0, Vec::len);
            (0..n).map(|j| mat.iter().map(|r| r[j]).sum()).collect()
        };
        [sums(&self.a), sums(&self.b), sums(&self.c)]
    }

    pub fn tet_count(&self) -> usize {
        self.meridian_abc.len()
    }

    /// Cyclic relabeling per tetrahedron: rotation `r` makes
    /// `(A, B, C)_new = (X_r, X_{r+1}, X_{r+2})` of the old columns, and
    /// likewise for the holonomy triples.
    pub fn rotate(&self, quad: &QuadChoice) -> NzData {
        assert_eq!(quad.rotation.len(), self.tet_count());
        let old = [&self.a, &self.b, &self.c];
        let pick = |k: usize| -> IntMatrix {
            self.a
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    (0..row.len())
                        .map(|j| old[(quad.rotation[j] as usize + k) % 3][i][j])
                        .collect()
                })
                .collect()
        };
        let (a, b, c) = (pick(0), pick(1), pick(2));
        let rot = |t: &[i64; 3], r: u8| {
            let r = r as usize;
            [t[r % 3], t[(r + 1) % 3], t[(r + 2) % 3]]
        };
        NzData {
            a_prime: sub(&a, &c),
            b_prime: sub(&b, &c),
            a,
            b,
            c,
            meridian_abc: self
                .meridian_abc
                .iter()
                .zip(&quad.rotation)
                .map(|(t, &r)| rot(t, r))
                .collect(),
            longitude_abc: self
                .longitude_abc
                .iter()
                .zip(&quad.rotation)
                .map(|(t, &r)| rot(t, r))
                .collect(),
        }
    }

    /// Retained gluing rows (all but `dropped`) plus the meridian row,
    /// as `(A_red, B_red)`.
    pub fn reduced(&self, dropped: usize) -> (IntMatrix, IntMatrix) {
        let mut ar: IntMatrix = Vec::new();
        let mut br: IntMatrix = Vec::new();
        for i in 0..self.a.len() {
            if i != dropped {
                ar.push(self.a_prime[i].clone());
                br.push(self.b_prime[i].clone());
            }
        }
        ar.push(self.meridian_abc.iter().map(|t| t[0] - t[2]).collect());
        br.push(self.meridian_abc.iter().map(|t| t[1] - t[2]).collect());
        (ar, br)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadChoice {
    pub rotation: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedNz {
    pub quad: QuadChoice,
    pub dropped_edge_row: usize,
    pub a_red: IntMatrix,
    pub b_red: IntMatrix,
    pub det_b_red: i64,
}

/// First `(quad, dropped row)` in lexicographic order with `det B_red ≠ 0`.
pub fn choose_quad(nz: &NzData) -> Result<ReducedNz, NzError> {
    let n = nz.tet_count();
    let m = nz.a.len();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut rotation = vec![0u8; n];
        let mut c = code;
        for j in (0..n).rev() {
            rotation[j] = (c % 3) as u8;
            c /= 3;
        }
        let quad = QuadChoice { rotation };
        let rotated = nz.rotate(&quad);
        for dropped in 0..m {
            let (a_red, b_red) = rotated.reduced(dropped);
            if b_red.len() != n {
                continue;
            }
            let det = matrix::det(&b_red);
            if det != 0.into() {
                return Ok(ReducedNz {
                    quad,
                    dropped_edge_row: dropped,
                    a_red,
                    b_red,
                    det_b_red: i64::try_from(det).expect("determinant fits in i64"),
                });
            }
        }
    }
    Err(NzError::NoInvertibleQuad {
        candidates: total * m,
    })
}

/// One sample for the change-of-variables check, in the rotated frame.
#[derive(Clone, Debug)]
pub struct AngleSample {
    /// `log|ä_j|`.
    pub log_a: Vec<f64>,
    /// `log|c̈_j|`.
    pub log_c: Vec<f64>,
    /// Free vector `Q̄`.
    pub q: Vec<f64>,
    /// Real parts `ȧ_j`, `ċ_j`.
    pub adot: Vec<f64>,
    pub cdot: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChangeOfVariablesReport {
    pub samples: usize,
    pub quad: QuadChoice,
    pub dropped_edge_row: usize,
    pub det_b_red: i64,
    /// max |(−B̄ + A_redᵀ(B_redᵀ)⁻¹(Q̄ − Ā)) − B_red⁻¹(A_red Q̄ − κ)|.
    pub max_residual_exponents: f64,
    /// max |A'ȧ + B'ḃ − (2 − C·1)|.
    pub max_residual_angles: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Positive-real angle samples satisfying multiplicative balance (in
/// absolute value) and real balance, in the frame of `quad`.
pub fn sample_angles(
    nz: &NzData,
    count: usize,
    magnitude: f64,
    seed: u64,
) -> Result<Vec<AngleSample>, NzError> {
    let n = nz.tet_count();
    let m = nz.a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Balance on (x_j, y_j) = (ȧ_j or log|ä_j|, ċ_j or log|c̈_j|):
    // (a - b) x + (c - b) y = rhs.
    let mut k = DMatrix::<f64>::zeros(m, 2 * n);
    let mut real_rhs = DVector::<f64>::zeros(m);
    for i in 0..m {
        let mut bsum = 0;
        for j in 0..n {
            k[(i, 2 * j)] = (nz.a[i][j] - nz.b[i][j]) as f64;
            k[(i, 2 * j + 1)] = (nz.c[i][j] - nz.b[i][j]) as f64;
            bsum += nz.b[i][j];
        }
        real_rhs[i] = (2 - bsum) as f64;
    }
    let zero = DVector::<f64>::zeros(m);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let logs = affine_sample(&k, &zero, &mut rng, magnitude)
            .ok_or_else(|| NzError::SingularSystem("multiplicative balance".into()))?;
        let reals = affine_sample(&k, &real_rhs, &mut rng, 1.0)
            .ok_or_else(|| NzError::SingularSystem("real balance admits no solution".into()))?;
        out.push(AngleSample {
            log_a: (0..n).map(|j| logs[2 * j]).collect(),
            log_c: (0..n).map(|j| logs[2 * j + 1]).collect(),
            q: (0..n).map(|_| rng.gen_range(-magnitude..=magnitude)).collect(),
            adot: (0..n).map(|j| reals[2 * j]).collect(),
            cdot: (0..n).map(|j| reals[2 * j + 1]).collect(),
        });
    }
    Ok(out)
}

fn to_dmatrix(m: &IntMatrix) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| m[i][j] as f64)
}

/// Evaluate both routes of the change of variables on given samples.
pub fn check_samples(
    nz: &NzData,
    red: &ReducedNz,
    samples: &[AngleSample],
    tol: f64,
) -> Result<ChangeOfVariablesReport, NzError> {
    let rotated = nz.rotate(&red.quad);
    let n = rotated.tet_count();
    let ar = to_dmatrix(&red.a_red);
    let br = to_dmatrix(&red.b_red);
    let br_lu = br.clone().lu();
    let brt_lu = br.transpose().lu();
    let ap = to_dmatrix(&rotated.a_prime);
    let bp = to_dmatrix(&rotated.b_prime);
    let cm = to_dmatrix(&rotated.c);
    let mut max_e: f64 = 0.0;
    let mut max_angles: f64 = 0.0;
    for s in samples {
        let abar = DVector::from_vec(s.log_a.clone());
        let cbar = DVector::from_vec(s.log_c.clone());
        let bbar = -(&abar + &cbar);
        let q = DVector::from_vec(s.q.clone());
        let log_mu: f64 = (0..n)
            .map(|j| {
                let t = rotated.meridian_abc[j];
                t[0] as f64 * abar[j] + t[1] as f64 * bbar[j] + t[2] as f64 * cbar[j]
            })
            .sum();
        let mut kappa = DVector::<f64>::zeros(n);
        kappa[n - 1] = log_mu;

        let e = brt_lu
            .solve(&(&q - &abar))
            .ok_or_else(|| NzError::SingularSystem("B_redᵀ".into()))?;
        let direct = -&bbar + ar.transpose() * e;
        let chain = br_lu
            .solve(&(&ar * &q - &kappa))
            .ok_or_else(|| NzError::SingularSystem("B_red".into()))?;
        max_e = max_e.max((direct - chain).amax());

        let adot = DVector::from_vec(s.adot.clone());
        let cdot = DVector::from_vec(s.cdot.clone());
        let bdot = DVector::from_element(n, 1.0) - &adot - &cdot;
        let lhs = &ap * adot + &bp * bdot;
        let rhs = DVector::from_element(lhs.len(), 2.0) - &cm * DVector::from_element(n, 1.0);
        max_angles = max_angles.max((lhs - rhs).amax());
    }
    Ok(ChangeOfVariablesReport {
        samples: samples.len(),
        quad: red.quad.clone(),
        dropped_edge_row: red.dropped_edge_row,
        det_b_red: red.det_b_red,
        max_residual_exponents: max_e,
        max_residual_angles: max_angles,
        tol,
        pass: max_e < tol && max_angles < tol,
    })
}

/// Sample-based check of the change of variables for an all-positive
/// triangulation.
pub fn verify_change_of_variables(
    tri: &Triangulation,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ChangeOfVariablesReport, NzError> {
    verify_change_of_variables_at(tri, samples, tol, seed, 1.0)
}

/// As [`verify_change_of_variables`], with log-angles of size ~`magnitude`.
pub fn verify_change_of_variables_at(
    tri: &Triangulation,
    samples: usize,
    tol: f64,
    seed: u64,
    magnitude: f64,
) -> Result<ChangeOfVariablesReport, NzError> {
    if !tri.all_positive() {
        return Err(NzError::PreconditionViolated(
            "change-of-variables check needs all tetrahedra positive".into(),
        ));
    }
    let nz = gluing_matrices(tri);
    let red = choose_quad(&nz)?;
    let rotated = nz.rotate(&red.quad);
    let draws = sample_angles(&rotated, samples, magnitude, seed)?;
    check_samples(&nz, &red, &draws, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn trefoil_matrices() {
        let nz = gluing_matrices(&fixtures::trefoil());
        assert_eq!(nz.a, vec![vec![2, 2], vec![0, 0]]);
        assert_eq!(nz.b, vec![vec![2, 2], vec![0, 0]]);
        assert_eq!(nz.c, vec![vec![1, 1], vec![1, 1]]);
        let chk = nz.check_symplectic();
        assert!(chk.symmetric);
        assert_eq!(
            matrix::mul(&nz.a_prime, &matrix::transpose(&nz.b_prime)),
            vec![vec![2, -2], vec![-2, 2]]
        );
    }

    #[test]
    fn figure_eight_matrices() {
        let nz = gluing_matrices(&fixtures::figure_eight());
        assert_eq!(nz.a, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(nz.b, vec![vec![0, 2], vec![2, 0]]);
        assert_eq!(nz.c, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(
            matrix::mul(&nz.a_prime, &matrix::transpose(&nz.b_prime)),
            vec![vec![-2, 2], vec![2, -2]]
        );
    }

    #[test]
    fn non_symmetric_witness() {
        let chk = check_symplectic_matrices(&vec![vec![0, 1], vec![0, 0]], &vec![vec![1, 0], vec![0, 1]]);
        assert!(!chk.symmetric);
        assert_eq!(chk.witness, vec![vec![0, 1], vec![-1, 0]]);
    }

    #[test]
    fn first_invertible_quads() {
        let r = choose_quad(&gluing_matrices(&fixtures::trefoil())).unwrap();
        assert_eq!(r.quad.rotation, vec![0, 1]);
        assert_eq!(r.dropped_edge_row, 0);
        assert_eq!(r.det_b_red, 1);
        let r = choose_quad(&gluing_matrices(&fixtures::five_two())).unwrap();
        assert_eq!(r.quad.rotation, vec![0, 0, 1]);
        assert_eq!(r.dropped_edge_row, 0);
        assert_eq!(r.det_b_red, -1);
        assert!(choose_quad(&gluing_matrices(&fixtures::figure_eight())).is_ok());
    }

    #[test]
    fn degenerate_rows_have_no_quad() {
        let text = "zft 1\ntets 1\ntet 0 + e e e e e e\nmeridian 0 0 0\nlongitude 0 0 0\n";
        let tri = crate::tri::parse_triangulation(text).unwrap();
        assert_eq!(
            choose_quad(&gluing_matrices(&tri)),
            Err(NzError::NoInvertibleQuad { candidates: 3 })
        );
    }

    #[test]
    fn rotation_preserves_symmetry() {
        for (_, tri) in fixtures::all() {
            let nz = gluing_matrices(&tri);
            let n = tri.tet_count();
            for code in 0..3usize.pow(n as u32) {
                let mut c = code;
                let rotation = (0..n)
                    .map(|_| {
                        let r = (c % 3) as u8;
                        c /= 3;
                        r
                    })
                    .collect();
                let rot = nz.rotate(&QuadChoice { rotation });
                assert!(rot.check_symplectic().symmetric);
                assert!(rot.column_sums().iter().flatten().all(|&s| s == 2));
            }
        }
    }

    #[test]
    fn mixed_signs_are_rejected() {
        assert!(matches!(
            verify_change_of_variables(&fixtures::figure_eight(), 2, 1e-10, 0),
            Err(NzError::PreconditionViolated(_))
        ));
    }
}
