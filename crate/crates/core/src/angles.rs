//! Angle bookkeeping after eliminating `b`: multiplicative parts become
//! signed monomials in `(ä_j, c̈_j)` via `b̈ = -1/(ä c̈)`, real parts become
//! affine expressions in `(ȧ_j, ċ_j)` via `ḃ = 1 - ȧ - ċ`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use zft_algebra::{snf_solve, AlgebraError, LinExpr, SignedMonomial};

use crate::tri::Triangulation;

pub const LAM_DOT: &str = "lam_dot";
pub const MU_DOT: &str = "mu_dot";

pub fn adot(j: usize) -> String {
    format!("adot{j}")
}

pub fn cdot(j: usize) -> String {
    format!("cdot{j}")
}

/// Multiplicative part of an angle row `(α_j, β_j, γ_j)`:
/// `(-1)^{Σβ} Π ä_j^{α-β} c̈_j^{γ-β}`, exponents ordered `(ä_0, c̈_0, ä_1, …)`.
pub fn multiplicative(row: &[i64]) -> SignedMonomial {
    let n = row.len() / 3;
    let mut exps = vec![0i64; 2 * n];
    let mut odd = false;
    for j in 0..n {
        let (a, b, c) = (row[3 * j], row[3 * j + 1], row[3 * j + 2]);
        exps[2 * j] = a - b;
        exps[2 * j + 1] = c - b;
        odd ^= b.rem_euclid(2) == 1;
    }
    SignedMonomial::new(odd, exps)
}

/// Real part of an angle row: `Σ α ȧ + β (1 - ȧ - ċ) + γ ċ`.
pub fn real_part(row: &[i64]) -> LinExpr {
    let n = row.len() / 3;
    let mut e = LinExpr::zero();
    for j in 0..n {
        let (a, b, c) = (row[3 * j], row[3 * j + 1], row[3 * j + 2]);
        e = &e + &LinExpr::symbol(&adot(j)).scale_int(a - b);
        e = &e + &LinExpr::symbol(&cdot(j)).scale_int(c - b);
        e = &e + &LinExpr::int(b);
    }
    e
}

/// Lattice data used to rewrite angle monomials in `λ̈, μ̈`.
#[derive(Clone, Debug)]
pub struct AngleLattice {
    pub tet_count: usize,
    pub balance: Vec<SignedMonomial>,
    pub balance_rows: Vec<Vec<i64>>,
    pub lambda: SignedMonomial,
    pub mu: SignedMonomial,
    pub lambda_row: Vec<i64>,
    pub mu_row: Vec<i64>,
}

/// `sign · λ̈^p μ̈^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HolonomyMonomial {
    pub negative: bool,
    pub lambda: i64,
    pub mu: i64,
}

impl AngleLattice {
    pub fn new(tri: &Triangulation) -> Self {
        let balance_rows: Vec<Vec<i64>> = (0..tri.edge_count()).map(|e| tri.balance_row(e)).collect();
        AngleLattice {
            tet_count: tri.tet_count(),
            balance: balance_rows.iter().map(|r| multiplicative(r)).collect(),
            lambda: multiplicative(&tri.longitude.coefficients),
            mu: multiplicative(&tri.meridian.coefficients),
            lambda_row: tri.longitude.coefficients.clone(),
            mu_row: tri.meridian.coefficients.clone(),
            balance_rows,
        }
    }

    /// Rewrite `Π ä^e c̈^f` (exponents ordered as in [`multiplicative`]) as
    /// `±λ̈^p μ̈^q` using that every balance monomial equals its sign.
    pub fn rewrite(&self, exps: &[i64]) -> Result<Option<HolonomyMonomial>, AlgebraError> {
        let relations: Vec<Vec<i64>> = self.balance.iter().map(|b| b.exponents.clone()).collect();
        let targets = vec![self.lambda.exponents.clone(), self.mu.exponents.clone()];
        let Some(sol) = snf_solve(&relations, &targets, exps)? else {
            return Ok(None);
        };
        let parity = |k: &BigInt| (k % 2u32) != BigInt::from(0);
        let mut negative = false;
        let p = sol.target_coeffs[0].to_i64().expect("small exponent");
        let q = sol.target_coeffs[1].to_i64().expect("small exponent");
        negative ^= self.lambda.negative && parity(&sol.target_coeffs[0]);
        negative ^= self.mu.negative && parity(&sol.target_coeffs[1]);
        for (b, r) in self.balance.iter().zip(&sol.relation_coeffs) {
            negative ^= b.negative && parity(r);
        }
        Ok(Some(HolonomyMonomial {
            negative,
            lambda: p,
            mu: q,
        }))
    }

    /// Real relations `real(balance) = 2`, `real(λ) = λ̇`, `real(μ) = μ̇`,
    /// each as an expression equal to zero.
    pub fn real_relations(&self) -> Vec<LinExpr> {
        let mut out: Vec<LinExpr> = self
            .balance_rows
            .iter()
            .map(|r| &real_part(r) - &LinExpr::int(2))
            .collect();
        out.push(&real_part(&self.lambda_row) - &LinExpr::symbol(LAM_DOT));
        out.push(&real_part(&self.mu_row) - &LinExpr::symbol(MU_DOT));
        out
    }
}
