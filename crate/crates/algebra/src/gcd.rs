//! Exact division, pseudo-remainders, and subresultant gcd for integer
//! (Laurent) polynomials.
//!
//! The gcd is computed recursively: the main variable is the highest-index
//! variable present, coefficients live in the ring of the remaining
//! variables, and the primitive remainder sequence is the subresultant one
//! so that intermediate coefficients stay small.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;
use crate::poly::{IntPoly, Monomial};

/// Outcome of [`IntPoly::exact_divide`]. Non-divisibility is a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisionResult {
    Quotient(IntPoly),
    NotDivisible,
}

impl DivisionResult {
    pub fn quotient(self) -> Option<IntPoly> {
        match self {
            DivisionResult::Quotient(q) => Some(q),
            DivisionResult::NotDivisible => None,
        }
    }
}

impl IntPoly {
    /// Nonnegative gcd of the integer coefficients (zero for the zero poly).
    pub fn content(&self) -> BigInt {
        self.terms()
            .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c))
    }

    /// Divide by the integer content and fix the sign so that the leading
    /// coefficient (graded-lex) is positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.map_coeffs(|a| a / &c)
    }

    /// Primitive part with the monomial content removed as well, i.e. the
    /// representative of the class of `self` modulo units of the Laurent ring.
    pub fn normalize_unit(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.shift(&self.monomial_content().inverse()).primitive_part()
    }

    pub fn is_unit_monomial(&self) -> bool {
        self.len() == 1 && self.leading_coeff().abs().is_one()
    }

    /// Exact quotient `self / d`.
    ///
    /// Laurent inputs are divided in the Laurent ring (monomials are units).
    /// When both inputs are ordinary polynomials, the quotient must be an
    /// ordinary polynomial too.
    pub fn exact_divide(&self, d: &IntPoly) -> Result<DivisionResult, AlgebraError> {
        self.check_same_ring(d)?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(DivisionResult::Quotient(self.clone()));
        }
        let mp = self.monomial_content();
        let md = d.monomial_content();
        let p0 = self.shift(&mp.inverse());
        let d0 = d.shift(&md.inverse());
        let Some(q0) = divide_polynomial(&p0, &d0) else {
            return Ok(DivisionResult::NotDivisible);
        };
        let q = q0.shift(&mp.div(&md));
        if !self.is_laurent() && !d.is_laurent() && q.is_laurent() {
            return Ok(DivisionResult::NotDivisible);
        }
        Ok(DivisionResult::Quotient(q))
    }

    /// Exact division that is known to succeed; panics otherwise.
    pub fn div_exact(&self, d: &IntPoly) -> IntPoly {
        match self.exact_divide(d) {
            Ok(DivisionResult::Quotient(q)) => q,
            _ => panic!("inexact division of {self} by {d}"),
        }
    }

    pub fn divides(&self, p: &IntPoly) -> bool {
        matches!(p.exact_divide(self), Ok(DivisionResult::Quotient(_)))
    }

    /// Pseudo-remainder of `self` by `g` with respect to `var`:
    /// `lc(g)^(deg f - deg g + 1) * f = q*g + r`, `deg r < deg g`.
    /// Both inputs must be polynomial in `var`.
    pub fn prem(&self, g: &IntPoly, var: usize) -> IntPoly {
        let dg = g.degree_in(var).expect("prem by zero polynomial");
        let Some(df) = self.degree_in(var) else {
            return self.clone();
        };
        if df < dg {
            return self.clone();
        }
        let lcg = g.lc_in(var);
        let mut r = self.clone();
        let mut steps = 0i32;
        while let Some(dr) = r.degree_in(var) {
            if dr < dg {
                break;
            }
            let lcr = r.lc_in(var);
            let shift = Monomial({
                let mut e = vec![0; self.nvars()];
                e[var] = dr - dg;
                e
            });
            r = &(&lcg * &r) - &(&lcr * &g.shift(&shift));
            steps += 1;
        }
        let extra = (df - dg + 1 - steps) as u32;
        if extra > 0 {
            r = &r * &lcg.pow(extra);
        }
        r
    }

    /// Primitive gcd of the coefficients of `self` viewed as a polynomial
    /// in `var`.
    pub fn content_in(&self, var: usize) -> IntPoly {
        let mut acc = IntPoly::zero(self.nvars());
        for (_, c) in self.coeffs_in(var) {
            acc = gcd(&acc, &c);
            if acc.is_constant() && !acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// `self` divided by its content in `var`, normalized to a positive
    /// leading coefficient.
    pub fn primitive_part_in(&self, var: usize) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.div_exact(&self.content_in(var)).primitive_part()
    }

    /// Product of the distinct irreducible factors (char 0):
    /// `p / gcd(p, dp/dx_1, ..., dp/dx_n)`.
    pub fn squarefree(&self) -> IntPoly {
        if self.is_zero() || self.is_constant() {
            return self.clone();
        }
        let mc = self.monomial_content();
        let p = self.shift(&mc.inverse());
        let mut g = p.clone();
        for v in p.vars() {
            g = gcd(&g, &p.derivative(v));
            if g.is_constant() {
                break;
            }
        }
        let sf = p.div_exact(&g);
        // Keep one copy of each variable that divided the input.
        let mono: Vec<i32> = mc.0.iter().map(|&e| e.signum().max(0)).collect();
        sf.shift(&Monomial(mono))
    }
}

/// Multivariate division by leading terms; `None` when not exact.
fn divide_polynomial(p: &IntPoly, d: &IntPoly) -> Option<IntPoly> {
    let n = p.nvars();
    let (lm_d, lc_d) = {
        let (m, c) = d.leading_term()?;
        (m.clone(), c.clone())
    };
    if d.len() == 1 {
        let mut q = IntPoly::zero(n);
        for (m, c) in p.terms() {
            if !lm_d.divides(m) || !c.is_multiple_of(&lc_d) {
                return None;
            }
            q.add_term(m.div(&lm_d), c / &lc_d);
        }
        return Some(q);
    }
    let mut r = p.clone();
    let mut q = IntPoly::zero(n);
    while let Some((lm_r, lc_r)) = r.leading_term() {
        if !lm_d.divides(lm_r) || !lc_r.is_multiple_of(&lc_d) {
            return None;
        }
        let m = lm_r.div(&lm_d);
        let c = lc_r / &lc_d;
        let t = IntPoly::monomial(n, m.0.clone(), c.clone());
        r = &r - &(&t * d);
        q.add_term(m, c);
    }
    Some(q)
}

/// Primitive gcd with positive leading coefficient. `gcd(p, 0)` is the
/// primitive part of `p`; `gcd(0, 0) = 0`. Laurent inputs are treated in
/// the Laurent ring, where monomials are units.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    assert_eq!(a.nvars(), b.nvars(), "ring mismatch");
    if a.is_zero() {
        return b.normalize_if_laurent().primitive_part();
    }
    if b.is_zero() {
        return a.normalize_if_laurent().primitive_part();
    }
    if a.is_laurent() || b.is_laurent() {
        return gcd(&a.normalize_unit(), &b.normalize_unit());
    }
    if a.is_constant() || b.is_constant() {
        return IntPoly::one(a.nvars());
    }
    let var = (0..a.nvars())
        .rev()
        .find(|&v| a.contains_var(v) || b.contains_var(v))
        .expect("nonconstant input has a variable");
    gcd_in(a, b, var).primitive_part()
}

impl IntPoly {
    fn normalize_if_laurent(&self) -> IntPoly {
        if self.is_laurent() {
            self.normalize_unit()
        } else {
            self.clone()
        }
    }
}

fn gcd_in(a: &IntPoly, b: &IntPoly, var: usize) -> IntPoly {
    let da = a.degree_in(var).unwrap_or(0);
    let db = b.degree_in(var).unwrap_or(0);
    if db == 0 {
        return gcd(&a.content_in(var), b);
    }
    if da == 0 {
        return gcd(a, &b.content_in(var));
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let d = gcd(&ca, &cb);
    let mut pa = a.div_exact(&ca);
    let mut pb = b.div_exact(&cb);
    if da < db {
        std::mem::swap(&mut pa, &mut pb);
    }
    let n = a.nvars();
    let mut g = IntPoly::one(n);
    let mut h = IntPoly::one(n);
    loop {
        let delta = (pa.degree_in(var).unwrap() - pb.degree_in(var).unwrap()) as u32;
        let r = pa.prem(&pb, var);
        if r.is_zero() {
            break;
        }
        if r.degree_in(var) == Some(0) {
            return d;
        }
        pa = pb;
        pb = r.div_exact(&(&g * &h.pow(delta)));
        g = pa.lc_in(var);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1))
        };
    }
    &d * &pb.primitive_part_in(var)
}

/// `gcd` folded over a list.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a IntPoly>>(nvars: usize, polys: I) -> IntPoly {
    let mut acc = IntPoly::zero(nvars);
    for p in polys {
        acc = gcd(&acc, p);
    }
    acc
}

/// `±x^e` over a fixed set of symbols; multiplicative angle and holonomy
/// data (signs tracked separately from exponents).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedMonomial {
    pub negative: bool,
    pub exponents: Vec<i64>,
}

impl SignedMonomial {
    pub fn one(n: usize) -> Self {
        SignedMonomial {
            negative: false,
            exponents: vec![0; n],
        }
    }

    pub fn new(negative: bool, exponents: Vec<i64>) -> Self {
        SignedMonomial {
            negative,
            exponents,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.exponents.len(), other.exponents.len());
        SignedMonomial {
            negative: self.negative ^ other.negative,
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        SignedMonomial {
            negative: self.negative && k.rem_euclid(2) == 1,
            exponents: self.exponents.iter().map(|e| e * k).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    pub fn sign(&self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn to_poly(&self) -> IntPoly {
        let e = self.exponents.iter().map(|&x| x as i32).collect();
        IntPoly::monomial(self.exponents.len(), e, BigInt::from(self.sign()))
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        self.to_poly().to_string_with(names)
    }
}

impl fmt::Display for SignedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}
