//! Sparse multivariate (Laurent) polynomials over a generic coefficient ring.
//!
//! Terms are stored in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. The leading term is therefore the last entry of the
//! map, and iterating in reverse yields the canonical print order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::AlgebraError;

/// Coefficient ring requirements.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// Exponent vector. Entries may be negative for Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables with coefficients in `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Integer-coefficient (Laurent) polynomial.
pub type IntPoly = Poly<BigInt>;
/// Complex floating-point polynomial, used for numeric instantiation.
pub type ComplexPoly = Poly<Complex64>;

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), C::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<i32>, c: C) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, C)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> C {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(C::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// `true` when the polynomial is a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_laurent(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|&e| e < 0))
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] != 0)
    }

    pub fn vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.contains_var(v)).collect()
    }

    /// Highest exponent of `var`, or `None` for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn min_degree_in(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    /// Multiply by the monomial `m` (exponents may be negative).
    pub fn shift(&self, m: &Monomial) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Re-embed into a ring with `nvars` variables. `mapping[i]` is the new
    /// index of old variable `i`; `None` requires that variable to be absent.
    pub fn remap(&self, nvars: usize, mapping: &[Option<usize>]) -> Self {
        assert_eq!(mapping.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                match mapping[i] {
                    Some(j) => e[j] += x,
                    None => assert_eq!(x, 0, "remap drops variable {i} that is present"),
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Coefficients with respect to `var`: exponent of `var` to the
    /// `var`-free coefficient polynomial.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<i32, Self> {
        let mut out: BTreeMap<i32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.0[var];
            let mut e = m.clone();
            e.0[var] = 0;
            out.entry(k)
                .or_insert_with(|| Self::zero(self.nvars))
                .add_term(e, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, var: usize, coeffs: &BTreeMap<i32, Self>) -> Self {
        let mut out = Self::zero(nvars);
        for (&k, p) in coeffs {
            for (m, c) in &p.terms {
                let mut e = m.clone();
                e.0[var] += k;
                out.add_term(e, c.clone());
            }
        }
        out
    }

    /// Leading coefficient with respect to `var` (a `var`-free polynomial).
    pub fn lc_in(&self, var: usize) -> Self {
        self.coeffs_in(var)
            .into_iter()
            .next_back()
            .map(|(_, p)| p)
            .unwrap_or_else(|| Self::zero(self.nvars))
    }

    pub fn derivative(&self, var: usize) -> Self
    where
        C: From<i32>,
    {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[var];
            if k == 0 {
                continue;
            }
            let mut e = m.clone();
            e.0[var] -= 1;
            out.add_term(e, c.clone() * C::from(k));
        }
        out
    }

    /// Substitute a polynomial for `var`. Requires nonnegative powers of `var`.
    pub fn substitute(&self, var: usize, value: &Self) -> Self {
        assert_eq!(value.nvars, self.nvars);
        let coeffs = self.coeffs_in(var);
        let mut out = Self::zero(self.nvars);
        // Horner in descending exponent order.
        let mut prev: Option<i32> = None;
        for (&k, c) in coeffs.iter().rev() {
            assert!(k >= 0, "substitute needs nonnegative exponents in the variable");
            if let Some(p) = prev {
                out = &out * &value.pow((p - k) as u32);
            }
            out = &out + c;
            prev = Some(k);
        }
        if let Some(p) = prev {
            out = &out * &value.pow(p as u32);
        }
        out
    }

    pub fn check_same_ring(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::SymbolMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// Canonical text with the given variable names, terms in descending
    /// graded-lex order, e.g. `2*x^2*y - y + 1`.
    pub fn to_string_with(&self, names: &[&str]) -> String
    where
        C: fmt::Display,
    {
        assert_eq!(names.len(), self.nvars, "one name per variable");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || mag != "1" {
                factors.push(mag);
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].to_string()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl<C: Coeff + Div<Output = C>> Poly<C> {
    /// Evaluate at a point; negative exponents use field inversion.
    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                t = t * pow_signed(x, e);
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitute constants for a subset of variables, keeping the ring.
    pub fn partial_eval(&self, values: &[Option<C>]) -> Self {
        assert_eq!(values.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut e = m.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(x) = v {
                    t = t * pow_signed(x, m.0[i]);
                    e.0[i] = 0;
                }
            }
            out.add_term(e, t);
        }
        out
    }
}

fn pow_signed<C: Coeff + Div<Output = C>>(x: &C, e: i32) -> C {
    let mut r = C::one();
    for _ in 0..e.unsigned_abs() {
        r = r * x.clone();
    }
    if e < 0 {
        C::one() / r
    } else {
        r
    }
}

impl IntPoly {
    pub fn from_i64_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, i64)>,
    {
        Self::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c))))
    }

    pub fn to_rational(&self) -> Poly<BigRational> {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    pub fn to_complex(&self) -> ComplexPoly {
        self.map_coeffs(|c| Complex64::new(bigint_to_f64(c), 0.0))
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        self.to_rational().eval(point)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = Complex64::new(bigint_to_f64(c), 0.0);
            for (x, &e) in point.iter().zip(&m.0) {
                if e != 0 {
                    t *= x.powi(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Parse the canonical text form produced by [`Poly::to_string_with`].
    pub fn parse(text: &str, names: &[&str]) -> Result<Self, AlgebraError> {
        crate::parse::parse_poly(text, names)
    }
}

pub(crate) fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Poly<C>) -> Poly<C> {
        &self + &rhs
    }
}

impl<C: Coeff> AddAssign<&Poly<C>> for Poly<C> {
    fn add_assign(&mut self, rhs: &Poly<C>) {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Poly<C>) -> Poly<C> {
        &self - &rhs
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca.clone() * cb.clone();
                match acc.get_mut(&m) {
                    Some(e) => *e = e.clone() + c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(&[i32], i64)]) -> IntPoly {
        let n = terms[0].0.len();
        IntPoly::from_i64_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
    }

    #[test]
    fn difference_of_squares() {
        let x = IntPoly::var(1, 0);
        let one = IntPoly::one(1);
        let prod = &(&x + &one) * &(&x - &one);
        assert_eq!(prod, p(&[(&[2], 1), (&[0], -1)]));
        assert_eq!(prod.to_string_with(&["x"]), "x^2 - 1");
    }

    #[test]
    fn canonical_print_order_is_graded_lex() {
        let q = p(&[(&[1, 3], 1), (&[0, 0], 1)]);
        assert_eq!(q.to_string_with(&["lam", "mu"]), "lam*mu^3 + 1");
        let r = p(&[(&[0, 2], -2), (&[1, 0], 3), (&[2, 0], 1)]);
        assert_eq!(r.to_string_with(&["x", "y"]), "x^2 - 2*y^2 + 3*x");
    }

    #[test]
    fn trefoil_curve_point() {
        // m^6 l + 1 at m^2 = 2, l = -1/8, written in (l, M = m^2): l*M^3 + 1.
        let curve = p(&[(&[1, 3], 1), (&[0, 0], 1)]);
        let pt = [
            BigRational::new((-1).into(), 8.into()),
            BigRational::from_integer(2.into()),
        ];
        assert!(curve.eval_rational(&pt).is_zero());
    }

    #[test]
    fn substitute_polynomial() {
        // (x + y)^2 with x := y - 1 -> (2y - 1)^2
        let x = IntPoly::var(2, 0);
        let y = IntPoly::var(2, 1);
        let f = (&x + &y).pow(2);
        let g = f.substitute(0, &(&y - &IntPoly::one(2)));
        let expect = (&y.scale(&BigInt::from(2)) - &IntPoly::one(2)).pow(2);
        assert_eq!(g, expect);
    }

    #[test]
    fn laurent_content_and_shift() {
        let q = p(&[(&[-1, 2], 1), (&[1, 0], 3)]);
        let mc = q.monomial_content();
        assert_eq!(mc, Monomial(vec![-1, 0]));
        let shifted = q.shift(&mc.inverse());
        assert!(!shifted.is_laurent());
        assert_eq!(shifted.monomial_content(), Monomial(vec![0, 0]));
    }

    #[test]
    fn coeffs_round_trip() {
        let q = p(&[(&[2, 1], 3), (&[0, 1], -1), (&[1, 0], 5)]);
        let c = q.coeffs_in(0);
        assert_eq!(c.len(), 3);
        assert_eq!(Poly::from_coeffs_in(2, 0, &c), q);
        assert_eq!(q.lc_in(0), p(&[(&[0, 1], 3)]));
    }

    #[test]
    fn derivative_drops_constants() {
        let q = p(&[(&[3], 2), (&[0], 7)]);
        assert_eq!(q.derivative(0), p(&[(&[2], 6)]));
    }
}
