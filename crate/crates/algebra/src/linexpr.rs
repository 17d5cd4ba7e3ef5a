//! Affine expressions with rational coefficients over named symbols, used
//! for formal norm exponents such as `mu_dot + 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    coeffs: BTreeMap<String, BigRational>,
    constant: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl LinExpr {
    pub fn zero() -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: BigRational::zero(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rat(c))
    }

    pub fn symbol(name: &str) -> Self {
        Self::term(name, rat(1))
    }

    pub fn term(name: &str, c: BigRational) -> Self {
        let mut e = Self::zero();
        e.add_symbol(name, c);
        e
    }

    pub fn add_symbol(&mut self, name: &str, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(name.to_string()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(name);
        }
    }

    pub fn coeff(&self, name: &str) -> BigRational {
        self.coeffs.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_part(&self) -> &BigRational {
        &self.constant
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&rat(k))
    }

    /// Numeric value; symbols missing from `values` are an error.
    pub fn eval(&self, values: &HashMap<String, f64>) -> Result<f64, String> {
        let mut acc = self.constant.to_f64().unwrap_or(f64::NAN);
        for (s, c) in &self.coeffs {
            let v = values.get(s).ok_or_else(|| format!("no value for symbol {s}"))?;
            acc += c.to_f64().unwrap_or(f64::NAN) * v;
        }
        Ok(acc)
    }

    /// Substitute expressions for symbols.
    pub fn substitute(&self, map: &HashMap<String, LinExpr>) -> Self {
        let mut out = Self::constant(self.constant.clone());
        for (s, c) in &self.coeffs {
            match map.get(s) {
                Some(e) => out = &out + &e.scale(c),
                None => out.add_symbol(s, c.clone()),
            }
        }
        out
    }
}

impl Add for &LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (s, c) in &rhs.coeffs {
            out.add_symbol(s, c.clone());
        }
        out.constant += &rhs.constant;
        out
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: LinExpr) -> LinExpr {
        &self + &rhs
    }
}

impl Neg for &LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale_int(-1)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale_int(-1)
    }
}

impl Sub for &LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: &LinExpr) -> LinExpr {
        self + &(-rhs)
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        &self - &rhs
    }
}

impl Mul<&BigRational> for &LinExpr {
    type Output = LinExpr;
    fn mul(self, k: &BigRational) -> LinExpr {
        self.scale(k)
    }
}

fn fmt_rat(c: &BigRational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LinExpr {
    /// Symbols in name order, constant last: `2*x - y + 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (s, c) in &self.coeffs {
            let mag = c.abs();
            let body = if mag.is_one() {
                s.clone()
            } else {
                format!("{}*{}", fmt_rat(&mag), s)
            };
            parts.push((c.is_negative(), body));
        }
        if !self.constant.is_zero() {
            parts.push((self.constant.is_negative(), fmt_rat(&self.constant.abs())));
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Canonical representative of `expr` modulo the span of `relations`
/// (each read as `relation = 0`).
///
/// Symbols are eliminated greedily in name order, except that symbols in
/// `keep` are eliminated last (in reverse of their listed order), so the
/// result prefers to be written in `keep` and constants.
pub fn lin_reduce(
    expr: &LinExpr,
    relations: &[LinExpr],
    keep: &[&str],
) -> Result<LinExpr, AlgebraError> {
    let mut order: Vec<String> = relations
        .iter()
        .chain(std::iter::once(expr))
        .flat_map(|r| r.coeffs.keys().cloned())
        .filter(|s| !keep.contains(&s.as_str()))
        .collect();
    order.sort();
    order.dedup();
    order.extend(keep.iter().rev().map(|s| s.to_string()));

    // Row-reduce the relations with this column order.
    let mut rows: Vec<LinExpr> = relations.to_vec();
    let mut pivots: Vec<(String, LinExpr)> = Vec::new();
    for sym in &order {
        let Some(idx) = rows.iter().position(|r| !r.coeff(sym).is_zero()) else {
            continue;
        };
        let row = rows.swap_remove(idx);
        let row = row.scale(&(rat(1) / row.coeff(sym)));
        for r in rows.iter_mut() {
            let c = r.coeff(sym);
            if !c.is_zero() {
                *r = &*r - &row.scale(&c);
            }
        }
        for (_, p) in pivots.iter_mut() {
            let c = p.coeff(sym);
            if !c.is_zero() {
                *p = &*p - &row.scale(&c);
            }
        }
        pivots.push((sym.clone(), row));
    }
    if let Some(bad) = rows.iter().find(|r| !r.is_zero()) {
        return Err(AlgebraError::InconsistentRelations(format!("{bad} = 0")));
    }
    let mut out = expr.clone();
    for (sym, row) in &pivots {
        let c = out.coeff(sym);
        if !c.is_zero() {
            out = &out - &row.scale(&c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> LinExpr {
        LinExpr::symbol(s)
    }

    #[test]
    fn balance_reduces_to_constant() {
        let e = &sym("c1") + &sym("c2");
        let rel = &(&sym("c1") + &sym("c2")) - &LinExpr::int(2);
        assert_eq!(lin_reduce(&e, &[rel], &[]).unwrap(), LinExpr::int(2));
    }

    #[test]
    fn holonomy_definition_is_preferred() {
        let e = &(&sym("a1").scale_int(2) - &sym("a2").scale_int(2)) - &sym("c1");
        let rel = &e - &sym("lam_dot");
        let out = lin_reduce(&e, &[rel], &["lam_dot", "mu_dot"]).unwrap();
        assert_eq!(out, sym("lam_dot"));
    }

    #[test]
    fn empty_relations_leave_expression() {
        let e = &sym("x") + &LinExpr::int(3);
        assert_eq!(lin_reduce(&e, &[], &[]).unwrap(), e);
    }

    #[test]
    fn inconsistent_relations_are_reported() {
        let r1 = &sym("x") - &LinExpr::int(1);
        let r2 = &sym("x") - &LinExpr::int(2);
        assert!(matches!(
            lin_reduce(&sym("x"), &[r1, r2], &[]),
            Err(AlgebraError::InconsistentRelations(_))
        ));
    }

    #[test]
    fn display_orders_symbols_then_constant() {
        let e = &(&sym("mu_dot") - &sym("lam_dot")) + &LinExpr::int(1);
        assert_eq!(e.to_string(), "-lam_dot + mu_dot + 1");
        assert_eq!(LinExpr::zero().to_string(), "0");
    }
}
