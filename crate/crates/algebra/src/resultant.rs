//! Resultants: subresultant PRS (the production path) and a Sylvester
//! determinant evaluated with fraction-free Bareiss elimination (the
//! reference used by tests).

use crate::error::AlgebraError;
use crate::poly::{IntPoly, Monomial};

/// `res_var(p, q)`. Laurent powers of `var` are shifted away first, so the
/// result is determined up to a monomial unit for Laurent inputs.
pub fn resultant(p: &IntPoly, q: &IntPoly, var: usize) -> Result<IntPoly, AlgebraError> {
    p.check_same_ring(q)?;
    if !p.contains_var(var) && !q.contains_var(var) {
        return Err(AlgebraError::VariableAbsent(var));
    }
    let n = p.nvars();
    if p.is_zero() || q.is_zero() {
        return Ok(IntPoly::zero(n));
    }
    let a = shift_var(p, var);
    let b = shift_var(q, var);
    let da = a.degree_in(var).unwrap();
    let db = b.degree_in(var).unwrap();
    if db == 0 {
        return Ok(b.pow(da as u32));
    }
    if da == 0 {
        return Ok(a.pow(db as u32));
    }
    let (mut a, mut b, mut s) = if da < db {
        (b, a, if (da * db) % 2 == 1 { -1 } else { 1 })
    } else {
        (a, b, 1)
    };
    let mut g = IntPoly::one(n);
    let mut h = IntPoly::one(n);
    loop {
        let dega = a.degree_in(var).unwrap();
        let degb = b.degree_in(var).unwrap();
        let delta = (dega - degb) as u32;
        if dega % 2 == 1 && degb % 2 == 1 {
            s = -s;
        }
        let r = a.prem(&b, var);
        a = b;
        b = r.div_exact(&(&g * &h.pow(delta)));
        g = a.lc_in(var);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1))
        };
        match b.degree_in(var) {
            None => return Ok(IntPoly::zero(n)),
            Some(0) => break,
            Some(_) => {}
        }
    }
    let dega = a.degree_in(var).unwrap() as u32;
    let res = if dega == 0 {
        h
    } else {
        b.pow(dega).div_exact(&h.pow(dega - 1))
    };
    Ok(if s < 0 { -res } else { res })
}

fn shift_var(p: &IntPoly, var: usize) -> IntPoly {
    let lo = p.min_degree_in(var).unwrap_or(0);
    if lo >= 0 {
        return p.clone();
    }
    let mut e = vec![0; p.nvars()];
    e[var] = -lo;
    p.shift(&Monomial(e))
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn sylvester_resultant(p: &IntPoly, q: &IntPoly, var: usize) -> Result<IntPoly, AlgebraError> {
    p.check_same_ring(q)?;
    if !p.contains_var(var) && !q.contains_var(var) {
        return Err(AlgebraError::VariableAbsent(var));
    }
    let n = p.nvars();
    let a = shift_var(p, var);
    let b = shift_var(q, var);
    let (Some(da), Some(db)) = (a.degree_in(var), b.degree_in(var)) else {
        return Ok(IntPoly::zero(n));
    };
    let (da, db) = (da as usize, db as usize);
    let size = da + db;
    if size == 0 {
        return Ok(IntPoly::one(n));
    }
    let ca = a.coeffs_in(var);
    let cb = b.coeffs_in(var);
    let coeff = |c: &std::collections::BTreeMap<i32, IntPoly>, k: usize| {
        c.get(&(k as i32)).cloned().unwrap_or_else(|| IntPoly::zero(n))
    };
    let mut m = vec![vec![IntPoly::zero(n); size]; size];
    for i in 0..db {
        for k in 0..=da {
            m[i][i + k] = coeff(&ca, da - k);
        }
    }
    for i in 0..da {
        for k in 0..=db {
            m[db + i][i + k] = coeff(&cb, db - k);
        }
    }
    Ok(bareiss_det(m))
}

/// Fraction-free determinant over the polynomial ring.
pub fn bareiss_det(mut m: Vec<Vec<IntPoly>>) -> IntPoly {
    let size = m.len();
    let nv = m[0][0].nvars();
    let mut sign_flip = false;
    let mut prev = IntPoly::one(nv);
    for k in 0..size.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return IntPoly::zero(nv),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[size - 1][size - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, names: &[&str]) -> IntPoly {
        IntPoly::parse(s, names).unwrap()
    }

    #[test]
    fn linear_case() {
        let v = ["x", "a", "b"];
        let r = resultant(&parse("x - a", &v), &parse("x - b", &v), 0).unwrap();
        assert_eq!(r.primitive_part(), parse("a - b", &v).primitive_part());
    }

    #[test]
    fn evaluation_property() {
        let v = ["x", "y"];
        let r = resultant(&parse("x^2 - 2", &v), &parse("x - y", &v), 0).unwrap();
        assert_eq!(r, parse("y^2 - 2", &v));
    }

    #[test]
    fn agrees_with_sylvester() {
        let v = ["x", "y", "z"];
        let p = parse("x^3*y - 2*x^2 + z*x + y^2 - 1", &v);
        let q = parse("y*x^2 + 3*z*x - y + 4", &v);
        for var in 0..3 {
            assert_eq!(
                resultant(&p, &q, var).unwrap(),
                sylvester_resultant(&p, &q, var).unwrap(),
                "var {var}"
            );
        }
    }

    #[test]
    fn common_root_gives_zero() {
        let v = ["x", "y"];
        let g = parse("x - y", &v);
        let p = &g * &parse("x + 1", &v);
        let q = &g * &parse("x^2 + y", &v);
        assert!(resultant(&p, &q, 0).unwrap().is_zero());
    }

    #[test]
    fn absent_variable_is_an_error() {
        let v = ["x", "y"];
        assert_eq!(
            resultant(&parse("y + 1", &v), &parse("y", &v), 0),
            Err(AlgebraError::VariableAbsent(0))
        );
    }
}
