// Reader for the canonical polynomial text form: terms joined by ` + ` /
// ` - `, each term a `*`-product of an optional integer and `name^exp`
// factors. Exponents may be negative. No parentheses.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::AlgebraError;
use crate::poly::{IntPoly, Monomial};

pub(crate) fn parse_poly(text: &str, names: &[&str]) -> Result<IntPoly, AlgebraError> {
    let n = names.len();
    let mut out = IntPoly::zero(n);
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut first = true;

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(AlgebraError::Parse {
            pos,
            msg: "empty input".into(),
        });
    }
    while pos < bytes.len() {
        let mut negative = false;
        skip_ws(&mut pos);
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            negative = bytes[pos] == b'-';
            pos += 1;
        } else if !first {
            return Err(AlgebraError::Parse {
                pos,
                msg: "expected '+' or '-' between terms".into(),
            });
        }
        first = false;
        skip_ws(&mut pos);

        let start = pos;
        while pos < bytes.len() && bytes[pos] != b'+' && !(bytes[pos] == b'-' && !prev_is_caret(bytes, pos)) {
            pos += 1;
        }
        let term = text[start..pos].trim();
        if term.is_empty() {
            return Err(AlgebraError::Parse {
                pos: start,
                msg: "empty term".into(),
            });
        }
        let (mono, coeff) = parse_term(term, names, start)?;
        out.add_term(mono, if negative { -coeff } else { coeff });
    }
    Ok(out)
}

// A '-' directly after '^' (possibly with spaces) is an exponent sign.
fn prev_is_caret(bytes: &[u8], pos: usize) -> bool {
    let mut i = pos;
    while i > 0 {
        i -= 1;
        if bytes[i].is_ascii_whitespace() {
            continue;
        }
        return bytes[i] == b'^';
    }
    false
}

fn parse_term(term: &str, names: &[&str], offset: usize) -> Result<(Monomial, BigInt), AlgebraError> {
    let mut exps = vec![0i32; names.len()];
    let mut coeff = BigInt::one();
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(AlgebraError::Parse {
                pos: offset,
                msg: format!("empty factor in '{term}'"),
            });
        }
        if factor.bytes().all(|b| b.is_ascii_digit()) {
            coeff *= factor.parse::<BigInt>().expect("digits");
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((nm, e)) => {
                let e: i32 = e.trim().parse().map_err(|_| AlgebraError::Parse {
                    pos: offset,
                    msg: format!("bad exponent in '{factor}'"),
                })?;
                (nm.trim(), e)
            }
            None => (factor, 1),
        };
        let idx = names
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| AlgebraError::Parse {
                pos: offset,
                msg: format!("unknown variable '{name}'"),
            })?;
        exps[idx] += exp;
    }
    Ok((Monomial(exps), coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_canonical_text() {
        let names = ["l", "m"];
        for s in [
            "l*m^3 + 1",
            "l*m^4 + l^2*m^2 - l*m^3 - 2*l*m^2 - l*m + m^2 + l",
            "7 - 3*m^-1",
        ] {
            let p = parse_poly(s, &names).unwrap();
            assert_eq!(p.to_string_with(&names), s);
        }
    }

    #[test]
    fn rejects_unknown_variable() {
        assert!(matches!(
            parse_poly("x + q", &["x"]),
            Err(AlgebraError::Parse { .. })
        ));
        assert!(parse_poly("0", &["x"]).unwrap().is_zero());
    }
}
