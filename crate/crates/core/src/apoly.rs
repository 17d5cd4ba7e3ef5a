//! Gluing-variety equations in shape variables and their elimination to a
//! polynomial in the peripheral variables `(l, m)`.
//!
//! Shapes: `z' = 1/(1 − z)`, `z'' = 1 − 1/z`. Ring layout: `z_0 … z_{N−1}`,
//! then `l`, then `m`. The cusp equations use the holonomy rows verbatim, so
//! the engine's `m` is the square of the usual A-polynomial `m`.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;
use zft_algebra::gcd::{gcd, gcd_many};
use zft_algebra::{resultant, DivisionResult, IntPoly, Monomial};

use crate::nz::gluing_matrices;
use crate::tri::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApolyError {
    #[error("identically zero resultant eliminating z{var} between {left} and {right}")]
    ZeroEliminant { var: usize, left: String, right: String },
    #[error("reference polynomial has odd powers of m; cannot substitute m^2 -> mu")]
    OddReference,
    #[error("elimination order {0:?} is not a permutation of the tetrahedra")]
    BadOrder(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Edge(usize),
    Meridian,
    Longitude,
    Resultant(usize),
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Edge(i) => write!(f, "edge {i}"),
            Provenance::Meridian => f.write_str("meridian"),
            Provenance::Longitude => f.write_str("longitude"),
            Provenance::Resultant(v) => write!(f, "resultant in z{v}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GluingSystem {
    pub tet_count: usize,
    pub polys: Vec<IntPoly>,
    pub provenance: Vec<Provenance>,
    /// Denominators cleared when forming each polynomial.
    pub denominators: Vec<IntPoly>,
    /// Equations that cleared to `0 = 0`.
    pub dropped: Vec<Provenance>,
    pub invert_negative: bool,
}

impl GluingSystem {
    pub fn nvars(&self) -> usize {
        self.tet_count + 2
    }

    pub fn l_var(&self) -> usize {
        self.tet_count
    }

    pub fn m_var(&self) -> usize {
        self.tet_count + 1
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..self.tet_count).map(|j| format!("z{j}")).collect();
        v.push("l".into());
        v.push("m".into());
        v
    }
}

/// `(numerator, denominator, sign)` of `Π z^a z'^b z''^c` with
/// `z^a z'^b z''^c = (−1)^b z^{a−c} (z − 1)^{c−b}`.
fn shape_product(n: usize, exps: &[[i64; 3]]) -> (IntPoly, IntPoly, bool) {
    let nv = n + 2;
    let mut num = IntPoly::one(nv);
    let mut den = IntPoly::one(nv);
    let mut negative = false;
    for (j, &[a, b, c]) in exps.iter().enumerate() {
        let z = IntPoly::var(nv, j);
        let zm1 = &z - &IntPoly::one(nv);
        for (base, e) in [(&z, a - c), (&zm1, c - b)] {
            if e > 0 {
                num = &num * &base.pow(e as u32);
            } else if e < 0 {
                den = &den * &base.pow((-e) as u32);
            }
        }
        negative ^= b.rem_euclid(2) == 1;
    }
    (num, den, negative)
}

pub fn build_gluing_system(tri: &Triangulation, invert_negative: bool) -> GluingSystem {
    let nz = gluing_matrices(tri);
    let n = tri.tet_count();
    let nv = n + 2;
    let flip = |j: usize, t: [i64; 3]| -> [i64; 3] {
        if invert_negative && !tri.tets[j].is_positive() {
            [-t[0], -t[1], -t[2]]
        } else {
            t
        }
    };
    let mut sys = GluingSystem {
        tet_count: n,
        polys: Vec::new(),
        provenance: Vec::new(),
        denominators: Vec::new(),
        dropped: Vec::new(),
        invert_negative,
    };
    for i in 0..tri.edge_count() {
        let exps: Vec<[i64; 3]> = (0..n)
            .map(|j| flip(j, [nz.a[i][j], nz.b[i][j], nz.c[i][j]]))
            .collect();
        let (num, den, neg) = shape_product(n, &exps);
        let lhs = if neg { -&num } else { num };
        let p = &lhs - &den;
        if p.is_zero() {
            sys.dropped.push(Provenance::Edge(i));
        } else {
            sys.polys.push(p);
            sys.provenance.push(Provenance::Edge(i));
            sys.denominators.push(den);
        }
    }
    for (prov, row, var) in [
        (Provenance::Meridian, &nz.meridian_abc, n + 1),
        (Provenance::Longitude, &nz.longitude_abc, n),
    ] {
        let exps: Vec<[i64; 3]> = row.iter().enumerate().map(|(j, &t)| flip(j, t)).collect();
        let (num, den, neg) = shape_product(n, &exps);
        let rhs = if neg { -&num } else { num };
        let p = &(&IntPoly::var(nv, var) * &den) - &rhs;
        sys.polys.push(p);
        sys.provenance.push(prov);
        sys.denominators.push(den);
    }
    sys
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discarded {
    pub factor: String,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct Elimination {
    /// Polynomial in `(l, m)` (two-variable ring).
    pub eliminant: IntPoly,
    pub order: Vec<usize>,
    pub discarded: Vec<Discarded>,
}

struct Cleaner<'a> {
    names: &'a [String],
    nv: usize,
    m_var: usize,
    discarded: Vec<Discarded>,
    seen: HashSet<String>,
}

impl Cleaner<'_> {
    fn log(&mut self, f: &IntPoly, reason: &str) {
        let refs: Vec<&str> = self.names.iter().map(String::as_str).collect();
        let text = f.to_string_with(&refs);
        if self.seen.insert(format!("{text}|{reason}")) {
            self.discarded.push(Discarded {
                factor: text,
                reason: reason.into(),
            });
        }
    }

    /// Strip monomials, degenerate shape factors `z_k`, `z_k − 1` for live
    /// shapes, and `m`-only content; return the primitive squarefree rest.
    fn clean(&mut self, p: &IntPoly, live_shapes: &[usize]) -> IntPoly {
        let mc = p.monomial_content();
        if !mc.is_one() {
            let mono = IntPoly::monomial(self.nv, mc.0.clone(), 1.into());
            self.log(&mono, "monomial factor");
        }
        let mut q = p.shift(&mc.inverse()).primitive_part();
        for &k in live_shapes {
            let zm1 = &IntPoly::var(self.nv, k) - &IntPoly::one(self.nv);
            while let Ok(DivisionResult::Quotient(r)) = q.exact_divide(&zm1) {
                self.log(&zm1, "degenerate shape (z = 1)");
                q = r;
            }
        }
        // Content over Z[m]: factors not involving any shape or l.
        let mcontent = content_over(&q, self.m_var);
        if !mcontent.is_constant() {
            self.log(&mcontent, "factor free of shapes and l");
            q = q.div_exact(&mcontent);
        }
        let sf = q.squarefree().primitive_part();
        if sf != q {
            self.log(&q.div_exact(&sf), "repeated factor");
        }
        sf
    }
}

/// gcd of the coefficients of `p` viewed as a polynomial in every variable
/// except `keep`, i.e. its largest factor involving only `keep`.
fn content_over(p: &IntPoly, keep: usize) -> IntPoly {
    let nv = p.nvars();
    let mut groups: std::collections::BTreeMap<Vec<i32>, IntPoly> = Default::default();
    for (m, c) in p.terms() {
        let mut key = m.0.clone();
        key[keep] = 0;
        let mut e = vec![0; nv];
        e[keep] = m.0[keep];
        groups
            .entry(key)
            .or_insert_with(|| IntPoly::zero(nv))
            .add_term(Monomial(e), c.clone());
    }
    gcd_many(nv, groups.values())
}

fn dedupe(polys: &mut Vec<(IntPoly, Provenance)>) {
    let mut seen = HashSet::new();
    polys.retain(|(p, _)| seen.insert(p.normalize_unit().to_string()));
}

/// Pivot-resultant elimination of the shapes in `order`.
pub fn eliminate(sys: &GluingSystem, order: &[usize]) -> Result<Elimination, ApolyError> {
    let n = sys.tet_count;
    let nv = sys.nvars();
    let names = sys.names();
    let mut cleaner = Cleaner {
        names: &names,
        nv,
        m_var: sys.m_var(),
        discarded: Vec::new(),
        seen: HashSet::new(),
    };
    let mut live: Vec<usize> = order.to_vec();
    let mut polys: Vec<(IntPoly, Provenance)> = sys
        .polys
        .iter()
        .zip(&sys.provenance)
        .map(|(p, prov)| (cleaner.clean(p, &live), prov.clone()))
        .filter(|(p, _)| !p.is_constant())
        .collect();
    dedupe(&mut polys);
    let inconsistent = sys.polys.iter().any(|p| p.is_constant() && !p.is_zero());

    for &var in order {
        live.retain(|&v| v != var);
        dedupe(&mut polys);
        let (with, without): (Vec<_>, Vec<_>) = polys.into_iter().partition(|(p, _)| p.contains_var(var));
        polys = without;
        let Some(pivot_idx) = (0..with.len()).min_by_key(|&i| {
            (with[i].0.degree_in(var).unwrap_or(0), with[i].0.len(), i)
        }) else {
            continue;
        };
        let (pivot, pivot_prov) = &with[pivot_idx];
        for (i, (q, prov)) in with.iter().enumerate() {
            if i == pivot_idx || pivot.divides(q) {
                // A multiple of the pivot adds nothing on the pivot's zero set.
                continue;
            }
            let r = resultant(pivot, q, var).expect("variable present");
            if r.is_zero() {
                return Err(ApolyError::ZeroEliminant {
                    var,
                    left: pivot_prov.to_string(),
                    right: prov.to_string(),
                });
            }
            if r.is_constant() {
                // Empty variety over this branch.
                return Ok(Elimination {
                    eliminant: IntPoly::one(2),
                    order: order.to_vec(),
                    discarded: cleaner.discarded,
                });
            }
            let cleaned = cleaner.clean(&r, &live);
            if !cleaned.is_constant() {
                polys.push((cleaned, Provenance::Resultant(var)));
            }
        }
    }

    let to_lm: Vec<Option<usize>> = (0..nv)
        .map(|v| match v {
            _ if v == n => Some(0),
            _ if v == n + 1 => Some(1),
            _ => None,
        })
        .collect();
    if inconsistent || polys.is_empty() {
        return Ok(Elimination {
            eliminant: if inconsistent { IntPoly::one(2) } else { IntPoly::zero(2) },
            order: order.to_vec(),
            discarded: cleaner.discarded,
        });
    }
    let lm: Vec<IntPoly> = polys.iter().map(|(p, _)| p.remap(2, &to_lm)).collect();
    let g = gcd_many(2, lm.iter());
    Ok(Elimination {
        eliminant: g,
        order: order.to_vec(),
        discarded: cleaner.discarded,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct APolyResult {
    /// Canonical text of the factor in `(l, m)`.
    pub factor_text: String,
    #[serde(skip)]
    pub factor: IntPoly,
    pub discarded: Vec<Discarded>,
    pub invert_negative: bool,
    pub order: Vec<usize>,
    /// Wall-clock time; kept out of JSON so output stays byte-stable.
    #[serde(skip)]
    pub seconds: f64,
}

pub const LM_NAMES: [&str; 2] = ["l", "m"];

/// Strip `l`-free factors and monomials; squarefree, primitive, positive.
pub fn canonical_factor(p: &IntPoly) -> (IntPoly, Vec<Discarded>) {
    let mut log = Vec::new();
    if p.is_zero() {
        return (p.clone(), log);
    }
    let mut q = p.normalize_unit();
    let lfree = q.content_in(0);
    if !lfree.is_constant() {
        log.push(Discarded {
            factor: lfree.to_string_with(&LM_NAMES),
            reason: "factor free of l".into(),
        });
        q = q.div_exact(&lfree);
    }
    let q = q.squarefree().normalize_unit();
    (q, log)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    permutations(n)
}

fn finish(el: Elimination, invert_negative: bool, order: Vec<usize>, start: Instant) -> APolyResult {
    let (factor, mut extra) = canonical_factor(&el.eliminant);
    let mut discarded = el.discarded;
    discarded.append(&mut extra);
    APolyResult {
        factor_text: factor.to_string_with(&LM_NAMES),
        factor,
        discarded,
        invert_negative,
        order,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Build, eliminate (default order first, then every other order on a
/// zero eliminant), and canonicalize.
pub fn apoly_factor(tri: &Triangulation, invert_negative: bool) -> Result<APolyResult, ApolyError> {
    let start = Instant::now();
    let sys = build_gluing_system(tri, invert_negative);
    let mut last_err = None;
    for order in all_orders(tri.tet_count()) {
        match eliminate(&sys, &order) {
            Ok(el) => return Ok(finish(el, invert_negative, order, start)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one order"))
}

/// Same, with a fixed elimination order (no fallback).
pub fn apoly_factor_with_order(
    tri: &Triangulation,
    invert_negative: bool,
    order: &[usize],
) -> Result<APolyResult, ApolyError> {
    let start = Instant::now();
    let n = tri.tet_count();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(ApolyError::BadOrder(order.to_vec()));
    }
    let sys = build_gluing_system(tri, invert_negative);
    let el = eliminate(&sys, order)?;
    Ok(finish(el, invert_negative, order.to_vec(), start))
}

/// Substitute `m² ↦ m` in a reference polynomial with only even powers of
/// `m` (ring `(l, m)`).
pub fn halve_m(reference: &IntPoly) -> Result<IntPoly, ApolyError> {
    let mut out = IntPoly::zero(2);
    for (mono, c) in reference.terms() {
        if mono.0[1] % 2 != 0 {
            return Err(ApolyError::OddReference);
        }
        out.add_term(Monomial(vec![mono.0[0], mono.0[1] / 2]), c.clone());
    }
    Ok(out)
}

/// `p(−l, m)`.
pub fn negate_l(p: &IntPoly) -> IntPoly {
    let mut out = IntPoly::zero(p.nvars());
    for (mono, c) in p.terms() {
        let c = if mono.0[0] % 2 != 0 { -c.clone() } else { c.clone() };
        out.add_term(mono.clone(), c);
    }
    out
}

/// `l^{deg} p(1/l, m)` up to units.
pub fn reciprocal_l(p: &IntPoly) -> IntPoly {
    let mut out = IntPoly::zero(p.nvars());
    for (mono, c) in p.terms() {
        out.add_term(Monomial(vec![-mono.0[0], mono.0[1]]), c.clone());
    }
    out.normalize_unit()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    /// Equal up to units with `l ↦ +l` or `l ↦ −l`.
    pub matches: bool,
    /// `Some(+1)` or `Some(−1)` for the sign of `l` that matched.
    pub l_sign: Option<i32>,
    /// Informational only: equal after `l ↦ 1/l` (never counted as a match).
    pub reciprocal_match: bool,
}

/// Compare an engine polynomial in `(l, M)` with a reference A-polynomial
/// `A(l, m)` in the usual normalization (`M = m²`).
pub fn compare_with_reference(engine: &IntPoly, reference: &IntPoly) -> Result<Comparison, ApolyError> {
    let target = halve_m(reference)?.normalize_unit();
    let e = engine.normalize_unit();
    let l_sign = if e == target {
        Some(1)
    } else if negate_l(&e).normalize_unit() == target {
        Some(-1)
    } else {
        None
    };
    let r = reciprocal_l(&e);
    let reciprocal_match = r == target || negate_l(&r).normalize_unit() == target;
    Ok(Comparison {
        matches: l_sign.is_some(),
        l_sign,
        reciprocal_match,
    })
}

/// Does `d(±l, m)` divide `f(l, m)` in the Laurent ring? Returns the sign
/// of `l` that works.
pub fn divides_up_to_sign(d: &IntPoly, f: &IntPoly) -> Option<i32> {
    for (sign, cand) in [(1, d.clone()), (-1, negate_l(d))] {
        if cand.normalize_unit().divides(&f.normalize_unit()) {
            return Some(sign);
        }
    }
    None
}

/// Common factor of two polynomials in `(l, m)`, for diagnostics.
pub fn common_factor(a: &IntPoly, b: &IntPoly) -> IntPoly {
    gcd(a, b)
}
