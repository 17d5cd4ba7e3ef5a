//! Holonomy rewriting of a fully reduced delta system into the closed form
//! `‖F(λ̈, μ̈)‖ · δ(P(λ̈, μ̈))`, and canonical prefactor arithmetic.
//!
//! Closed forms live in the ring `(L, M) = (λ̈, μ̈)`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use zft_algebra::gcd::gcd;
use zft_algebra::{lin_reduce, IntPoly, LinExpr, Monomial};

use crate::angles::{AngleLattice, HolonomyMonomial, LAM_DOT, MU_DOT};
use crate::reduce::{eliminate_all, DeltaSystem, ReduceError, ReduceOptions};
use crate::tri::Triangulation;

pub const LM_NAMES: [&str; 2] = ["L", "M"];

pub fn lm_poly(text: &str) -> IntPoly {
    IntPoly::parse(text, &LM_NAMES).unwrap_or_else(|e| panic!("bad (L, M) polynomial {text:?}: {e}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefactorTerm {
    pub base: IntPoly,
    pub exponent: LinExpr,
}

/// `Π ‖base‖^exponent`, kept in canonical form: bases pairwise coprime,
/// squarefree, primitive with positive leading coefficient, or positive
/// integers that are pairwise coprime; no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Prefactor {
    terms: Vec<PrefactorTerm>,
}

fn decompose(base: &IntPoly, e: &LinExpr, out: &mut Vec<(IntPoly, LinExpr)>) {
    assert!(!base.is_zero(), "zero norm base");
    let nv = base.nvars();
    let mc = base.monomial_content();
    for (i, &k) in mc.0.iter().enumerate() {
        if k != 0 {
            out.push((IntPoly::var(nv, i), e.scale_int(k as i64)));
        }
    }
    let rest = base.shift(&mc.inverse());
    let c = rest.content().abs();
    if !c.is_one() {
        out.push((IntPoly::constant(nv, c), e.clone()));
    }
    let prim = rest.primitive_part();
    if !prim.is_constant() {
        out.push((prim, e.clone()));
    }
}

fn merge(items: &mut Vec<(IntPoly, LinExpr)>) {
    let mut merged: Vec<(IntPoly, LinExpr)> = Vec::new();
    for (b, e) in items.drain(..) {
        match merged.iter_mut().find(|(x, _)| *x == b) {
            Some((_, acc)) => *acc = &*acc + &e,
            None => merged.push((b, e)),
        }
    }
    merged.retain(|(b, e)| !e.is_zero() && !(b.is_constant() && b.constant_term().is_one()));
    *items = merged;
}

/// Nontrivial common part of two canonical bases, if any.
fn common(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    match (a.is_constant(), b.is_constant()) {
        (true, true) => {
            let g = a.constant_term().gcd(&b.constant_term());
            (!g.is_one()).then(|| IntPoly::constant(a.nvars(), g))
        }
        (false, false) => {
            let g = gcd(a, b);
            (!g.is_constant()).then_some(g)
        }
        _ => None,
    }
}

fn exact(a: &IntPoly, g: &IntPoly) -> IntPoly {
    if a.is_constant() {
        IntPoly::constant(a.nvars(), a.constant_term() / g.constant_term())
    } else {
        a.div_exact(g)
    }
}

/// One refinement step; `false` once the basis is coprime and squarefree.
fn split_once(items: &mut Vec<(IntPoly, LinExpr)>) -> bool {
    for i in 0..items.len() {
        let b = &items[i].0;
        if !b.is_constant() {
            let sf = b.squarefree().primitive_part();
            if sf != *b {
                let (b, e) = items.swap_remove(i);
                let rest = b.div_exact(&sf);
                decompose(&sf, &e, items);
                decompose(&rest, &e, items);
                return true;
            }
        }
    }
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if let Some(g) = common(&items[i].0, &items[j].0) {
                let (bj, ej) = items.swap_remove(j);
                let (bi, ei) = items.swap_remove(i);
                decompose(&exact(&bi, &g), &ei, items);
                decompose(&exact(&bj, &g), &ej, items);
                decompose(&g, &(&ei + &ej), items);
                return true;
            }
        }
    }
    false
}

fn canonicalize(raw: Vec<(IntPoly, LinExpr)>) -> Vec<PrefactorTerm> {
    let mut items = Vec::new();
    for (b, e) in &raw {
        if !e.is_zero() {
            decompose(b, e, &mut items);
        }
    }
    loop {
        merge(&mut items);
        if !split_once(&mut items) {
            break;
        }
    }
    let mut terms: Vec<PrefactorTerm> = items
        .into_iter()
        .map(|(base, exponent)| PrefactorTerm { base, exponent })
        .collect();
    terms.sort_by_cached_key(|t| (t.base.is_constant(), t.base.total_degree(), t.base.to_string_with(&LM_NAMES)));
    terms
}

impl Prefactor {
    pub fn new<I: IntoIterator<Item = (IntPoly, LinExpr)>>(factors: I) -> Self {
        Prefactor {
            terms: canonicalize(factors.into_iter().collect()),
        }
    }

    /// Build from `(base, exponent)` text pairs in `(L, M)`.
    pub fn from_pairs(pairs: &[(&str, LinExpr)]) -> Self {
        Prefactor::new(pairs.iter().map(|(b, e)| (lm_poly(b), e.clone())))
    }

    pub fn terms(&self) -> &[PrefactorTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self / other`.
    pub fn ratio(&self, other: &Prefactor) -> Prefactor {
        Prefactor::new(
            self.terms
                .iter()
                .map(|t| (t.base.clone(), t.exponent.clone()))
                .chain(other.terms.iter().map(|t| (t.base.clone(), -&t.exponent))),
        )
    }

    /// Identical as formal products (after joint refinement).
    pub fn equivalent(&self, other: &Prefactor) -> bool {
        self.ratio(other).is_empty()
    }

    pub fn exponent_of(&self, base: &IntPoly) -> Option<&LinExpr> {
        self.terms.iter().find(|t| t.base == *base).map(|t| &t.exponent)
    }

    /// `ln Π |B(L, M)|^{2e}` over F = C (‖w‖ = |w|²).
    pub fn log_eval(&self, l: Complex64, m: Complex64, values: &HashMap<String, f64>) -> Result<f64, String> {
        let mut acc = 0.0;
        for t in &self.terms {
            let b = t.base.eval_complex(&[l, m]).norm();
            acc += 2.0 * t.exponent.eval(values)? * b.ln();
        }
        Ok(acc)
    }

    pub fn views(&self) -> Vec<FactorView> {
        self.terms
            .iter()
            .map(|t| FactorView {
                base: t.base.to_string_with(&LM_NAMES),
                exponent: t.exponent.to_string(),
            })
            .collect()
    }
}

impl fmt::Display for Prefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "‖{}‖", t.base.to_string_with(&LM_NAMES))?;
            if t.exponent != LinExpr::int(1) {
                if t.exponent.is_constant() && !t.exponent.constant_part().is_negative() {
                    write!(f, "^{}", t.exponent)?;
                } else {
                    write!(f, "^({})", t.exponent)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorView {
    pub base: String,
    pub exponent: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub prefactor: Prefactor,
    /// Primitive, positive leading coefficient, no monomial factor.
    pub delta: IntPoly,
    /// Factors removed from the delta because they are assumed
    /// non-vanishing on the support (they share a factor with a logged base).
    pub spurious: Vec<IntPoly>,
}

/// JSON shape of a closed form.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormView {
    pub prefactor: Vec<FactorView>,
    pub prefactor_text: String,
    pub delta: String,
    pub apoly_presentation: String,
    pub spurious: Vec<String>,
}

impl ClosedForm {
    pub fn delta_text(&self) -> String {
        self.delta.to_string_with(&LM_NAMES)
    }

    /// `P(l, m²)`: the delta argument in the usual A-polynomial variables.
    pub fn apoly_polynomial(&self) -> IntPoly {
        let mut out = IntPoly::zero(2);
        for (mono, c) in self.delta.terms() {
            out.add_term(Monomial(vec![mono.0[0], 2 * mono.0[1]]), c.clone());
        }
        out
    }

    pub fn apoly_presentation(&self) -> String {
        format!("A(l, m) = {}", self.apoly_polynomial().to_string_with(&["l", "m"]))
    }

    pub fn view(&self) -> ClosedFormView {
        ClosedFormView {
            prefactor: self.prefactor.views(),
            prefactor_text: self.prefactor.to_string(),
            delta: self.delta_text(),
            apoly_presentation: self.apoly_presentation(),
            spurious: self.spurious.iter().map(|p| p.to_string_with(&LM_NAMES)).collect(),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} δ({})", self.prefactor, self.delta_text())
    }
}

struct Rewriter<'a> {
    lattice: &'a AngleLattice,
    sys: &'a DeltaSystem,
    cache: HashMap<Vec<i64>, HolonomyMonomial>,
}

impl Rewriter<'_> {
    fn not_expressible(&self, what: String) -> ReduceError {
        ReduceError::NotExpressible {
            monomial: what,
            trace: self.sys.trace.clone(),
        }
    }

    /// Angle polynomial `p = m0 · Σ c ± L^p M^q` with `m0` its leading
    /// monomial (only ratios of terms lie in the holonomy lattice).
    fn lm_form(&mut self, p: &IntPoly) -> Result<(Vec<i32>, IntPoly), ReduceError> {
        let m0 = p.leading_term().expect("nonzero").0.clone();
        let mut q = IntPoly::zero(2);
        for (mono, c) in p.terms() {
            let diff: Vec<i64> = mono.0.iter().zip(&m0.0).map(|(a, b)| (a - b) as i64).collect();
            let h = match self.cache.get(&diff) {
                Some(h) => *h,
                None => {
                    let found = self
                        .lattice
                        .rewrite(&diff)
                        .map_err(|e| self.not_expressible(format!("{diff:?}: {e}")))?;
                    let h = found.ok_or_else(|| self.not_expressible(format!("{diff:?}")))?;
                    self.cache.insert(diff, h);
                    h
                }
            };
            let c = if h.negative { -c.clone() } else { c.clone() };
            q.add_term(Monomial(vec![h.lambda as i32, h.mu as i32]), c);
        }
        Ok((m0.0, q))
    }
}

/// Solve `pool = p·λ + q·μ + Σ r_i·balance_i` over Q with affine right-hand
/// sides; returns `(p, q)`. Leftover rows must vanish modulo `relations`.
fn solve_pool(
    lattice: &AngleLattice,
    pool: &[LinExpr],
    relations: &[LinExpr],
) -> Result<(LinExpr, LinExpr), String> {
    let cols: Vec<&Vec<i64>> = [&lattice.lambda.exponents, &lattice.mu.exponents]
        .into_iter()
        .chain(lattice.balance.iter().map(|b| &b.exponents))
        .collect();
    let rat = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut rows: Vec<(Vec<BigRational>, LinExpr)> = (0..pool.len())
        .map(|i| (cols.iter().map(|c| rat(c[i])).collect(), pool[i].clone()))
        .collect();
    let ncols = cols.len();
    let mut pivot_of = vec![None; ncols];
    let mut r = 0;
    #[allow(clippy::needless_range_loop)] // c indexes every row too
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r].0[c].clone();
        let (coef, rhs) = rows[r].clone();
        let coef: Vec<BigRational> = coef.iter().map(|x| x * &inv).collect();
        let rhs = rhs.scale(&inv);
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row.0[c].is_zero() {
                let f = row.0[c].clone();
                for (x, k) in row.0.iter_mut().zip(&coef) {
                    *x -= k * &f;
                }
                row.1 = &row.1 - &rhs.scale(&f);
            }
        }
        rows[r] = (coef, rhs);
        pivot_of[c] = Some(r);
        r += 1;
    }
    for (_, rhs) in &rows[r..] {
        let reduced = lin_reduce(rhs, relations, &[LAM_DOT, MU_DOT]).map_err(|e| e.to_string())?;
        if !reduced.is_zero() {
            return Err(format!("angle monomial pool leaves residue {reduced}"));
        }
    }
    let value = |c: usize| pivot_of[c].map_or_else(LinExpr::zero, |i| rows[i].1.clone());
    Ok((value(0), value(1)))
}

/// Rewrite a fully reduced system (one delta, no live edges) in `(L, M)`.
pub fn rewrite_holonomies(sys: &DeltaSystem, tri: &Triangulation) -> Result<ClosedForm, ReduceError> {
    assert!(sys.live.is_empty() && sys.deltas.len() == 1, "system not fully reduced");
    let n = sys.tet_count;
    let m = sys.edge_count;
    let mapping: Vec<Option<usize>> = (0..m + 2 * n).map(|v| v.checked_sub(m)).collect();
    let lattice = AngleLattice::new(tri);
    let relations = lattice.real_relations();
    let mut rw = Rewriter {
        lattice: &lattice,
        sys,
        cache: HashMap::new(),
    };
    let mut pool = vec![LinExpr::zero(); 2 * n];
    let mut raw: Vec<(IntPoly, LinExpr)> = Vec::new();
    for f in &sys.norm_factors {
        let (m0, q) = rw.lm_form(&f.base.remap(2 * n, &mapping))?;
        for (slot, &k) in pool.iter_mut().zip(&m0) {
            *slot = &*slot + &f.exponent.scale_int(k as i64);
        }
        raw.push((q, f.exponent.clone()));
    }
    let (m0, q) = rw.lm_form(&sys.deltas[0].remap(2 * n, &mapping))?;
    for (slot, &k) in pool.iter_mut().zip(&m0) {
        *slot = &*slot - &LinExpr::int(k as i64);
    }
    // δ(u · P) = ‖u‖^{−1} δ(P) for the monomial-and-content part u.
    let mut delta = q.normalize_unit();
    let unit = q.div_exact(&delta);
    raw.push((unit, LinExpr::int(-1)));

    let (p_l, p_m) = solve_pool(&lattice, &pool, &relations).map_err(|e| rw.not_expressible(e))?;
    raw.push((IntPoly::var(2, 0), p_l));
    raw.push((IntPoly::var(2, 1), p_m));

    // Strip delta factors shared with logged bases: assumed non-vanishing
    // on the support, so δ(g·P) = ‖g‖^{−1} δ(P).
    let mut pieces = Vec::new();
    for (b, e) in &raw {
        decompose(b, e, &mut pieces);
    }
    let mut spurious = Vec::new();
    for (b, _) in &pieces {
        if b.is_constant() {
            continue;
        }
        loop {
            let g = gcd(&delta, b);
            if g.is_constant() || g == delta {
                break;
            }
            delta = delta.div_exact(&g).normalize_unit();
            raw.push((g.clone(), LinExpr::int(-1)));
            spurious.push(g);
        }
    }

    let mut reduced = Vec::with_capacity(raw.len());
    for (b, e) in raw {
        let e = lin_reduce(&e, &relations, &[LAM_DOT, MU_DOT]).map_err(|err| rw.not_expressible(err.to_string()))?;
        reduced.push((b, e));
    }
    Ok(ClosedForm {
        prefactor: Prefactor::new(reduced),
        delta,
        spurious,
    })
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub closed: ClosedForm,
    pub system: DeltaSystem,
    pub options: ReduceOptions,
}

impl Reduction {
    pub fn trace(&self) -> &[String] {
        &self.system.trace
    }
}

pub fn reduce_with(tri: &Triangulation, opts: &ReduceOptions) -> Result<Reduction, ReduceError> {
    let system = eliminate_all(tri, opts)?;
    let closed = rewrite_holonomies(&system, tri)?;
    Ok(Reduction {
        closed,
        system,
        options: opts.clone(),
    })
}

pub fn reduce_partition_function(tri: &Triangulation) -> Result<ClosedForm, ReduceError> {
    reduce_with(tri, &ReduceOptions::default()).map(|r| r.closed)
}

/// Every `(gauge, delta order)` reduction of `tri`.
pub fn reduce_all(tri: &Triangulation) -> Vec<(ReduceOptions, Result<Reduction, ReduceError>)> {
    crate::reduce::all_options(tri)
        .into_iter()
        .map(|o| {
            let r = reduce_with(tri, &o);
            (o, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn e(s: &str, c: i64) -> LinExpr {
        &LinExpr::symbol(s) + &LinExpr::int(c)
    }

    #[test]
    fn coprime_refinement() {
        // ‖M² − 1‖ = ‖M − 1‖ ‖M + 1‖; ‖6‖‖4‖^{-1} = ‖2‖^0... = ‖3‖‖2‖^{-1}
        let a = Prefactor::from_pairs(&[("M^2 - 1", LinExpr::int(1)), ("6", LinExpr::int(1)), ("4", LinExpr::int(-1))]);
        let b = Prefactor::from_pairs(&[("M - 1", LinExpr::int(1)), ("M + 1", LinExpr::int(1)), ("3", LinExpr::int(1)), ("2", LinExpr::int(-1))]);
        assert!(a.equivalent(&b));
        let c = Prefactor::from_pairs(&[("M - M^-1", LinExpr::int(1)), ("M^2 - 2*M + 1", LinExpr::int(0))]);
        let d = Prefactor::from_pairs(&[("M^2 - 1", LinExpr::int(1)), ("M", LinExpr::int(-1))]);
        assert!(c.equivalent(&d));
        assert!(!a.equivalent(&d));
    }

    #[test]
    fn squares_are_split() {
        let a = Prefactor::from_pairs(&[("M^2 - 2*M + 1", LinExpr::symbol("x"))]);
        assert_eq!(a.terms().len(), 1);
        assert_eq!(a.terms()[0].exponent, LinExpr::symbol("x").scale_int(2));
    }

    #[test]
    fn trefoil_closed_form() {
        let cf = reduce_partition_function(&fixtures::trefoil()).unwrap();
        assert_eq!(cf.delta_text(), "L*M^3 + 1");
        let want = Prefactor::from_pairs(&[("L", LinExpr::symbol(MU_DOT)), ("M", e(LAM_DOT, 1).scale_int(-1))]);
        assert!(cf.prefactor.equivalent(&want), "got {}", cf.prefactor);
        assert_eq!(cf.spurious, vec![lm_poly("L*M^2 - 1")]);
        assert_eq!(cf.apoly_presentation(), "A(l, m) = l*m^6 + 1");
    }

    #[test]
    fn figure_eight_closed_form() {
        let cf = reduce_partition_function(&fixtures::figure_eight()).unwrap();
        assert_eq!(cf.delta, lm_poly("L^2*M^2 + L*M^4 - L*M^3 - 2*L*M^2 - L*M + L + M^2"));
        let want = Prefactor::from_pairs(&[
            ("L", e(MU_DOT, 1)),
            ("M", (&LinExpr::int(3) - &LinExpr::symbol(LAM_DOT))),
            ("M - 1", LinExpr::int(1)),
            ("M + 1", LinExpr::int(1)),
        ]);
        assert!(cf.prefactor.equivalent(&want), "got {}", cf.prefactor);
    }

    #[test]
    fn five_two_closed_form() {
        let cf = reduce_partition_function(&fixtures::five_two()).unwrap();
        assert_eq!(
            cf.delta,
            lm_poly("L^3*M^7 - L^2*M^7 + 2*L^2*M^6 + 2*L^2*M^5 - L^2*M^3 + L^2*M^2 + L*M^5 - L*M^4 + 2*L*M^2 + 2*L*M - L + 1")
        );
        let want = Prefactor::from_pairs(&[
            ("L", e(MU_DOT, 1)),
            ("M", (&LinExpr::int(2) - &LinExpr::symbol(LAM_DOT))),
            ("M - 1", LinExpr::int(1)),
            ("M + 1", LinExpr::int(1)),
            ("L*M^3 + 1", LinExpr::int(1)),
        ]);
        assert!(cf.prefactor.equivalent(&want), "got {}", cf.prefactor);
    }
}

#[cfg(test)]
mod invariance {
    use super::*;
    use crate::fixtures;

    #[test]
    fn every_gauge_and_order_gives_the_same_delta() {
        for (name, tri) in fixtures::all() {
            let base = reduce_partition_function(&tri).unwrap();
            for (opts, r) in reduce_all(&tri) {
                let r = r.unwrap_or_else(|e| panic!("{name} {opts:?}: {e}"));
                assert_eq!(r.closed.delta, base.delta, "{name} {opts:?}");
                println!("{name} {opts:?}: {}", r.closed);
            }
        }
    }
}
