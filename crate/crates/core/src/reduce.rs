//! Mechanical reduction of the B-type state integral: one delta constraint
//! per tetrahedron, norm prefactors with formal exponents, gauge fixing of
//! one edge variable, then sequential elimination of edge variables from
//! linear constraints with exact Jacobian bookkeeping.
//!
//! Ring layout: edge variables `0..M`, then `ä_j = M + 2j`, `c̈_j = M + 2j + 1`.
//! All norm bases and delta arguments are Laurent polynomials over Z.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;
use zft_algebra::{IntPoly, LinExpr, Monomial};

use crate::angles::{adot, cdot};
use crate::tri::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no delta is linear in a live variable and no pseudo-remainder step applies (degrees: {degrees})")]
    NotLinear { degrees: String, trace: Vec<String> },
    #[error("monomial {monomial} is not expressible in the holonomy variables")]
    NotExpressible { monomial: String, trace: Vec<String> },
    #[error("degenerate reduction: {reason}")]
    Degenerate { reason: String, trace: Vec<String> },
    #[error("invalid option: {0}")]
    BadOption(String),
}

impl ReduceError {
    pub fn trace(&self) -> &[String] {
        match self {
            ReduceError::NotLinear { trace, .. }
            | ReduceError::NotExpressible { trace, .. }
            | ReduceError::Degenerate { trace, .. } => trace,
            ReduceError::BadOption(_) => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormFactor {
    pub base: IntPoly,
    pub exponent: LinExpr,
}

#[derive(Clone, Debug)]
pub struct DeltaSystem {
    pub edge_count: usize,
    pub tet_count: usize,
    pub names: Vec<String>,
    pub deltas: Vec<IntPoly>,
    /// Originating tetrahedron of each delta (kept through pseudo-remainders).
    pub delta_tags: Vec<usize>,
    pub norm_factors: Vec<NormFactor>,
    pub live: Vec<usize>,
    /// Every denominator, Jacobian and leading coefficient assumed
    /// non-vanishing on the support, in the ring at the time it was logged.
    pub cleared: Vec<IntPoly>,
    pub trace: Vec<String>,
}

impl DeltaSystem {
    pub fn nvars(&self) -> usize {
        self.edge_count + 2 * self.tet_count
    }

    pub fn a_var(&self, j: usize) -> usize {
        self.edge_count + 2 * j
    }

    pub fn c_var(&self, j: usize) -> usize {
        self.edge_count + 2 * j + 1
    }

    pub fn render(&self, p: &IntPoly) -> String {
        let refs: Vec<&str> = self.names.iter().map(String::as_str).collect();
        p.to_string_with(&refs)
    }

    fn push_norm(&mut self, base: IntPoly, exponent: LinExpr) {
        if exponent.is_zero() || is_unit_constant(&base) {
            return;
        }
        self.norm_factors.push(NormFactor { base, exponent });
    }

    fn log_cleared(&mut self, p: &IntPoly) {
        if !p.is_monomial() && !self.cleared.contains(p) {
            self.cleared.push(p.clone());
        }
    }
}

fn is_unit_constant(p: &IntPoly) -> bool {
    p.is_constant() && p.constant_term().abs().is_one()
}

pub fn build_integrand(tri: &Triangulation) -> DeltaSystem {
    let m = tri.edge_count();
    let n = tri.tet_count();
    let nv = m + 2 * n;
    let mut names = tri.edge_names.clone();
    for j in 0..n {
        names.push(format!("a{j}"));
        names.push(format!("c{j}"));
    }
    let mut sys = DeltaSystem {
        edge_count: m,
        tet_count: n,
        names,
        deltas: Vec::new(),
        delta_tags: Vec::new(),
        norm_factors: Vec::new(),
        live: (0..m).collect(),
        cleared: Vec::new(),
        trace: Vec::new(),
    };
    for (j, tet) in tri.tets.iter().enumerate() {
        let s = &tet.slots;
        // X = x02 x13 / (x03 x12), Z = x01 x23 / (x02 x13)
        let mut x = vec![0i32; nv];
        let mut z = vec![0i32; nv];
        x[s[1]] += 1;
        x[s[4]] += 1;
        x[s[2]] -= 1;
        x[s[3]] -= 1;
        z[s[0]] += 1;
        z[s[5]] += 1;
        z[s[1]] -= 1;
        z[s[4]] -= 1;
        let (a, c) = (sys.a_var(j), sys.c_var(j));
        let (first, second) = if tet.is_positive() {
            // 1/(X ä) + Z c̈ − 1; ‖X ä‖^{−ċ} ‖Z c̈‖^{ȧ}
            let mut xa = x.clone();
            xa[a] += 1;
            let mut zc = z.clone();
            zc[c] += 1;
            let exps = (
                LinExpr::symbol(&cdot(j)).scale_int(-1),
                LinExpr::symbol(&adot(j)),
            );
            let delta = IntPoly::from_terms(
                nv,
                [
                    (Monomial(xa.clone()).inverse().0, BigInt::one()),
                    (zc.clone(), BigInt::one()),
                    (vec![0; nv], -BigInt::one()),
                ],
            );
            sys.deltas.push(delta);
            ((xa, exps.0), (zc, exps.1))
        } else {
            // ä/X + Z/c̈ − 1; ‖ä/X‖^{ċ} ‖Z/c̈‖^{ȧ}
            let mut ax: Vec<i32> = x.iter().map(|e| -e).collect();
            ax[a] += 1;
            let mut zc = z.clone();
            zc[c] -= 1;
            let delta = IntPoly::from_terms(
                nv,
                [
                    (ax.clone(), BigInt::one()),
                    (zc.clone(), BigInt::one()),
                    (vec![0; nv], -BigInt::one()),
                ],
            );
            sys.deltas.push(delta);
            ((ax, LinExpr::symbol(&cdot(j))), (zc, LinExpr::symbol(&adot(j))))
        };
        sys.delta_tags.push(j);
        for (exps, e) in [first, second] {
            sys.push_norm(IntPoly::monomial(nv, exps, BigInt::one()), e);
        }
    }
    // Measure d_B v = d_F v / ‖v‖.
    for v in 0..m {
        sys.push_norm(IntPoly::var(nv, v), LinExpr::int(-1));
    }
    sys
}

/// `p` with variable `var` set to 1.
fn set_one(p: &IntPoly, var: usize) -> IntPoly {
    let mut out = IntPoly::zero(p.nvars());
    for (m, c) in p.terms() {
        let mut e = m.0.clone();
        e[var] = 0;
        out.add_term(Monomial(e), c.clone());
    }
    out
}

/// Fix edge `edge` to 1 (scale invariance of every weight argument).
pub fn gauge_fix(mut sys: DeltaSystem, edge: usize) -> DeltaSystem {
    assert!(sys.live.contains(&edge), "gauge edge {edge} is not live");
    sys.deltas = sys.deltas.iter().map(|d| set_one(d, edge)).collect();
    let factors = std::mem::take(&mut sys.norm_factors);
    for f in factors {
        sys.push_norm(set_one(&f.base, edge), f.exponent);
    }
    sys.live.retain(|&v| v != edge);
    sys.trace.push(format!("gauge {} = 1", sys.names[edge]));
    sys
}

/// Substitute `v = −β0/α` into `p`: returns `(num, kmin, kmax)` with
/// `p(−β0/α) = (−β0)^{kmin} α^{−kmax} · num`.
fn substitute_linear(p: &IntPoly, v: usize, alpha: &IntPoly, beta0: &IntPoly) -> (IntPoly, i32, i32) {
    let coeffs = p.coeffs_in(v);
    let (Some(&kmin), Some(&kmax)) = (coeffs.keys().next(), coeffs.keys().next_back()) else {
        return (p.clone(), 0, 0);
    };
    if kmin == 0 && kmax == 0 {
        return (p.clone(), 0, 0);
    }
    let neg_beta = -beta0;
    let mut num = IntPoly::zero(p.nvars());
    for (&k, c) in &coeffs {
        let term = &(c * &neg_beta.pow((k - kmin) as u32)) * &alpha.pow((kmax - k) as u32);
        num += &term;
    }
    (num, kmin, kmax)
}

fn degenerate(sys: &DeltaSystem, reason: String) -> ReduceError {
    ReduceError::Degenerate {
        reason,
        trace: sys.trace.clone(),
    }
}

/// Clear the monomial content of delta `k` (δ(m·n) = ‖m‖^{−1} δ(n)).
fn clear_monomial(sys: &mut DeltaSystem, k: usize) -> Result<(), ReduceError> {
    let d = &sys.deltas[k];
    if d.is_zero() {
        return Err(degenerate(sys, format!("delta from tetrahedron {} vanished identically", sys.delta_tags[k])));
    }
    let mc = d.monomial_content();
    if !mc.is_one() {
        let nv = sys.nvars();
        sys.deltas[k] = d.shift(&mc.inverse());
        sys.push_norm(IntPoly::monomial(nv, mc.0, BigInt::one()), LinExpr::int(-1));
    }
    if sys.deltas[k].is_constant() {
        return Err(degenerate(
            sys,
            format!("delta from tetrahedron {} became the constant {}", sys.delta_tags[k], sys.deltas[k]),
        ));
    }
    Ok(())
}

/// Linear form `α v + β0` of delta `k` in `v`, if it is degree one.
fn linear_form(sys: &DeltaSystem, k: usize, v: usize) -> Option<(IntPoly, IntPoly)> {
    let d = &sys.deltas[k];
    if d.degree_in(v) != Some(1) || d.min_degree_in(v) != Some(0) {
        return None;
    }
    let c = d.coeffs_in(v);
    let beta0 = c.get(&0).cloned().unwrap_or_else(|| IntPoly::zero(d.nvars()));
    Some((c[&1].clone(), beta0))
}

/// Integrate out `v` against delta `k`, which must be linear in `v`.
pub fn eliminate_delta(mut sys: DeltaSystem, k: usize, v: usize) -> Result<DeltaSystem, ReduceError> {
    clear_monomial(&mut sys, k)?;
    let Some((alpha, beta0)) = linear_form(&sys, k, v) else {
        return Err(ReduceError::NotLinear {
            degrees: format!(
                "delta {} has degree {:?} in {}",
                sys.delta_tags[k],
                sys.deltas[k].degree_in(v),
                sys.names[v]
            ),
            trace: sys.trace.clone(),
        });
    };
    if beta0.is_zero() {
        return Err(degenerate(&sys, format!("{} forced to 0", sys.names[v])));
    }
    let line = format!(
        "delta {} linear in {}: {} = ({}) / ({})",
        sys.delta_tags[k],
        sys.names[v],
        sys.names[v],
        sys.render(&-&beta0),
        sys.render(&alpha)
    );
    sys.trace.push(line);
    sys.log_cleared(&alpha);
    sys.log_cleared(&beta0);
    sys.deltas.remove(k);
    sys.delta_tags.remove(k);
    // ∫ δ(α v + β0) φ(v) d_F v = ‖α‖^{−1} φ(−β0/α)
    sys.push_norm(alpha.clone(), LinExpr::int(-1));
    let factors = std::mem::take(&mut sys.norm_factors);
    for f in factors {
        let (num, kmin, kmax) = substitute_linear(&f.base, v, &alpha, &beta0);
        if num.is_zero() {
            return Err(degenerate(&sys, format!("norm base {} vanishes", sys.render(&f.base))));
        }
        sys.push_norm(beta0.clone(), f.exponent.scale_int(kmin as i64));
        sys.push_norm(alpha.clone(), f.exponent.scale_int(-(kmax as i64)));
        sys.push_norm(num, f.exponent);
    }
    for i in 0..sys.deltas.len() {
        let (num, kmin, kmax) = substitute_linear(&sys.deltas[i], v, &alpha, &beta0);
        // δ((−β0)^{kmin} α^{−kmax} num) = ‖β0‖^{−kmin} ‖α‖^{kmax} δ(num)
        sys.push_norm(beta0.clone(), LinExpr::int(-(kmin as i64)));
        sys.push_norm(alpha.clone(), LinExpr::int(kmax as i64));
        sys.deltas[i] = num;
        clear_monomial(&mut sys, i)?;
    }
    sys.live.retain(|&x| x != v);
    debug_assert_eq!(sys.deltas.len(), sys.live.len() + 1);
    Ok(sys)
}

/// Replace `g` by `prem(g, f)` in `v`: δ(f)δ(g) = ‖lc(f)‖^k δ(f) δ(prem).
fn pseudo_remainder_step(sys: &mut DeltaSystem, priority: &[usize]) -> Result<bool, ReduceError> {
    for &v in &sys.live.clone() {
        let mut cands: Vec<usize> = (0..sys.deltas.len()).filter(|&i| sys.deltas[i].contains_var(v)).collect();
        if cands.len() < 2 {
            continue;
        }
        cands.sort_by_key(|&i| {
            let d = &sys.deltas[i];
            (d.degree_in(v).unwrap_or(0), d.len(), priority[sys.delta_tags[i]])
        });
        let (fi, gi) = (cands[0], cands[1]);
        let f = sys.deltas[fi].clone();
        let g = sys.deltas[gi].clone();
        let k = g.degree_in(v).unwrap() - f.degree_in(v).unwrap() + 1;
        let lc = f.lc_in(v);
        let r = g.prem(&f, v);
        sys.trace.push(format!(
            "no linear delta; pseudo-remainder of delta {} by delta {} in {}",
            sys.delta_tags[gi], sys.delta_tags[fi], sys.names[v]
        ));
        sys.log_cleared(&lc);
        sys.push_norm(lc, LinExpr::int(k as i64));
        sys.deltas[gi] = r;
        clear_monomial(sys, gi)?;
        return Ok(true);
    }
    Ok(false)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Edge fixed to 1; default the last edge.
    pub gauge: Option<usize>,
    /// Priority permutation of the deltas (by tetrahedron); default identity.
    pub delta_order: Option<Vec<usize>>,
}

/// Gauge fix, then eliminate every live variable. The result has one delta
/// and no live variables.
pub fn eliminate_all(tri: &Triangulation, opts: &ReduceOptions) -> Result<DeltaSystem, ReduceError> {
    let m = tri.edge_count();
    let n = tri.tet_count();
    let gauge = opts.gauge.unwrap_or(m - 1);
    if gauge >= m {
        return Err(ReduceError::BadOption(format!("gauge edge {gauge} out of range (edges: {m})")));
    }
    let order = opts.delta_order.clone().unwrap_or_else(|| (0..n).collect());
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(ReduceError::BadOption(format!("delta order {order:?} is not a permutation of 0..{n}")));
    }
    let mut priority = vec![0; n];
    for (rank, &t) in order.iter().enumerate() {
        priority[t] = rank;
    }

    let mut sys = gauge_fix(build_integrand(tri), gauge);
    for k in 0..sys.deltas.len() {
        clear_monomial(&mut sys, k)?;
    }
    let mut guard = 0;
    while !sys.live.is_empty() {
        guard += 1;
        if guard > 200 {
            return Err(degenerate(&sys, "reduction did not terminate".into()));
        }
        let mut by_priority: Vec<usize> = (0..sys.deltas.len()).collect();
        by_priority.sort_by_key(|&i| priority[sys.delta_tags[i]]);
        let pick = sys
            .live
            .iter()
            .find_map(|&v| by_priority.iter().find(|&&k| linear_form(&sys, k, v).is_some()).map(|&k| (k, v)));
        match pick {
            Some((k, v)) => sys = eliminate_delta(sys, k, v)?,
            None => {
                if !pseudo_remainder_step(&mut sys, &priority)? {
                    let degrees = sys
                        .live
                        .iter()
                        .map(|&v| {
                            let ds: Vec<String> = sys
                                .deltas
                                .iter()
                                .map(|d| d.degree_in(v).map_or("-".into(), |x| x.to_string()))
                                .collect();
                            format!("{}: [{}]", sys.names[v], ds.join(", "))
                        })
                        .collect::<Vec<_>>()
                        .join("; ");
                    return Err(ReduceError::NotLinear {
                        degrees,
                        trace: sys.trace.clone(),
                    });
                }
            }
        }
    }
    assert_eq!(sys.deltas.len(), 1, "terminal state has exactly one delta");
    let last = sys.render(&sys.deltas[0]);
    sys.trace.push(format!("remaining delta: {last}"));
    Ok(sys)
}

/// Original (gauge-fixed, pre-clearing) delta arguments, for numeric checks.
pub fn original_deltas(tri: &Triangulation, gauge: Option<usize>) -> DeltaSystem {
    let m = tri.edge_count();
    gauge_fix(build_integrand(tri), gauge.unwrap_or(m - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentView {
    pub base: String,
    pub exponent: String,
}

pub fn norm_view(sys: &DeltaSystem) -> Vec<ExponentView> {
    sys.norm_factors
        .iter()
        .map(|f| ExponentView {
            base: sys.render(&f.base),
            exponent: f.exponent.to_string(),
        })
        .collect()
}

/// All `M × N!` (gauge, delta order) combinations.
pub fn all_options(tri: &Triangulation) -> Vec<ReduceOptions> {
    let mut out = Vec::new();
    for g in 0..tri.edge_count() {
        for order in crate::apoly::all_orders(tri.tet_count()) {
            out.push(ReduceOptions {
                gauge: Some(g),
                delta_order: Some(order),
            });
        }
    }
    out
}
