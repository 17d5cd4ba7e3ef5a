//! Floating-point cross-checks over F = C (‖w‖ = |w|²): sampling the
//! support of the reduced delta on the curve P(λ̈, μ̈) = 0, solving the
//! original edge constraints there, rejecting perturbed points, and
//! comparing prefactors of different reduction orders on the support.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use zft_algebra::{smith_normal_form, ComplexPoly, IntPoly};

use crate::angles::{multiplicative, real_part, AngleLattice, LAM_DOT, MU_DOT};
use crate::closed::{ClosedForm, Prefactor, Reduction};
use crate::linalg::{affine_sample, levenberg_marquardt, polynomial_roots};
use crate::reduce::{original_deltas, DeltaSystem};
use crate::tri::Triangulation;

type C64 = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub max_error: f64,
    pub samples: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<Check>,
    pub seed: u64,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportSample {
    pub mu: [f64; 2],
    pub lambda: [f64; 2],
    /// Values of every edge variable (the gauge edge is 1).
    pub edge_values: Vec<[f64; 2]>,
    pub residual: f64,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Everything needed to evaluate the original constraints of one
/// triangulation at numeric angle values.
pub struct SupportOracle {
    pub lattice: AngleLattice,
    pub system: DeltaSystem,
    pub cleared: Vec<IntPoly>,
    pub closed: ClosedForm,
    gauge: usize,
}

/// Drop coefficients below `1e−11 ×` the largest (cancellation noise).
fn prune(p: &ComplexPoly) -> ComplexPoly {
    let top = p.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let mut out = ComplexPoly::zero(p.nvars());
    for (m, c) in p.terms() {
        if c.norm() > 1e-11 * top {
            out.add_term(m.clone(), *c);
        }
    }
    out
}

fn clear_monomial(p: &ComplexPoly) -> ComplexPoly {
    p.shift(&p.monomial_content().inverse())
}

fn eval_at(p: &ComplexPoly, point: &[C64]) -> C64 {
    let mut acc = C64::zero();
    for (m, c) in p.terms() {
        let mut t = *c;
        for (x, &e) in point.iter().zip(&m.0) {
            if e != 0 {
                t *= x.powi(e);
            }
        }
        acc += t;
    }
    acc
}

/// Value and gradient with respect to `vars`.
fn eval_grad(p: &ComplexPoly, point: &[C64], vars: &[usize]) -> (C64, Vec<C64>) {
    let mut val = C64::zero();
    let mut grad = vec![C64::zero(); vars.len()];
    for (m, c) in p.terms() {
        let mut t = *c;
        for (x, &e) in point.iter().zip(&m.0) {
            if e != 0 {
                t *= x.powi(e);
            }
        }
        val += t;
        for (k, &v) in vars.iter().enumerate() {
            let e = m.0[v];
            if e != 0 {
                grad[k] += t * e as f64 / point[v];
            }
        }
    }
    (val, grad)
}

enum Step {
    Linear { var: usize, alpha: ComplexPoly, beta0: ComplexPoly },
    Root { var: usize, value: C64 },
}

/// Solve the (numeric) constraints for the live variables; each solution is
/// the list of steps in replay order (innermost elimination first).
fn solve_constraints(deltas: Vec<ComplexPoly>, live: Vec<usize>, depth: usize) -> Vec<Vec<Step>> {
    if live.is_empty() || depth > 16 {
        return vec![Vec::new()];
    }
    let deltas: Vec<ComplexPoly> = deltas
        .iter()
        .map(|d| clear_monomial(&prune(d)))
        .filter(|d| !d.is_zero())
        .collect();
    for &v in &live {
        for k in 0..deltas.len() {
            let d = &deltas[k];
            if d.degree_in(v) != Some(1) || d.min_degree_in(v) != Some(0) {
                continue;
            }
            let c = d.coeffs_in(v);
            let alpha = c[&1].clone();
            let beta0 = c.get(&0).cloned().unwrap_or_else(|| ComplexPoly::zero(d.nvars()));
            let neg_beta = -&beta0;
            let rest: Vec<ComplexPoly> = deltas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, p)| {
                    let coeffs = p.coeffs_in(v);
                    let kmin = *coeffs.keys().next().unwrap();
                    let kmax = *coeffs.keys().next_back().unwrap();
                    let mut num = ComplexPoly::zero(p.nvars());
                    for (&e, c) in &coeffs {
                        num += &(&(c * &neg_beta.pow((e - kmin) as u32)) * &alpha.pow((kmax - e) as u32));
                    }
                    num
                })
                .collect();
            let remaining: Vec<usize> = live.iter().copied().filter(|&x| x != v).collect();
            return solve_constraints(rest, remaining, depth + 1)
                .into_iter()
                .map(|mut steps| {
                    steps.push(Step::Linear {
                        var: v,
                        alpha: alpha.clone(),
                        beta0: beta0.clone(),
                    });
                    steps
                })
                .collect();
        }
    }
    // No linear constraint: branch over the roots of a univariate one.
    for (k, d) in deltas.iter().enumerate() {
        let in_live: Vec<usize> = live.iter().copied().filter(|&v| d.contains_var(v)).collect();
        if in_live.len() != 1 {
            continue;
        }
        let v = in_live[0];
        let deg = d.degree_in(v).unwrap_or(0) as usize;
        let mut coeffs = vec![C64::zero(); deg + 1];
        for (m, c) in d.terms() {
            coeffs[m.0[v] as usize] += *c;
        }
        let mut out = Vec::new();
        for root in polynomial_roots(&coeffs) {
            if root.norm() < 1e-12 || !root.is_finite() {
                continue;
            }
            let mut values = vec![None; d.nvars()];
            values[v] = Some(root);
            let rest: Vec<ComplexPoly> = deltas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, p)| p.partial_eval(&values))
                .collect();
            let remaining: Vec<usize> = live.iter().copied().filter(|&x| x != v).collect();
            for mut steps in solve_constraints(rest, remaining, depth + 1) {
                steps.push(Step::Root { var: v, value: root });
                out.push(steps);
            }
        }
        return out;
    }
    Vec::new()
}

impl SupportOracle {
    pub fn new(tri: &Triangulation, reduction: &Reduction) -> Self {
        let gauge = reduction.options.gauge.unwrap_or(tri.edge_count() - 1);
        SupportOracle {
            lattice: AngleLattice::new(tri),
            system: original_deltas(tri, Some(gauge)),
            cleared: reduction.system.cleared.clone(),
            closed: reduction.closed.clone(),
            gauge,
        }
    }

    /// Same oracle with a different closed form (for controls).
    pub fn with_closed(mut self, closed: ClosedForm) -> Self {
        self.closed = closed;
        self
    }

    fn live(&self) -> Vec<usize> {
        (0..self.system.edge_count).filter(|&v| v != self.gauge).collect()
    }

    /// Roots of `P(·, μ̈)`.
    pub fn lambda_roots(&self, mu: C64) -> Vec<C64> {
        let deg = self.closed.delta.degree_in(0).unwrap_or(0).max(0) as usize;
        let mut coeffs = vec![C64::zero(); deg + 1];
        for (m, c) in self.closed.delta.terms() {
            let c = C64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            coeffs[m.0[0] as usize] += c * mu.powi(m.0[1]);
        }
        polynomial_roots(&coeffs)
    }

    /// Multiplicative angle values `(ä_0, c̈_0, ä_1, …)` with every balance
    /// monomial equal to 1 and the given holonomies, via Smith normal form
    /// in log coordinates; free directions are drawn from `rng`.
    pub fn sample_angles<R: Rng>(&self, lambda: C64, mu: C64, rng: &mut R) -> Option<Vec<C64>> {
        let lat = &self.lattice;
        let n = 2 * lat.tet_count;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut rhs: Vec<C64> = Vec::new();
        let sign_log = |neg: bool| if neg { C64::new(0.0, PI) } else { C64::zero() };
        for b in &lat.balance {
            rows.push(b.exponents.clone());
            rhs.push(sign_log(b.negative));
        }
        for (mono, value) in [(&lat.lambda, lambda), (&lat.mu, mu)] {
            rows.push(mono.exponents.clone());
            let v = if mono.negative { -value } else { value };
            rhs.push(v.ln());
        }
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let snf = smith_normal_form(&big);
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        let ub: Vec<C64> = snf
            .u
            .iter()
            .map(|row| row.iter().zip(&rhs).map(|(u, b)| b * f(u)).sum())
            .collect();
        for c in &ub[snf.rank..] {
            let k = c.im / (2.0 * PI);
            if c.re.abs() > 1e-9 || (k - k.round()).abs() > 1e-9 {
                return None;
            }
        }
        let y: Vec<C64> = (0..n)
            .map(|i| {
                if i < snf.rank {
                    ub[i] / f(&snf.diag[i])
                } else {
                    C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-PI..PI))
                }
            })
            .collect();
        Some(
            (0..n)
                .map(|i| snf.v[i].iter().zip(&y).map(|(v, y)| y * f(v)).sum::<C64>().exp())
                .collect(),
        )
    }

    fn point(&self, edges: &[C64], angles: &[C64]) -> Vec<C64> {
        let mut p = edges.to_vec();
        p.extend_from_slice(angles);
        p
    }

    /// Max modulus of the original (uncleared) constraints.
    pub fn residual(&self, edges: &[C64], angles: &[C64]) -> f64 {
        let pt = self.point(edges, angles);
        self.system
            .deltas
            .iter()
            .map(|d| eval_at(&d.to_complex(), &pt).norm())
            .fold(0.0, f64::max)
    }

    /// Least-squares polish of the live edge values; returns the edges and
    /// final residual.
    fn polish(&self, start: &[C64], angles: &[C64]) -> (Vec<C64>, f64) {
        let live = self.live();
        let deltas: Vec<ComplexPoly> = self.system.deltas.iter().map(IntPoly::to_complex).collect();
        let base = self.point(start, angles);
        let system = |x: &[C64]| {
            let mut pt = base.clone();
            for (k, &v) in live.iter().enumerate() {
                pt[v] = x[k];
            }
            let mut r = Vec::new();
            let mut j = Vec::new();
            for d in &deltas {
                let (val, g) = eval_grad(d, &pt, &live);
                r.push(val);
                j.push(g);
            }
            (r, j)
        };
        let x0: Vec<C64> = live.iter().map(|&v| start[v]).collect();
        let (x, _) = levenberg_marquardt(&system, &x0, 100);
        let mut edges = start.to_vec();
        for (k, &v) in live.iter().enumerate() {
            edges[v] = x[k];
        }
        let res = self.residual(&edges, angles);
        if res.is_finite() {
            (edges, res)
        } else {
            (start.to_vec(), f64::INFINITY)
        }
    }

    /// Solve the original constraints at fixed angle values. Returns the
    /// best edge assignment and its residual.
    pub fn solve_edges(&self, angles: &[C64]) -> Option<(Vec<C64>, f64)> {
        let m = self.system.edge_count;
        let nv = self.system.nvars();
        let mut values: Vec<Option<C64>> = vec![None; nv];
        for (i, a) in angles.iter().enumerate() {
            values[m + i] = Some(*a);
        }
        let deltas: Vec<ComplexPoly> = self
            .system
            .deltas
            .iter()
            .map(|d| d.to_complex().partial_eval(&values))
            .collect();
        let mut best: Option<(Vec<C64>, f64)> = None;
        for steps in solve_constraints(deltas, self.live(), 0) {
            let mut pt = vec![C64::new(1.0, 0.0); nv];
            pt[m..].copy_from_slice(angles);
            let mut ok = true;
            for step in &steps {
                match step {
                    Step::Root { var, value } => pt[*var] = *value,
                    Step::Linear { var, alpha, beta0 } => {
                        let a = eval_at(alpha, &pt);
                        if a.norm() == 0.0 {
                            ok = false;
                            break;
                        }
                        pt[*var] = -eval_at(beta0, &pt) / a;
                    }
                }
            }
            if !ok || pt.iter().any(|z| !z.is_finite() || z.norm() < 1e-300) {
                continue;
            }
            let (edges, res) = self.polish(&pt[..m], angles);
            if best.as_ref().is_none_or(|(_, r)| res < *r) {
                best = Some((edges, res));
            }
        }
        best
    }

    /// `min` residual of the edge system over several least-squares starts.
    fn best_residual_from<R: Rng>(&self, angles: &[C64], starts: &[Vec<C64>], rng: &mut R) -> f64 {
        let mut best = f64::INFINITY;
        let mut all = starts.to_vec();
        for _ in 0..4 {
            let mut e = vec![C64::new(1.0, 0.0); self.system.edge_count];
            for v in self.live() {
                e[v] = C64::from_polar(rng.gen_range(0.5f64..2.0), rng.gen_range(-PI..PI));
            }
            all.push(e);
        }
        for s in &all {
            best = best.min(self.polish(s, angles).1);
        }
        best
    }

    /// On-curve samples for one μ̈: one per root of `P(·, μ̈)`.
    pub fn sample_support<R: Rng>(&self, mu: C64, rng: &mut R) -> Result<Vec<(SupportSample, Vec<C64>)>, String> {
        let roots = self.lambda_roots(mu);
        if roots.is_empty() {
            return Err("delta argument has no root in L".into());
        }
        let mut out = Vec::new();
        for lambda in roots {
            let angles = self
                .sample_angles(lambda, mu, rng)
                .ok_or_else(|| format!("no angle assignment for L = {lambda}"))?;
            let (edges, residual) = self
                .solve_edges(&angles)
                .ok_or_else(|| format!("edge system unsolvable at L = {lambda}, M = {mu}"))?;
            out.push((
                SupportSample {
                    mu: pair(mu),
                    lambda: pair(lambda),
                    edge_values: edges.iter().map(|&z| pair(z)).collect(),
                    residual,
                },
                angles,
            ));
        }
        Ok(out)
    }

    /// Smallest modulus among cleared denominators and prefactor bases.
    fn min_denominator(&self, sample: &SupportSample, angles: &[C64]) -> f64 {
        let edges: Vec<C64> = sample.edge_values.iter().map(|p| C64::new(p[0], p[1])).collect();
        let pt = self.point(&edges, angles);
        let lm = [C64::new(sample.lambda[0], sample.lambda[1]), C64::new(sample.mu[0], sample.mu[1])];
        let cleared = self.cleared.iter().map(|d| eval_at(&d.to_complex(), &pt).norm());
        let bases = self.closed.prefactor.terms().iter().map(|t| t.base.eval_complex(&lm).norm());
        cleared.chain(bases).fold(f64::INFINITY, f64::min)
    }

    /// Support equivalence: on-curve solvability, off-curve rejection, and
    /// non-vanishing denominators.
    pub fn check_support_equivalence<R: Rng>(&self, n_samples: usize, tol: f64, rng: &mut R) -> Vec<Check> {
        let mut on_err: f64 = 0.0;
        let mut off_min = f64::INFINITY;
        let mut den_min = f64::INFINITY;
        let mut on_ok = true;
        let mut off_ok = true;
        let mut failures: Vec<String> = Vec::new();
        let mut count = 0;
        for _ in 0..n_samples {
            let mu = random_mu(rng);
            let samples = match self.sample_support(mu, rng) {
                Ok(s) => s,
                Err(e) => {
                    on_ok = false;
                    on_err = f64::INFINITY;
                    failures.push(e);
                    continue;
                }
            };
            let roots: Vec<C64> = samples.iter().map(|(s, _)| C64::new(s.lambda[0], s.lambda[1])).collect();
            for (s, angles) in &samples {
                count += 1;
                on_err = on_err.max(s.residual);
                if s.residual >= tol {
                    on_ok = false;
                    failures.push(format!("on-curve residual {:e} at M = {mu}", s.residual));
                }
                den_min = den_min.min(self.min_denominator(s, angles));
                let lambda = C64::new(s.lambda[0], s.lambda[1]);
                let mut off = lambda * 1.01;
                if roots.iter().any(|r| (r - off).norm() < 1e-3 * (1.0 + off.norm())) {
                    off = lambda * 0.99;
                }
                let Some(off_angles) = self.sample_angles(off, mu, rng) else {
                    continue;
                };
                let edges: Vec<C64> = s.edge_values.iter().map(|p| C64::new(p[0], p[1])).collect();
                let r = self.best_residual_from(&off_angles, &[edges], rng);
                off_min = off_min.min(r);
                if r <= 1e3 * tol {
                    off_ok = false;
                    failures.push(format!("off-curve point L = {off}, M = {mu} solvable (residual {r:e})"));
                }
            }
        }
        failures.truncate(5);
        let detail = failures.join("; ");
        vec![
            Check {
                name: "support_on_curve".into(),
                pass: on_ok && count > 0,
                max_error: on_err,
                samples: count,
                detail: detail.clone(),
            },
            Check {
                name: "support_off_curve".into(),
                pass: off_ok && count > 0,
                max_error: off_min,
                samples: count,
                detail: format!("min off-curve residual {off_min:e} (threshold {:e})", 1e3 * tol),
            },
            Check {
                name: "denominators_nonvanishing".into(),
                pass: den_min > 1e-6,
                max_error: den_min,
                samples: count,
                detail: format!("min |cleared factor or prefactor base| = {den_min:e}"),
            },
        ]
    }
}

/// `|μ̈|` log-uniform on `[1/2, 2]`, away from low-order roots of unity.
pub fn random_mu<R: Rng>(rng: &mut R) -> C64 {
    loop {
        let r = (rng.gen_range(-1.0..1.0) * std::f64::consts::LN_2).exp();
        let mu = C64::from_polar(r, rng.gen_range(-PI..PI));
        if (1..=12).all(|k| (mu.powi(k) - 1.0).norm() >= 1e-3 * k as f64) {
            return mu;
        }
    }
}

/// Real angle parts with real balance 2; returns `{lam_dot, mu_dot}`.
pub fn sample_real_holonomies<R: Rng>(tri: &Triangulation, rng: &mut R) -> Option<HashMap<String, f64>> {
    let n = tri.tet_count();
    let rows: Vec<Vec<i64>> = (0..tri.edge_count()).map(|e| tri.balance_row(e)).collect();
    // real_part(row) = Σ (α−β) ȧ + (γ−β) ċ + Σβ over unknowns (ȧ_j, ċ_j)
    let coef = |row: &[i64]| -> (Vec<f64>, f64) {
        let mut c = vec![0.0; 2 * n];
        let mut k = 0.0;
        for j in 0..n {
            let (a, b, g) = (row[3 * j], row[3 * j + 1], row[3 * j + 2]);
            c[2 * j] = (a - b) as f64;
            c[2 * j + 1] = (g - b) as f64;
            k += b as f64;
        }
        (c, k)
    };
    let mut a = DMatrix::zeros(rows.len(), 2 * n);
    let mut b = DVector::zeros(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let (c, k) = coef(r);
        for (j, x) in c.iter().enumerate() {
            a[(i, j)] = *x;
        }
        b[i] = 2.0 - k;
    }
    let x = affine_sample(&a, &b, rng, 0.5)?;
    let mut values = HashMap::new();
    for j in 0..n {
        values.insert(crate::angles::adot(j), x[2 * j]);
        values.insert(crate::angles::cdot(j), x[2 * j + 1]);
    }
    let lam = real_part(&tri.longitude.coefficients).eval(&values).ok()?;
    let mu = real_part(&tri.meridian.coefficients).eval(&values).ok()?;
    Some(HashMap::from([(LAM_DOT.to_string(), lam), (MU_DOT.to_string(), mu)]))
}

/// Pairwise relative agreement of prefactors at shared support samples.
pub fn check_prefactor_agreement<R: Rng>(
    tri: &Triangulation,
    oracle: &SupportOracle,
    prefactors: &[Prefactor],
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut detail = String::new();
    for _ in 0..n_samples {
        let mu = random_mu(rng);
        let roots = oracle.lambda_roots(mu);
        let Some(values) = sample_real_holonomies(tri, rng) else {
            detail = "no admissible real angle parts".into();
            worst = f64::INFINITY;
            break;
        };
        let lambda = roots[rng.gen_range(0..roots.len())];
        let logs: Vec<f64> = prefactors
            .iter()
            .map(|p| p.log_eval(lambda, mu, &values).unwrap_or(f64::NAN))
            .collect();
        for i in 0..logs.len() {
            for j in i + 1..logs.len() {
                let rel = ((logs[i] - logs[j]).exp() - 1.0).abs();
                let rel = if rel.is_nan() { f64::INFINITY } else { rel };
                if rel > worst {
                    worst = rel;
                    detail = format!("worst pair ({i}, {j}) at L = {lambda}, M = {mu}");
                }
            }
        }
        count += 1;
    }
    Check {
        name: "prefactor_agreement".into(),
        pass: worst < tol,
        max_error: worst,
        samples: count,
        detail: format!("{} forms; {detail}", prefactors.len()),
    }
}

/// Support-equivalence report for one reduction.
pub fn support_report(tri: &Triangulation, reduction: &Reduction, n_samples: usize, tol: f64, seed: u64) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = SupportOracle::new(tri, reduction);
    OracleReport {
        checks: oracle.check_support_equivalence(n_samples, tol, &mut rng),
        seed,
    }
}

/// Evaluate the signed multiplicative part of a holonomy row at angle values.
pub fn holonomy_value(row: &[i64], angles: &[C64]) -> C64 {
    let m = multiplicative(row);
    let mut v = if m.negative { C64::new(-1.0, 0.0) } else { C64::new(1.0, 0.0) };
    for (a, &e) in angles.iter().zip(&m.exponents) {
        v *= a.powi(e as i32);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{lm_poly, reduce_with};
    use crate::fixtures;
    use crate::reduce::ReduceOptions;

    fn oracle(tri: &Triangulation) -> SupportOracle {
        let r = reduce_with(tri, &ReduceOptions::default()).unwrap();
        SupportOracle::new(tri, &r)
    }

    #[test]
    fn trefoil_at_mu_two() {
        let tri = fixtures::trefoil();
        let o = oracle(&tri);
        let mu = C64::new(2.0, 0.0);
        let roots = o.lambda_roots(mu);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - C64::new(-0.125, 0.0)).norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = o.sample_support(mu, &mut rng).unwrap();
        assert!(samples[0].0.residual < 1e-12);
        // holonomies of the sampled angles reproduce (L, M)
        let angles = &samples[0].1;
        assert!((holonomy_value(&tri.meridian.coefficients, angles) - mu).norm() < 1e-12);
        assert!((holonomy_value(&tri.longitude.coefficients, angles) - roots[0]).norm() < 1e-12);
    }

    #[test]
    fn figure_eight_two_roots_both_solvable() {
        let o = oracle(&fixtures::figure_eight());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mu = C64::from_polar(1.0, 0.7);
        let s = o.sample_support(mu, &mut rng).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|(x, _)| x.residual < 1e-10));
    }

    #[test]
    fn five_two_back_substitution_is_exact() {
        // two live edges: the outer solve depends on the inner one
        let o = oracle(&fixtures::five_two());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10 {
            let mu = random_mu(&mut rng);
            for (s, _) in o.sample_support(mu, &mut rng).unwrap() {
                assert!(s.residual < 1e-10, "{s:?}");
            }
        }
    }

    #[test]
    fn wrong_curve_is_detected() {
        let tri = fixtures::trefoil();
        let r = reduce_with(&tri, &ReduceOptions::default()).unwrap();
        let mut bad = r.closed.clone();
        bad.delta = lm_poly("L*M^3 + 2");
        let o = SupportOracle::new(&tri, &r).with_closed(bad);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let checks = o.check_support_equivalence(5, 1e-10, &mut rng);
        assert!(!checks[0].pass);
    }

    #[test]
    fn perturbed_prefactor_is_detected() {
        let tri = fixtures::trefoil();
        let r = reduce_with(&tri, &ReduceOptions::default()).unwrap();
        let o = SupportOracle::new(&tri, &r);
        let p = r.closed.prefactor.clone();
        let bumped = p.ratio(&Prefactor::new([(lm_poly("M"), zft_algebra::LinExpr::int(-1))]));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(check_prefactor_agreement(&tri, &o, &[p.clone(), p.clone()], 5, 1e-8, &mut rng).pass);
        assert!(!check_prefactor_agreement(&tri, &o, &[p, bumped], 5, 1e-8, &mut rng).pass);
    }

    #[test]
    fn report_is_deterministic() {
        let tri = fixtures::trefoil();
        let r = reduce_with(&tri, &ReduceOptions::default()).unwrap();
        let a = support_report(&tri, &r, 5, 1e-10, 9);
        let b = support_report(&tri, &r, 5, 1e-10, 9);
        assert_eq!(a, b);
        assert!(a.pass(), "{a:?}");
    }
}

