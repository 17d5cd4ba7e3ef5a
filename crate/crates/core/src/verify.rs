//! Full cross-check of one triangulation: reduction, elimination,
//! divisibility, NZ structure, and the numeric oracle suites.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::apoly::{apoly_factor, divides_up_to_sign, APolyResult};
use crate::closed::{reduce_all, reduce_with, ClosedFormView};
use crate::nz::{choose_quad, gluing_matrices, verify_change_of_variables};
use crate::oracle::{check_prefactor_agreement, Check, OracleReport, SupportOracle};
use crate::reduce::ReduceOptions;
use crate::tri::Triangulation;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub invert_negative: bool,
    /// Support samples shared by the prefactor-agreement check.
    pub agreement_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 100,
            tol: 1e-8,
            seed: 0,
            invert_negative: true,
            agreement_samples: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub apoly: APolyResult,
    pub closed_form: ClosedFormView,
    pub divisibility: bool,
    pub l_sign: Option<i32>,
    pub report: OracleReport,
    pub pass: bool,
}

fn check(name: &str, pass: bool, max_error: f64, samples: usize, detail: String) -> Check {
    Check {
        name: name.into(),
        pass,
        max_error,
        samples,
        detail,
    }
}

pub fn verify(tri: &Triangulation, cfg: &VerifyConfig) -> Result<VerifyReport, String> {
    let mut checks = Vec::new();

    let nz = gluing_matrices(tri);
    let sums_ok = nz.column_sums().iter().flatten().all(|&s| s == 2);
    let symp = nz.check_symplectic();
    let quad = choose_quad(&nz);
    checks.push(check(
        "nz_structure",
        sums_ok && symp.symmetric && quad.is_ok(),
        0.0,
        1,
        match &quad {
            Ok(q) => format!("quad {:?}, dropped row {}, det {}", q.quad.rotation, q.dropped_edge_row, q.det_b_red),
            Err(e) => e.to_string(),
        },
    ));
    if tri.all_positive() {
        match verify_change_of_variables(tri, 20, cfg.tol, cfg.seed) {
            Ok(r) => checks.push(check(
                "change_of_variables",
                r.pass,
                r.max_residual_exponents.max(r.max_residual_angles),
                r.samples,
                String::new(),
            )),
            Err(e) => checks.push(check("change_of_variables", false, f64::INFINITY, 0, e.to_string())),
        }
    }

    let apoly = apoly_factor(tri, cfg.invert_negative).map_err(|e| e.to_string())?;
    let reduction = reduce_with(tri, &ReduceOptions::default()).map_err(|e| e.to_string())?;
    let l_sign = divides_up_to_sign(&reduction.closed.delta, &apoly.factor);
    checks.push(check(
        "divisibility",
        l_sign.is_some(),
        0.0,
        1,
        format!("delta {} | factor {}", reduction.closed.delta_text(), apoly.factor_text),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let oracle = SupportOracle::new(tri, &reduction);
    checks.extend(oracle.check_support_equivalence(cfg.samples, cfg.tol, &mut rng));

    let all = reduce_all(tri);
    let mut prefactors = Vec::new();
    let mut mismatched = Vec::new();
    for (opts, r) in &all {
        match r {
            Ok(r) if r.closed.delta == reduction.closed.delta => prefactors.push(r.closed.prefactor.clone()),
            Ok(r) => mismatched.push(format!("{opts:?}: {}", r.closed.delta_text())),
            Err(e) => mismatched.push(format!("{opts:?}: {e}")),
        }
    }
    checks.push(check(
        "order_invariance",
        mismatched.is_empty(),
        0.0,
        all.len(),
        mismatched.join("; "),
    ));
    checks.push(check_prefactor_agreement(
        tri,
        &oracle,
        &prefactors,
        cfg.agreement_samples,
        1e-8_f64.max(cfg.tol),
        &mut rng,
    ));

    let report = OracleReport { checks, seed: cfg.seed };
    Ok(VerifyReport {
        pass: report.pass(),
        apoly,
        closed_form: reduction.closed.view(),
        divisibility: l_sign.is_some(),
        l_sign,
        report,
    })
}
