//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

use std::time::Instant;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use zft_algebra::gcd::gcd;
use zft_algebra::{resultant, snf_solve, sylvester_resultant, DivisionResult, IntPoly, LinExpr};
use zft_core::angles::{LAM_DOT, MU_DOT};
use zft_core::apoly::{apoly_factor, compare_with_reference, divides_up_to_sign, halve_m, negate_l, LM_NAMES};
use zft_core::closed::{reduce_all, reduce_with, Prefactor};
use zft_core::fixtures;
use zft_core::nz::{choose_quad, gluing_matrices, verify_change_of_variables};
use zft_core::oracle::{check_prefactor_agreement, support_report, SupportOracle};
use zft_core::reduce::ReduceOptions;
use zft_core::tri::Triangulation;

const A31: &str = "m^6*l + 1";
const A41: &str = "m^4*l^2 - m^8*l + m^6*l + 2*m^4*l + m^2*l - l + m^4";
const A52: &str = "l^3 + m^10*l^2 - m^8*l^2 + 2*m^4*l^2 + 2*m^2*l^2 - l^2 - m^14*l + 2*m^12*l + 2*m^10*l - m^6*l + m^4*l + m^14";

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn lm(text: &str) -> IntPoly {
    IntPoly::parse(text, &LM_NAMES).expect("reference polynomial")
}

fn apoly_criterion(tri: &Triangulation, reference: &str, limit: f64) -> Outcome {
    let start = Instant::now();
    let r = match apoly_factor(tri, true) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let secs = start.elapsed().as_secs_f64();
    let cmp = compare_with_reference(&r.factor, &lm(reference)).expect("even reference");
    let target = halve_m(&lm(reference)).unwrap().normalize_unit();
    Outcome {
        pass: cmp.matches && secs < limit,
        detail: format!(
            "factor {} vs reference (m^2 -> m) {}; l-sign {:?}; reciprocal match {}; {:.3} s (limit {limit} s)",
            r.factor_text,
            target.to_string_with(&LM_NAMES),
            cmp.l_sign,
            cmp.reciprocal_match,
            secs
        ),
    }
}

fn pf(pairs: &[(&str, LinExpr)]) -> Prefactor {
    Prefactor::from_pairs(pairs)
}

fn dot(name: &str, sign: i64, c: i64) -> LinExpr {
    &LinExpr::symbol(name).scale_int(sign) + &LinExpr::int(c)
}

fn closed_forms() -> Outcome {
    let reference_delta = |a: &str, flip: bool| {
        let p = lm(a);
        let p = if flip { negate_l(&p) } else { p };
        halve_m(&p).unwrap().normalize_unit()
    };
    let cases: Vec<(&str, Triangulation, Prefactor, IntPoly)> = vec![
        (
            "3_1",
            fixtures::trefoil(),
            pf(&[("L", dot(MU_DOT, 1, 1)), ("M", dot(LAM_DOT, -1, 4))]),
            reference_delta(A31, false),
        ),
        (
            "4_1",
            fixtures::figure_eight(),
            pf(&[
                ("L", dot(MU_DOT, 1, 1)),
                ("M", dot(LAM_DOT, -1, 4)),
                ("M - M^-1", LinExpr::int(1)),
            ]),
            reference_delta(A41, true),
        ),
        (
            "5_2",
            fixtures::five_two(),
            pf(&[
                ("L", dot(MU_DOT, 1, 1)),
                ("M", dot(LAM_DOT, -1, 4)),
                ("M - M^-1", LinExpr::int(1)),
                ("1 + L*M^3", LinExpr::int(1)),
            ]),
            reference_delta(A52, false),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri, want_pf, want_delta) in cases {
        let start = Instant::now();
        let cf = match reduce_with(&tri, &ReduceOptions::default()) {
            Ok(r) => r.closed,
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
                continue;
            }
        };
        let secs = start.elapsed().as_secs_f64();
        let pf_ok = cf.prefactor.equivalent(&want_pf);
        let delta_ok = cf.delta == want_delta;
        pass &= pf_ok && delta_ok && secs < 10.0;
        parts.push(format!(
            "{name}: prefactor {} [{}], delta {} [{}], {:.2} s",
            cf.prefactor,
            if pf_ok { "ok" } else { "differs" },
            cf.delta_text(),
            if delta_ok {
                "ok".to_string()
            } else {
                format!("expected {}", want_delta.to_string_with(&["L", "M"]))
            },
            secs
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn divisibility() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri) in fixtures::all() {
        let delta = reduce_with(&tri, &ReduceOptions::default()).map(|r| r.closed.delta);
        let factor = apoly_factor(&tri, true).map(|r| r.factor);
        match (delta, factor) {
            (Ok(d), Ok(f)) => {
                let sign = divides_up_to_sign(&d, &f);
                pass &= sign.is_some();
                parts.push(format!("{name}: l-sign {sign:?}"));
            }
            (d, f) => {
                pass = false;
                parts.push(format!("{name}: {:?} / {:?}", d.err(), f.err()));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn nz_structure() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri) in fixtures::all() {
        let nz = gluing_matrices(&tri);
        let sums = nz.column_sums().iter().flatten().all(|&s| s == 2);
        let symmetric = nz.check_symplectic().symmetric;
        let quad = choose_quad(&nz);
        pass &= sums && symmetric && quad.is_ok();
        parts.push(match quad {
            Ok(q) => format!(
                "{name}: sums {sums}, A'B'^T symmetric {symmetric}, quad {:?} drop {} det {}",
                q.quad.rotation, q.dropped_edge_row, q.det_b_red
            ),
            Err(e) => format!("{name}: sums {sums}, symmetric {symmetric}, {e}"),
        });
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn change_of_variables() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri) in [("3_1", fixtures::trefoil()), ("5_2", fixtures::five_two())] {
        match verify_change_of_variables(&tri, 20, 1e-10, 7) {
            Ok(r) => {
                pass &= r.pass && r.samples == 20;
                parts.push(format!(
                    "{name}: max residual {:.1e} / {:.1e}",
                    r.max_residual_exponents, r.max_residual_angles
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn support_equivalence() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri) in fixtures::all() {
        let r = reduce_with(&tri, &ReduceOptions::default()).expect("reduction");
        let a = support_report(&tri, &r, 100, 1e-10, 2024);
        let b = support_report(&tri, &r, 100, 1e-10, 2024);
        let deterministic = a == b;
        pass &= a.pass() && deterministic;
        let on = a.check("support_on_curve").unwrap();
        let off = a.check("support_off_curve").unwrap();
        let den = a.check("denominators_nonvanishing").unwrap();
        parts.push(format!(
            "{name}: {} on-curve (max {:.1e}), off-curve min {:.1e}, min denominator {:.1e}, deterministic {deterministic}{}",
            on.samples,
            on.max_error,
            off.max_error,
            den.max_error,
            if a.pass() { String::new() } else { format!(" [{}]", on.detail) }
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn order_invariance() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tri) in fixtures::all() {
        let base = reduce_with(&tri, &ReduceOptions::default()).expect("reduction");
        let all = reduce_all(&tri);
        let mut prefactors = Vec::new();
        let mut same = true;
        for (_, r) in &all {
            match r {
                Ok(r) => {
                    same &= r.closed.delta == base.closed.delta;
                    prefactors.push(r.closed.prefactor.clone());
                }
                Err(_) => same = false,
            }
        }
        let oracle = SupportOracle::new(&tri, &base);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let agree = check_prefactor_agreement(&tri, &oracle, &prefactors, 20, 1e-8, &mut rng);
        pass &= same && agree.pass;
        parts.push(format!(
            "{name}: {} reductions, identical delta {same}, prefactor max rel diff {:.1e}",
            all.len(),
            agree.max_error
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn poly(nvars: usize, max_deg: i32, max_terms: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), -5i64..=5), 1..=max_terms)
        .prop_map(move |terms| IntPoly::from_i64_terms(nvars, terms))
}

fn nonzero(nvars: usize, max_deg: i32, max_terms: usize) -> impl Strategy<Value = IntPoly> {
    poly(nvars, max_deg, max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

fn with_x(nvars: usize, max_deg: i32, max_terms: usize) -> impl Strategy<Value = IntPoly> {
    nonzero(nvars, max_deg, max_terms).prop_filter("contains x", |p| p.contains_var(0))
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> (String, bool) {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    match runner.run(&strategy, test) {
        Ok(()) => (format!("{name}: 1000/1000"), true),
        Err(e) => (format!("{name}: {e}"), false),
    }
}

fn algebra_properties() -> Outcome {
    let results = vec![
        run_property("ring axioms", (poly(3, 3, 4), poly(3, 3, 4), poly(3, 3, 4)), |(a, b, c)| {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            Ok(())
        }),
        run_property(
            "resultant multiplicativity",
            (with_x(2, 2, 3), with_x(2, 2, 3), with_x(2, 2, 3)),
            |(f, g, h)| {
                let fg = &f * &g;
                let lhs = resultant(&fg, &h, 0).unwrap();
                prop_assert_eq!(&lhs, &(&resultant(&f, &h, 0).unwrap() * &resultant(&g, &h, 0).unwrap()));
                prop_assert_eq!(lhs, sylvester_resultant(&fg, &h, 0).unwrap());
                Ok(())
            },
        ),
        run_property(
            "gcd correctness",
            (nonzero(2, 2, 3), nonzero(2, 2, 3), nonzero(2, 2, 3)),
            |(a, b, g)| {
                let (pa, pb) = (&a * &g, &b * &g);
                let d = gcd(&pa, &pb);
                prop_assert!(d.divides(&pa) && d.divides(&pb));
                prop_assert!(g.primitive_part().divides(&d));
                Ok(())
            },
        ),
        run_property("exact division round trip", (nonzero(3, 3, 4), nonzero(3, 2, 3)), |(q, d)| {
            prop_assert_eq!((&q * &d).exact_divide(&d).unwrap(), DivisionResult::Quotient(q));
            Ok(())
        }),
        run_property(
            "snf_solve recombination",
            (
                prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..=4),
                prop::collection::vec(-3i64..=3, 4),
            ),
            |(gens, coeffs)| {
                let split = gens.len().min(2);
                let (targets, relations) = gens.split_at(split);
                let mut query = vec![0i64; 4];
                for (g, k) in gens.iter().zip(&coeffs) {
                    for i in 0..4 {
                        query[i] += g[i] * k;
                    }
                }
                let sol = snf_solve(relations, targets, &query).unwrap();
                prop_assert!(sol.is_some());
                let sol = sol.unwrap();
                let mut back = vec![BigInt::from(0); 4];
                for (g, k) in targets
                    .iter()
                    .zip(&sol.target_coeffs)
                    .chain(relations.iter().zip(&sol.relation_coeffs))
                {
                    for i in 0..4 {
                        back[i] += BigInt::from(g[i]) * k;
                    }
                }
                prop_assert_eq!(back, query.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
                Ok(())
            },
        ),
    ];
    Outcome {
        pass: results.iter().all(|(_, ok)| *ok),
        detail: results.into_iter().map(|(s, _)| s).collect::<Vec<_>>().join("; "),
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("trefoil A-polynomial", Box::new(|| apoly_criterion(&fixtures::trefoil(), A31, 1.0))),
        ("4_1 A-polynomial", Box::new(|| apoly_criterion(&fixtures::figure_eight(), A41, 5.0))),
        ("5_2 A-polynomial", Box::new(|| apoly_criterion(&fixtures::five_two(), A52, 30.0))),
        ("closed forms", Box::new(closed_forms)),
        ("delta divides A-polynomial factor", Box::new(divisibility)),
        ("NZ structure", Box::new(nz_structure)),
        ("change-of-variables identity", Box::new(change_of_variables)),
        ("support equivalence", Box::new(support_equivalence)),
        ("order/gauge invariance", Box::new(order_invariance)),
        ("algebra property suites", Box::new(algebra_properties)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, out.detail);
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
