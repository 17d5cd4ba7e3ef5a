use std::path::PathBuf;

use proptest::prelude::*;
use zft_core::apoly::{all_orders, apoly_factor};
use zft_core::closed::reduce_with;
use zft_core::fixtures;
use zft_core::reduce::ReduceOptions;
use zft_core::tri::{parse_triangulation, Triangulation};
use zft_core::verify::{verify, VerifyConfig};

fn fixture_file(name: &str) -> Triangulation {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_triangulation(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_files_match_builtins() {
    assert_eq!(fixture_file("trefoil.zft"), fixtures::trefoil());
    assert_eq!(fixture_file("4_1.zft"), fixtures::figure_eight());
    assert_eq!(fixture_file("5_2.zft"), fixtures::five_two());
}

#[test]
fn serialize_round_trips() {
    for (_, tri) in fixtures::all() {
        assert_eq!(parse_triangulation(&tri.serialize()).unwrap(), tri);
    }
}

fn outputs(tri: &Triangulation) -> (String, String) {
    let a = apoly_factor(tri, true).unwrap();
    let r = reduce_with(tri, &ReduceOptions::default()).unwrap();
    (a.factor_text, r.closed.delta_text())
}

#[test]
fn tetrahedron_order_does_not_matter() {
    for (name, tri) in fixtures::all() {
        let base = outputs(&tri);
        for perm in all_orders(tri.tet_count()) {
            let p = tri.permute_tets(&perm).unwrap();
            assert_eq!(outputs(&p), base, "{name} under {perm:?}");
        }
    }
}

#[test]
fn edge_names_do_not_matter() {
    for (name, tri) in fixtures::all() {
        let mut text = tri.serialize();
        for (i, e) in tri.edge_names.iter().enumerate() {
            text = text.replace(&format!(" {e}"), &format!(" edge_{i}"));
        }
        let renamed = parse_triangulation(&text).unwrap();
        assert_ne!(renamed.edge_names, tri.edge_names);
        assert_eq!(outputs(&renamed), outputs(&tri), "{name}");
    }
}

#[test]
fn verify_passes_on_fixtures() {
    let cfg = VerifyConfig {
        samples: 10,
        agreement_samples: 5,
        ..VerifyConfig::default()
    };
    for (name, tri) in fixtures::all() {
        let r = verify(&tri, &cfg).unwrap();
        assert!(r.pass, "{name}: {:?}", r.report);
        assert!(r.divisibility);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn permuted_inputs_round_trip(k in 0usize..6) {
        let tri = fixtures::five_two();
        let perm = all_orders(3)[k].clone();
        let p = tri.permute_tets(&perm).unwrap();
        prop_assert_eq!(parse_triangulation(&p.serialize()).unwrap(), p.clone());
        // undoing the permutation restores the original
        let mut inv = vec![0; 3];
        for (i, &o) in perm.iter().enumerate() {
            inv[o] = i;
        }
        prop_assert_eq!(p.permute_tets(&inv).unwrap(), tri);
    }
}
