//! The three knot complements shipped in `fixtures/`, compiled in.

use crate::tri::{parse_triangulation, Triangulation};

pub const TREFOIL_ZFT: &str = include_str!("../../../fixtures/trefoil.zft");
pub const FIGURE_EIGHT_ZFT: &str = include_str!("../../../fixtures/4_1.zft");
pub const FIVE_TWO_ZFT: &str = include_str!("../../../fixtures/5_2.zft");

pub fn trefoil() -> Triangulation {
    parse_triangulation(TREFOIL_ZFT).expect("trefoil fixture parses")
}

pub fn figure_eight() -> Triangulation {
    parse_triangulation(FIGURE_EIGHT_ZFT).expect("4_1 fixture parses")
}

pub fn five_two() -> Triangulation {
    parse_triangulation(FIVE_TWO_ZFT).expect("5_2 fixture parses")
}

/// `(name, triangulation)` for every fixture.
pub fn all() -> Vec<(&'static str, Triangulation)> {
    vec![
        ("3_1", trefoil()),
        ("4_1", figure_eight()),
        ("5_2", five_two()),
    ]
}
