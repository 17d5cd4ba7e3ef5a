//! Oriented ideal triangulations as edge-identification tables, and the
//! line-oriented `.zft` text format.
//!
//! ```text
//! zft 1
//! tets 2
//! tet 0 + s s t s s s      # e01 e02 e03 e12 e13 e23
//! tet 1 + s s t s s s
//! meridian -1 0 0 1 0 0    # (a0 b0 c0 a1 b1 c1 ...)
//! longitude 2 0 -1 -2 0 0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

/// Vertex-pair slots in file order.
pub const SLOTS: [&str; 6] = ["01", "02", "03", "12", "13", "23"];

/// Which angle an edge slot carries: {01,23} -> a, {02,13} -> b, {03,12} -> c.
pub const SLOT_ANGLE: [Angle; 6] = [Angle::A, Angle::B, Angle::C, Angle::C, Angle::B, Angle::A];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Angle {
    A = 0,
    B = 1,
    C = 2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("tetrahedron {tet}: edge index {edge} out of range (edge count {count})")]
    EdgeOutOfRange { tet: usize, edge: usize, count: usize },
    #[error("{name} row has {found} coefficients, expected 3N = {expected}")]
    HolonomyLength { name: String, expected: usize, found: usize },
    #[error("edge class {0} is not used by any tetrahedron")]
    UnusedEdge(usize),
    #[error("one-cusped input needs as many edge classes as tetrahedra (got {edges} edges, {tets} tetrahedra)")]
    EdgeCountMismatch { edges: usize, tets: usize },
    #[error("tetrahedron sign must be +1 or -1, got {0}")]
    BadSign(i32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tetrahedron {
    pub index: usize,
    /// +1 or -1.
    pub sign: i32,
    /// Edge class of each slot, in [`SLOTS`] order.
    pub slots: [usize; 6],
}

impl Tetrahedron {
    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Number of slots of angle `angle` at edge class `edge` (0, 1 or 2).
    pub fn angle_count(&self, edge: usize, angle: Angle) -> i64 {
        self.slots
            .iter()
            .zip(SLOT_ANGLE)
            .filter(|&(&e, a)| e == edge && a == angle)
            .count() as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolonomyRow {
    pub name: String,
    /// `(a_j, b_j, c_j)` coefficients, tetrahedron by tetrahedron.
    pub coefficients: Vec<i64>,
}

impl HolonomyRow {
    pub fn triple(&self, j: usize) -> [i64; 3] {
        [
            self.coefficients[3 * j],
            self.coefficients[3 * j + 1],
            self.coefficients[3 * j + 2],
        ]
    }
}

/// Exponent vector over edge classes of a ratio of edge variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientMonomial {
    pub exponents: Vec<i64>,
}

impl QuotientMonomial {
    pub fn degree(&self) -> i64 {
        self.exponents.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triangulation {
    pub tets: Vec<Tetrahedron>,
    /// Edge-class identifiers in first-appearance order.
    pub edge_names: Vec<String>,
    pub meridian: HolonomyRow,
    pub longitude: HolonomyRow,
}

impl Triangulation {
    /// Validating constructor.
    pub fn new(
        tets: Vec<Tetrahedron>,
        edge_names: Vec<String>,
        meridian: Vec<i64>,
        longitude: Vec<i64>,
    ) -> Result<Self, TriError> {
        let n = tets.len();
        let m = edge_names.len();
        for t in &tets {
            if t.sign != 1 && t.sign != -1 {
                return Err(TriError::BadSign(t.sign));
            }
            if let Some(&e) = t.slots.iter().find(|&&e| e >= m) {
                return Err(TriError::EdgeOutOfRange {
                    tet: t.index,
                    edge: e,
                    count: m,
                });
            }
        }
        for (name, row) in [("meridian", &meridian), ("longitude", &longitude)] {
            if row.len() != 3 * n {
                return Err(TriError::HolonomyLength {
                    name: name.into(),
                    expected: 3 * n,
                    found: row.len(),
                });
            }
        }
        if let Some(unused) = (0..m).find(|&e| !tets.iter().any(|t| t.slots.contains(&e))) {
            return Err(TriError::UnusedEdge(unused));
        }
        if m != n {
            return Err(TriError::EdgeCountMismatch { edges: m, tets: n });
        }
        Ok(Triangulation {
            tets,
            edge_names,
            meridian: HolonomyRow {
                name: "meridian".into(),
                coefficients: meridian,
            },
            longitude: HolonomyRow {
                name: "longitude".into(),
                coefficients: longitude,
            },
        })
    }

    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn all_positive(&self) -> bool {
        self.tets.iter().all(Tetrahedron::is_positive)
    }

    pub fn edge_valences(&self) -> Vec<usize> {
        let mut v = vec![0; self.edge_count()];
        for t in &self.tets {
            for &e in &t.slots {
                v[e] += 1;
            }
        }
        v
    }

    /// `(X_j, Z_j)` with `X = x02 x13 / (x03 x12)` and `Z = x01 x23 / (x02 x13)`.
    pub fn tet_quotient_monomials(&self, j: usize) -> (QuotientMonomial, QuotientMonomial) {
        let s = &self.tets[j].slots;
        let mut x = vec![0i64; self.edge_count()];
        let mut z = vec![0i64; self.edge_count()];
        x[s[1]] += 1;
        x[s[4]] += 1;
        x[s[2]] -= 1;
        x[s[3]] -= 1;
        z[s[0]] += 1;
        z[s[5]] += 1;
        z[s[1]] -= 1;
        z[s[4]] -= 1;
        (
            QuotientMonomial { exponents: x },
            QuotientMonomial { exponents: z },
        )
    }

    /// Angle-coefficient row `(a_j, b_j, c_j)_j` of the balance condition
    /// around edge class `edge`.
    pub fn balance_row(&self, edge: usize) -> Vec<i64> {
        self.tets
            .iter()
            .flat_map(|t| {
                [Angle::A, Angle::B, Angle::C].map(|a| t.angle_count(edge, a))
            })
            .collect()
    }

    /// Canonical `.zft` text.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "zft 1").unwrap();
        writeln!(out, "tets {}", self.tet_count()).unwrap();
        for t in &self.tets {
            let sign = if t.is_positive() { '+' } else { '-' };
            let names: Vec<&str> = t.slots.iter().map(|&e| self.edge_names[e].as_str()).collect();
            writeln!(out, "tet {} {} {}", t.index, sign, names.join(" ")).unwrap();
        }
        for row in [&self.meridian, &self.longitude] {
            let nums: Vec<String> = row.coefficients.iter().map(i64::to_string).collect();
            writeln!(out, "{} {}", row.name, nums.join(" ")).unwrap();
        }
        out
    }

    /// Relabel tetrahedra: new tet `i` is old tet `perm[i]`. Holonomy rows
    /// follow; edge classes are renumbered by first appearance.
    pub fn permute_tets(&self, perm: &[usize]) -> Result<Self, TriError> {
        let mut names: Vec<String> = Vec::new();
        let mut tets = Vec::new();
        for (i, &old) in perm.iter().enumerate() {
            let t = &self.tets[old];
            let mut slots = [0usize; 6];
            for (k, &e) in t.slots.iter().enumerate() {
                let name = &self.edge_names[e];
                slots[k] = match names.iter().position(|n| n == name) {
                    Some(p) => p,
                    None => {
                        names.push(name.clone());
                        names.len() - 1
                    }
                };
            }
            tets.push(Tetrahedron {
                index: i,
                sign: t.sign,
                slots,
            });
        }
        let permute_row = |row: &HolonomyRow| -> Vec<i64> {
            perm.iter().flat_map(|&old| row.triple(old)).collect()
        };
        Triangulation::new(tets, names, permute_row(&self.meridian), permute_row(&self.longitude))
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> TriError {
    TriError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Tokens of a line with their 1-based columns, comments removed.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &body[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (body[..s].chars().count() + 1, t))
        .collect()
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriError> {
    let mut header_seen = false;
    let mut declared: Option<(usize, usize)> = None; // (count, line)
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut tets: Vec<Tetrahedron> = Vec::new();
    let mut meridian: Option<(Vec<i64>, usize)> = None;
    let mut longitude: Option<(Vec<i64>, usize)> = None;
    let mut last_line = 0;

    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        let toks = tokens(line);
        let Some(&(col0, keyword)) = toks.first() else {
            continue;
        };
        if !header_seen {
            if keyword != "zft" || toks.len() != 2 || toks[1].1 != "1" {
                return Err(syntax(ln, col0, "expected header `zft 1`"));
            }
            header_seen = true;
            continue;
        }
        match keyword {
            "tets" => {
                if declared.is_some() {
                    return Err(syntax(ln, col0, "duplicate `tets` line"));
                }
                if toks.len() != 2 {
                    return Err(syntax(ln, col0, "expected `tets <N>`"));
                }
                let n: usize = toks[1]
                    .1
                    .parse()
                    .map_err(|_| syntax(ln, toks[1].0, "tetrahedron count must be a nonnegative integer"))?;
                declared = Some((n, ln));
            }
            "tet" => {
                if declared.is_none() {
                    return Err(syntax(ln, col0, "`tet` line before `tets <N>`"));
                }
                if toks.len() != 9 {
                    let col = toks.last().map(|t| t.0).unwrap_or(col0);
                    return Err(syntax(
                        ln,
                        col,
                        format!(
                            "expected `tet <j> <+|-> e01 e02 e03 e12 e13 e23`, found {} edge labels",
                            toks.len().saturating_sub(3)
                        ),
                    ));
                }
                let j: usize = toks[1]
                    .1
                    .parse()
                    .map_err(|_| syntax(ln, toks[1].0, "tetrahedron index must be a nonnegative integer"))?;
                if j != tets.len() {
                    return Err(syntax(
                        ln,
                        toks[1].0,
                        format!("expected tetrahedron index {}, found {j}", tets.len()),
                    ));
                }
                let sign = match toks[2].1 {
                    "+" => 1,
                    "-" => -1,
                    _ => return Err(syntax(ln, toks[2].0, "sign must be `+` or `-`")),
                };
                let mut slots = [0usize; 6];
                for (k, &(_, name)) in toks[3..].iter().enumerate() {
                    slots[k] = *index.entry(name.to_string()).or_insert_with(|| {
                        names.push(name.to_string());
                        names.len() - 1
                    });
                }
                tets.push(Tetrahedron {
                    index: j,
                    sign,
                    slots,
                });
            }
            "meridian" | "longitude" => {
                let slot = if keyword == "meridian" {
                    &mut meridian
                } else {
                    &mut longitude
                };
                if slot.is_some() {
                    return Err(syntax(ln, col0, format!("duplicate `{keyword}` row")));
                }
                let mut row = Vec::with_capacity(toks.len() - 1);
                for &(col, t) in &toks[1..] {
                    row.push(
                        t.parse::<i64>()
                            .map_err(|_| syntax(ln, col, format!("`{t}` is not an integer")))?,
                    );
                }
                *slot = Some((row, ln));
            }
            other => return Err(syntax(ln, col0, format!("unknown keyword `{other}`"))),
        }
    }

    if !header_seen {
        return Err(syntax(last_line.max(1), 1, "empty input; expected header `zft 1`"));
    }
    let Some((n, tets_line)) = declared else {
        return Err(syntax(last_line, 1, "missing `tets <N>` line"));
    };
    if tets.len() != n {
        return Err(syntax(
            tets_line,
            1,
            format!("declared {n} tetrahedra but found {}", tets.len()),
        ));
    }
    let (meridian, _) = meridian.ok_or_else(|| syntax(last_line, 1, "missing `meridian` row"))?;
    let (longitude, _) = longitude.ok_or_else(|| syntax(last_line, 1, "missing `longitude` row"))?;
    Triangulation::new(tets, names, meridian, longitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn trefoil_table() {
        let t = fixtures::trefoil();
        assert_eq!(t.tet_count(), 2);
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.edge_names, vec!["s", "t"]);
        assert_eq!(t.edge_valences(), vec![10, 2]);
        assert_eq!(t.tets[0].slots, [0, 0, 1, 0, 0, 0]);
        let (x, z) = t.tet_quotient_monomials(0);
        assert_eq!(x.exponents, vec![1, -1]);
        assert_eq!(z.exponents, vec![0, 0]);
    }

    #[test]
    fn figure_eight_signs_and_ratios() {
        let t = fixtures::figure_eight();
        assert_eq!(t.tets[1].sign, -1);
        assert_eq!(t.edge_valences(), vec![6, 6]);
        let (x, z) = t.tet_quotient_monomials(0);
        assert_eq!(x.exponents, vec![-1, 1]);
        assert_eq!(z.exponents, vec![2, -2]);
    }

    #[test]
    fn balance_row_matches_hand_count() {
        // Around s: 2 a_0 + c_0 + 2 b_1 + c_1.
        let t = fixtures::figure_eight();
        assert_eq!(t.balance_row(0), vec![2, 0, 1, 0, 2, 1]);
    }

    #[test]
    fn five_labels_is_a_syntax_error() {
        let text = "zft 1\ntets 1\ntet 0 + a a a a a\nmeridian 0 0 0\nlongitude 0 0 0\n";
        match parse_triangulation(text) {
            Err(TriError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_row_length_and_edge_count() {
        let short = "zft 1\ntets 1\ntet 0 + a a a a a a\nmeridian 0 0\nlongitude 0 0 0\n";
        assert!(matches!(
            parse_triangulation(short),
            Err(TriError::HolonomyLength { found: 2, expected: 3, .. })
        ));
        let many = "zft 1\ntets 1\ntet 0 + a b a a a a\nmeridian 0 0 0\nlongitude 0 0 0\n";
        assert_eq!(
            parse_triangulation(many),
            Err(TriError::EdgeCountMismatch { edges: 2, tets: 1 })
        );
    }

    #[test]
    fn single_class_tetrahedron() {
        let text = "zft 1\ntets 1\ntet 0 - e e e e e e\nmeridian 1 0 0\nlongitude 0 1 0\n";
        let t = parse_triangulation(text).unwrap();
        assert_eq!(t.edge_valences(), vec![6]);
        let (x, z) = t.tet_quotient_monomials(0);
        assert_eq!(x.exponents, vec![0]);
        assert_eq!(z.exponents, vec![0]);
    }

    #[test]
    fn column_points_at_bad_token() {
        let text = "zft 1\ntets 1\ntet 0 * a a a a a a\n";
        assert_eq!(
            parse_triangulation(text),
            Err(TriError::Syntax {
                line: 3,
                col: 7,
                msg: "sign must be `+` or `-`".into()
            })
        );
    }
}
