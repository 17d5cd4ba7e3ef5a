//! Exact arithmetic substrate: sparse integer (Laurent) polynomials with
//! subresultant gcd and resultants, Smith normal form lattice solving, and
//! rational linear expressions for formal exponents.

mod error;
mod parse;

pub mod gcd;
pub mod linexpr;
pub mod matrix;
pub mod poly;
pub mod resultant;
pub mod snf;

pub use error::AlgebraError;
pub use gcd::{DivisionResult, SignedMonomial};
pub use linexpr::{lin_reduce, LinExpr};
pub use poly::{ComplexPoly, Coeff, IntPoly, Monomial, Poly};
pub use resultant::{resultant, sylvester_resultant};
pub use snf::{smith_normal_form, snf_solve, LatticeSolution, Snf};
