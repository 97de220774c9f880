//! Coefficient fields, sparse polynomials, hypersurface states and the input grammar.

pub mod field;
pub mod fq;
pub mod parse;
pub mod poly;
pub mod state;
pub mod tpoly;

pub use field::{Elem, Field, FieldCtx, FieldKind};
pub use fq::Fq;
pub use parse::{parse_input, parse_poly, print_state};
pub use poly::{Derivation, Exp, Poly};
pub use state::{vp, monomial_expansion, Coeffs, HypersurfaceState, Shift};
