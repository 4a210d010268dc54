//! Exact arithmetic: polynomials over Q, reduced rational functions in a
//! root `w` of `q`, and cyclotomic extensions for character values.

pub mod cyclotomic;
pub mod poly;
pub mod ratfunc;
pub mod zpoly;

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicElement};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub(crate) use ratfunc::{format_rational, parse_rational};
