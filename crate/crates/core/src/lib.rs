//! Exact and p-adic q-Volkenborn integration.
//!
//! The crate computes the q-Bernoulli numbers `beta_{n,q}`, the fermionic
//! numbers `K_{n,q}` and polynomials `K_{n,q}(x)`, their Dirichlet-character
//! twists, and checks the identities relating them, either exactly in
//! `Q(q^(1/D))` or through truncated p-adic Riemann sums.

pub mod algebra;
pub mod characters;
pub mod error;
pub mod field;
pub mod measure;
pub mod numbers;
pub mod padic;
pub mod series;
pub mod verify;

pub use algebra::{CyclotomicElement, Polynomial, RationalFunction};
pub use characters::{enumerate_characters, DirichletCharacter, UnitGroupStructure};
pub use error::{Error, Result};
pub use field::{Field, FieldValue, PadicQ, QDescriptor, QField, RationalQ, Rationals, SymbolicQ};
pub use measure::{BuiltinIntegrand, IntegrationResult, MeasureKind, MeasureSpec};
pub use padic::{PadicNumber, ProfiniteDomain};
pub use series::TruncatedSeries;
