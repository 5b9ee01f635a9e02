//! Exact arithmetic: scalars, polynomials, Laurent polynomials, rational functions.

pub mod field;
pub mod laurent;
pub mod linsolve;
pub mod partial;
pub mod poly;
pub mod ratfunc;
pub mod roots;

pub use field::{rat, FieldElement, GaussRat};
pub use laurent::LaurentPolynomial;
pub use partial::{partial_fractions, PartialFractionForm, PoleTerm};
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use roots::Root;
