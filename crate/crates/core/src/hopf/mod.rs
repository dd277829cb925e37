//! The Hopf algebra of 1PI φ³ graphs: polynomial algebra on generator
//! labels with coproduct, counit, antipode, loop grading and the insertion
//! product dual to the coproduct.

mod algebra;
mod polynomial;

pub use algebra::{CoproductTerm, HopfAlgebra};
pub use polynomial::{HopfPolynomial, Monomial, Rational, TensorPolynomial, TriplePolynomial};
