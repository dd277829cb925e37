//! Hopf-algebraic renormalization of scalar φ³ theory.
//!
//! The crate is `no_std` with `alloc`. It covers the combinatorics of
//! φ³ Feynman graphs ([`graphs`]), the Connes-Kreimer Hopf algebra on them
//! ([`hopf`]), truncated Laurent series ([`laurent`]), characters and their
//! Birkhoff decomposition ([`characters`]), the renormalization group action
//! and beta function ([`rg`]), zeta-regularized spectral data on flat tori
//! ([`spectral`]), the regularized Feynman rules ([`feynman`]) and the
//! density calculus of the conformal Laplacian ([`conformal`]).
#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::len_without_is_empty)]

extern crate alloc;

pub mod characters;
pub mod conformal;
pub mod error;
pub mod feynman;
pub mod graphs;
pub mod hopf;
pub mod laurent;
pub mod rg;
pub mod special;
pub mod spectral;

pub use characters::{birkhoff, Birkhoff, Character};
pub use error::{Error, Result};
pub use graphs::{FeynmanGraph, GraphLabel, SubgraphEmbedding, VertexKind};
pub use hopf::{HopfAlgebra, HopfPolynomial, Monomial, Rational, TensorPolynomial};
pub use laurent::LaurentSeries;
pub use num_complex::Complex64;
