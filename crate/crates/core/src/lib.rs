//! Exact computations in the algebra A_q of Steenrod q-th powers, q = p^e.
//!
//! Elements are stored in the Milnor basis ([`milnor`]). On top of that sit
//! Adem rewriting ([`adem`]), the May filtration and its associated graded
//! algebra ([`may`]), the P^s_t and Arnon bases ([`bases`]), the action on
//! polynomial rings ([`action`]) and the comparison with group algebras of
//! unitriangular groups ([`unitriangular`]).

// Sparse sums expose `is_zero` rather than `is_empty`.
#![allow(clippy::len_without_is_empty)]

pub mod action;
pub mod adem;
pub mod arith;
pub mod bases;
pub mod error;
pub mod may;
pub mod milnor;
pub mod parse;
pub mod unitriangular;

pub use arith::{FpScalar, PrimePower};
pub use error::{Error, Result};
pub use milnor::{MilnorElement, MilnorSeq};
