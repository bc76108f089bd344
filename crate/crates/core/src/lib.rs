//! Squarer-based arithmetic schemes for complex squaring, multiplication
//! and division.
//!
//! A [`scheme::Scheme`] is a pipeline of linear maps, per-wire squarers or
//! scalings, and two-operand multiply/divide stages. The crate checks such
//! pipelines against direct complex arithmetic ([`verify`]), counts their
//! hardware units ([`cost`]), simulates them in fixed point
//! ([`eval::eval_fixed`]), and exports them as JSON or Graphviz DOT.

pub mod cli;
pub mod cost;
pub mod eval;
pub mod library;
pub mod numeric;
pub mod reference;
pub mod scheme;
pub mod verify;

pub use numeric::{RMatrix, Rational};
pub use scheme::{compose, parallel, Scheme, Stage};
