//! Stationary-phase expansions with explicit remainder bounds, a quadrature oracle
//! and the free Schrödinger application.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod special;
pub mod taylor;
pub mod quadrature;
pub mod types;
pub mod expansion;
pub mod bounds;
pub mod oracle;
pub mod problem;
pub mod schrodinger;
