//! clode: a symbolic + numeric engine for complex linearization of systems of
//! two second-order ODEs.
//!
//! The pipeline: parse a problem file, test the Cauchy-Riemann coupling of the
//! right-hand sides, lift CR-compatible systems to a single complex scalar
//! ODE, classify the cubic structure, compute Lie point symmetries by exact
//! determining-equation solving, linearize through the hodograph catalog of
//! complex point transformations, and verify solutions symbolically and
//! numerically.

pub mod classify;
pub mod complexify;
pub mod corpus;
pub mod expr;
pub mod g2;
pub mod linalg;
pub mod parse;
pub mod report;
pub mod linearize;
pub mod numeric;
pub mod symmetry;

pub use expr::{CScalar, CVar, Expr, Func, Var, ZeroTest, ZeroVerdict, CQ, Q};
