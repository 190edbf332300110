//! Exact-rational computations with perm algebras, tensor-product
//! dialgebras and their derivation and diderivation spaces.

pub mod algebra;
pub mod cli;
pub mod compare;
pub mod arith;
pub mod decomposition;
pub mod dialgebra;
pub mod error;
pub mod interchange;
pub mod operators;
pub mod report;
pub mod sampling;
pub mod solver;

pub use arith::Scalar;
pub use error::{Error, Result};
