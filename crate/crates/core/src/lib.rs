//! Exact-rational engine for quantum cohomology tables, A-infinity structures,
//! Hochschild cohomology and (matrix) Massey products.

pub mod ainf;
pub mod algebra;
pub mod cli;
pub mod data;
pub mod error;
pub mod gamma;
pub mod gw;
pub mod johnson;
pub mod linalg;
pub mod massey;
pub mod rational;
pub mod report;
pub mod trees;
pub mod y;

pub use error::{Error, Result};
