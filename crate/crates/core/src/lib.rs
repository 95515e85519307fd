//! Finite-element solvers for the two-electron atom and a finite-size
//! scaling analysis of its critical nuclear charge.

pub mod assembly;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod fss;
pub mod linalg;
pub mod mesh;
pub mod pipeline;
pub mod quadrature;
pub mod scf;
pub mod shape;

pub use error::{Error, Result};
