//! Galerkin matrices for the radial one-particle problem and the
//! three-variable two-electron problem.

pub mod exact3d;
pub mod hartree;
pub mod radial;
pub mod space;

pub use exact3d::{assemble_exact3d, AngularKinetic, ExactOperators, Form};
pub use hartree::{hartree_potential, HartreePotential};
pub use radial::{
    assemble_radial, assemble_radial_with, expectation, kinetic_matrix, overlap_matrix, potential_matrix,
    potential_matrix_tabulated, OperatorPair,
};
pub use space::{Boundary, RadialSpace, Space1d};
