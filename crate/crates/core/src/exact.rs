//! Ground state of the two-electron s-wave problem on a tensor mesh.

use serde::{Deserialize, Serialize};

use crate::assembly::{expectation, AngularKinetic, ExactOperators, Form, OperatorPair};
use crate::eigen::{solve_shift_invert_with, ShiftInvertOptions};
use crate::error::{Error, Result};
use crate::mesh::TensorMesh3;
use crate::shape::ShapeSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub form: Form,
    /// `Z` for the direct form, `λ = 1/Z` for the scaled form.
    pub coupling: f64,
    /// Ground energy; in scaled units for the scaled form (`E = Z² Ē`).
    pub energy: f64,
    pub coefficients: Vec<f64>,
    /// `⟨1/r₁₂⟩`.
    pub inv_r12: f64,
    /// `⟨1/r₁ + 1/r₂⟩`.
    pub inv_r_sum: f64,
    pub shapes: ShapeSet,
    pub mesh: TensorMesh3,
    pub shift: f64,
    pub residual: f64,
}

impl ExactResult {
    /// `dE/d(coupling)` by Hellmann-Feynman.
    pub fn coupling_derivative(&self) -> f64 {
        match self.form {
            Form::Direct => -self.inv_r_sum,
            Form::Scaled => self.inv_r12,
        }
    }

    /// Energy in hartree regardless of form.
    pub fn energy_hartree(&self) -> f64 {
        match self.form {
            Form::Direct => self.energy,
            Form::Scaled => self.energy / (self.coupling * self.coupling),
        }
    }
}

/// Assembled operators for one mesh, reusable across couplings.
#[derive(Debug, Clone)]
pub struct ExactProblem {
    mesh: TensorMesh3,
    shapes: ShapeSet,
    ops: ExactOperators,
}

impl ExactProblem {
    pub fn new(mesh: TensorMesh3, shapes: ShapeSet) -> Result<Self> {
        Self::with_angular(mesh, shapes, AngularKinetic::default())
    }

    pub fn with_angular(mesh: TensorMesh3, shapes: ShapeSet, angular: AngularKinetic) -> Result<Self> {
        let ops = ExactOperators::assemble(&mesh, shapes, angular)?;
        Ok(Self { mesh, shapes, ops })
    }

    pub fn operators(&self) -> &ExactOperators {
        &self.ops
    }

    pub fn n_dof(&self) -> usize {
        self.ops.dim()
    }

    /// Energy of two non-interacting hydrogenic electrons in the form's units.
    pub fn separable_limit(form: Form, coupling: f64) -> f64 {
        match form {
            Form::Direct => -coupling * coupling,
            Form::Scaled => -1.0,
        }
    }

    pub fn solve(&self, form: Form, coupling: f64) -> Result<ExactResult> {
        match form {
            Form::Direct if !(coupling > 0.0) => {
                return Err(Error::invalid(format!("nuclear charge {coupling} must be positive")))
            }
            Form::Scaled if !(coupling >= 0.0) => {
                return Err(Error::invalid(format!("coupling {coupling} must be non-negative")))
            }
            _ => {}
        }
        let h = self.ops.hamiltonian(form, coupling)?;
        let pair = OperatorPair {
            h,
            s: self.ops.overlap.clone(),
        };
        let base = Self::separable_limit(form, coupling);
        let opts = ShiftInvertOptions::default();
        let (sol, shift) = match solve_shift_invert_with(&pair, 1, 1.1 * base, &opts) {
            Err(Error::ShiftCollision { .. }) => (solve_shift_invert_with(&pair, 1, 1.3 * base, &opts)?, 1.3 * base),
            other => (other?, 1.1 * base),
        };
        let c = sol.eigenvectors.into_iter().next().unwrap();
        Ok(ExactResult {
            form,
            coupling,
            energy: sol.eigenvalues[0],
            inv_r12: expectation(&self.ops.repulsion, &c)?,
            inv_r_sum: expectation(&self.ops.nuclear, &c)?,
            coefficients: c,
            shapes: self.shapes,
            mesh: self.mesh.clone(),
            shift,
            residual: sol.residuals[0],
        })
    }
}

/// Assembles and solves in one call.
pub fn exact_solve(coupling: f64, mesh: &TensorMesh3, shapes: ShapeSet, form: Form) -> Result<ExactResult> {
    ExactProblem::new(mesh.clone(), shapes)?.solve(form, coupling)
}
