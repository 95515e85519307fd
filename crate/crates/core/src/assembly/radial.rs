use crate::assembly::space::{Boundary, RadialSpace};
use crate::error::{Error, Result};
use crate::linalg::{SymBand, SymOperator};
use crate::mesh::RadialMesh;
use crate::shape::ShapeSet;

/// Hamiltonian and overlap of a generalized eigenproblem `H x = ε S x`.
#[derive(Debug, Clone)]
pub struct OperatorPair<M> {
    pub h: M,
    pub s: M,
}

impl<M: SymOperator> OperatorPair<M> {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

impl OperatorPair<SymBand> {
    pub fn bandwidth(&self) -> usize {
        self.h.bandwidth().max(self.s.bandwidth())
    }
}

/// Radial kinetic energy `½ ∫ N'_i N'_j r² dr`.
pub fn kinetic_matrix(space: &RadialSpace) -> SymBand {
    space.assemble(|r| 0.5 * r * r, |_| 0.0)
}

/// Overlap `∫ N_i N_j r² dr`.
pub fn overlap_matrix(space: &RadialSpace) -> SymBand {
    space.assemble(|_| 0.0, |r| r * r)
}

/// `∫ V(r) N_i N_j r² dr`.
pub fn potential_matrix(space: &RadialSpace, potential: impl Fn(f64) -> f64) -> SymBand {
    space.assemble(|_| 0.0, |r| potential(r) * r * r)
}

/// Potential matrix from values of `V` at the space's quadrature points.
pub fn potential_matrix_tabulated(space: &RadialSpace, potential: &[f64]) -> SymBand {
    let b: Vec<f64> = space
        .points()
        .iter()
        .zip(potential)
        .map(|(&r, &v)| v * r * r)
        .collect();
    space.assemble_tabulated(None, Some(&b))
}

/// Assembles the radial s-wave problem `[-½∇² + V] ψ = ε ψ` with measure `r² dr`.
///
/// The wavefunction is pinned to zero at the cutoff; `r = 0` carries the
/// natural condition.
pub fn assemble_radial(
    mesh: &RadialMesh,
    shapes: ShapeSet,
    potential: impl Fn(f64) -> f64,
) -> Result<OperatorPair<SymBand>> {
    assemble_radial_with(mesh, shapes, potential, Boundary::Dirichlet)
}

pub fn assemble_radial_with(
    mesh: &RadialMesh,
    shapes: ShapeSet,
    potential: impl Fn(f64) -> f64,
    boundary: Boundary,
) -> Result<OperatorPair<SymBand>> {
    if mesh.start() != 0.0 {
        return Err(Error::invalid("radial mesh must start at r = 0"));
    }
    let space = RadialSpace::new(mesh.clone(), shapes, boundary)?;
    for &r in space.points() {
        let v = potential(r);
        if !v.is_finite() {
            return Err(Error::invalid(format!("potential is not finite at r = {r}")));
        }
    }
    let h = space.assemble(|r| 0.5 * r * r, |r| potential(r) * r * r);
    let s = overlap_matrix(&space);
    Ok(OperatorPair { h, s })
}

/// `cᵀ M c`.
pub fn expectation<M: SymOperator>(matrix: &M, coeffs: &[f64]) -> Result<f64> {
    if coeffs.len() != matrix.dim() {
        return Err(Error::invalid(format!(
            "coefficient length {} does not match operator dimension {}",
            coeffs.len(),
            matrix.dim()
        )));
    }
    let mut y = vec![0.0; coeffs.len()];
    matrix.apply(coeffs, &mut y);
    Ok(crate::linalg::band::dot(coeffs, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_graded_mesh, build_uniform_mesh};

    #[test]
    fn total_mass_is_volume() {
        for shapes in [ShapeSet::C0, ShapeSet::C1] {
            let mesh = build_uniform_mesh(7, 3.0).unwrap();
            let pair = assemble_radial_with(&mesh, shapes, |_| 0.0, Boundary::Free).unwrap();
            let space = RadialSpace::new(mesh, shapes, Boundary::Free).unwrap();
            // sum over value dofs only
            let values: Vec<usize> = (0..space.n_dof()).filter(|i| i % shapes.dofs_per_node() == 0).collect();
            let total: f64 = values
                .iter()
                .flat_map(|&i| values.iter().map(move |&j| (i, j)))
                .map(|(i, j)| pair.s.get(i, j))
                .sum();
            assert!((total - 9.0).abs() < 1e-10, "{shapes:?}: {total}");
        }
    }

    #[test]
    fn symmetric_and_positive() {
        let mesh = build_graded_mesh(10, 8.0, 1.2).unwrap();
        let pair = assemble_radial(&mesh, ShapeSet::C1, |r| -2.0 / r).unwrap();
        assert!(pair.s.cholesky().is_ok());
        let x: Vec<f64> = (0..pair.dim()).map(|i| ((i * 13 % 7) as f64) - 3.0).collect();
        assert!(pair.s.quad_form(&x) > 0.0);
        assert_eq!(pair.bandwidth(), 3);
    }

    #[test]
    fn rejects_singular_potential() {
        let mesh = build_uniform_mesh(4, 1.0).unwrap();
        assert!(assemble_radial(&mesh, ShapeSet::C0, |_| f64::NAN).is_err());
    }

    #[test]
    fn expectation_dimension_check() {
        let mesh = build_uniform_mesh(4, 1.0).unwrap();
        let pair = assemble_radial(&mesh, ShapeSet::C0, |_| 0.0).unwrap();
        assert!(expectation(&pair.s, &[1.0]).is_err());
    }
}
