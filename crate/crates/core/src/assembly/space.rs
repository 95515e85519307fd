use crate::error::{Error, Result};
use crate::linalg::SymBand;
use crate::mesh::Mesh1d;
use crate::quadrature::gauss_rule;
use crate::shape::{ShapeSet, ShapeValues};

/// Boundary treatment at the right end of a 1D mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Natural condition at both ends.
    Free,
    /// Value pinned to zero at the right end by deleting that dof.
    /// Slope dofs at the boundary node are kept.
    Dirichlet,
}

/// A finite-element space on a 1D mesh with cached quadrature data.
#[derive(Debug, Clone)]
pub struct Space1d {
    mesh: Mesh1d,
    shapes: ShapeSet,
    boundary: Boundary,
    n_dof: usize,
    removed: Option<usize>,
    // per element, per quadrature point
    points: Vec<f64>,
    weights: Vec<f64>,
    basis: Vec<ShapeValues>,
    n_quad: usize,
}

pub type RadialSpace = Space1d;

impl Space1d {
    pub fn new(mesh: Mesh1d, shapes: ShapeSet, boundary: Boundary) -> Result<Self> {
        let dpn = shapes.dofs_per_node();
        let full = mesh.n_nodes() * dpn;
        let removed = match boundary {
            Boundary::Free => None,
            Boundary::Dirichlet => Some(mesh.n_elements() * dpn),
        };
        let n_dof = full - removed.is_some() as usize;
        if n_dof == 0 {
            return Err(Error::invalid("space has no degrees of freedom"));
        }
        let (qx, qw) = gauss_rule().unit_interval();
        let n_quad = qx.len();
        let mut points = Vec::with_capacity(mesh.n_elements() * n_quad);
        let mut weights = Vec::with_capacity(points.capacity());
        let mut basis = Vec::with_capacity(points.capacity());
        for e in 0..mesh.n_elements() {
            let h = mesh.width(e);
            for (&x, &w) in qx.iter().zip(&qw) {
                points.push(mesh.map(e, x));
                weights.push(w * h);
                basis.push(shapes.eval_unchecked(x, h));
            }
        }
        Ok(Self {
            mesh,
            shapes,
            boundary,
            n_dof,
            removed,
            points,
            weights,
            basis,
            n_quad,
        })
    }

    /// Radial space with the value pinned at the cutoff.
    pub fn radial(mesh: Mesh1d, shapes: ShapeSet) -> Result<Self> {
        Self::new(mesh, shapes, Boundary::Dirichlet)
    }

    pub fn mesh(&self) -> &Mesh1d {
        &self.mesh
    }

    pub fn shapes(&self) -> ShapeSet {
        self.shapes
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    /// Number of quadrature points over the whole mesh.
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Quadrature abscissae, element-major.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Quadrature weights including the element Jacobian (no radial measure).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Shape values at quadrature point `q` of `element`.
    pub fn basis_at(&self, element: usize, q: usize) -> &ShapeValues {
        &self.basis[element * self.n_quad + q]
    }

    /// Global dof of local slot `slot` in `element`, or `None` if deleted.
    #[inline]
    pub fn dof(&self, element: usize, slot: usize) -> Option<usize> {
        let g = element * self.shapes.dofs_per_node() + slot;
        match self.removed {
            Some(k) if g == k => None,
            Some(k) if g > k => Some(g - 1),
            _ => Some(g),
        }
    }

    /// Bandwidth of every matrix on this space.
    pub fn bandwidth(&self) -> usize {
        (self.shapes.n_local() - 1).min(self.n_dof - 1)
    }

    /// Dofs sharing an element with `i`, ascending.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let kd = self.bandwidth();
        let mut out = Vec::new();
        for e in 0..self.mesh.n_elements() {
            let local: Vec<usize> = (0..self.shapes.n_local()).filter_map(|s| self.dof(e, s)).collect();
            if local.contains(&i) {
                out.extend(local);
            }
        }
        out.retain(|&j| j.abs_diff(i) <= kd);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `M_ij = Σ_q w_q [a_q N'_i N'_j + b_q N_i N_j]` with `a`, `b` given per quadrature point.
    pub fn assemble_tabulated(&self, a: Option<&[f64]>, b: Option<&[f64]>) -> SymBand {
        let mut m = SymBand::zeros(self.n_dof, self.bandwidth());
        let nl = self.shapes.n_local();
        for e in 0..self.mesh.n_elements() {
            let mut local = [[0.0f64; 4]; 4];
            for q in 0..self.n_quad {
                let p = e * self.n_quad + q;
                let w = self.weights[p];
                let s = &self.basis[p];
                let aq = a.map_or(0.0, |a| a[p]) * w;
                let bq = b.map_or(0.0, |b| b[p]) * w;
                for i in 0..nl {
                    for j in 0..=i {
                        local[i][j] += aq * s.derivatives[i] * s.derivatives[j] + bq * s.values[i] * s.values[j];
                    }
                }
            }
            for i in 0..nl {
                let Some(gi) = self.dof(e, i) else { continue };
                for j in 0..=i {
                    let Some(gj) = self.dof(e, j) else { continue };
                    m.add(gi, gj, local[i][j]);
                }
            }
        }
        m
    }

    /// `M_ij = ∫ [a(r) N'_i N'_j + b(r) N_i N_j] dr`.
    pub fn assemble(&self, a: impl Fn(f64) -> f64, b: impl Fn(f64) -> f64) -> SymBand {
        let av: Vec<f64> = self.points.iter().map(|&r| a(r)).collect();
        let bv: Vec<f64> = self.points.iter().map(|&r| b(r)).collect();
        self.assemble_tabulated(Some(&av), Some(&bv))
    }

    /// Function values at every quadrature point for coefficient vector `c`.
    pub fn values_at_points(&self, c: &[f64]) -> Vec<f64> {
        let nl = self.shapes.n_local();
        let mut out = Vec::with_capacity(self.points.len());
        for e in 0..self.mesh.n_elements() {
            let local: Vec<f64> = (0..nl).map(|s| self.dof(e, s).map_or(0.0, |g| c[g])).collect();
            for q in 0..self.n_quad {
                let s = &self.basis[e * self.n_quad + q];
                out.push((0..nl).map(|i| s.values[i] * local[i]).sum());
            }
        }
        out
    }

    /// Evaluates the expansion with coefficients `c` at an arbitrary point.
    pub fn eval(&self, c: &[f64], r: f64) -> Result<f64> {
        let (e, x) = self
            .mesh
            .locate(r)
            .ok_or_else(|| Error::invalid(format!("point {r} outside the mesh")))?;
        let s = self.shapes.eval_unchecked(x, self.mesh.width(e));
        Ok((0..self.shapes.n_local())
            .map(|i| self.dof(e, i).map_or(0.0, |g| c[g] * s.values[i]))
            .sum())
    }

    /// Coefficients of the weighted L2 projection of `f` with weight `weight(r)`.
    pub fn project(&self, f: impl Fn(f64) -> f64, weight: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let m = self.assemble(|_| 0.0, &weight);
        let mut rhs = vec![0.0; self.n_dof];
        let nl = self.shapes.n_local();
        for e in 0..self.mesh.n_elements() {
            for q in 0..self.n_quad {
                let p = e * self.n_quad + q;
                let r = self.points[p];
                let fw = f(r) * weight(r) * self.weights[p];
                for i in 0..nl {
                    if let Some(g) = self.dof(e, i) {
                        rhs[g] += fw * self.basis[p].values[i];
                    }
                }
            }
        }
        m.cholesky()?.solve(&mut rhs);
        Ok(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    #[test]
    fn dof_numbering_c1_dirichlet() {
        let s = Space1d::radial(build_uniform_mesh(3, 3.0).unwrap(), ShapeSet::C1).unwrap();
        assert_eq!(s.n_dof(), 7);
        assert_eq!(s.dof(2, 0), Some(4));
        assert_eq!(s.dof(2, 1), Some(5));
        assert_eq!(s.dof(2, 2), None);
        assert_eq!(s.dof(2, 3), Some(6));
        assert_eq!(s.bandwidth(), 3);
        assert_eq!(s.neighbours(0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn projection_reproduces_cubic() {
        let s = Space1d::new(build_uniform_mesh(4, 2.0).unwrap(), ShapeSet::C1, Boundary::Free).unwrap();
        let f = |r: f64| 1.0 + r - 0.3 * r * r * r;
        let c = s.project(f, |r| r * r + 0.1).unwrap();
        for r in [0.0, 0.3, 1.1, 2.0] {
            assert!((s.eval(&c, r).unwrap() - f(r)).abs() < 1e-11);
        }
    }
}
