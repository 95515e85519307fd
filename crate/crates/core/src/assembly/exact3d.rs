//! Operators of the s-wave two-electron problem in `(r₁, r₂, u = cos θ₁₂)`.
//!
//! Weak form with measure `r₁² r₂² dr₁ dr₂ du`:
//! `½ψ_{r₁}² + ½ψ_{r₂}² + ½(1/r₁² + 1/r₂²) w(u) ψ_u² + V ψ²`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::radial::OperatorPair;
use crate::assembly::space::{Boundary, Space1d};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, CsrPattern};
use crate::mesh::TensorMesh3;
use crate::shape::ShapeSet;

/// Which coupling plays the role of the control parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `H = T - Z (1/r₁ + 1/r₂) + 1/r₁₂`, coupling `Z`.
    Direct,
    /// `H = T - (1/r₁ + 1/r₂) + λ/r₁₂` in units where lengths scale by `Z`, coupling `λ = 1/Z`.
    Scaled,
}

/// Weight `w(u)` of the angular kinetic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularKinetic {
    /// `w(u) = 1`.
    #[default]
    Unweighted,
    /// `w(u) = 1 - u²`, the weight that appears in the Laplacian.
    SineWeighted,
}

/// Assembled single-term operators on a tensor mesh, sharing one sparsity pattern.
#[derive(Debug, Clone)]
pub struct ExactOperators {
    pub overlap: CsrMatrix,
    pub kinetic: CsrMatrix,
    /// `1/r₁ + 1/r₂`.
    pub nuclear: CsrMatrix,
    /// `1/r₁₂`.
    pub repulsion: CsrMatrix,
    dims: [usize; 3],
}

impl ExactOperators {
    pub fn assemble(mesh: &TensorMesh3, shapes: ShapeSet, angular: AngularKinetic) -> Result<Self> {
        let s1 = Space1d::new(mesh.r1.clone(), shapes, Boundary::Dirichlet)?;
        let s2 = Space1d::new(mesh.r2.clone(), shapes, Boundary::Dirichlet)?;
        let su = Space1d::new(mesh.u.clone(), shapes, Boundary::Free)?;
        let dims = [s1.n_dof(), s2.n_dof(), su.n_dof()];
        let idx = |i1: usize, i2: usize, iu: usize| (i1 * dims[1] + i2) * dims[2] + iu;

        // radial factors
        let radial = |s: &Space1d| {
            (
                s.assemble(|_| 0.0, |r| r * r),     // S
                s.assemble(|r| 0.5 * r * r, |_| 0.0), // ½ K
                s.assemble(|_| 0.0, |_| 1.0),       // ∫NN dr
                s.assemble(|_| 0.0, |r| r),         // ∫NN r dr
            )
        };
        let (m1, k1, m10, m11) = radial(&s1);
        let (m2, k2, m20, m21) = radial(&s2);
        let mu = su.assemble(|_| 0.0, |_| 1.0);
        let ku = match angular {
            AngularKinetic::Unweighted => su.assemble(|_| 0.5, |_| 0.0),
            AngularKinetic::SineWeighted => su.assemble(|u| 0.5 * (1.0 - u * u), |_| 0.0),
        };

        let nb1: Vec<Vec<usize>> = (0..dims[0]).map(|i| s1.neighbours(i)).collect();
        let nb2: Vec<Vec<usize>> = (0..dims[1]).map(|i| s2.neighbours(i)).collect();
        let nbu: Vec<Vec<usize>> = (0..dims[2]).map(|i| su.neighbours(i)).collect();

        let n = dims[0] * dims[1] * dims[2];
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut sv = Vec::new();
        let mut tv = Vec::new();
        let mut nv = Vec::new();
        row_ptr.push(0);
        for i1 in 0..dims[0] {
            for i2 in 0..dims[1] {
                for iu in 0..dims[2] {
                    for &j1 in &nb1[i1] {
                        for &j2 in &nb2[i2] {
                            let (a1, a2) = (m1.get(i1, j1), m2.get(i2, j2));
                            let radial_kin = k1.get(i1, j1) * a2 + a1 * k2.get(i2, j2);
                            let angular_kin = m10.get(i1, j1) * a2 + a1 * m20.get(i2, j2);
                            let nuc = m11.get(i1, j1) * a2 + a1 * m21.get(i2, j2);
                            for &ju in &nbu[iu] {
                                let b = mu.get(iu, ju);
                                col_idx.push(idx(j1, j2, ju));
                                sv.push(a1 * a2 * b);
                                tv.push(radial_kin * b + angular_kin * ku.get(iu, ju));
                                nv.push(nuc * b);
                            }
                        }
                    }
                    row_ptr.push(col_idx.len());
                }
            }
        }
        let pattern = Arc::new(CsrPattern { row_ptr, col_idx });
        let with = |values: Vec<f64>| {
            let mut m = CsrMatrix::zeros(pattern.clone());
            m.values_mut().copy_from_slice(&values);
            m
        };
        let overlap = with(sv);
        let kinetic = with(tv);
        let nuclear = with(nv);
        let mut repulsion = CsrMatrix::zeros(pattern.clone());
        assemble_repulsion(&s1, &s2, &su, dims, &mut repulsion)?;
        Ok(Self {
            overlap,
            kinetic,
            nuclear,
            repulsion,
            dims,
        })
    }

    /// Dof counts along `(r₁, r₂, u)`.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.overlap.dim()
    }

    /// Flat index of a tensor dof.
    pub fn index(&self, i1: usize, i2: usize, iu: usize) -> usize {
        (i1 * self.dims[1] + i2) * self.dims[2] + iu
    }

    /// Hamiltonian at the given coupling.
    pub fn hamiltonian(&self, form: Form, coupling: f64) -> Result<CsrMatrix> {
        match form {
            Form::Direct => CsrMatrix::combine(&[
                (1.0, &self.kinetic),
                (-coupling, &self.nuclear),
                (1.0, &self.repulsion),
            ]),
            Form::Scaled => CsrMatrix::combine(&[
                (1.0, &self.kinetic),
                (-1.0, &self.nuclear),
                (coupling, &self.repulsion),
            ]),
        }
    }

    /// Hamiltonian with the electron-electron term switched off.
    pub fn separable_hamiltonian(&self, z: f64) -> Result<CsrMatrix> {
        CsrMatrix::combine(&[(1.0, &self.kinetic), (-z, &self.nuclear)])
    }

    /// The operator `∂H/∂coupling` of the chosen form.
    pub fn coupling_derivative(&self, form: Form) -> Result<CsrMatrix> {
        match form {
            Form::Direct => CsrMatrix::combine(&[(-1.0, &self.nuclear)]),
            Form::Scaled => Ok(self.repulsion.clone()),
        }
    }
}

/// `1/r₁₂` with `r₁₂² = r₁² + r₂² - 2 r₁ r₂ u`, integrated element by element
/// with sum factorization over the three quadrature axes.
fn assemble_repulsion(s1: &Space1d, s2: &Space1d, su: &Space1d, dims: [usize; 3], out: &mut CsrMatrix) -> Result<()> {
    let nq = s1.n_quad();
    let nl = s1.shapes().n_local();
    let idx = |i1: usize, i2: usize, iu: usize| (i1 * dims[1] + i2) * dims[2] + iu;
    // products φ_i φ_j at each quadrature point of one element
    let products = |s: &Space1d, e: usize| -> Vec<[[f64; 4]; 4]> {
        (0..nq)
            .map(|q| {
                let v = &s.basis_at(e, q).values;
                let mut m = [[0.0; 4]; 4];
                for i in 0..nl {
                    for j in 0..nl {
                        m[i][j] = v[i] * v[j];
                    }
                }
                m
            })
            .collect()
    };
    let ne1 = s1.mesh().n_elements();
    let ne2 = s2.mesh().n_elements();
    let neu = su.mesh().n_elements();
    let nl2 = nl * nl;
    for e1 in 0..ne1 {
        let p1 = products(s1, e1);
        for e2 in 0..ne2 {
            let p2 = products(s2, e2);
            for eu in 0..neu {
                let pu = products(su, eu);
                // G[a][b][k][k'] = Σ_c w φ_k φ_k'
                let mut g = vec![0.0; nq * nq * nl2];
                for a in 0..nq {
                    let pa = e1 * nq + a;
                    let r1 = s1.points()[pa];
                    let wa = s1.weights()[pa] * r1 * r1;
                    for b in 0..nq {
                        let pb = e2 * nq + b;
                        let r2 = s2.points()[pb];
                        let wb = s2.weights()[pb] * r2 * r2;
                        let gab = &mut g[(a * nq + b) * nl2..(a * nq + b + 1) * nl2];
                        for c in 0..nq {
                            let pc = eu * nq + c;
                            let u = su.points()[pc];
                            let r12 = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * u).max(0.0).sqrt();
                            let w = wa * wb * su.weights()[pc] / r12;
                            for k in 0..nl {
                                for kp in 0..nl {
                                    gab[k * nl + kp] += w * pu[c][k][kp];
                                }
                            }
                        }
                    }
                }
                // F[a][j j' k k'] = Σ_b φ_j φ_j' G[a][b]
                let mut f = vec![0.0; nq * nl2 * nl2];
                for a in 0..nq {
                    let fa = &mut f[a * nl2 * nl2..(a + 1) * nl2 * nl2];
                    for b in 0..nq {
                        let gab = &g[(a * nq + b) * nl2..(a * nq + b + 1) * nl2];
                        for j in 0..nl {
                            for jp in 0..nl {
                                let pj = p2[b][j][jp];
                                let row = &mut fa[(j * nl + jp) * nl2..(j * nl + jp + 1) * nl2];
                                for (x, &y) in row.iter_mut().zip(gab) {
                                    *x += pj * y;
                                }
                            }
                        }
                    }
                }
                // E[i i' j j' k k'] = Σ_a φ_i φ_i' F[a]
                let mut local = vec![0.0; nl2 * nl2 * nl2];
                for a in 0..nq {
                    let fa = &f[a * nl2 * nl2..(a + 1) * nl2 * nl2];
                    for i in 0..nl {
                        for ip in 0..nl {
                            let pi = p1[a][i][ip];
                            let row = &mut local[(i * nl + ip) * nl2 * nl2..(i * nl + ip + 1) * nl2 * nl2];
                            for (x, &y) in row.iter_mut().zip(fa) {
                                *x += pi * y;
                            }
                        }
                    }
                }
                // scatter
                for i in 0..nl {
                    let Some(g1) = s1.dof(e1, i) else { continue };
                    for j in 0..nl {
                        let Some(g2) = s2.dof(e2, j) else { continue };
                        for k in 0..nl {
                            let Some(gu) = su.dof(eu, k) else { continue };
                            let row = idx(g1, g2, gu);
                            for ip in 0..nl {
                                let Some(h1) = s1.dof(e1, ip) else { continue };
                                for jp in 0..nl {
                                    let Some(h2) = s2.dof(e2, jp) else { continue };
                                    for kp in 0..nl {
                                        let Some(hu) = su.dof(eu, kp) else { continue };
                                        let v = local[((i * nl + ip) * nl2 + (j * nl + jp)) * nl2 + k * nl + kp];
                                        out.add(row, idx(h1, h2, hu), v)?;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Convenience wrapper returning the pencil for one coupling value.
pub fn assemble_exact3d(mesh: &TensorMesh3, shapes: ShapeSet, coupling: f64, form: Form) -> Result<OperatorPair<CsrMatrix>> {
    if !(coupling > 0.0) && form == Form::Direct {
        return Err(Error::invalid(format!("nuclear charge {coupling} must be positive")));
    }
    if !(coupling >= 0.0) {
        return Err(Error::invalid(format!("coupling {coupling} must be non-negative")));
    }
    let ops = ExactOperators::assemble(mesh, shapes, AngularKinetic::default())?;
    Ok(OperatorPair {
        h: ops.hamiltonian(form, coupling)?,
        s: ops.overlap,
    })
}
