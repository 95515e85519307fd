use crate::error::Result;
use crate::mesh::RadialMesh;
use crate::quadrature::gauss_rule;

/// Spherical electrostatic potential of a radial density.
///
/// The density is in the convention where `4π` is absorbed, i.e.
/// `∫ ρ(r) r² dr` is the electron count, so
/// `V_H(r) = (1/r) ∫₀^r ρ r'² dr' + ∫_r^{r_cut} ρ r' dr'`.
pub struct HartreePotential<'a> {
    mesh: RadialMesh,
    density: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    // charge inside node k, and ∫ρ r dr beyond node k
    enclosed: Vec<f64>,
    outer: Vec<f64>,
}

impl<'a> HartreePotential<'a> {
    /// Total charge `∫ρ r² dr` on the mesh.
    pub fn charge(&self) -> f64 {
        *self.enclosed.last().unwrap()
    }

    pub fn eval(&self, r: f64) -> f64 {
        let Some((e, _)) = self.mesh.locate(r) else {
            // outside the mesh all charge is enclosed
            return if r > 0.0 { self.charge() / r } else { self.outer[0] };
        };
        let a = self.mesh.left(e);
        let rule = gauss_rule();
        let q_in = self.enclosed[e] + rule.integrate_on(a, r, |s| (self.density)(s) * s * s);
        let q_out = self.outer[e + 1] + rule.integrate_on(r, self.mesh.nodes()[e + 1], |s| (self.density)(s) * s);
        if r > 0.0 {
            q_in / r + q_out
        } else {
            q_out
        }
    }

    /// Values at many points.
    pub fn eval_many(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&r| self.eval(r)).collect()
    }
}

/// Builds the potential of `density` by per-element quadrature with
/// cumulative sums over elements. A charge differing from `n_electrons` by
/// more than 1e-6 is logged, not rejected.
pub fn hartree_potential<'a>(
    density: impl Fn(f64) -> f64 + Send + Sync + 'a,
    mesh: &RadialMesh,
    n_electrons: f64,
) -> Result<HartreePotential<'a>> {
    let rule = gauss_rule();
    let n = mesh.n_elements();
    let mut enclosed = vec![0.0; n + 1];
    let mut outer = vec![0.0; n + 1];
    let nodes = mesh.nodes();
    for e in 0..n {
        enclosed[e + 1] = enclosed[e] + rule.integrate_on(nodes[e], nodes[e + 1], |s| density(s) * s * s);
    }
    for e in (0..n).rev() {
        outer[e] = outer[e + 1] + rule.integrate_on(nodes[e], nodes[e + 1], |s| density(s) * s);
    }
    if (enclosed[n] - n_electrons).abs() > 1e-6 {
        log::warn!("hartree density holds {} electrons, expected {}", enclosed[n], n_electrons);
    }
    Ok(HartreePotential {
        mesh: mesh.clone(),
        density: Box::new(density),
        enclosed,
        outer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    fn analytic(r: f64) -> f64 {
        1.0 / r - (-2.0 * r).exp() * (1.0 + 1.0 / r)
    }

    #[test]
    fn hydrogen_density() {
        let mesh = build_uniform_mesh(200, 30.0).unwrap();
        let vh = hartree_potential(|r: f64| 4.0 * (-2.0 * r).exp(), &mesh, 1.0).unwrap();
        for r in [1.0, 2.0, 5.0, 0.37] {
            assert!((vh.eval(r) - analytic(r)).abs() < 1e-10, "r = {r}");
        }
        assert!((vh.eval(0.0) - 1.0).abs() < 1e-10);
        assert!((vh.eval(1e-6) - 1.0).abs() < 1e-5);
        assert!((vh.charge() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_density() {
        let mesh = build_uniform_mesh(10, 5.0).unwrap();
        let vh = hartree_potential(|_| 0.0, &mesh, 0.0).unwrap();
        for r in [0.0, 0.5, 4.9] {
            assert_eq!(vh.eval(r), 0.0);
        }
    }
}
