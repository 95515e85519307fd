//! Closed-shell self-consistent field for two electrons in one spatial orbital.
//!
//! Orbitals follow the convention `∫ψ² r² dr = 1` (the `√4π` is absorbed),
//! so the physical density is `ρ = 2ψ²/4π`.

pub mod functionals;

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::{hartree_potential, kinetic_matrix, overlap_matrix, potential_matrix, potential_matrix_tabulated};
use crate::assembly::{OperatorPair, RadialSpace};
use crate::eigen::lowest_eigenpair;
use crate::error::{Error, Result};
use crate::linalg::band::dot;
use crate::linalg::SymBand;
use crate::mesh::RadialMesh;
use crate::shape::ShapeSet;

pub use functionals::{lda_potentials, wigner_correlation_potential, wigner_seitz_radius};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScfMethod {
    /// Hartree-Fock; for the singlet the exchange term cancels half the Hartree term.
    Hf,
    /// Hartree-Fock with the Wigner correlation potential.
    HfWigner,
    /// Kohn-Sham with local exchange and Wigner-form correlation.
    Lda,
}

impl std::fmt::Display for ScfMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            ScfMethod::Hf => "hf",
            ScfMethod::HfWigner => "hf_wigner",
            ScfMethod::Lda => "lda",
        })
    }
}

impl FromStr for ScfMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "hf" => Ok(ScfMethod::Hf),
            "hf_wigner" | "total" => Ok(ScfMethod::HfWigner),
            "lda" => Ok(ScfMethod::Lda),
            other => Err(Error::invalid(format!("unknown mean-field method `{other}`"))),
        }
    }
}

/// One-electron threshold used to form binding gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// `-Z²/2`.
    #[default]
    Analytic,
    /// Lowest eigenvalue of the hydrogenic problem on the same mesh.
    Numeric,
}

impl FromStr for Threshold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Threshold::Analytic),
            "numeric" => Ok(Threshold::Numeric),
            other => Err(Error::invalid(format!("unknown threshold mode `{other}`"))),
        }
    }
}

/// Density fed to the Wigner-Seitz radius of the correlation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationDensity {
    /// `2ψ²` with the `4π` left absorbed in the orbital.
    #[default]
    Absorbed,
    /// The physical density `2ψ²/4π`.
    Physical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScfConfig {
    pub method: ScfMethod,
    /// Weight of the newly predicted orbital in the linear mix.
    pub mixing: f64,
    pub energy_tol: f64,
    pub density_tol: f64,
    pub max_iter: usize,
    pub one_electron_energy: Threshold,
    pub correlation_density: CorrelationDensity,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            method: ScfMethod::Hf,
            mixing: 0.5,
            energy_tol: 1e-9,
            density_tol: 1e-8,
            max_iter: 200,
            one_electron_energy: Threshold::Analytic,
            correlation_density: CorrelationDensity::Absorbed,
        }
    }
}

impl ScfConfig {
    pub fn new(method: ScfMethod) -> Self {
        Self {
            method,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::invalid(format!("mixing {} must lie in (0, 1]", self.mixing)));
        }
        if !(self.energy_tol > 0.0) || !(self.density_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Energy components in hartree.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub e_tot: f64,
    pub e_kin: f64,
    pub e_en: f64,
    pub e_h: f64,
    pub e_x: f64,
    pub e_c: f64,
    /// Orbital eigenvalue.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScfResult {
    pub method: ScfMethod,
    pub z: f64,
    pub mesh: RadialMesh,
    pub shapes: ShapeSet,
    /// Orbital coefficients with `cᵀ S c = 1`.
    pub coefficients: Vec<f64>,
    pub breakdown: EnergyBreakdown,
    pub iterations: usize,
    pub converged: bool,
    /// Set when `⟨r⟩ > 0.9 r_cut`: the orbital is leaning on the box.
    pub unbound: bool,
    /// `⟨r⟩`.
    pub mean_radius: f64,
    /// `⟨1/r⟩` of the orbital.
    pub inverse_radius: f64,
    pub density_residual: f64,
}

impl ScfResult {
    /// `ψ(r)`; zero outside the mesh.
    pub fn orbital(&self, r: f64) -> f64 {
        let Some((e, x)) = self.mesh.locate(r) else { return 0.0 };
        let s = self.shapes.eval_unchecked(x, self.mesh.width(e));
        let dpn = self.shapes.dofs_per_node();
        let removed = self.mesh.n_elements() * dpn;
        (0..self.shapes.n_local())
            .map(|i| {
                let g = e * dpn + i;
                match g.cmp(&removed) {
                    std::cmp::Ordering::Less => self.coefficients[g] * s.values[i],
                    std::cmp::Ordering::Equal => 0.0,
                    std::cmp::Ordering::Greater => self.coefficients[g - 1] * s.values[i],
                }
            })
            .sum()
    }

    /// Physical density `2ψ²/4π`.
    pub fn density(&self, r: f64) -> f64 {
        2.0 * self.orbital(r).powi(2) / (4.0 * PI)
    }

    /// `dE/dZ` by Hellmann-Feynman: `⟨-1/r₁ - 1/r₂⟩`.
    pub fn nuclear_derivative(&self) -> f64 {
        -2.0 * self.inverse_radius
    }
}

struct Operators {
    space: RadialSpace,
    t: SymBand,
    s: SymBand,
    ven: SymBand,
    inv_r: SymBand,
    r1: SymBand,
}

impl Operators {
    fn new(z: f64, mesh: &RadialMesh, shapes: ShapeSet) -> Result<Self> {
        let space = RadialSpace::radial(mesh.clone(), shapes)?;
        Ok(Self {
            t: kinetic_matrix(&space),
            s: overlap_matrix(&space),
            ven: potential_matrix(&space, |r| -z / r),
            inv_r: potential_matrix(&space, |r| 1.0 / r),
            r1: potential_matrix(&space, |r| r),
            space,
        })
    }

    fn normalize(&self, c: &mut [f64]) {
        let n = self.s.quad_form(c).sqrt();
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// Potentials and energies of one orbital at the quadrature points.
struct MeanField {
    /// Everything except `-Z/r`, at quadrature points.
    v_other: Vec<f64>,
    e_h: f64,
    e_x: f64,
    e_c: f64,
}

fn mean_field(ops: &Operators, method: ScfMethod, corr: CorrelationDensity, c: &[f64]) -> Result<MeanField> {
    let space = &ops.space;
    let psi = space.values_at_points(c);
    let pts = space.points();
    let wts = space.weights();
    // electrons in the Hartree density: HF drops the self-interaction, LDA keeps both
    let n_h = match method {
        ScfMethod::Hf | ScfMethod::HfWigner => 1.0,
        ScfMethod::Lda => 2.0,
    };
    let vh = hartree_potential(|r| n_h * space.eval(c, r).map(|v| v * v).unwrap_or(0.0), space.mesh(), n_h)?;
    let vh_q = vh.eval_many(pts);
    let rs_of = |p: f64| {
        let rho2 = 2.0 * p * p;
        match corr {
            CorrelationDensity::Absorbed => wigner_seitz_radius(rho2),
            CorrelationDensity::Physical => wigner_seitz_radius(rho2 / (4.0 * PI)),
        }
    };
    let mut v_other = vh_q.clone();
    let (mut e_h, mut e_x, mut e_c) = (0.0, 0.0, 0.0);
    for q in 0..pts.len() {
        let r2w = pts[q] * pts[q] * wts[q];
        let p2 = psi[q] * psi[q];
        e_h += p2 * vh_q[q] * r2w;
        match method {
            ScfMethod::Hf => {}
            ScfMethod::HfWigner => {
                let vc = functionals::wigner_correlation_energy(rs_of(psi[q]));
                v_other[q] += vc;
                e_c += p2 * vc * r2w;
            }
            ScfMethod::Lda => {
                let rho = 2.0 * p2 / (4.0 * PI);
                let rs = rs_of(psi[q]);
                v_other[q] += functionals::lda_exchange_potential(rho) + functionals::lda_correlation_potential(rs);
                // ∫ f d³r = ∫ f 4π r² dr
                e_x += 4.0 * PI * functionals::lda_exchange_energy_density(rho) * r2w;
                e_c += 2.0 * p2 * functionals::wigner_correlation_energy(rs) * r2w;
            }
        }
    }
    Ok(MeanField { v_other, e_h, e_x, e_c })
}

fn breakdown(ops: &Operators, field: &MeanField, c: &[f64], epsilon: f64) -> EnergyBreakdown {
    let e_kin = 2.0 * ops.t.quad_form(c);
    let e_en = 2.0 * ops.ven.quad_form(c);
    EnergyBreakdown {
        e_tot: e_kin + e_en + field.e_h + field.e_x + field.e_c,
        e_kin,
        e_en,
        e_h: field.e_h,
        e_x: field.e_x,
        e_c: field.e_c,
        epsilon,
    }
}

fn density_difference(ops: &Operators, a: &[f64], b: &[f64]) -> f64 {
    let pa = ops.space.values_at_points(a);
    let pb = ops.space.values_at_points(b);
    let pts = ops.space.points();
    let wts = ops.space.weights();
    (0..pts.len())
        .map(|q| {
            let d = 2.0 * (pa[q] * pa[q] - pb[q] * pb[q]);
            d * d * pts[q] * pts[q] * wts[q]
        })
        .sum::<f64>()
        .sqrt()
}

/// Converges the chosen mean-field method for nuclear charge `z`.
pub fn scf_solve(z: f64, mesh: &RadialMesh, shapes: ShapeSet, config: &ScfConfig) -> Result<ScfResult> {
    scf_solve_from(z, mesh, shapes, config, None)
}

/// As [`scf_solve`], starting from the given orbital coefficients instead
/// of the projected hydrogenic orbital.
pub fn scf_solve_from(
    z: f64,
    mesh: &RadialMesh,
    shapes: ShapeSet,
    config: &ScfConfig,
    start: Option<&[f64]>,
) -> Result<ScfResult> {
    if !(z > 0.0) {
        return Err(Error::invalid(format!("nuclear charge {z} must be positive")));
    }
    config.validate()?;
    let ops = Operators::new(z, mesh, shapes)?;
    let mut c = match start {
        Some(s) if s.len() == ops.space.n_dof() => s.to_vec(),
        _ => {
            let norm = 2.0 * z.powf(1.5);
            ops.space.project(|r| norm * (-z * r).exp(), |r| r * r)?
        }
    };
    ops.normalize(&mut c);

    let mut last_energy = f64::NAN;
    let mut epsilon_guess = -0.5 * z * z;
    let mut last = EnergyBreakdown::default();
    for iter in 1..=config.max_iter {
        let field = mean_field(&ops, config.method, config.correlation_density, &c)?;
        let mut fock = ops.t.combine(1.0, &ops.ven, 1.0)?;
        fock.axpy(1.0, &potential_matrix_tabulated(&ops.space, &field.v_other))?;
        let pair = OperatorPair { h: fock, s: ops.s.clone() };
        let guess = epsilon_guess - 0.05 * epsilon_guess.abs().max(0.1);
        let (epsilon, mut predicted) = lowest_eigenpair(&pair, guess, Some(c.clone()))?;
        epsilon_guess = epsilon;
        if dot(&predicted, &{
            let mut sc = vec![0.0; c.len()];
            ops.s.mul_vec(&c, &mut sc);
            sc
        }) < 0.0
        {
            predicted.iter_mut().for_each(|x| *x = -*x);
        }
        let energies = breakdown(&ops, &field, &c, epsilon);
        let residual = density_difference(&ops, &predicted, &c);
        let d_energy = (energies.e_tot - last_energy).abs();
        log::debug!(
            "scf {} z={z} iter {iter}: E = {:.12} dE = {d_energy:e} residual = {residual:e}",
            config.method,
            energies.e_tot
        );
        last = energies;
        if d_energy < config.energy_tol && residual < config.density_tol {
            let mean_radius = ops.r1.quad_form(&c);
            let r_cut = mesh.r_cut();
            let unbound = mean_radius > 0.9 * r_cut;
            if unbound {
                log::warn!("orbital at Z = {z} has <r> = {mean_radius:.3} close to r_cut = {r_cut}");
            }
            return Ok(ScfResult {
                method: config.method,
                z,
                mesh: mesh.clone(),
                shapes,
                inverse_radius: ops.inv_r.quad_form(&c),
                coefficients: c,
                breakdown: energies,
                iterations: iter,
                converged: true,
                unbound,
                mean_radius,
                density_residual: residual,
            });
        }
        last_energy = energies.e_tot;
        let m = config.mixing;
        c.iter_mut().zip(&predicted).for_each(|(a, b)| *a = (1.0 - m) * *a + m * b);
        ops.normalize(&mut c);
    }
    Err(Error::ScfNotConverged {
        iterations: config.max_iter,
        last_energy: last.e_tot,
        last: Box::new(last),
    })
}

/// One-electron ground energy at charge `z`, either `-Z²/2` or the mesh value.
pub fn one_electron_energy(z: f64, mesh: &RadialMesh, shapes: ShapeSet, mode: Threshold) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::invalid(format!("nuclear charge {z} must be positive")));
    }
    match mode {
        Threshold::Analytic => Ok(-0.5 * z * z),
        Threshold::Numeric => Ok(hydrogenic_level(z, mesh, shapes)?.0),
    }
}

/// Lowest hydrogenic eigenvalue on the mesh and its `⟨1/r⟩`, so that
/// `dε/dZ = -⟨1/r⟩`.
pub fn hydrogenic_level(z: f64, mesh: &RadialMesh, shapes: ShapeSet) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(Error::invalid(format!("nuclear charge {z} must be positive")));
    }
    let ops = Operators::new(z, mesh, shapes)?;
    let pair = OperatorPair {
        h: ops.t.combine(1.0, &ops.ven, 1.0)?,
        s: ops.s.clone(),
    };
    let (e, mut c) = lowest_eigenpair(&pair, -0.5 * z * z, None)?;
    ops.normalize(&mut c);
    Ok((e, ops.inv_r.quad_form(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    #[test]
    fn analytic_threshold() {
        let mesh = build_uniform_mesh(10, 10.0).unwrap();
        assert_eq!(one_electron_energy(1.0, &mesh, ShapeSet::C0, Threshold::Analytic).unwrap(), -0.5);
        assert!((one_electron_energy(0.9, &mesh, ShapeSet::C0, Threshold::Analytic).unwrap() + 0.405).abs() < 1e-15);
    }

    #[test]
    fn numeric_threshold() {
        let mesh = build_uniform_mesh(200, 10.0).unwrap();
        let e = one_electron_energy(1.0, &mesh, ShapeSet::C0, Threshold::Numeric).unwrap();
        assert!((e + 0.4999).abs() < 2e-3);
        assert!(e > -0.5);
    }

    #[test]
    fn hydrogenic_level_derivative() {
        let mesh = build_uniform_mesh(200, 12.0).unwrap();
        let (e, inv_r) = hydrogenic_level(1.3, &mesh, ShapeSet::C1).unwrap();
        let h = 1e-4;
        let ep = hydrogenic_level(1.3 + h, &mesh, ShapeSet::C1).unwrap().0;
        let em = hydrogenic_level(1.3 - h, &mesh, ShapeSet::C1).unwrap().0;
        assert!(((ep - em) / (2.0 * h) + inv_r).abs() < 1e-6);
        assert!((e + 0.5 * 1.69).abs() < 1e-8);
    }

    #[test]
    fn config_validation() {
        let mut c = ScfConfig::default();
        assert!(c.validate().is_ok());
        c.mixing = 0.0;
        assert!(c.validate().is_err());
        c.mixing = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!("hf-wigner".parse::<ScfMethod>().unwrap(), ScfMethod::HfWigner);
        assert_eq!(ScfMethod::HfWigner.to_string(), "hf_wigner");
        assert!("pbe".parse::<ScfMethod>().is_err());
    }

    #[test]
    fn hf_breakdown_adds_up() {
        let mesh = build_uniform_mesh(60, 10.0).unwrap();
        let r = scf_solve(2.0, &mesh, ShapeSet::C0, &ScfConfig::new(ScfMethod::Hf)).unwrap();
        let b = r.breakdown;
        assert!((b.e_tot - (b.e_kin + b.e_en + b.e_h + b.e_x + b.e_c)).abs() < 1e-12);
        assert_eq!(b.e_x, 0.0);
        assert!(b.e_h > 0.0);
        assert!(r.converged && !r.unbound);
        assert!((r.orbital(0.0) - r.coefficients[0]).abs() < 1e-14);
    }
}
