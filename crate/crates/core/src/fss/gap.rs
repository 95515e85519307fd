//! Binding gaps `ΔE = E(2e) - E(1e)` and their coupling derivatives.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::assembly::Form;
use crate::error::{Error, Result};
use crate::exact::ExactProblem;
use crate::mesh::{RadialMesh, TensorMesh3};
use crate::scf::{hydrogenic_level, scf_solve, ScfConfig, ScfMethod, Threshold};
use crate::shape::ShapeSet;

/// Which two-electron energy the gap is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    Hf,
    HfWigner,
    Lda,
    /// Three-variable solve with coupling `Z`.
    ExactDirect,
    /// Three-variable solve with coupling `λ = 1/Z`.
    #[serde(alias = "exact")]
    ExactScaled,
    /// Closed-form scaling family, see [`SyntheticGapSource`].
    Synthetic,
}

impl GapMethod {
    pub fn mean_field(self) -> Option<ScfMethod> {
        match self {
            GapMethod::Hf => Some(ScfMethod::Hf),
            GapMethod::HfWigner => Some(ScfMethod::HfWigner),
            GapMethod::Lda => Some(ScfMethod::Lda),
            _ => None,
        }
    }

    pub fn form(self) -> Option<Form> {
        match self {
            GapMethod::ExactDirect => Some(Form::Direct),
            GapMethod::ExactScaled => Some(Form::Scaled),
            _ => None,
        }
    }
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            GapMethod::Hf => "hf",
            GapMethod::HfWigner => "hf_wigner",
            GapMethod::Lda => "lda",
            GapMethod::ExactDirect => "exact_direct",
            GapMethod::ExactScaled => "exact_scaled",
            GapMethod::Synthetic => "synthetic",
        })
    }
}

impl FromStr for GapMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exact" | "exact_scaled" => Ok(GapMethod::ExactScaled),
            "exact_direct" => Ok(GapMethod::ExactDirect),
            "synthetic" => Ok(GapMethod::Synthetic),
            other => match other.parse::<ScfMethod>() {
                Ok(ScfMethod::Hf) => Ok(GapMethod::Hf),
                Ok(ScfMethod::HfWigner) => Ok(GapMethod::HfWigner),
                Ok(ScfMethod::Lda) => Ok(GapMethod::Lda),
                Err(_) => Err(Error::invalid(format!("unknown method `{other}`"))),
            },
        }
    }
}

/// One evaluated gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub method: GapMethod,
    /// `Z`, or `λ` for the scaled form.
    pub coupling: f64,
    /// Basis-size index: elements for mean-field runs, radial elements per
    /// axis for three-variable runs.
    pub index: usize,
    /// Size label entering the scaling exponents (total element count).
    pub size: f64,
    pub energy: f64,
    pub threshold: f64,
    pub gap: f64,
    /// `d(gap)/d(coupling)`.
    pub dgap: f64,
}

/// Anything that produces gaps on a family of basis sizes.
pub trait GapSource: Sync {
    fn method(&self) -> GapMethod;

    fn gap_point(&self, coupling: f64, index: usize) -> Result<GapPoint>;

    /// Size label of basis index `index`.
    fn size(&self, index: usize) -> f64 {
        index as f64
    }

    fn coupling_of_charge(&self, z: f64) -> f64 {
        match self.method() {
            GapMethod::ExactScaled => 1.0 / z,
            _ => z,
        }
    }

    fn charge_of_coupling(&self, coupling: f64) -> f64 {
        self.coupling_of_charge(coupling)
    }
}

macro_rules! forward_gap_source {
    ($($ty:ty),*) => {$(
        impl<S: GapSource + ?Sized> GapSource for $ty {
            fn method(&self) -> GapMethod {
                (**self).method()
            }
            fn gap_point(&self, coupling: f64, index: usize) -> Result<GapPoint> {
                (**self).gap_point(coupling, index)
            }
            fn size(&self, index: usize) -> f64 {
                (**self).size(index)
            }
            fn coupling_of_charge(&self, z: f64) -> f64 {
                (**self).coupling_of_charge(z)
            }
            fn charge_of_coupling(&self, coupling: f64) -> f64 {
                (**self).charge_of_coupling(coupling)
            }
        }
    )*};
}

forward_gap_source!(&S, Box<S>);

fn threshold_pair(mode: Threshold, z: f64, radial: &RadialMesh, shapes: ShapeSet) -> Result<(f64, f64)> {
    match mode {
        Threshold::Analytic => Ok((-0.5 * z * z, -z)),
        Threshold::Numeric => {
            let (e, inv_r) = hydrogenic_level(z, radial, shapes)?;
            Ok((e, -inv_r))
        }
    }
}

/// Mean-field gaps on uniform meshes of `index` elements out to `r_cut`.
#[derive(Debug, Clone)]
pub struct MeanFieldGapSource {
    pub config: ScfConfig,
    pub r_cut: f64,
    pub shapes: ShapeSet,
}

impl MeanFieldGapSource {
    pub fn new(method: ScfMethod, r_cut: f64, shapes: ShapeSet) -> Self {
        Self {
            config: ScfConfig::new(method),
            r_cut,
            shapes,
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.config.one_electron_energy = threshold;
        self
    }
}

impl GapSource for MeanFieldGapSource {
    fn method(&self) -> GapMethod {
        match self.config.method {
            ScfMethod::Hf => GapMethod::Hf,
            ScfMethod::HfWigner => GapMethod::HfWigner,
            ScfMethod::Lda => GapMethod::Lda,
        }
    }

    fn gap_point(&self, z: f64, index: usize) -> Result<GapPoint> {
        let run = || -> Result<GapPoint> {
            let mesh = RadialMesh::uniform(index, self.r_cut)?;
            let res = scf_solve(z, &mesh, self.shapes, &self.config)?;
            let (threshold, dthreshold) = threshold_pair(self.config.one_electron_energy, z, &mesh, self.shapes)?;
            let energy = res.breakdown.e_tot;
            Ok(GapPoint {
                method: self.method(),
                coupling: z,
                index,
                size: index as f64,
                energy,
                threshold,
                gap: energy - threshold,
                dgap: res.nuclear_derivative() - dthreshold,
            })
        };
        run().map_err(|e| e.at_point(z, index))
    }
}

/// Three-variable gaps on the graded tensor mesh family with `index`
/// radial elements per axis and a fixed angular count.
#[derive(Debug)]
pub struct ExactGapSource {
    pub form: Form,
    pub shapes: ShapeSet,
    pub n_angular: usize,
    pub r_cut: f64,
    pub growth: f64,
    pub threshold: Threshold,
    problems: Mutex<HashMap<usize, Arc<ExactProblem>>>,
}

impl ExactGapSource {
    pub fn new(form: Form, shapes: ShapeSet, n_angular: usize, r_cut: f64, growth: f64) -> Self {
        Self {
            form,
            shapes,
            n_angular,
            r_cut,
            growth,
            threshold: Threshold::Analytic,
            problems: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn mesh(&self, index: usize) -> Result<TensorMesh3> {
        TensorMesh3::graded(index, self.n_angular, self.r_cut, self.growth)
    }

    /// Assembled operators for `index`, built once and shared.
    pub fn problem(&self, index: usize) -> Result<Arc<ExactProblem>> {
        if let Some(p) = self.problems.lock().unwrap().get(&index) {
            return Ok(p.clone());
        }
        let p = Arc::new(ExactProblem::new(self.mesh(index)?, self.shapes)?);
        self.problems.lock().unwrap().insert(index, p.clone());
        Ok(p)
    }

    /// Drops assembled operators for indices outside `keep`.
    pub fn retain(&self, keep: impl Fn(usize) -> bool) {
        self.problems.lock().unwrap().retain(|&k, _| keep(k));
    }
}

impl GapSource for ExactGapSource {
    fn method(&self) -> GapMethod {
        match self.form {
            Form::Direct => GapMethod::ExactDirect,
            Form::Scaled => GapMethod::ExactScaled,
        }
    }

    fn size(&self, index: usize) -> f64 {
        (self.n_angular * index * index) as f64
    }

    fn gap_point(&self, coupling: f64, index: usize) -> Result<GapPoint> {
        let run = || -> Result<GapPoint> {
            let problem = self.problem(index)?;
            let res = problem.solve(self.form, coupling)?;
            let radial = &res.mesh.r1;
            let (threshold, dthreshold) = match self.form {
                Form::Direct => threshold_pair(self.threshold, coupling, radial, self.shapes)?,
                // scaled units: the one-electron problem does not depend on λ
                Form::Scaled => match self.threshold {
                    Threshold::Analytic => (-0.5, 0.0),
                    Threshold::Numeric => (hydrogenic_level(1.0, radial, self.shapes)?.0, 0.0),
                },
            };
            Ok(GapPoint {
                method: self.method(),
                coupling,
                index,
                size: self.size(index),
                energy: res.energy,
                threshold,
                gap: res.energy - threshold,
                dgap: res.coupling_derivative() - dthreshold,
            })
        };
        run().map_err(|e| e.at_point(coupling, index))
    }
}

/// Gaps of exact scaling form `ΔE = -N^{-α/ν} exp(-N^{1/ν}(Z - z_c))`.
///
/// Every Γ curve passes through `α` at `z_c`, neighbouring curves cross
/// nowhere else, and the points collapse perfectly at `(α, ν, z_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticGapSource {
    pub z_c: f64,
    pub alpha: f64,
    pub nu: f64,
}

impl SyntheticGapSource {
    pub fn new(z_c: f64, alpha: f64, nu: f64) -> Result<Self> {
        if !(z_c > 0.0 && alpha > 0.0 && nu > 0.0) || !(z_c + alpha + nu).is_finite() {
            return Err(Error::invalid("synthetic family needs positive z_c, alpha and nu"));
        }
        Ok(Self { z_c, alpha, nu })
    }
}

impl GapSource for SyntheticGapSource {
    fn method(&self) -> GapMethod {
        GapMethod::Synthetic
    }

    fn gap_point(&self, z: f64, index: usize) -> Result<GapPoint> {
        if index == 0 {
            return Err(Error::invalid("synthetic size must be positive").at_point(z, index));
        }
        let n = index as f64;
        let stretch = n.powf(1.0 / self.nu);
        let gap = -n.powf(-self.alpha / self.nu) * (-stretch * (z - self.z_c)).exp();
        Ok(GapPoint {
            method: GapMethod::Synthetic,
            coupling: z,
            index,
            size: n,
            energy: gap,
            threshold: 0.0,
            gap,
            dgap: -stretch * gap,
        })
    }
}

/// In-memory memoization of another source, keyed on the exact coupling bits.
pub struct Memo<S> {
    inner: S,
    table: Mutex<HashMap<(u64, usize), GapPoint>>,
}

impl<S: GapSource> Memo<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            table: Mutex::new(HashMap::new()),
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    /// Number of distinct points evaluated so far.
    pub fn len(&self) -> usize {
        self.table.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every evaluated point, sorted by index then coupling.
    pub fn points(&self) -> Vec<GapPoint> {
        let mut v: Vec<GapPoint> = self.table.lock().unwrap().values().copied().collect();
        v.sort_by(|a, b| a.index.cmp(&b.index).then(a.coupling.total_cmp(&b.coupling)));
        v
    }
}

impl<S: GapSource> GapSource for Memo<S> {
    fn method(&self) -> GapMethod {
        self.inner.method()
    }

    fn size(&self, index: usize) -> f64 {
        self.inner.size(index)
    }

    fn coupling_of_charge(&self, z: f64) -> f64 {
        self.inner.coupling_of_charge(z)
    }

    fn charge_of_coupling(&self, coupling: f64) -> f64 {
        self.inner.charge_of_coupling(coupling)
    }

    fn gap_point(&self, coupling: f64, index: usize) -> Result<GapPoint> {
        let key = (coupling.to_bits(), index);
        if let Some(p) = self.table.lock().unwrap().get(&key) {
            return Ok(*p);
        }
        let p = self.inner.gap_point(coupling, index)?;
        self.table.lock().unwrap().insert(key, p);
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        assert_eq!("exact".parse::<GapMethod>().unwrap(), GapMethod::ExactScaled);
        assert_eq!("exact-direct".parse::<GapMethod>().unwrap(), GapMethod::ExactDirect);
        assert_eq!("total".parse::<GapMethod>().unwrap(), GapMethod::HfWigner);
        assert_eq!("LDA".parse::<GapMethod>().unwrap(), GapMethod::Lda);
        assert!("dft".parse::<GapMethod>().is_err());
        assert_eq!(GapMethod::ExactScaled.to_string(), "exact_scaled");
    }

    #[test]
    fn lda_gap_at_helium() {
        let src = MeanFieldGapSource::new(ScfMethod::Lda, 10.0, ShapeSet::C0);
        let p = src.gap_point(2.0, 200).unwrap();
        assert!((p.gap + 0.821852).abs() < 5e-3);
        assert_eq!(p.threshold, -2.0);
        assert!(p.gap < 0.0 && p.dgap.is_finite());
    }

    #[test]
    fn mean_field_dgap_matches_finite_difference() {
        let src = MeanFieldGapSource::new(ScfMethod::Hf, 10.0, ShapeSet::C1);
        let (z, h) = (1.5, 1e-4);
        let p = src.gap_point(z, 40).unwrap();
        let fd = (src.gap_point(z + h, 40).unwrap().gap - src.gap_point(z - h, 40).unwrap().gap) / (2.0 * h);
        assert!((p.dgap - fd).abs() < 1e-5, "{} vs {fd}", p.dgap);
    }

    #[test]
    fn numeric_threshold_is_mesh_value() {
        let src = MeanFieldGapSource::new(ScfMethod::Hf, 10.0, ShapeSet::C0).with_threshold(Threshold::Numeric);
        let p = src.gap_point(2.0, 50).unwrap();
        assert!(p.threshold > -2.0 && p.threshold < -1.9, "{}", p.threshold);
    }

    #[test]
    fn exact_scaled_gap_and_derivative() {
        let src = ExactGapSource::new(Form::Scaled, ShapeSet::C0, 2, 20.0, 1.3);
        let lambda = 0.8;
        let p = src.gap_point(lambda, 5).unwrap();
        assert_eq!(p.size, 50.0);
        assert_eq!(p.threshold, -0.5);
        let h = 1e-4;
        let fd = (src.gap_point(lambda + h, 5).unwrap().gap - src.gap_point(lambda - h, 5).unwrap().gap) / (2.0 * h);
        assert!((p.dgap - fd).abs() < 1e-6);
    }

    #[test]
    fn exact_direct_derivative_includes_threshold() {
        let src = ExactGapSource::new(Form::Direct, ShapeSet::C0, 2, 20.0, 1.3);
        let z = 1.2;
        let p = src.gap_point(z, 5).unwrap();
        let h = 1e-4;
        let fd = (src.gap_point(z + h, 5).unwrap().gap - src.gap_point(z - h, 5).unwrap().gap) / (2.0 * h);
        assert!((p.dgap - fd).abs() < 1e-6);
    }

    #[test]
    fn memo_returns_identical_points() {
        let src = Memo::new(MeanFieldGapSource::new(ScfMethod::Hf, 10.0, ShapeSet::C0));
        let a = src.gap_point(1.7, 30).unwrap();
        let b = src.gap_point(1.7, 30).unwrap();
        assert_eq!(a, b);
        assert_eq!(src.len(), 1);
    }

    #[test]
    fn failures_carry_the_grid_point() {
        let src = MeanFieldGapSource::new(ScfMethod::Hf, 10.0, ShapeSet::C0);
        match src.gap_point(1.0, 0) {
            Err(Error::AtPoint { coupling, size, .. }) => {
                assert_eq!(coupling, 1.0);
                assert_eq!(size, 0);
            }
            other => panic!("expected grid-point context, got {other:?}"),
        }
    }
}
