//! Run configuration shared by the `solve` and `fss` commands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fss::{CrossingOptions, GapMethod, SyntheticGapSource};
use crate::mesh::{RadialMesh, TensorMesh3};
use crate::scf::{ScfConfig, ScfMethod, Threshold};
use crate::shape::{Continuity, ShapeSet};

/// Mesh family. Mean-field runs use `elements` radial elements; the
/// three-variable runs use `elements` per radial axis and `angular`
/// elements in `cos θ12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSpec {
    pub elements: usize,
    pub r_cut: f64,
    pub growth: f64,
    pub angular: usize,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            elements: 100,
            r_cut: 10.0,
            growth: 1.0,
            angular: 3,
        }
    }
}

impl MeshSpec {
    pub fn radial(&self, elements: usize) -> Result<RadialMesh> {
        RadialMesh::graded(elements, self.r_cut, self.growth)
    }

    pub fn tensor(&self, elements: usize) -> Result<TensorMesh3> {
        TensorMesh3::graded(elements, self.angular, self.r_cut, self.growth)
    }
}

/// SCF knobs other than the method, which comes from the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScfSettings {
    pub mixing: f64,
    pub energy_tol: f64,
    pub density_tol: f64,
    pub max_iter: usize,
}

impl Default for ScfSettings {
    fn default() -> Self {
        let d = ScfConfig::default();
        Self {
            mixing: d.mixing,
            energy_tol: d.energy_tol,
            density_tol: d.density_tol,
            max_iter: d.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseSpec {
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_steps: usize,
    /// Half-width of the charge window around the extrapolated `Z_c`.
    pub z_window: f64,
    pub z_points: usize,
    /// Exponent used for the rescaling; the extrapolated `α` when absent.
    pub alpha: Option<f64>,
}

impl Default for CollapseSpec {
    fn default() -> Self {
        Self {
            nu_min: 0.6,
            nu_max: 1.1,
            nu_steps: 51,
            z_window: 0.1,
            z_points: 21,
            alpha: None,
        }
    }
}

impl CollapseSpec {
    pub fn nu_grid(&self) -> Vec<f64> {
        if self.nu_steps == 1 {
            return vec![self.nu_min];
        }
        (0..self.nu_steps)
            .map(|k| self.nu_min + (self.nu_max - self.nu_min) * k as f64 / (self.nu_steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FssSpec {
    /// Central sizes `n_min, n_min + n_step, ..., <= n_max`.
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    pub delta_n: usize,
    /// Nuclear-charge bracket searched for crossings.
    pub z_min: f64,
    pub z_max: f64,
    pub omega: f64,
    pub crossing: CrossingOptions,
    pub collapse: Option<CollapseSpec>,
}

impl Default for FssSpec {
    fn default() -> Self {
        Self {
            n_min: 10,
            n_max: 40,
            n_step: 5,
            delta_n: 1,
            z_min: 0.85,
            z_max: 1.1,
            omega: 1.0,
            crossing: CrossingOptions::default(),
            collapse: None,
        }
    }
}

impl FssSpec {
    pub fn sizes(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.n_step.max(1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub method: GapMethod,
    pub basis: Continuity,
    pub mesh: MeshSpec,
    /// Nuclear charge for `solve`.
    pub charge: f64,
    pub threshold: Threshold,
    pub scf: ScfSettings,
    pub fss: FssSpec,
    /// Parameters of the `synthetic` method.
    pub synthetic: SyntheticGapSource,
    /// No caching when absent.
    pub cache_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: GapMethod::Hf,
            basis: Continuity::C0,
            mesh: MeshSpec::default(),
            charge: 2.0,
            threshold: Threshold::Analytic,
            scf: ScfSettings::default(),
            fss: FssSpec::default(),
            synthetic: SyntheticGapSource {
                z_c: 0.91,
                alpha: 1.0,
                nu: 0.85,
            },
            cache_dir: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let config: RunConfig = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn shapes(&self) -> ShapeSet {
        ShapeSet::new(self.basis)
    }

    pub fn scf_config(&self) -> Option<ScfConfig> {
        let method: ScfMethod = self.method.mean_field()?;
        Some(ScfConfig {
            method,
            mixing: self.scf.mixing,
            energy_tol: self.scf.energy_tol,
            density_tol: self.scf.density_tol,
            max_iter: self.scf.max_iter,
            one_electron_energy: self.threshold,
            ..ScfConfig::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.mesh;
        if m.elements == 0 {
            return Err(bad("mesh.elements must be at least 1"));
        }
        positive("mesh.r_cut", m.r_cut)?;
        if !(m.growth >= 1.0) || !m.growth.is_finite() {
            return Err(bad(format!("mesh.growth must be >= 1, got {}", m.growth)));
        }
        if m.angular == 0 {
            return Err(bad("mesh.angular must be at least 1"));
        }
        positive("charge", self.charge)?;
        if let Some(c) = self.scf_config() {
            c.validate().map_err(|e| bad(e.to_string()))?;
        }
        let s = &self.synthetic;
        SyntheticGapSource::new(s.z_c, s.alpha, s.nu).map_err(|e| bad(e.to_string()))?;

        let f = &self.fss;
        if f.delta_n == 0 || f.n_min <= f.delta_n {
            return Err(bad(format!("fss needs 0 < delta_n ({}) < n_min ({})", f.delta_n, f.n_min)));
        }
        if f.n_step == 0 || f.n_max < f.n_min {
            return Err(bad("fss sizes need n_step >= 1 and n_max >= n_min"));
        }
        positive("fss.z_min", f.z_min)?;
        if !(f.z_max > f.z_min) || !f.z_max.is_finite() {
            return Err(bad(format!("fss bracket [{}, {}] is empty", f.z_min, f.z_max)));
        }
        positive("fss.omega", f.omega)?;
        if f.crossing.scan_points < 2 {
            return Err(bad("fss.crossing.scan_points must be at least 2"));
        }
        positive("fss.crossing.tol", f.crossing.tol)?;
        positive("fss.crossing.residual_tol", f.crossing.residual_tol)?;
        if let Some(c) = &f.collapse {
            positive("fss.collapse.nu_min", c.nu_min)?;
            if !(c.nu_max >= c.nu_min) || c.nu_steps == 0 {
                return Err(bad("fss.collapse needs nu_max >= nu_min and nu_steps >= 1"));
            }
            positive("fss.collapse.z_window", c.z_window)?;
            if c.z_points < 2 {
                return Err(bad("fss.collapse.z_points must be at least 2"));
            }
            if let Some(a) = c.alpha {
                positive("fss.collapse.alpha", a)?;
            }
        }
        Ok(())
    }
}
