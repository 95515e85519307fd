//! Cached, file-producing drivers behind the command-line tool.
//!
//! [`cmd_solve`] runs one ground-state solve and writes `energies.csv` and
//! `result.json`. [`cmd_fss`] runs the full scaling analysis and writes
//! `gamma.csv`, `crossings.csv`, `extrapolation.csv`, `summary.json` and,
//! when requested, `collapse.csv` and `nu_scan.csv`.

pub mod cache;
pub mod config;
pub mod output;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cache::{Cache, CachedSource, CODE_VERSION};
pub use config::{CollapseSpec, FssSpec, MeshSpec, RunConfig, ScfSettings};
pub use output::{CollapseRow, CrossingRow, EnergyRow, ExtrapolationRow, GammaRow, NuScanRow, Summary};

use crate::assembly::Form;
use crate::error::{Error, Result};
use crate::exact::{ExactProblem, ExactResult};
use crate::fss::{
    bst_extrapolate, crossing_chain, scan_grid, scan_nu, collapse, Collapse, Crossing, ExactGapSource, Extrapolation,
    GammaSource, GapGamma, GapMethod, GapSource, MeanFieldGapSource, Memo,
};
use crate::scf::{scf_solve, ScfResult};

/// Process exit status for an error: 2 for configuration problems, 4 when
/// the scaling analysis finds nothing to report, 3 for everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e.root_cause() {
        Error::Config(_) => 2,
        Error::NoCrossing { .. }
        | Error::DegenerateSequence { .. }
        | Error::CollapseUndefined(_)
        | Error::UndefinedDelta(..)
        | Error::GammaPole(_) => 4,
        _ => 3,
    }
}

fn open_cache(config: &RunConfig) -> Result<Option<Cache>> {
    config.cache_dir.as_ref().map(Cache::open).transpose()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveRecord {
    MeanField(ScfResult),
    Exact(ExactResult),
}

impl SolveRecord {
    pub fn energy_row(&self, method: GapMethod) -> EnergyRow {
        match self {
            SolveRecord::MeanField(r) => {
                let b = r.breakdown;
                EnergyRow {
                    method: method.to_string(),
                    z: r.z,
                    elements: r.mesh.n_elements(),
                    basis: r.shapes.continuity.to_string(),
                    e_tot: b.e_tot,
                    e_kin: Some(b.e_kin),
                    e_en: Some(b.e_en),
                    e_h: Some(b.e_h),
                    e_x: Some(b.e_x),
                    e_c: Some(b.e_c),
                    epsilon: Some(b.epsilon),
                }
            }
            SolveRecord::Exact(r) => {
                // back to hartree: scaled lengths are r·Z and energies E/Z²
                let (z, e_en, e_ee) = match r.form {
                    Form::Direct => (r.coupling, -r.coupling * r.inv_r_sum, r.inv_r12),
                    Form::Scaled => {
                        let z = 1.0 / r.coupling;
                        (z, -z * z * r.inv_r_sum, z * r.inv_r12)
                    }
                };
                let e_tot = r.energy_hartree();
                EnergyRow {
                    method: method.to_string(),
                    z,
                    elements: r.mesh.r1.n_elements(),
                    basis: r.shapes.continuity.to_string(),
                    e_tot,
                    e_kin: Some(e_tot - e_en - e_ee),
                    e_en: Some(e_en),
                    e_h: Some(e_ee),
                    e_x: None,
                    e_c: None,
                    epsilon: None,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub record: SolveRecord,
    pub energies: EnergyRow,
    pub from_cache: bool,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    config: &'a RunConfig,
    energies: &'a EnergyRow,
    record: &'a SolveRecord,
}

fn run_solve(config: &RunConfig) -> Result<SolveRecord> {
    let shapes = config.shapes();
    let n = config.mesh.elements;
    let z = config.charge;
    match config.method {
        GapMethod::Hf | GapMethod::HfWigner | GapMethod::Lda => {
            let scf = config.scf_config().expect("mean-field method");
            let mesh = config.mesh.radial(n)?;
            Ok(SolveRecord::MeanField(scf_solve(z, &mesh, shapes, &scf)?))
        }
        GapMethod::ExactDirect | GapMethod::ExactScaled => {
            let form = config.method.form().expect("exact method");
            let coupling = if form == Form::Direct { z } else { 1.0 / z };
            let problem = ExactProblem::new(config.mesh.tensor(n)?, shapes)?;
            Ok(SolveRecord::Exact(problem.solve(form, coupling)?))
        }
        GapMethod::Synthetic => Err(Error::Config("the synthetic method has no solve; use fss".into())),
    }
}

/// One ground-state solve, served from the cache when possible.
pub fn cmd_solve(config: &RunConfig) -> Result<SolveReport> {
    config.validate()?;
    let cache = open_cache(config)?;
    let descriptor = serde_json::json!({
        "kind": "solve",
        "method": config.method,
        "basis": config.basis,
        "mesh": config.mesh,
        "charge": config.charge,
        "scf": config.method.mean_field().map(|_| &config.scf),
    });
    let key = Cache::key(&descriptor)?;
    let cached = cache.as_ref().and_then(|c| c.get::<SolveRecord>(&key));
    let from_cache = cached.is_some();
    let record = match cached {
        Some(r) => r,
        None => {
            let r = run_solve(config)?;
            if let Some(c) = &cache {
                c.put(&key, &r)?;
            }
            r
        }
    };
    let energies = record.energy_row(config.method);

    std::fs::create_dir_all(&config.output_dir)?;
    output::write_csv(&config.output_dir.join("energies.csv"), std::slice::from_ref(&energies))?;
    output::write_json(
        &config.output_dir.join("result.json"),
        &SolveOutput {
            config,
            energies: &energies,
            record: &record,
        },
    )?;
    Ok(SolveReport {
        record,
        energies,
        from_cache,
    })
}

/// The gap source a configuration describes, behind the cache.
pub fn gap_source(config: &RunConfig) -> Result<CachedSource<Box<dyn GapSource + Send>>> {
    let shapes = config.shapes();
    let m = &config.mesh;
    let inner: Box<dyn GapSource + Send> = match config.method {
        GapMethod::Hf | GapMethod::HfWigner | GapMethod::Lda => {
            if m.growth != 1.0 {
                return Err(Error::Config("mean-field scaling runs use uniform meshes (growth = 1)".into()));
            }
            Box::new(MeanFieldGapSource {
                config: config.scf_config().expect("mean-field method"),
                r_cut: m.r_cut,
                shapes,
            })
        }
        GapMethod::ExactDirect | GapMethod::ExactScaled => Box::new(
            ExactGapSource::new(config.method.form().expect("exact method"), shapes, m.angular, m.r_cut, m.growth)
                .with_threshold(config.threshold),
        ),
        GapMethod::Synthetic => Box::new(config.synthetic),
    };
    let descriptor = serde_json::json!({
        "method": config.method,
        "basis": config.basis,
        "r_cut": m.r_cut,
        "growth": m.growth,
        "angular": config.method.form().map(|_| m.angular),
        "threshold": config.threshold,
        "scf": config.method.mean_field().map(|_| &config.scf),
        "synthetic": (config.method == GapMethod::Synthetic).then_some(config.synthetic),
    });
    Ok(CachedSource::new(inner, open_cache(config)?, descriptor))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FssReport {
    pub summary: Summary,
    pub crossings: Vec<Crossing>,
    pub z_c: Extrapolation,
    pub alpha: Extrapolation,
    pub collapse: Option<Collapse>,
    pub nu_scan: Vec<(f64, f64)>,
}

/// Evaluates every point in parallel so the sequential searches that
/// follow hit the memo. Failures resurface when the point is used.
fn prefetch<S: GapSource>(source: &S, jobs: &[(f64, usize)]) {
    jobs.par_iter().for_each(|&(c, n)| {
        if let Err(e) = source.gap_point(c, n) {
            log::debug!("prefetch of ({c}, {n}) failed: {e}");
        }
    });
}

/// Crossings, their extrapolation and optionally the data collapse.
pub fn cmd_fss(config: &RunConfig) -> Result<FssReport> {
    config.validate()?;
    let fss = &config.fss;
    let source = Memo::new(gap_source(config)?);
    let sizes = fss.sizes();
    let (a, b) = (source.coupling_of_charge(fss.z_min), source.coupling_of_charge(fss.z_max));
    let grid = scan_grid(a.min(b), a.max(b), fss.crossing.scan_points);
    let indices: BTreeSet<usize> = sizes
        .iter()
        .flat_map(|&n| [n - fss.delta_n, n, n + fss.delta_n])
        .collect();
    let jobs: Vec<(f64, usize)> = indices.iter().flat_map(|&n| grid.iter().map(move |&c| (c, n))).collect();
    prefetch(&source, &jobs);

    let results = crossing_chain(&source, &sizes, fss.delta_n, fss.z_min, fss.z_max, &fss.crossing);
    let mut crossings = Vec::new();
    let mut skipped = Vec::new();
    let mut first_failure = None;
    for (&n, r) in sizes.iter().zip(results) {
        match r {
            Ok(c) => crossings.push(c),
            Err(e) if exit_code(&e) == 4 => {
                log::warn!("no crossing for N = {n}: {e}");
                skipped.push(n);
                first_failure.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if crossings.len() < 3 {
        return Err(first_failure.unwrap_or_else(|| {
            Error::Config(format!("{} central sizes give fewer than 3 crossings", sizes.len()))
        }));
    }

    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;

    let pairs: BTreeSet<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| [(n - fss.delta_n, n), (n, n + fss.delta_n)])
        .collect();
    let gamma = GapGamma(&source);
    let mut gamma_rows = Vec::new();
    for &(n, np) in &pairs {
        for &c in &grid {
            gamma_rows.push(GammaRow {
                z: source.charge_of_coupling(c),
                n,
                n_prime: np,
                gamma: gamma.gamma(c, n, np).ok(),
            });
        }
    }
    output::write_csv(&out.join("gamma.csv"), &gamma_rows)?;

    let crossing_rows: Vec<CrossingRow> = crossings
        .iter()
        .map(|c| CrossingRow {
            n: c.n,
            size: c.size,
            z_c: source.charge_of_coupling(c.coupling),
            alpha: c.alpha,
            residual: c.residual,
        })
        .collect();
    output::write_csv(&out.join("crossings.csv"), &crossing_rows)?;

    let z_seq: Vec<(f64, f64)> = crossing_rows.iter().map(|r| (r.size, r.z_c)).collect();
    let a_seq: Vec<(f64, f64)> = crossing_rows.iter().map(|r| (r.size, r.alpha)).collect();
    let z_ext = bst_extrapolate(&z_seq, fss.omega)?;
    let a_ext = bst_extrapolate(&a_seq, fss.omega)?;
    let mut ext_rows = Vec::new();
    for (name, e) in [("z_c", &z_ext), ("alpha", &a_ext)] {
        for (m, col) in e.tableau.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                ext_rows.push(ExtrapolationRow {
                    quantity: name.into(),
                    kind: "tableau".into(),
                    column: Some(m),
                    index: Some(i),
                    value: v,
                });
            }
        }
        for (kind, value) in [("limit", e.limit), ("error", e.error)] {
            ext_rows.push(ExtrapolationRow {
                quantity: name.into(),
                kind: kind.into(),
                column: None,
                index: None,
                value,
            });
        }
    }
    output::write_csv(&out.join("extrapolation.csv"), &ext_rows)?;

    let mut collapsed = None;
    let mut nu_scan = Vec::new();
    if let Some(spec) = &fss.collapse {
        let alpha = spec.alpha.unwrap_or(a_ext.limit);
        let zs: Vec<f64> = (0..spec.z_points)
            .map(|k| z_ext.limit - spec.z_window + 2.0 * spec.z_window * k as f64 / (spec.z_points - 1) as f64)
            .collect();
        let jobs: Vec<(f64, usize)> = sizes
            .iter()
            .flat_map(|&n| zs.iter().map(move |&z| (z, n)))
            .map(|(z, n)| (source.coupling_of_charge(z), n))
            .collect();
        prefetch(&source, &jobs);
        let mut points = Vec::with_capacity(jobs.len());
        for &(c, n) in &jobs {
            let p = source.gap_point(c, n)?;
            points.push((p.size, source.charge_of_coupling(c), p.gap));
        }
        let (nu, scan) = scan_nu(&points, alpha, z_ext.limit, &spec.nu_grid())?;
        let best = collapse(&points, alpha, nu, z_ext.limit)?;
        let rows: Vec<CollapseRow> = best.points.iter().map(|p| CollapseRow { x: p.x, y: p.y, n: p.size }).collect();
        output::write_csv(&out.join("collapse.csv"), &rows)?;
        let scan_rows: Vec<NuScanRow> = scan.iter().map(|&(nu, residual)| NuScanRow { nu, residual }).collect();
        output::write_csv(&out.join("nu_scan.csv"), &scan_rows)?;
        collapsed = Some(best);
        nu_scan = scan;
    }

    let summary = Summary {
        method: config.method.to_string(),
        z_c: z_ext.limit,
        alpha: a_ext.limit,
        nu: collapsed.as_ref().map(|c| c.nu),
        z_c_err: z_ext.error,
        alpha_err: a_ext.error,
        sizes: crossings.iter().map(|c| c.n).collect(),
        skipped,
    };
    output::write_json(&out.join("summary.json"), &summary)?;
    Ok(FssReport {
        summary,
        crossings,
        z_c: z_ext,
        alpha: a_ext,
        collapse: collapsed,
        nu_scan,
    })
}
