//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line.
//!
//! The lines go straight to the process stderr so they show up even when
//! the harness captures test output. Criterion 5 and 6 run the shipped
//! configurations under `configs/` with a cache in the target directory,
//! so repeated runs are cheap.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use femcrit::assembly::Form;
use femcrit::exact::ExactProblem;
use femcrit::fss::{
    bst_extrapolate, collapse, delta, find_crossing, gamma, CrossingOptions, FnGamma, GammaSource, GapSource,
    SyntheticGapSource,
};
use femcrit::mesh::{build_uniform_mesh, TensorMesh3};
use femcrit::pipeline::{cmd_fss, RunConfig, Summary};
use femcrit::scf::{hydrogenic_level, scf_solve, ScfConfig, ScfMethod};
use femcrit::shape::ShapeSet;

fn report(criterion: u32, failures: &[String], detail: &str) {
    let line = if failures.is_empty() {
        format!("criterion {criterion}: PASS  {detail}\n")
    } else {
        format!("criterion {criterion}: FAIL  {detail}; {}\n", failures.join("; "))
    };
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(failures.is_empty(), "criterion {criterion}: {}", failures.join("; "));
}

/// Records a failure when `|got - want| > tol`.
fn within(failures: &mut Vec<String>, what: &str, got: f64, want: f64, tol: f64) {
    if !((got - want).abs() <= tol) {
        failures.push(format!("{what} = {got:.6}, expected {want} +- {tol}"));
    }
}

fn scf(method: ScfMethod, z: f64, n: usize, r_cut: f64) -> femcrit::scf::ScfResult {
    let mesh = build_uniform_mesh(n, r_cut).unwrap();
    scf_solve(z, &mesh, ShapeSet::C0, &ScfConfig::new(method)).unwrap()
}

#[test]
fn criterion_01_lda_energies() {
    let mut f = Vec::new();
    let e100 = scf(ScfMethod::Lda, 2.0, 100, 10.0).breakdown.e_tot;
    let e200 = scf(ScfMethod::Lda, 2.0, 200, 10.0).breakdown.e_tot;
    within(&mut f, "LDA E_tot(N=100)", e100, -2.813661, 5e-3);
    within(&mut f, "LDA E_tot(N=200)", e200, -2.821852, 5e-3);
    report(1, &f, &format!("LDA r_cut 10: E(100) = {e100:.6}, E(200) = {e200:.6}"));
}

#[test]
fn criterion_02_hf_wigner_energies() {
    let mut f = Vec::new();
    let b = scf(ScfMethod::HfWigner, 2.0, 200, 20.0).breakdown;
    within(&mut f, "E_tot", b.e_tot, -2.904925, 5e-3);
    within(&mut f, "E_H", b.e_h, 1.026754, 1e-2);
    within(&mut f, "E_c", b.e_c, -0.049814, 5e-3);
    report(
        2,
        &f,
        &format!("HF+Wigner N=200: E_tot = {:.6}, E_H = {:.6}, E_c = {:.6}", b.e_tot, b.e_h, b.e_c),
    );
}

#[test]
fn criterion_03_lda_fine_mesh() {
    let mut f = Vec::new();
    let b = scf(ScfMethod::Lda, 2.0, 1000, 10.0).breakdown;
    within(&mut f, "E_tot", b.e_tot, -2.824596, 1e-3);
    within(&mut f, "E_c", b.e_c, -0.101103, 1e-3);
    report(3, &f, &format!("LDA N=1000: E_tot = {:.6}, E_c = {:.6}", b.e_tot, b.e_c));
}

#[test]
fn criterion_04_exact_helium_graded_mesh() {
    let mut f = Vec::new();
    let mesh = TensorMesh3::graded(15, 3, 40.0, 1.3).unwrap();
    let c0 = ExactProblem::new(mesh.clone(), ShapeSet::C0).unwrap().solve(Form::Direct, 2.0).unwrap().energy;
    let c1 = ExactProblem::new(mesh, ShapeSet::C1).unwrap().solve(Form::Direct, 2.0).unwrap().energy;
    within(&mut f, "E0 (C0)", c0, -2.7578, 2e-2);
    within(&mut f, "E0 (C1)", c1, -2.8994, 5e-3);
    report(4, &f, &format!("15x15x3 mesh: E0 = {c0:.6} (C0), {c1:.6} (C1)"));
}

/// Runs a shipped configuration once per test binary.
fn fss_summary(name: &str) -> Summary {
    static RUNS: OnceLock<Mutex<HashMap<String, Summary>>> = OnceLock::new();
    let runs = RUNS.get_or_init(Default::default);
    // one run at a time: the solves already use every core
    let mut guard = runs.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(s) = guard.get(name) {
        return s.clone();
    }
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut config = RunConfig::load(&root.join("configs").join(format!("{name}.json"))).unwrap();
    let scratch = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    config.cache_dir = Some(scratch.join("cache"));
    config.output_dir = scratch.join(name);
    let summary = cmd_fss(&config).unwrap().summary;
    guard.insert(name.to_owned(), summary.clone());
    summary
}

#[test]
fn criterion_05_critical_parameters() {
    let mut f = Vec::new();
    let mut detail = Vec::new();
    for (name, z_c, tol) in [
        ("hf", 1.03114, 0.010),
        ("lda", 0.92808, 0.010),
        ("hf_wigner", 0.90946, 0.010),
        ("exact", 0.91857, 0.015),
    ] {
        let s = fss_summary(name);
        within(&mut f, &format!("{name} Z_c"), s.z_c, z_c, tol);
        within(&mut f, &format!("{name} alpha"), s.alpha, 1.0, 5e-3);
        detail.push(format!("{name} Z_c = {:.5}, alpha = {:.5}", s.z_c, s.alpha));
    }
    report(5, &f, &detail.join(", "));
}

#[test]
fn criterion_06_collapse_exponent() {
    let mut f = Vec::new();
    let mut detail = Vec::new();
    for name in ["hf_wigner", "exact"] {
        let s = fss_summary(name);
        let nu = s.nu.expect("shipped configuration runs the collapse");
        if !(0.80..=0.90).contains(&nu) {
            f.push(format!("{name} nu = {nu:.3} outside [0.80, 0.90]"));
        }
        detail.push(format!("{name} nu = {nu:.3}"));
    }
    report(6, &f, &detail.join(", "));
}

#[test]
fn criterion_07_convergence_order() {
    let mut f = Vec::new();
    let sizes = [50usize, 100, 200, 400];
    let errors: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let mesh = build_uniform_mesh(n, 20.0).unwrap();
            hydrogenic_level(1.0, &mesh, ShapeSet::C0).unwrap().0 + 0.5
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).ln() / 2f64.ln()).collect();
    if errors.iter().any(|&e| !(e > 0.0)) {
        f.push(format!("errors not positive: {errors:?}"));
    }
    if orders.windows(2).any(|o| o[1] < o[0]) {
        f.push(format!("order not settling: {orders:?}"));
    }
    // the last pair measures the asymptotic order; the coarser pairs are
    // still pre-asymptotic and sit below 2
    let last = *orders.last().unwrap();
    if last < 2.0 - 0.01 {
        f.push(format!("asymptotic order {last:.4} < 2"));
    }
    let shown: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
    report(7, &f, &format!("C0 hydrogen, N 50..400: orders {}", shown.join(", ")));
}

#[test]
fn criterion_08_variational_monotonicity() {
    let mut f = Vec::new();
    let tol = 1e-8;
    let hf: Vec<f64> = [25, 50, 100, 200, 400].iter().map(|&n| scf(ScfMethod::Hf, 2.0, n, 10.0).breakdown.e_tot).collect();
    for w in hf.windows(2) {
        if w[1] > w[0] + tol {
            f.push(format!("HF energy rose {:.10} -> {:.10}", w[0], w[1]));
        }
    }
    let mut exact = Vec::new();
    for shapes in [ShapeSet::C0, ShapeSet::C1] {
        let energies: Vec<f64> = [(3usize, 1usize), (6, 2), (12, 4)]
            .iter()
            .map(|&(n, m)| {
                let mesh = TensorMesh3::graded(n, m, 10.0, 1.0).unwrap();
                ExactProblem::new(mesh, shapes).unwrap().solve(Form::Direct, 2.0).unwrap().energy
            })
            .collect();
        for w in energies.windows(2) {
            if w[1] > w[0] + tol {
                f.push(format!("exact {} energy rose {:.10} -> {:.10}", shapes.continuity, w[0], w[1]));
            }
        }
        exact.push(format!("{}: {:.6} -> {:.6}", shapes.continuity, energies[0], energies[energies.len() - 1]));
    }
    report(
        8,
        &f,
        &format!("HF N 25..400: {:.6} -> {:.6}; exact {}", hf[0], hf[hf.len() - 1], exact.join(", ")),
    );
}

#[test]
fn criterion_09_hellmann_feynman() {
    let mut f = Vec::new();
    let mut detail = Vec::new();
    let (z, dz) = (2.0, 1e-3);
    let mesh = build_uniform_mesh(200, 10.0).unwrap();
    for method in [ScfMethod::Hf, ScfMethod::HfWigner, ScfMethod::Lda] {
        let config = ScfConfig::new(method);
        let e = |z: f64| scf_solve(z, &mesh, ShapeSet::C0, &config).unwrap();
        let fd = (e(z + dz).breakdown.e_tot - e(z - dz).breakdown.e_tot) / (2.0 * dz);
        let hf = e(z).nuclear_derivative();
        within(&mut f, &format!("{method} dE/dZ - <dH/dZ>"), fd - hf, 0.0, 5e-4);
        detail.push(format!("{method} {:.1e}", fd - hf));
    }
    let problem = ExactProblem::new(TensorMesh3::graded(10, 3, 20.0, 1.3).unwrap(), ShapeSet::C1).unwrap();
    let e = |z: f64| problem.solve(Form::Direct, z).unwrap();
    let fd = (e(z + dz).energy - e(z - dz).energy) / (2.0 * dz);
    let hf = e(z).coupling_derivative();
    within(&mut f, "exact dE/dZ - <dH/dZ>", fd - hf, 0.0, 5e-4);
    detail.push(format!("exact {:.1e}", fd - hf));
    report(9, &f, &format!("Z = 2, differences: {}", detail.join(", ")));
}

#[test]
fn criterion_10_unit_oracles() {
    let mut f = Vec::new();

    // Delta and Gamma on power laws o = c N^-p
    let mut worst: f64 = 0.0;
    for (p, c, n, np) in [(1.5, 0.3, 10.0, 11.0), (0.7, 2.0, 40.0, 80.0), (3.0, 1e-4, 5.0, 9.0)] {
        let o = |n: f64| c * f64::powf(n, -p);
        worst = worst.max((delta(o(n), o(np), n, np).unwrap() - p).abs());
        // gap ~ N^-a, derivative ~ N^-(a-1/nu): Gamma = a nu
        let (a, nu) = (p, 0.85);
        let dh = delta(o(n), o(np), n, np).unwrap();
        let ddh = delta(n.powf(-(a - 1.0 / nu)), np.powf(-(a - 1.0 / nu)), n, np).unwrap();
        worst = worst.max((gamma(dh, ddh).unwrap() - a * nu).abs());
    }
    if worst > 1e-12 {
        f.push(format!("Delta/Gamma error {worst:.1e}"));
    }

    // two-term sequences a + b/N + c/N^2
    let seq: Vec<(f64, f64)> = (1..=8).map(|k| {
        let n = 4.0 * k as f64;
        (n, 0.91857 + 0.3 / n - 1.7 / (n * n))
    }).collect();
    let bst = bst_extrapolate(&seq, 1.0).unwrap().limit;
    within(&mut f, "BST limit", bst, 0.91857, 1e-8);

    // synthetic family: Gamma crosses at the constructed root
    let synth = SyntheticGapSource::new(0.91, 1.0, 0.85).unwrap();
    let g = FnGamma(|c: f64, n: usize, np: usize| {
        let a = synth.gap_point(c, n)?;
        let b = synth.gap_point(c, np)?;
        gamma(delta(a.gap, b.gap, a.size, b.size)?, delta(a.dgap, b.dgap, a.size, b.size)?)
    });
    let crossing = find_crossing(&g, 20, 2, 0.8, 1.0, &CrossingOptions::default()).unwrap();
    within(&mut f, "synthetic crossing", crossing.coupling, 0.91, 1e-6);
    within(&mut f, "synthetic alpha", g.gamma(0.91, 18, 20).unwrap(), 1.0, 1e-6);

    // perfect collapse: E = N^-a/nu G(N^1/nu (Z - z_c))
    let (a, nu, z_c) = (1.0, 0.85, 0.91);
    let pts: Vec<(f64, f64, f64)> = [10.0f64, 20.0, 40.0]
        .iter()
        .flat_map(|&n| {
            (0..41).map(move |k| {
                let x = -2.0 + 0.1 * k as f64;
                let z = z_c + x / n.powf(1.0 / nu);
                (n, z, n.powf(-a / nu) * (x.sin() + 2.0 * x))
            })
        })
        .collect();
    let residual = collapse(&pts, a, nu, z_c).unwrap().residual;
    if !(residual < 1e-12) {
        f.push(format!("perfect collapse residual {residual:.1e}"));
    }
    report(
        10,
        &f,
        &format!(
            "Delta/Gamma {worst:.1e}, BST {:.1e}, crossing {:.1e}, collapse {residual:.1e}",
            (bst - 0.91857).abs(),
            (crossing.coupling - 0.91).abs()
        ),
    );
}
