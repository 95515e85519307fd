//! Mean-field helium energies on uniform meshes, in the layout of a
//! component table: E_tot, E_kin, E_en, E_H, E_x, E_c and ε.
//!
//! Usage: `helium_scf [r_cut] [N ...]` (defaults: 10, then 100 and 200).

use femcrit::mesh::build_uniform_mesh;
use femcrit::scf::{scf_solve, ScfConfig, ScfMethod};
use femcrit::shape::ShapeSet;

fn main() -> femcrit::Result<()> {
    let mut args = std::env::args().skip(1);
    let r_cut: f64 = args.next().map_or(10.0, |a| a.parse().expect("r_cut must be a number"));
    let sizes: Vec<usize> = args.map(|a| a.parse().expect("element counts must be integers")).collect();
    let sizes = if sizes.is_empty() { vec![100, 200] } else { sizes };
    for method in [ScfMethod::Hf, ScfMethod::HfWigner, ScfMethod::Lda] {
        for &n in &sizes {
            let mesh = build_uniform_mesh(n, r_cut)?;
            let start = std::time::Instant::now();
            let res = scf_solve(2.0, &mesh, ShapeSet::C0, &ScfConfig::new(method))?;
            let b = res.breakdown;
            println!(
                "{method:<10} r_cut={r_cut} N={n:<5} E_tot={:.6} E_kin={:.6} E_en={:.6} E_H={:.6} E_x={:.6} E_c={:.6} eps={:.6} ({} iterations, {:.2?})",
                b.e_tot,
                b.e_kin,
                b.e_en,
                b.e_h,
                b.e_x,
                b.e_c,
                b.epsilon,
                res.iterations,
                start.elapsed()
            );
        }
    }
    Ok(())
}
