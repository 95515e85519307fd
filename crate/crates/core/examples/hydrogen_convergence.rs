//! Hydrogen ground state on refined uniform meshes: the eigenvalue error
//! against -Z²/2 and the observed convergence order for both bases.

use femcrit::assembly::assemble_radial;
use femcrit::eigen::{solve_banded, solve_shift_invert};
use femcrit::mesh::build_uniform_mesh;
use femcrit::shape::ShapeSet;

fn main() -> femcrit::Result<()> {
    let z = 1.0;
    let r_cut = 20.0;
    for shapes in [ShapeSet::C0, ShapeSet::C1] {
        println!("basis {}", shapes.continuity);
        println!("{:>6} {:>18} {:>12} {:>7}", "N", "eps0", "error", "order");
        let mut prev: Option<(usize, f64)> = None;
        for n in [50, 100, 200, 400] {
            let mesh = build_uniform_mesh(n, r_cut)?;
            let pair = assemble_radial(&mesh, shapes, |r| -z / r)?;
            let eps = solve_shift_invert(&pair, 1, -1.0)?.eigenvalues[0];
            let err = eps + 0.5 * z * z;
            let order = prev.map(|(m, e): (usize, f64)| (e / err).ln() / (n as f64 / m as f64).ln());
            match order {
                Some(p) => println!("{n:>6} {eps:>18.12} {err:>12.3e} {p:>7.3}"),
                None => println!("{n:>6} {eps:>18.12} {err:>12.3e} {:>7}", "-"),
            }
            prev = Some((n, err));
        }
    }

    // the first two levels from the dense path
    let mesh = build_uniform_mesh(200, 10.0)?;
    let pair = assemble_radial(&mesh, ShapeSet::C0, |r| -1.0 / r)?;
    let sol = solve_banded(&pair, 2)?;
    println!("N=200, r_cut=10: eps0 = {:.6}, eps1 = {:.6}", sol.eigenvalues[0], sol.eigenvalues[1]);
    Ok(())
}
