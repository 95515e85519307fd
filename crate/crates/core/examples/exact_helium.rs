//! Helium from the three-variable formulation on the graded 15x15x3 tensor
//! mesh (growth 1.3, r_cut 40) with linear and Hermite elements.

use std::time::Instant;

use femcrit::assembly::Form;
use femcrit::exact::ExactProblem;
use femcrit::mesh::TensorMesh3;
use femcrit::shape::ShapeSet;

fn main() -> femcrit::Result<()> {
    let mesh = TensorMesh3::graded(15, 3, 40.0, 1.3)?;
    for shapes in [ShapeSet::C0, ShapeSet::C1] {
        let t = Instant::now();
        let problem = ExactProblem::new(mesh.clone(), shapes)?;
        let assembled = t.elapsed();
        let direct = problem.solve(Form::Direct, 2.0)?;
        // lengths in the scaled form are measured in units of 1/Z
        let scaled = ExactProblem::new(mesh.scaled_radially(2.0)?, shapes)?.solve(Form::Scaled, 0.5)?;
        println!(
            "{}: {} dofs, E0 = {:.6} (scaled form gives {:.6}), <1/r12> = {:.6}, <1/r1+1/r2> = {:.6}  [assembly {:.2?}, total {:.2?}]",
            shapes.continuity,
            problem.n_dof(),
            direct.energy,
            scaled.energy_hartree(),
            direct.inv_r12,
            direct.inv_r_sum,
            assembled,
            t.elapsed()
        );
    }
    Ok(())
}
