//! Meshes, shape functions and the Gauss rule in isolation.

use femcrit::mesh::{build_graded_mesh, build_uniform_mesh, TensorMesh3};
use femcrit::quadrature::gauss_rule;
use femcrit::shape::ShapeSet;

fn main() -> femcrit::Result<()> {
    let uniform = build_uniform_mesh(4, 10.0)?;
    println!("uniform nodes {:?}", uniform.nodes());
    let graded = build_graded_mesh(15, 40.0, 1.3)?;
    println!("graded: first width {:.5}, last width {:.5}", graded.width(0), graded.width(14));
    let tensor = TensorMesh3::graded(15, 3, 40.0, 1.3)?;
    println!("tensor mesh: {} elements", tensor.n_elements());

    let rule = gauss_rule();
    println!("{}-point rule: sum of weights {:.15}", rule.len(), rule.integrate(|_| 1.0));
    println!("integral of x^18 on [-1, 1]: {:.15} (exact {:.15})", rule.integrate(|x| x.powi(18)), 2.0 / 19.0);

    for shapes in [ShapeSet::C0, ShapeSet::C1] {
        let s = shapes.eval(0.25, 0.5)?;
        println!("{} shapes at x = 0.25, h = 0.5: values {:?}", shapes.continuity, s.values());
    }
    Ok(())
}
