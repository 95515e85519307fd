//! Data collapse of a synthetic scaling family: the ν scan finds the
//! exponent the family was built with.

use femcrit::fss::{collapse, scan_nu, GapSource, SyntheticGapSource};

fn main() -> femcrit::Result<()> {
    let (z_c, alpha, nu) = (0.91, 1.0, 0.85);
    let source = SyntheticGapSource::new(z_c, alpha, nu)?;
    let mut points = Vec::new();
    for n in [10usize, 20, 40, 80] {
        for k in 0..=100 {
            let z = z_c - 0.02 + 0.04 * k as f64 / 100.0;
            let p = source.gap_point(z, n)?;
            points.push((p.size, z, p.gap));
        }
    }
    let nus: Vec<f64> = (0..=50).map(|k| 0.6 + 0.01 * k as f64).collect();
    let (best, scan) = scan_nu(&points, alpha, z_c, &nus)?;
    for (nu, r) in scan.iter().step_by(5) {
        println!("nu = {nu:.2}: residual {r:.3e}");
    }
    let c = collapse(&points, alpha, best, z_c)?;
    println!("best nu = {best:.2}, residual {:.1e} (built with nu = {nu})", c.residual);
    Ok(())
}
