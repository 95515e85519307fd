//! Pseudo-critical points of a mean-field gap: Γ crossings for a chain of
//! basis sizes, then the Bulirsch-Stoer limit of Z_c and α.
//!
//! Usage: `critical_crossing [hf|hf_wigner|lda]` (default hf). Takes
//! tens of seconds in release mode.

use femcrit::fss::{bst_extrapolate, crossing_chain, CrossingOptions, GapSource, MeanFieldGapSource, Memo};
use femcrit::scf::{ScfMethod, Threshold};
use femcrit::shape::ShapeSet;

fn main() -> femcrit::Result<()> {
    let method: ScfMethod = std::env::args().nth(1).as_deref().unwrap_or("hf").parse()?;
    let r_cut = if method == ScfMethod::Lda { 10.0 } else { 20.0 };
    let source = Memo::new(MeanFieldGapSource::new(method, r_cut, ShapeSet::C1).with_threshold(Threshold::Numeric));
    let sizes: Vec<usize> = (10..=40).step_by(5).collect();

    let mut z_seq = Vec::new();
    let mut a_seq = Vec::new();
    for (n, c) in sizes.iter().zip(crossing_chain(&source, &sizes, 1, 0.85, 1.1, &CrossingOptions::default())) {
        match c {
            Ok(c) => {
                let z = source.charge_of_coupling(c.coupling);
                println!("N = {n:>3}: Z_c = {z:.6}, alpha = {:.6} ({} Gamma evaluations)", c.alpha, c.evaluations);
                z_seq.push((c.size, z));
                a_seq.push((c.size, c.alpha));
            }
            Err(e) => println!("N = {n:>3}: {e}"),
        }
    }
    let z = bst_extrapolate(&z_seq, 1.0)?;
    let a = bst_extrapolate(&a_seq, 1.0)?;
    println!("{method}: Z_c = {:.5} +- {:.1e}, alpha = {:.5} +- {:.1e}", z.limit, z.error, a.limit, a.error);
    Ok(())
}
