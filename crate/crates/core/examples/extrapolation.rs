//! Bulirsch-Stoer and Richardson extrapolation of a sequence with known
//! limit, printing the rational tableau column by column.

use femcrit::fss::{bst_extrapolate, richardson_extrapolate};

fn main() -> femcrit::Result<()> {
    let limit = 0.91857;
    let seq: Vec<(f64, f64)> = (2..=8)
        .map(|k| {
            let n = 5.0 * k as f64;
            (n, limit + 0.4 / n - 2.0 / (n * n) + 3.0 / n.powi(3))
        })
        .collect();
    for (n, v) in &seq {
        println!("N = {n:>4}: {v:.10}");
    }

    let bst = bst_extrapolate(&seq, 1.0)?;
    for (m, col) in bst.tableau.iter().enumerate() {
        let shown: Vec<String> = col.iter().map(|v| format!("{v:.10}")).collect();
        println!("column {m}: {}", shown.join(" "));
    }
    let rich = richardson_extrapolate(&seq, 1.0)?;
    println!("limit {limit}");
    println!("bulirsch-stoer {:.12} (error estimate {:.1e})", bst.limit, bst.error);
    println!("richardson     {:.12} (error estimate {:.1e})", rich.limit, rich.error);
    Ok(())
}
