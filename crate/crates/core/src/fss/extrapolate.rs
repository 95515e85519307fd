//! Extrapolation of finite-size sequences to `1/N → 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    /// Difference of the two entries that combine into the apex.
    pub error: f64,
    /// `tableau[m][i]`: column `m` built from points `i..=i+m`.
    pub tableau: Vec<Vec<f64>>,
    pub omega: f64,
}

fn check(seq: &[(f64, f64)], omega: f64) -> Result<()> {
    if seq.len() < 3 {
        return Err(Error::invalid(format!("extrapolation needs at least 3 points, got {}", seq.len())));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("exponent omega = {omega} must be positive")));
    }
    for w in seq.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::invalid("sizes must be strictly increasing"));
        }
    }
    if seq.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return Err(Error::invalid("sizes must be positive and values finite"));
    }
    Ok(())
}

fn finish(tableau: Vec<Vec<f64>>, omega: f64) -> Extrapolation {
    let m = tableau.len() - 1;
    let prev = &tableau[m - 1];
    Extrapolation {
        limit: tableau[m][0],
        error: (prev[1] - prev[0]).abs(),
        tableau,
        omega,
    }
}

/// Bulirsch-Stoer rational extrapolation of `(N, value)` pairs in `h = 1/N`
/// with leading correction `h^omega`.
pub fn bst_extrapolate(seq: &[(f64, f64)], omega: f64) -> Result<Extrapolation> {
    check(seq, omega)?;
    let h: Vec<f64> = seq.iter().map(|p| 1.0 / p.0).collect();
    let n = seq.len();
    let mut tableau: Vec<Vec<f64>> = vec![seq.iter().map(|p| p.1).collect()];
    let zeros = vec![0.0; n + 1];
    for m in 1..n {
        let prev = &tableau[m - 1];
        let prev2 = if m >= 2 { &tableau[m - 2] } else { &zeros };
        let mut col = Vec::with_capacity(n - m);
        for i in 0..n - m {
            let d = prev[i + 1] - prev[i];
            let scale = prev[i + 1].abs().max(prev[i].abs());
            if d.abs() <= 4.0 * f64::EPSILON * scale {
                col.push(prev[i + 1]);
                continue;
            }
            let d2 = prev[i + 1] - prev2[i + 1];
            if d2 == 0.0 {
                // d/d2 → ∞ sends the correction to zero
                col.push(prev[i + 1]);
                continue;
            }
            let denom = (h[i] / h[i + m]).powf(omega) * (1.0 - d / d2) - 1.0;
            let t = prev[i + 1] + d / denom;
            if denom.abs() <= 4.0 * f64::EPSILON || !t.is_finite() {
                return Err(Error::DegenerateSequence { column: m });
            }
            col.push(t);
        }
        tableau.push(col);
    }
    Ok(finish(tableau, omega))
}

/// Polynomial (Neville) extrapolation in `h^omega`, `h = 1/N`.
pub fn richardson_extrapolate(seq: &[(f64, f64)], omega: f64) -> Result<Extrapolation> {
    check(seq, omega)?;
    let x: Vec<f64> = seq.iter().map(|p| p.0.recip().powf(omega)).collect();
    let n = seq.len();
    let mut tableau: Vec<Vec<f64>> = vec![seq.iter().map(|p| p.1).collect()];
    for m in 1..n {
        let prev = &tableau[m - 1];
        let col = (0..n - m)
            .map(|i| (x[i] * prev[i + 1] - x[i + m] * prev[i]) / (x[i] - x[i + m]))
            .collect();
        tableau.push(col);
    }
    Ok(finish(tableau, omega))
}
