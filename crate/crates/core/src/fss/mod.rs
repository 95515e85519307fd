//! Finite-size scaling in the basis size: Δ and Γ estimators, pseudo-critical
//! crossings, extrapolation to an infinite basis, and data collapse.

pub mod collapse;
pub mod crossing;
pub mod extrapolate;
pub mod gap;

use crate::error::{Error, Result};

pub use collapse::{collapse, scan_nu, Collapse, CollapsePoint};
pub use crossing::{crossing_chain, find_crossing, find_crossing_near, find_gap_crossing, scan_grid, Crossing, CrossingOptions, FnGamma, GammaSource, GapGamma};
pub use extrapolate::{bst_extrapolate, richardson_extrapolate, Extrapolation};
pub use gap::{ExactGapSource, GapMethod, GapPoint, GapSource, MeanFieldGapSource, Memo, SyntheticGapSource};

/// `Δ = ln(|o_N| / |o_N'|) / ln(N'/N)`: the local power-law exponent of `o`
/// between sizes `n` and `n_prime`.
pub fn delta(o_n: f64, o_np: f64, n: f64, n_prime: f64) -> Result<f64> {
    if o_n == 0.0 || o_np == 0.0 || o_n.signum() != o_np.signum() || !o_n.is_finite() || !o_np.is_finite() {
        return Err(Error::UndefinedDelta(o_n, o_np));
    }
    if !(n > 0.0 && n_prime > 0.0) || n == n_prime {
        return Err(Error::invalid(format!("sizes {n} and {n_prime} must be positive and distinct")));
    }
    Ok((o_n.abs() / o_np.abs()).ln() / (n_prime / n).ln())
}

/// `Γ = Δ_H / (Δ_H - Δ_∂H)`; equals the exponent α at the critical point.
pub fn gamma(delta_h: f64, delta_dh: f64) -> Result<f64> {
    let denom = delta_h - delta_dh;
    if denom == 0.0 || !(delta_h / denom).is_finite() {
        return Err(Error::GammaPole(delta_h));
    }
    Ok(delta_h / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_of_power_law() {
        for (n, np) in [(10.0f64, 11.0), (3.0, 70.0), (100.0, 20.0)] {
            let d = delta(n.powi(-2), f64::powi(np, -2), n, np).unwrap();
            assert!((d - 2.0).abs() < 1e-12);
        }
        assert_eq!(delta(-0.3, -0.3, 5.0, 6.0).unwrap(), 0.0);
    }

    #[test]
    fn delta_uses_magnitudes() {
        let d = delta(-(10f64.powf(-1.5)), -(12f64.powf(-1.5)), 10.0, 12.0).unwrap();
        assert!((d - 1.5).abs() < 1e-12);
    }

    #[test]
    fn delta_rejects_bad_inputs() {
        assert!(matches!(delta(0.0, 1.0, 2.0, 3.0), Err(Error::UndefinedDelta(..))));
        assert!(matches!(delta(-1.0, 1.0, 2.0, 3.0), Err(Error::UndefinedDelta(..))));
        assert!(delta(1.0, 2.0, 3.0, 3.0).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(2.0, 1.0).unwrap(), 2.0);
        let a = 0.7;
        assert!((gamma(a, a - 1.0).unwrap() - a).abs() < 1e-15);
        assert!(matches!(gamma(1.3, 1.3), Err(Error::GammaPole(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn power_law_delta_is_size_independent(p in -3.0f64..3.0, c in 0.01f64..100.0, n in 2.0f64..500.0, k in 1.01f64..4.0) {
                let np = n * k;
                let d = delta(c * n.powf(-p), c * np.powf(-p), n, np).unwrap();
                prop_assert!((d - p).abs() < 1e-12 * p.abs().max(1.0) * 10.0);
            }

            #[test]
            fn gamma_invariant_under_common_rescaling(
                g1 in 0.01f64..1.0, g2 in 0.01f64..1.0, d1 in 0.01f64..1.0, d2 in 0.01f64..1.0, s in 0.01f64..100.0
            ) {
                let (n, np) = (20.0, 23.0);
                let a = gamma(delta(-g1, -g2, n, np).unwrap(), delta(d1, d2, n, np).unwrap());
                let b = gamma(delta(-s * g1, -s * g2, n, np).unwrap(), delta(d1, d2, n, np).unwrap());
                if let (Ok(a), Ok(b)) = (a, b) {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
                }
            }
        }
    }
}
