//! Local correlation and exchange expressions in hartree atomic units.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const WIGNER_A: f64 = 0.29;
const WIGNER_B: f64 = 5.1;

/// Wigner-Seitz radius `(3 / 4πρ)^{1/3}`; infinite for an empty density.
pub fn wigner_seitz_radius(rho: f64) -> f64 {
    if rho > 0.0 {
        (3.0 / (4.0 * PI * rho)).cbrt()
    } else {
        f64::INFINITY
    }
}

/// Wigner correlation energy per electron, `-0.29 / (5.1 + r_s)`.
pub fn wigner_correlation_energy(r_s: f64) -> f64 {
    if r_s.is_infinite() {
        return 0.0;
    }
    -WIGNER_A / (WIGNER_B + r_s)
}

/// Correlation potential added to the Fock operator.
pub fn wigner_correlation_potential(r_s: f64) -> Result<f64> {
    if !(r_s >= 0.0) {
        return Err(Error::invalid(format!("Wigner-Seitz radius {r_s} must be non-negative")));
    }
    Ok(wigner_correlation_energy(r_s))
}

/// `d(ρ ε_c)/dρ` for the Wigner form.
pub fn lda_correlation_potential(r_s: f64) -> f64 {
    if r_s.is_infinite() {
        return 0.0;
    }
    let d = WIGNER_B + r_s;
    -WIGNER_A / d - WIGNER_A * r_s / (3.0 * d * d)
}

/// Exchange energy density per unit volume, `-(3/4)(3/π)^{1/3} ρ^{4/3}`.
pub fn lda_exchange_energy_density(rho: f64) -> f64 {
    -0.75 * (3.0 / PI).cbrt() * rho.max(0.0).powf(4.0 / 3.0)
}

pub fn lda_exchange_potential(rho: f64) -> f64 {
    -(3.0 / PI * rho.max(0.0)).cbrt()
}

/// `(V_x, V_c)` at physical density `rho`; correlation uses the same `ρ`.
pub fn lda_potentials(rho: f64) -> Result<(f64, f64)> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("density {rho} must be non-negative")));
    }
    Ok((
        lda_exchange_potential(rho),
        lda_correlation_potential(wigner_seitz_radius(rho)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_values() {
        assert!((wigner_correlation_potential(0.0).unwrap() + 0.29 / 5.1).abs() < 1e-15);
        assert!((wigner_correlation_potential(4.9).unwrap() + 0.029).abs() < 1e-15);
        assert!(wigner_correlation_potential(1e12).unwrap() < 0.0);
        assert!(wigner_correlation_potential(1e12).unwrap() > -1e-12);
        assert_eq!(wigner_correlation_potential(f64::INFINITY).unwrap(), 0.0);
        assert!(wigner_correlation_potential(-1.0).is_err());
    }

    #[test]
    fn lda_values() {
        let (vx, _) = lda_potentials(PI / 3.0).unwrap();
        assert!((vx + 1.0).abs() < 1e-14);
        let (vx, vc) = lda_potentials(0.0).unwrap();
        assert_eq!((vx, vc), (0.0, 0.0));
        let rho = 3.0 / (4.0 * PI);
        assert!((wigner_seitz_radius(rho) - 1.0).abs() < 1e-14);
        let (_, vc) = lda_potentials(rho).unwrap();
        assert!((vc - (-0.29 / 6.1 - 0.29 / (3.0 * 6.1 * 6.1))).abs() < 1e-15);
        assert!((vc + 0.050139).abs() < 1e-6);
        assert!(lda_potentials(-1e-3).is_err());
    }

    #[test]
    fn exchange_potential_is_derivative() {
        let rho = 0.37;
        let d = 1e-6;
        let fd = (lda_exchange_energy_density(rho + d) - lda_exchange_energy_density(rho - d)) / (2.0 * d);
        assert!((fd - lda_exchange_potential(rho)).abs() < 1e-8);
    }

    #[test]
    fn correlation_potential_is_derivative() {
        let rho = 0.21;
        let d = 1e-6;
        let e = |p: f64| p * wigner_correlation_energy(wigner_seitz_radius(p));
        let fd = (e(rho + d) - e(rho - d)) / (2.0 * d);
        assert!((fd - lda_correlation_potential(wigner_seitz_radius(rho))).abs() < 1e-8);
    }
}
