//! The weighted half-line measure and the constants tied to it.
//!
//! Everything is expressed in the Bessel order `mu = nu - 1/2`:
//!
//! ```text
//! dσ(t) = t^(2mu+1) dt / (2^mu Γ(mu+1))
//! j(z)  = 2^mu Γ(mu+1) z^(-mu) J_mu(z),   j(0) = 1
//! ```
//!
//! With this pair the Hankel transform is unitary on `L²(dσ)`, is its own
//! inverse, and fixes `exp(-t²/2)`.

use puruspe::gamma;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Order parameter and normalisation constants of `dσ` and `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    /// Order parameter `nu > 0` as it appears in the weight exponents.
    pub nu: f64,
    /// Bessel order `nu - 1/2`.
    pub mu: f64,
    /// `2^mu Γ(mu+1)`, so that `j(0) = 1`.
    pub kernel_const: f64,
    /// `1 / (2^mu Γ(mu+1))`, the density prefactor of `dσ`.
    pub measure_const: f64,
    /// Kernel prefactor in the printed `nu` form, `2^(nu+1/2) Γ(nu+1/2)`.
    pub printed_kernel_const: f64,
    /// Density prefactor in the printed `nu` form, `1 / (2^(nu+1/2) Γ(nu+3/2))`.
    pub printed_measure_const: f64,
}

impl MeasureParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return param(format!("nu must be finite and > 0, got {nu}"));
        }
        let mu = nu - 0.5;
        let kernel_const = 2f64.powf(mu) * gamma(mu + 1.0);
        Ok(Self {
            nu,
            mu,
            kernel_const,
            measure_const: 1.0 / kernel_const,
            printed_kernel_const: 2f64.powf(nu + 0.5) * gamma(nu + 0.5),
            printed_measure_const: 1.0 / (2f64.powf(nu + 0.5) * gamma(nu + 1.5)),
        })
    }

    /// Exponent `2mu+1` of the density.
    #[inline]
    pub fn weight_exponent(&self) -> f64 {
        2.0 * self.mu + 1.0
    }

    /// Power `2mu+2` of the L¹-preserving dilation `a^-(2mu+2) ψ(t/a)`.
    #[inline]
    pub fn dilation_power(&self) -> f64 {
        2.0 * self.mu + 2.0
    }

    /// Density of `dσ` with respect to `dt`.
    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        self.measure_const * t.powf(self.weight_exponent())
    }

    /// `σ((0, r])`.
    pub fn mass(&self, r: f64) -> f64 {
        let e = self.dilation_power();
        self.measure_const * r.powf(e) / e
    }

    /// `∫_0^r t^k dσ(t)`.
    pub fn power_moment(&self, k: f64, r: f64) -> f64 {
        let e = self.dilation_power() + k;
        self.measure_const * r.powf(e) / e
    }

    /// `∫_0^∞ t^k exp(-c t²) dσ(t)` for `c > 0`.
    pub fn gaussian_moment(&self, k: f64, c: f64) -> f64 {
        let s = (k + self.dilation_power()) / 2.0;
        self.measure_const * gamma(s) / (2.0 * c.powf(s))
    }

    /// The scale measure `dσ(a) / a^(2nu+1)` is `da / (a · kernel_const)`;
    /// this returns the constant factor `1 / kernel_const`.
    #[inline]
    pub fn scale_measure_factor(&self) -> f64 {
        self.measure_const
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_nu() {
        assert!(MeasureParams::new(0.0).is_err());
        assert!(MeasureParams::new(-1.0).is_err());
        assert!(MeasureParams::new(f64::NAN).is_err());
    }

    #[test]
    fn nu_one_constants() {
        let p = MeasureParams::new(1.0).unwrap();
        assert_eq!(p.mu, 0.5);
        // 2^(1/2) Γ(3/2) = sqrt(pi/2)
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((p.kernel_const - expected).abs() < 1e-14);
        assert!((p.kernel_const * p.measure_const - 1.0).abs() < 1e-15);
        // printed constant is exactly twice the consistent one
        assert!((p.printed_kernel_const / p.kernel_const - 2.0).abs() < 1e-13);
    }

    #[test]
    fn printed_measure_is_derivative_of_printed_cumulative() {
        // d/dt [t^(2nu+1) printed_measure_const] == density(t)
        for nu in [0.3, 1.0, 1.7, 2.5] {
            let p = MeasureParams::new(nu).unwrap();
            let t: f64 = 1.3;
            let d = (2.0 * nu + 1.0) * t.powf(2.0 * nu) * p.printed_measure_const;
            assert!((d / p.density(t) - 1.0).abs() < 1e-13, "nu={nu}");
        }
    }

    #[test]
    fn gaussian_moment_matches_mass_limit() {
        let p = MeasureParams::new(1.0).unwrap();
        // ∫ exp(-t²/2) dσ = 1 (transform of the Gaussian at 0)
        assert!((p.gaussian_moment(0.0, 0.5) - 1.0).abs() < 1e-14);
    }
}
