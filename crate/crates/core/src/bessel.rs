//! Real-order Bessel function of the first kind and its normalised form.
//!
//! The normalised kernel `j_mu(z) = 2^mu Γ(mu+1) z^-mu J_mu(z)` is evaluated
//! by its power series near the origin, by the Hankel asymptotic expansion for
//! large arguments, and through `puruspe::besseljy` in between.

use std::f64::consts::PI;

use puruspe::{besseljy, gamma};

/// Arguments up to this value use the power series of `j_mu`.
const SERIES_MAX: f64 = 3.0;

fn asymptotic_min(mu: f64) -> f64 {
    25.0 + mu * mu
}

/// `J_mu(z)` for `mu > -1`, `z >= 0`.
pub fn bessel_j(mu: f64, z: f64) -> f64 {
    debug_assert!(mu > -1.0 && z >= 0.0);
    if z == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    if z <= SERIES_MAX {
        return (z / 2.0).powf(mu) / gamma(mu + 1.0) * normalized_series(mu, z);
    }
    if z >= asymptotic_min(mu) {
        return hankel_asymptotic(mu, z);
    }
    mid_range(mu, z)
}

/// `j_mu(z) = 2^mu Γ(mu+1) z^-mu J_mu(z)`, with `j_mu(0) = 1`.
pub fn normalized_j(mu: f64, z: f64) -> f64 {
    debug_assert!(mu > -1.0 && z >= 0.0);
    if z <= SERIES_MAX {
        return normalized_series(mu, z);
    }
    let c = 2f64.powf(mu) * gamma(mu + 1.0) * z.powf(-mu);
    if z >= asymptotic_min(mu) {
        c * hankel_asymptotic(mu, z)
    } else {
        c * mid_range(mu, z)
    }
}

/// `Σ_k (-z²/4)^k / (k! (mu+1)_k)`.
fn normalized_series(mu: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (mu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn mid_range(mu: f64, z: f64) -> f64 {
    if mu >= 0.0 {
        besseljy(mu, z).0
    } else {
        // J_{-a} = cos(aπ) J_a - sin(aπ) Y_a
        let a = -mu;
        let (j, y, _, _) = besseljy(a, z);
        (a * PI).cos() * j - (a * PI).sin() * y
    }
}

/// Hankel's expansion `sqrt(2/(πz)) (P cos χ - Q sin χ)`, `χ = z - (mu/2 + 1/4)π`.
fn hankel_asymptotic(mu: f64, z: f64) -> f64 {
    let m4 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kk = (2 * k - 1) as f64;
        term *= (m4 - kk * kk) / (k as f64 * 8.0 * z);
        if term == 0.0 {
            break;
        }
        if term.abs() > last {
            // asymptotic series started to diverge
            break;
        }
        last = term.abs();
        // odd k feed Q, even k feed P, with signs (+Q, -P, -Q, +P) repeating
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * mu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}
