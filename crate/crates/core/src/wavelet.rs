//! Analysing wavelets given by their Hankel spectrum.
//!
//! A wavelet is described by a real spectral profile `ψ̂`. The spatial
//! wavelet `ψ = H[ψ̂]` and its derivatives are synthesised on the spatial grid
//! of a [`HankelPlan`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::hankel::{spectral_derivatives, HankelPlan};
use crate::measure::MeasureParams;

/// Spectral profile of a wavelet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveletProfile {
    /// `ψ̂(ω) = ω^(2n) exp(-ω²)`.
    HankelMexican(u32),
    /// Piecewise-linear table `(ω, ψ̂)`, zero beyond the last abscissa and
    /// continued as a power law below the first.
    Table { omega: Vec<f64>, values: Vec<f64> },
}

impl FromStr for WaveletProfile {
    type Err = Error;

    /// `hankel_mexican:n`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("unknown wavelet `{s}`, expected hankel_mexican:n"));
        let (name, n) = s.split_once(':').unwrap_or((s, "1"));
        if name != "hankel_mexican" {
            return Err(bad());
        }
        let n: u32 = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(Error::Parameter("hankel_mexican needs n >= 1".into()));
        }
        Ok(Self::HankelMexican(n))
    }
}

impl fmt::Display for WaveletProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HankelMexican(n) => write!(f, "hankel_mexican:{n}"),
            Self::Table { omega, .. } => write!(f, "table[{}]", omega.len()),
        }
    }
}

impl WaveletProfile {
    pub fn table(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omega.len() != values.len() || omega.len() < 2 {
            return Err(Error::Shape("profile table needs >= 2 matching (ω, value) rows".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) || !(omega[0] > 0.0) {
            return Err(Error::Parameter(
                "profile abscissae must be positive and increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("profile values must be finite".into()));
        }
        Ok(Self::Table { omega, values })
    }

    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Self::HankelMexican(n) => w.powi(2 * *n as i32) * (-w * w).exp(),
            Self::Table { omega, values } => {
                if w >= omega[omega.len() - 1] {
                    return 0.0;
                }
                if w <= omega[0] {
                    let (a, b) = (values[0], values[1]);
                    if a != 0.0 && b != 0.0 && a.signum() == b.signum() {
                        let k = (b / a).ln() / (omega[1] / omega[0]).ln();
                        return a * (w / omega[0]).powf(k);
                    }
                    return a;
                }
                let i = omega.partition_point(|&o| o <= w) - 1;
                let t = (w - omega[i]) / (omega[i + 1] - omega[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// Even order of vanishing at the origin, in units of `ω²`.
    pub fn cancellation_order(&self) -> u32 {
        match self {
            Self::HankelMexican(n) => *n,
            Self::Table { omega, values } => {
                let (a, b) = (values[0].abs(), values[1].abs());
                if a == 0.0 || b == 0.0 {
                    return 0;
                }
                let k = (b / a).ln() / (omega[1] / omega[0]).ln();
                (k / 2.0).floor().max(0.0) as u32
            }
        }
    }

    /// Closed form of `ψ = H[ψ̂]` when one is known.
    pub fn spatial(&self, params: &MeasureParams, t: f64) -> Option<f64> {
        match self {
            Self::HankelMexican(n) => Some(mexican_spatial(params.mu, *n, t)),
            Self::Table { .. } => None,
        }
    }
}

/// `H[ω^(2n) e^(-ω²)](t)`.
///
/// From `∫ j(tω) e^(-sω²) dσ(ω) = (2s)^(-(mu+1)) e^(-t²/(4s))`, applying
/// `(-∂_s)^n` at `s = 1`.
fn mexican_spatial(mu: f64, n: u32, t: f64) -> f64 {
    let m = mu + 1.0;
    let u = t * t / 4.0;
    // terms c · s^(-m-k) u^l e^(-u/s), stored as (k, l, c)
    let mut terms: Vec<(u32, u32, f64)> = vec![(0, 0, 1.0)];
    for _ in 0..n {
        let mut next: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * terms.len());
        let mut push = |k: u32, l: u32, c: f64| match next.iter_mut().find(|e| e.0 == k && e.1 == l) {
            Some(e) => e.2 += c,
            None => next.push((k, l, c)),
        };
        for &(k, l, c) in &terms {
            push(k + 1, l, c * (m + k as f64));
            push(k + 2, l + 1, -c);
        }
        terms = next;
    }
    let poly: f64 = terms.iter().map(|&(_, l, c)| c * u.powi(l as i32)).sum();
    2f64.powf(-m) * (-u).exp() * poly
}

/// Gauss–Legendre nodes per quarter-decade of the admissibility integrals.
const LOG_PANEL_NODES: usize = 16;
const MAX_DECADES: usize = 40;

/// `∫_0^∞ g(ω) dω/ω` by quarter-decade panels in `ln ω`, walking outwards
/// from `[0.1, 10]` until the contributions die out.
///
/// A decade that fails to shrink at least twofold while still significant
/// is read as a divergent end.
fn log_integral(g: impl Fn(f64) -> f64, what: &str) -> Result<f64> {
    let gl = GaussLegendre::new(std::num::NonZeroUsize::new(LOG_PANEL_NODES).expect("nonzero"));
    let ln10 = std::f64::consts::LN_10;
    let decade = |d: i32| -> f64 {
        (0..4)
            .map(|q| {
                let a = (d as f64 + q as f64 / 4.0) * ln10;
                gl.integrate(a, a + ln10 / 4.0, |u: f64| g(u.exp()))
            })
            .sum()
    };
    let mut total: f64 = decade(-1) + decade(0);
    for dir in [-1i32, 1] {
        let mut prev = f64::INFINITY;
        let mut d = if dir < 0 { -2 } else { 1 };
        let mut settled = false;
        for _ in 0..MAX_DECADES {
            let c = decade(d);
            if !c.is_finite() {
                break;
            }
            total += c;
            let significant = c.abs() > 1e-16 * total.abs();
            if !significant {
                settled = true;
                break;
            }
            if c.abs() > 0.5 * prev {
                break;
            }
            prev = c.abs();
            d += dir;
        }
        if !settled {
            let end = if dir < 0 { "ω → 0" } else { "ω → ∞" };
            return Err(Error::Admissibility(format!("{what} does not converge as {end}")));
        }
    }
    Ok(total)
}

/// `A_ψ = ∫_0^∞ ω^(-2ν-1) |ψ̂(ω)|² dω` (plain `dω`).
pub fn admissibility_of(params: &MeasureParams, profile: &WaveletProfile) -> Result<f64> {
    let e = params.dilation_power() - 1.0;
    let a = log_integral(|w| w.powf(-e) * profile.eval(w).powi(2), "admissibility integral")?;
    if !(a > 0.0) {
        return Err(Error::Admissibility(format!(
            "admissibility constant {a:e} is not positive"
        )));
    }
    Ok(a)
}

/// `C_ψ = ∫_0^∞ |ψ̂(aω)|² dσ(a)/a^(2ν+1) = (1/c) ∫ |ψ̂(ω)|² dω/ω`, the
/// constant of the wavelet Plancherel and inversion formulas.
pub fn reproducing_of(params: &MeasureParams, profile: &WaveletProfile) -> Result<f64> {
    let c = params.scale_measure_factor() * log_integral(|w| profile.eval(w).powi(2), "reproducing integral")?;
    if !(c > 0.0) {
        return Err(Error::Admissibility(format!(
            "reproducing constant {c:e} is not positive"
        )));
    }
    Ok(c)
}

/// A mother wavelet synthesised on a plan's spatial grid.
#[derive(Debug, Clone)]
pub struct Wavelet {
    params: MeasureParams,
    profile: WaveletProfile,
    cancellation_order: u32,
    admissibility: f64,
    reproducing: f64,
    samples: SampledFunction,
    derivative_samples: Vec<SampledFunction>,
}

/// Probes for rapid decay: `|ψ̂(ω)| ω^DECAY_POWER` must stay negligible.
const DECAY_POWER: i32 = 12;

pub fn make_wavelet(params: &MeasureParams, profile: WaveletProfile, plan: &HankelPlan) -> Result<Wavelet> {
    if plan.params() != params {
        return Err(Error::Shape("plan was built for a different order".into()));
    }
    let order = profile.cancellation_order();
    let admissibility = admissibility_of(params, &profile)?;
    let reproducing = reproducing_of(params, &profile)?;

    let spectral = plan.output_grid();
    let peak = spectral
        .nodes()
        .iter()
        .map(|&w| profile.eval(w).abs())
        .fold(0.0, f64::max);
    for k in [1.0, 2.0, 4.0] {
        let w = k * spectral.r_max();
        let tail = profile.eval(w).abs() * w.powi(DECAY_POWER);
        if tail > 1e-6 * peak {
            return Err(Error::Admissibility(format!(
                "profile is not rapidly decreasing: |ψ̂({w})|·ω^{DECAY_POWER} = {tail:e}"
            )));
        }
    }

    let samples = plan.synthesize(|w| profile.eval(w))?;
    let spec_samples = SampledFunction::from_fn(spectral, |w| profile.eval(w))?;
    let mut derivs = spectral_derivatives(&spec_samples, plan.input_grid(), order as usize + 1)?;
    derivs.remove(0);
    Ok(Wavelet {
        params: *params,
        profile,
        cancellation_order: order,
        admissibility,
        reproducing,
        samples,
        derivative_samples: derivs,
    })
}

impl Wavelet {
    pub fn params(&self) -> &MeasureParams {
        &self.params
    }

    pub fn profile(&self) -> &WaveletProfile {
        &self.profile
    }

    pub fn spectrum(&self, w: f64) -> f64 {
        self.profile.eval(w)
    }

    pub fn cancellation_order(&self) -> u32 {
        self.cancellation_order
    }

    /// `∫ ω^(-2ν-1) |ψ̂|² dω`.
    pub fn admissibility(&self) -> f64 {
        self.admissibility
    }

    /// `(1/c) ∫ |ψ̂|² dω/ω`; the normalisation of Parseval and inversion.
    pub fn reproducing(&self) -> f64 {
        self.reproducing
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    /// `ψ^(k)` for `k = 1..=cancellation_order + 1`.
    pub fn derivative(&self, k: usize) -> Result<&SampledFunction> {
        if k == 0 {
            return Ok(&self.samples);
        }
        self.derivative_samples.get(k - 1).ok_or_else(|| {
            Error::Capability(format!(
                "derivative {k} not synthesised (have {})",
                self.derivative_samples.len()
            ))
        })
    }

    /// `ψ(t)`, from the closed form when available.
    pub fn eval(&self, t: f64) -> f64 {
        self.profile
            .spatial(&self.params, t)
            .unwrap_or_else(|| self.samples.eval(t))
    }

    pub fn grid(&self) -> &Arc<crate::grid::RadialGrid> {
        self.samples.grid()
    }
}
