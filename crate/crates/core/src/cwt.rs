//! Continuous Bessel wavelet transform.
//!
//! `B_ψ f(b, a) = ∫ f(x) ψ_{b,a}(x) dσ(x) = (f # ψ_a)(b)` with
//! `ψ_a(t) = a^-(2mu+2) ψ(t/a)`, so that `ψ̂_a(ω) = ψ̂(aω)`. Rows of the
//! scalogram are computed through the Hankel domain. Scale integrals use the
//! measure `dσ(a)/a^(2ν+1) = da / (c·a)` and the trapezoid rule in `ln a`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::grid::{fmt17, inner_product, lp_norm, RadialGrid, SampledFunction};
use crate::hankel::HankelPlan;
use crate::kernels::DKernelCalibration;
use crate::wavelet::Wavelet;

/// Relative size of `f̂ ψ̂(a·)` allowed on the last spectral panel.
pub const SPECTRAL_ESCAPE_TOL: f64 = 1e-6;

/// Fewest scales any scale integral accepts.
pub const MIN_SCALES: usize = 4;

/// `count` geometric scales from `a_min` to `a_max`.
pub fn geometric_scales(a_min: f64, a_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(a_min > 0.0 && a_max > a_min && a_max.is_finite()) {
        return param(format!(
            "scale range must satisfy 0 < a_min < a_max, got [{a_min}, {a_max}]"
        ));
    }
    if count < 2 {
        return param("need at least two scales");
    }
    let r = (a_max / a_min).ln() / (count - 1) as f64;
    Ok((0..count).map(|k| a_min * (r * k as f64).exp()).collect())
}

/// Parse `a_min:a_max:count`.
pub fn parse_scales(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parameter(format!("scales must look like a_min:a_max:count, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a_min: f64 = parts[0].parse().map_err(|_| bad())?;
    let a_max: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    geometric_scales(a_min, a_max, count)
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return param("no scales given");
    }
    if scales.iter().any(|a| !(a.is_finite() && *a > 0.0)) || scales.windows(2).any(|w| !(w[1] > w[0])) {
        return param("scales must be positive and strictly increasing");
    }
    Ok(())
}

/// Trapezoid weights in `ln a` for the scale measure `da / (c·a)`.
pub fn scale_weights(wavelet: &Wavelet, scales: &[f64]) -> Result<Vec<f64>> {
    if scales.len() < MIN_SCALES {
        return Err(Error::Resolution(format!(
            "scale integrals need at least {MIN_SCALES} scales, got {}",
            scales.len()
        )));
    }
    let c = wavelet.params().scale_measure_factor();
    let n = scales.len();
    let mut w = vec![0.0; n];
    for k in 0..n - 1 {
        let h = 0.5 * (scales[k + 1] / scales[k]).ln() * c;
        w[k] += h;
        w[k + 1] += h;
    }
    Ok(w)
}

/// Coefficients `B_ψ f(b, a)` on a position grid × scale list.
#[derive(Debug, Clone)]
pub struct Scalogram {
    positions: Arc<RadialGrid>,
    scales: Vec<f64>,
    /// One row per scale.
    coefficients: Vec<Vec<f64>>,
}

impl Scalogram {
    pub fn new(positions: Arc<RadialGrid>, scales: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        check_scales(&scales)?;
        if coefficients.len() != scales.len() || coefficients.iter().any(|r| r.len() != positions.len()) {
            return Err(Error::Shape(format!(
                "coefficients must be {} × {}",
                scales.len(),
                positions.len()
            )));
        }
        if coefficients.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Resolution("scalogram has non-finite coefficients".into()));
        }
        Ok(Self {
            positions,
            scales,
            coefficients,
        })
    }

    pub fn positions(&self) -> &Arc<RadialGrid> {
        &self.positions
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.coefficients[k]
    }

    pub fn row_function(&self, k: usize) -> SampledFunction {
        SampledFunction::new(Arc::clone(&self.positions), self.coefficients[k].clone())
            .expect("row length checked at construction")
    }

    /// `‖B_ψ f(·, a)‖_{p,σ}` for every scale.
    pub fn scale_norms(&self, p: f64) -> Result<Vec<f64>> {
        (0..self.scales.len())
            .map(|k| lp_norm(&self.row_function(k), p))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with header `a,b,coeff`, sorted by `(a, b)`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "b", "coeff"])?;
        for (a, row) in self.scales.iter().zip(&self.coefficients) {
            for (b, v) in self.positions.nodes().iter().zip(row) {
                w.write_record([fmt17(*a), fmt17(*b), fmt17(*v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_record(&self) -> ScalogramRecord {
        ScalogramRecord {
            nu: self.positions.params().nu,
            scales: self.scales.clone(),
            positions: self.positions.nodes().to_vec(),
            coefficients: self.coefficients.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalogramRecord {
    pub nu: f64,
    pub scales: Vec<f64>,
    pub positions: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
}

fn check_wavelet(plan: &HankelPlan, wavelet: &Wavelet) -> Result<()> {
    if wavelet.params() != plan.params() {
        return Err(Error::Shape("wavelet was built for a different order".into()));
    }
    Ok(())
}

/// `ψ_{b,a}(x)` on `grid`: pure dilation for `b = 0`, otherwise
/// `a^-(2mu+2) ∫ ψ(z) D(b/a, x/a, z) dσ(z)`.
pub fn daughter(
    cal: &DKernelCalibration,
    wavelet: &Wavelet,
    b: f64,
    a: f64,
    grid: &Arc<RadialGrid>,
) -> Result<SampledFunction> {
    if !(a > 0.0 && a.is_finite()) {
        return param(format!("scale must be > 0, got {a}"));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return param(format!("position must be >= 0, got {b}"));
    }
    if &cal.params != wavelet.params() {
        return Err(Error::Shape(
            "kernel calibration and wavelet use different orders".into(),
        ));
    }
    let norm = a.powf(-wavelet.params().dilation_power());
    SampledFunction::from_fn(grid, |x| {
        if b == 0.0 {
            norm * wavelet.eval(x / a)
        } else {
            norm * cal.translate_at(b / a, x / a, |z| wavelet.eval(z))
        }
    })
}

/// `f̂(ω) ψ̂(aω)` on the spectral grid, with the escape check.
fn scale_product(plan: &HankelPlan, fhat: &[f64], wavelet: &Wavelet, a: f64) -> Result<Vec<f64>> {
    let spectral = plan.output_grid();
    let prod: Vec<f64> = spectral
        .nodes()
        .iter()
        .zip(fhat)
        .map(|(&w, &v)| v * wavelet.spectrum(a * w))
        .collect();
    let peak = prod.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let npp = spectral.spec().nodes_per_panel;
    let edge = prod[prod.len() - npp..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 && edge > SPECTRAL_ESCAPE_TOL * peak {
        return Err(Error::Resolution(format!(
            "at scale {a} the product f̂·ψ̂(a·) is still {:.1e} of its peak at ω = {}; \
             widen the spectral grid or drop the scale",
            edge / peak,
            spectral.r_max()
        )));
    }
    Ok(prod)
}

/// `B_ψ f(·, a)` for every scale, by `H⁻¹[f̂ ψ̂(a·)]`.
pub fn cwt(plan: &HankelPlan, f: &SampledFunction, wavelet: &Wavelet, scales: &[f64]) -> Result<Scalogram> {
    check_wavelet(plan, wavelet)?;
    check_scales(scales)?;
    let fhat = plan.forward(f)?;
    let rows = scales
        .iter()
        .map(|&a| Ok(plan.inverse_values(&scale_product(plan, fhat.values(), wavelet, a)?)))
        .collect::<Result<Vec<_>>>()?;
    Scalogram::new(Arc::clone(plan.input_grid()), scales.to_vec(), rows)
}

/// `B_ψ f(b, a)` by direct quadrature of `∫ f(x) ψ_{b,a}(x) dσ(x)`.
pub fn cwt_direct(cal: &DKernelCalibration, f: &SampledFunction, wavelet: &Wavelet, b: f64, a: f64) -> Result<f64> {
    let psi = daughter(cal, wavelet, b, a, f.grid())?;
    inner_product(f, &psi)
}

/// `(∫ (∫ |B(b,a)|² dσ(a)/a^(2ν+1))^(p/2) dσ(b))^(1/p)`.
pub fn sp_norm(scalogram: &Scalogram, wavelet: &Wavelet, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return param(format!("p must lie in (1, ∞), got {p}"));
    }
    let sw = scale_weights(wavelet, scalogram.scales())?;
    let n = scalogram.positions.len();
    let mut inner = vec![0.0; n];
    for (row, w) in scalogram.coefficients.iter().zip(&sw) {
        for (acc, v) in inner.iter_mut().zip(row) {
            *acc += w * v * v;
        }
    }
    let g = SampledFunction::new(
        Arc::clone(&scalogram.positions),
        inner.iter().map(|v| v.sqrt()).collect(),
    )?;
    lp_norm(&g, p)
}

/// Both sides of the wavelet Parseval identity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CwtParseval {
    /// `(1/C_ψ) ∫∫ B_ψf B_ψg dσ(a)/a^(2ν+1) dσ(b)`
    pub lhs: f64,
    /// `⟨f, g⟩`
    pub rhs: f64,
}

impl CwtParseval {
    pub fn relative_residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(crate::hankel::PARSEVAL_FLOOR)
    }
}

pub fn cwt_parseval(
    plan: &HankelPlan,
    f: &SampledFunction,
    g: &SampledFunction,
    wavelet: &Wavelet,
    scales: &[f64],
) -> Result<CwtParseval> {
    let bf = cwt(plan, f, wavelet, scales)?;
    let bg = cwt(plan, g, wavelet, scales)?;
    let sw = scale_weights(wavelet, scales)?;
    let weights = plan.input_grid().weights();
    let mut lhs = 0.0;
    for ((rf, rg), w) in bf.coefficients.iter().zip(&bg.coefficients).zip(&sw) {
        let s: f64 = rf.iter().zip(rg).zip(weights).map(|((x, y), q)| q * x * y).sum();
        lhs += w * s;
    }
    Ok(CwtParseval {
        lhs: lhs / wavelet.reproducing(),
        rhs: inner_product(f, g)?,
    })
}

/// `(1/C_ψ) ∫∫ B(b,a) ψ_{b,a}(x) dσ(a)/a^(2ν+1) dσ(b)`, one scale at a time
/// through the Hankel domain.
pub fn cwt_invert(plan: &HankelPlan, scalogram: &Scalogram, wavelet: &Wavelet) -> Result<SampledFunction> {
    check_wavelet(plan, wavelet)?;
    if !scalogram.positions.same_as(plan.input_grid()) {
        return Err(Error::Shape(
            "scalogram positions differ from the plan's input grid".into(),
        ));
    }
    let sw = scale_weights(wavelet, scalogram.scales())?;
    let spectral = plan.output_grid();
    let mut acc = vec![0.0; spectral.len()];
    for ((row, &a), w) in scalogram.coefficients.iter().zip(scalogram.scales()).zip(&sw) {
        let rh = plan.forward_values(row);
        for ((s, &om), v) in acc.iter_mut().zip(spectral.nodes()).zip(rh) {
            *s += w * v * wavelet.spectrum(a * om);
        }
    }
    let c = wavelet.reproducing();
    acc.iter_mut().for_each(|v| *v /= c);
    SampledFunction::new(Arc::clone(plan.input_grid()), plan.inverse_values(&acc))
}
