//! Besov–Hankel seminorms from moduli of smoothness and from wavelet
//! coefficients, and the two inequalities that tie them together.
//!
//! For `0 < α < 1`:
//!
//! ```text
//! |f|_mod = (∫ (h^-α ‖τ_h f - f‖_p)^q dh/h)^(1/q)
//! |f|_wav = (∫ (a^-α ‖B_ψ f(·, a)‖_p)^q da/a)^(1/q)
//! ```
//!
//! For `1 < α < 2` the modulus is taken of `f'` with exponent `α - 1`.
//! Both integrals are trapezoid sums in `ln h`, `ln a` over finite windows.

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::bessel::normalized_j;
use crate::convolution::TranslationOperator;
use crate::cwt::{cwt, geometric_scales, Scalogram, MIN_SCALES};
use crate::error::{param, Error, Result};
use crate::grid::{lp_norm, SampledFunction};
use crate::hankel::{spectral_derivatives, HankelPlan};
use crate::kernels::DKernelCalibration;
use crate::wavelet::Wavelet;

pub const DEFAULT_H_WINDOW: (f64, f64) = (1.0 / 32.0, 32.0);
pub const DEFAULT_SCALE_WINDOW: (f64, f64) = (1.0 / 32.0, 32.0);
pub const DEFAULT_POINTS: usize = 64;

/// Quadrature allowance on both bound checks.
pub const BOUND_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesovParams {
    pub alpha: f64,
    pub alpha_int: u32,
    pub alpha_frac: f64,
    pub p: f64,
    pub q: f64,
    pub h_grid: Vec<f64>,
    pub scale_grid: Vec<f64>,
}

fn check_window(xs: &[f64], what: &str) -> Result<()> {
    if xs.len() < MIN_SCALES {
        return Err(Error::Resolution(format!("{what} needs at least {MIN_SCALES} points")));
    }
    if xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return param(format!("{what} must be positive and increasing"));
    }
    Ok(())
}

impl BesovParams {
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return param(format!("alpha must be > 0, got {alpha}"));
        }
        let alpha_int = alpha.floor();
        let alpha_frac = alpha - alpha_int;
        if alpha_frac == 0.0 {
            return param(format!("alpha must not be an integer, got {alpha}"));
        }
        if alpha_int > 1.0 {
            return Err(Error::Capability(format!(
                "alpha = {alpha}: only 0 < alpha < 2 is supported"
            )));
        }
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 1.0 && v.is_finite()) {
                return param(format!("{name} must lie in (1, ∞), got {v}"));
            }
        }
        let (h0, h1) = DEFAULT_H_WINDOW;
        let (a0, a1) = DEFAULT_SCALE_WINDOW;
        Ok(Self {
            alpha,
            alpha_int: alpha_int as u32,
            alpha_frac,
            p,
            q,
            h_grid: geometric_scales(h0, h1, DEFAULT_POINTS)?,
            scale_grid: geometric_scales(a0, a1, DEFAULT_POINTS)?,
        })
    }

    pub fn with_h_grid(self, h_grid: Vec<f64>) -> Result<Self> {
        check_window(&h_grid, "h grid")?;
        Ok(Self { h_grid, ..self })
    }

    pub fn with_scale_grid(self, scale_grid: Vec<f64>) -> Result<Self> {
        check_window(&scale_grid, "scale grid")?;
        Ok(Self { scale_grid, ..self })
    }

    /// Exponent applied to the modulus: `α - [α]`.
    fn modulus_exponent(&self) -> f64 {
        self.alpha_frac
    }
}

/// `(Σ trapezoid in ln x of vᵢ^q)^(1/q)`.
fn log_trapezoid_q(xs: &[f64], vals: &[f64], q: f64) -> f64 {
    let s: f64 = xs
        .windows(2)
        .zip(vals.windows(2))
        .map(|(x, v)| 0.5 * (x[1] / x[0]).ln() * (v[0].powf(q) + v[1].powf(q)))
        .sum();
    s.powf(1.0 / q)
}

/// `w_p(f)(h) = ‖τ_h f - f‖_{p,σ}`.
pub fn modulus(cal: &DKernelCalibration, f: &SampledFunction, h: f64, p: f64) -> Result<f64> {
    let t = TranslationOperator::new(cal, f.grid(), h)?.apply(f)?;
    lp_norm(&t.sub(f)?, p)
}

/// `w_2(f)(h)² = ∫ (1 - j(hω))² |f̂(ω)|² dσ(ω)`, valid for any `h`.
pub fn modulus_spectral(plan: &HankelPlan, fhat: &SampledFunction, h: f64) -> Result<f64> {
    fhat.on_grid(plan.output_grid())?;
    let mu = plan.params().mu;
    let grid = plan.output_grid();
    let s: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(fhat.values())
        .map(|((&w, &q), &v)| q * ((1.0 - normalized_j(mu, h * w)) * v).powi(2))
        .sum();
    Ok(s.sqrt())
}

/// Largest node where `|g|` exceeds `1e-12` of its peak.
fn effective_radius(g: &SampledFunction) -> f64 {
    let peak = g.max_abs();
    g.grid()
        .nodes()
        .iter()
        .zip(g.values())
        .filter(|(_, v)| v.abs() > 1e-12 * peak)
        .map(|(x, _)| *x)
        .fold(0.0, f64::max)
}

/// `f'` on `f`'s grid through the Hankel domain.
pub fn derivative_of(plan: &HankelPlan, f: &SampledFunction) -> Result<SampledFunction> {
    let fhat = plan.forward(f)?;
    let mut d = spectral_derivatives(&fhat, plan.input_grid(), 1)?;
    Ok(d.pop().expect("two entries"))
}

/// A function together with the derivative needed for `α > 1`.
#[derive(Debug, Clone)]
pub struct BesovInput {
    pub f: SampledFunction,
    pub derivative: Option<SampledFunction>,
}

impl BesovInput {
    pub fn new(f: SampledFunction) -> Self {
        Self { f, derivative: None }
    }

    /// Attach `f'` computed through `plan`.
    pub fn with_derivative(plan: &HankelPlan, f: SampledFunction) -> Result<Self> {
        let d = derivative_of(plan, &f)?;
        Ok(Self { f, derivative: Some(d) })
    }

    fn reduced(&self, params: &BesovParams) -> Result<&SampledFunction> {
        match params.alpha_int {
            0 => Ok(&self.f),
            _ => self
                .derivative
                .as_ref()
                .ok_or_else(|| Error::Capability(format!("alpha = {} needs derivative samples of f", params.alpha))),
        }
    }
}

/// `w_p(g)(h)` at every `h` of `params.h_grid`.
///
/// Shifts that keep `τ_h g` on the grid use the translation operator. Larger
/// shifts are only available for `p = 2`, through the Hankel domain.
pub fn modulus_profile(
    plan: &HankelPlan,
    cal: &DKernelCalibration,
    g: &SampledFunction,
    params: &BesovParams,
) -> Result<Vec<f64>> {
    let reach = g.grid().r_max() - effective_radius(g);
    let ghat = plan.forward(g)?;
    params
        .h_grid
        .iter()
        .map(|&h| {
            if h <= reach {
                modulus(cal, g, h, params.p)
            } else if params.p == 2.0 {
                modulus_spectral(plan, &ghat, h)
            } else {
                Err(Error::Resolution(format!(
                    "shift {h} moves the function off the grid (reach {reach:.3}); only p = 2 extends beyond it"
                )))
            }
        })
        .collect()
}

/// `(∫ (h^-(α-[α]) w_p(f^([α]))(h))^q dh/h)^(1/q)` over `params.h_grid`.
pub fn seminorm_via_modulus(
    plan: &HankelPlan,
    cal: &DKernelCalibration,
    input: &BesovInput,
    params: &BesovParams,
) -> Result<f64> {
    let g = input.reduced(params)?;
    if g.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let e = params.modulus_exponent();
    let w = modulus_profile(plan, cal, g, params)?;
    let vals: Vec<f64> = params.h_grid.iter().zip(&w).map(|(h, m)| h.powf(-e) * m).collect();
    Ok(log_trapezoid_q(&params.h_grid, &vals, params.q))
}

/// `(∫ (a^-α ‖B_ψ f(·, a)‖_p)^q da/a)^(1/q)` over the scalogram's scales.
pub fn seminorm_via_wavelet(scalogram: &Scalogram, params: &BesovParams) -> Result<f64> {
    let scales = scalogram.scales();
    if scales.len() < MIN_SCALES {
        return Err(Error::Resolution(format!(
            "wavelet seminorm needs at least {MIN_SCALES} scales, got {}",
            scales.len()
        )));
    }
    let norms = scalogram.scale_norms(params.p)?;
    let vals: Vec<f64> = scales
        .iter()
        .zip(&norms)
        .map(|(a, n)| a.powf(-params.alpha) * n)
        .collect();
    Ok(log_trapezoid_q(scales, &vals, params.q))
}

/// `∫ z^k |g(z)| dσ(z)` on `g`'s grid.
fn weighted_l1(g: &SampledFunction, k: f64) -> f64 {
    let grid = g.grid();
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(g.values())
        .map(|((z, w), v)| w * z.powf(k) * v.abs())
        .sum()
}

/// `Ψ(t) = -∫_t^∞ ψ(s) ds`, so that `Ψ' = ψ`.
fn antiderivative(wavelet: &Wavelet) -> Result<SampledFunction> {
    let grid = wavelet.grid();
    let gl = GaussLegendre::new(std::num::NonZeroUsize::new(24).expect("nonzero"));
    let edges = grid.edges().to_vec();
    // tail integrals from every panel edge to r_max
    let mut tails = vec![0.0; edges.len()];
    for k in (0..edges.len() - 1).rev() {
        tails[k] = tails[k + 1] + gl.integrate(edges[k], edges[k + 1], |s: f64| wavelet.eval(s));
    }
    SampledFunction::from_fn(grid, |t| {
        let k = edges
            .partition_point(|&e| e <= t)
            .saturating_sub(1)
            .min(edges.len() - 2);
        -(tails[k + 1] + gl.integrate(t, edges[k + 1], |s: f64| wavelet.eval(s)))
    })
}

/// One side of an inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub constant: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `None` when both sides vanish.
    pub ratio: Option<f64>,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lhs: f64, constant: f64, base: f64) -> Self {
        let rhs = constant * base;
        let ratio = if rhs > 0.0 {
            Some(lhs / rhs)
        } else if lhs == 0.0 {
            None
        } else {
            Some(f64::INFINITY)
        };
        let holds = lhs <= (1.0 + BOUND_TOL) * rhs;
        Self {
            lhs,
            constant,
            rhs,
            ratio,
            holds,
        }
    }
}

/// Constants of the direct inequality `|f|_wav ≤ C |f|_mod`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DirectConstants {
    /// `∫ z^-(α-[α]) |Ψ| dσ`.
    pub negative_moment: f64,
    /// `∫ z^(α-[α]) |Ψ| dσ`.
    pub positive_moment: f64,
}

/// `Ψ = ψ` for `α < 1`, and the antiderivative of `ψ` for `1 < α < 2`.
fn reduced_wavelet(wavelet: &Wavelet, params: &BesovParams) -> Result<SampledFunction> {
    if params.alpha_int + 1 > wavelet.cancellation_order() {
        return Err(Error::Capability(format!(
            "alpha = {} needs {} cancellations, the wavelet has {}",
            params.alpha,
            params.alpha_int + 1,
            wavelet.cancellation_order()
        )));
    }
    match params.alpha_int {
        0 => Ok(wavelet.samples().clone()),
        _ => antiderivative(wavelet),
    }
}

pub fn direct_constants(wavelet: &Wavelet, params: &BesovParams) -> Result<DirectConstants> {
    let psi = reduced_wavelet(wavelet, params)?;
    let e = params.alpha_frac;
    Ok(DirectConstants {
        negative_moment: weighted_l1(&psi, -e),
        positive_moment: weighted_l1(&psi, e),
    })
}

/// Constant of the converse inequality `|f|_mod ≤ K |f|_wav`:
/// `K = (2/(α-[α]) ‖ψ^([α])‖₁ + 1/(1-(α-[α])) ‖ψ^([α]+1)‖₁) / (c C_ψ)`.
///
/// `c C_ψ = ∫ |ψ̂|² dω/ω` because the wavelet seminorm integrates against
/// `da/a` while the reconstruction integrates against `da/(c a)`.
pub fn converse_constant(wavelet: &Wavelet, params: &BesovParams) -> Result<f64> {
    let k = params.alpha_int as usize;
    let n0 = lp_norm(wavelet.derivative(k)?, 1.0)?;
    let n1 = lp_norm(wavelet.derivative(k + 1)?, 1.0)?;
    let s = params.alpha_frac;
    let c = wavelet.reproducing() / wavelet.params().scale_measure_factor();
    Ok((2.0 / s * n0 + 1.0 / (1.0 - s) * n1) / c)
}

#[derive(Debug, Clone, Serialize)]
pub struct BesovReport {
    pub params: BesovParams,
    pub seminorm_modulus: f64,
    pub seminorm_wavelet: f64,
    pub direct_constants: DirectConstants,
    /// Which moment the direct check asserts: `"negative"` or `"positive"`.
    pub direct_moment: &'static str,
    pub direct: BoundCheck,
    pub converse: BoundCheck,
    pub direct_bound_rhs: f64,
    pub converse_constant: f64,
    /// `seminorm_wavelet / seminorm_modulus`; `None` for degenerate input.
    pub ratio: Option<f64>,
    /// `[1/(K(1+tol)), C(1+tol)]` from the two inequalities.
    pub bracket: (f64, f64),
    pub in_bracket: Option<bool>,
    /// Upper bound on the part of `|f|_mod^q` beyond the `h` window, from
    /// `w_p ≤ 2‖f‖_p`.
    pub modulus_tail_bound: f64,
}

impl BesovReport {
    pub fn holds(&self) -> bool {
        self.direct.holds && self.converse.holds && self.in_bracket != Some(false)
    }
}

/// Compute both seminorms of `input` and check the direct and converse
/// inequalities. `direct_moment` selects the weight of the direct constant.
pub fn besov_report(
    plan: &HankelPlan,
    cal: &DKernelCalibration,
    input: &BesovInput,
    wavelet: &Wavelet,
    params: &BesovParams,
    direct_moment: DirectMoment,
) -> Result<BesovReport> {
    let sm = seminorm_via_modulus(plan, cal, input, params)?;
    let scalogram = cwt(plan, &input.f, wavelet, &params.scale_grid)?;
    let sw = seminorm_via_wavelet(&scalogram, params)?;
    let dc = direct_constants(wavelet, params)?;
    let c_dir = match direct_moment {
        DirectMoment::Negative => dc.negative_moment,
        DirectMoment::Positive => dc.positive_moment,
    };
    let k = converse_constant(wavelet, params)?;
    let direct = BoundCheck::new(sw, c_dir, sm);
    let converse = BoundCheck::new(sm, k, sw);
    let ratio = if sm > 0.0 && sw > 0.0 { Some(sw / sm) } else { None };
    let bracket = (1.0 / (k * (1.0 + BOUND_TOL)), c_dir * (1.0 + BOUND_TOL));
    let in_bracket = ratio.map(|r| r >= bracket.0 && r <= bracket.1);
    let g = input.reduced(params)?;
    let h_max = params.h_grid[params.h_grid.len() - 1];
    let cap = 2.0 * lp_norm(g, params.p)?;
    let e = params.modulus_exponent();
    let modulus_tail_bound = cap.powf(params.q) * h_max.powf(-e * params.q) / (e * params.q);
    Ok(BesovReport {
        params: params.clone(),
        seminorm_modulus: sm,
        seminorm_wavelet: sw,
        direct_constants: dc,
        direct_moment: direct_moment.label(),
        direct_bound_rhs: direct.rhs,
        converse_constant: k,
        direct,
        converse,
        ratio,
        bracket,
        in_bracket,
        modulus_tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectMoment {
    /// `∫ z^-(α-[α]) |Ψ| dσ`
    Negative,
    /// `∫ z^(α-[α]) |Ψ| dσ`
    Positive,
}

impl DirectMoment {
    pub fn label(self) -> &'static str {
        match self {
            Self::Negative => "negative",
            Self::Positive => "positive",
        }
    }
}

/// Reports for every member of `family`; degenerate members carry `ratio: None`.
pub fn equivalence_report(
    plan: &HankelPlan,
    cal: &DKernelCalibration,
    family: &[BesovInput],
    wavelet: &Wavelet,
    params: &BesovParams,
    direct_moment: DirectMoment,
) -> Result<Vec<BesovReport>> {
    family
        .iter()
        .map(|f| besov_report(plan, cal, f, wavelet, params, direct_moment))
        .collect()
}

/// Least-squares slope of `ln ‖B_ψ f(·, a)‖_p` against `ln a` over the
/// eight smallest scales below `a = 1`; `None` when a norm vanishes.
pub fn smoothness_exponent(scalogram: &Scalogram, p: f64) -> Result<Option<f64>> {
    const COUNT: usize = 8;
    let small: Vec<usize> = (0..scalogram.scales().len())
        .filter(|&k| scalogram.scales()[k] < 1.0)
        .collect();
    if small.len() < COUNT {
        return Err(Error::Resolution(format!(
            "slope needs {COUNT} scales below 1, got {}",
            small.len()
        )));
    }
    let idx = &small[..COUNT];
    let norms = scalogram.scale_norms(p)?;
    if idx.iter().any(|&k| !(norms[k] > 0.0)) {
        return Ok(None);
    }
    let xs: Vec<f64> = idx.iter().map(|&k| scalogram.scales()[k].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&k| norms[k].ln()).collect();
    let n = COUNT as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(Some(sxy / sxx))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::{GridSpec, RadialGrid};
    use crate::hankel::plan;
    use crate::harness::{generate_test_function, TestFunctionKind};
    use crate::kernels::calibrate_d_constant;
    use crate::measure::MeasureParams;
    use crate::wavelet::{make_wavelet, WaveletProfile};

    struct Fx {
        params: MeasureParams,
        plan: HankelPlan,
        cal: DKernelCalibration,
        wavelet: Wavelet,
    }

    fn fx() -> Fx {
        let params = MeasureParams::new(1.0).unwrap();
        let grid = Arc::new(RadialGrid::new(&params, GridSpec::default()).unwrap());
        let plan = plan(&params, &grid, &grid).unwrap();
        let wavelet = make_wavelet(&params, WaveletProfile::HankelMexican(1), &plan).unwrap();
        Fx {
            cal: calibrate_d_constant(&params).unwrap(),
            params,
            plan,
            wavelet,
        }
    }

    fn gaussian(f: &Fx, w: f64) -> SampledFunction {
        generate_test_function(TestFunctionKind::Gaussian { width: w }, &f.plan).unwrap()
    }

    fn both(f: &Fx, g: &SampledFunction, params: &BesovParams) -> (f64, f64) {
        let input = BesovInput::new(g.clone());
        let sm = seminorm_via_modulus(&f.plan, &f.cal, &input, params).unwrap();
        let s = cwt(&f.plan, g, &f.wavelet, &params.scale_grid).unwrap();
        (sm, seminorm_via_wavelet(&s, params).unwrap())
    }

    #[test]
    fn parameters_are_validated() {
        assert!(matches!(BesovParams::new(1.0, 2.0, 2.0), Err(Error::Parameter(_))));
        assert!(matches!(BesovParams::new(0.5, 1.0, 2.0), Err(Error::Parameter(_))));
        assert!(matches!(BesovParams::new(2.5, 2.0, 2.0), Err(Error::Capability(_))));
        let p = BesovParams::new(0.5, 2.0, 2.0).unwrap();
        assert!(matches!(
            p.clone().with_h_grid(vec![0.1, 0.2]),
            Err(Error::Resolution(_))
        ));
        assert!(matches!(
            p.with_scale_grid(vec![0.4, 0.3, 0.2, 0.1]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn zero_function_has_zero_seminorms_and_no_ratio() {
        let f = fx();
        let z = SampledFunction::zeros(f.plan.input_grid());
        let params = BesovParams::new(0.5, 2.0, 2.0).unwrap();
        assert_eq!(both(&f, &z, &params), (0.0, 0.0));
        let family = [BesovInput::new(z)];
        let r = equivalence_report(&f.plan, &f.cal, &family, &f.wavelet, &params, DirectMoment::Positive).unwrap();
        assert_eq!(r[0].ratio, None);
        assert_eq!(r[0].in_bracket, None);
        assert!(r[0].holds());
    }

    #[test]
    fn seminorms_are_homogeneous() {
        let f = fx();
        let g = gaussian(&f, 1.0);
        let params = BesovParams::new(0.25, 2.0, 2.0).unwrap();
        let (m1, w1) = both(&f, &g, &params);
        let (m3, w3) = both(&f, &g.scale(-3.0), &params);
        assert!((m3 / m1 - 3.0).abs() < 1e-10);
        assert!((w3 / w1 - 3.0).abs() < 1e-10);
    }

    #[test]
    fn refining_the_windows_changes_little() {
        let f = fx();
        let g = gaussian(&f, 1.0);
        let base = BesovParams::new(0.5, 2.0, 2.0).unwrap();
        let (m, w) = both(&f, &g, &base);
        let fine_h = base
            .clone()
            .with_h_grid(geometric_scales(1.0 / 32.0, 32.0, 128).unwrap())
            .unwrap();
        let (mh, _) = both(&f, &g, &fine_h);
        assert!((mh / m - 1.0).abs() < 0.01, "{mh} vs {m}");
        let fine_a = base
            .with_scale_grid(geometric_scales(1.0 / 32.0, 32.0, 128).unwrap())
            .unwrap();
        let (_, wa) = both(&f, &g, &fine_a);
        assert!((wa / w - 1.0).abs() < 0.02, "{wa} vs {w}");
    }

    #[test]
    fn spectral_modulus_matches_translation() {
        let f = fx();
        let g = gaussian(&f, 1.0);
        let gh = f.plan.forward(&g).unwrap();
        for h in [0.05, 0.5, 2.0, 8.0] {
            let a = modulus(&f.cal, &g, h, 2.0).unwrap();
            let b = modulus_spectral(&f.plan, &gh, h).unwrap();
            assert!((a / b - 1.0).abs() < 1e-6, "h={h}: {a} vs {b}");
        }
    }

    #[test]
    fn large_shift_needs_p_two() {
        let f = fx();
        let g = gaussian(&f, 1.0);
        let params = BesovParams::new(0.5, 3.0, 2.0).unwrap();
        let r = seminorm_via_modulus(&f.plan, &f.cal, &BesovInput::new(g), &params);
        assert!(matches!(r, Err(Error::Resolution(_))));
    }

    #[test]
    fn faster_spectral_decay_means_smaller_seminorm() {
        let f = fx();
        let params = BesovParams::new(0.5, 2.0, 2.0).unwrap();
        let seminorms: Vec<f64> = [1.5, 2.0, 3.0, 4.0]
            .iter()
            .map(|&rate| {
                let g = generate_test_function(TestFunctionKind::SpectralDecay { rate }, &f.plan).unwrap();
                let g = g.scale(1.0 / lp_norm(&g, 2.0).unwrap());
                both(&f, &g, &params).1
            })
            .collect();
        assert!(seminorms.windows(2).all(|w| w[1] <= w[0]), "{seminorms:?}");
    }

    #[test]
    fn converse_constant_matches_independent_quadrature() {
        let f = fx();
        let params = BesovParams::new(0.5, 2.0, 2.0).unwrap();
        let k = converse_constant(&f.wavelet, &params).unwrap();
        let profile = WaveletProfile::HankelMexican(1);
        let psi = |t: f64| profile.spatial(&f.params, t).unwrap();
        let dpsi = |t: f64| (psi(t + 1e-5) - psi(t - 1e-5)) / 2e-5;
        let gl = GaussLegendre::new(std::num::NonZeroUsize::new(16).unwrap());
        let e = f.params.weight_exponent();
        let l1 = |g: &dyn Fn(f64) -> f64| -> f64 {
            (0..4000)
                .map(|i| {
                    let (a, b) = (i as f64 * 0.01, (i + 1) as f64 * 0.01);
                    gl.integrate(a, b, |t: f64| g(t).abs() * t.powf(e))
                })
                .sum::<f64>()
                * f.params.measure_const
        };
        // ∫ ω⁴ e^(-2ω²) dω/ω = 1/8
        let expected = (2.0 / 0.5 * l1(&psi) + 1.0 / 0.5 * l1(&dpsi)) * 8.0;
        assert!((k / expected - 1.0).abs() < 1e-4, "{k} vs {expected}");
    }

    #[test]
    fn higher_alpha_needs_derivative_and_cancellations() {
        let f = fx();
        let g = gaussian(&f, 1.0);
        let params = BesovParams::new(1.5, 2.0, 2.0).unwrap();
        let r = seminorm_via_modulus(&f.plan, &f.cal, &BesovInput::new(g.clone()), &params);
        assert!(matches!(r, Err(Error::Capability(_))));
        assert!(matches!(
            direct_constants(&f.wavelet, &params),
            Err(Error::Capability(_))
        ));
        let w2 = make_wavelet(&f.params, WaveletProfile::HankelMexican(2), &f.plan).unwrap();
        let input = BesovInput::with_derivative(&f.plan, g).unwrap();
        let r = besov_report(&f.plan, &f.cal, &input, &w2, &params, DirectMoment::Positive).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn smoothness_slopes() {
        let f = fx();
        let scales = geometric_scales(1.0 / 32.0, 32.0, 64).unwrap();
        let s = cwt(&f.plan, &gaussian(&f, 1.0), &f.wavelet, &scales).unwrap();
        let slope = smoothness_exponent(&s, 2.0).unwrap().unwrap();
        assert!((slope - 2.0).abs() < 0.2, "{slope}");
        let noise_scales = crate::harness::noise_slope_scales().unwrap();
        for seed in [1, 7, 42] {
            let n = generate_test_function(TestFunctionKind::Noise { seed }, &f.plan).unwrap();
            let s = cwt(&f.plan, &n, &f.wavelet, &noise_scales).unwrap();
            let slope = smoothness_exponent(&s, 2.0).unwrap().unwrap();
            assert!(slope.abs() < 0.3, "seed {seed}: {slope}");
        }
        let z = SampledFunction::zeros(f.plan.input_grid());
        let s = cwt(&f.plan, &z, &f.wavelet, &scales).unwrap();
        assert_eq!(smoothness_exponent(&s, 2.0).unwrap(), None);
        let few = cwt(
            &f.plan,
            &gaussian(&f, 1.0),
            &f.wavelet,
            &geometric_scales(0.5, 4.0, 8).unwrap(),
        )
        .unwrap();
        assert!(matches!(smoothness_exponent(&few, 2.0), Err(Error::Resolution(_))));
    }
}
