//! Run configuration, test-function generators and the `verify` suite.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::besov::{besov_report, smoothness_exponent, BesovInput, BesovParams, BesovReport, DirectMoment};
use crate::bessel::normalized_j;
use crate::convolution::{convolve, spectral_convolve, translate};
use crate::cwt::{cwt, cwt_invert, cwt_parseval, geometric_scales, sp_norm};
use crate::error::{param, Error, Result};
use crate::grid::{lp_norm, GridSpec, RadialGrid, SampledFunction};
use crate::hankel::{parseval_residual, plan, HankelPlan};
use crate::kernels::{calibrate_d_constant, DKernelCalibration};
use crate::measure::MeasureParams;
use crate::wavelet::{admissibility_of, make_wavelet, Wavelet, WaveletProfile};

pub const REPORT_SCHEMA: u32 = 1;

/// Geometric window `[min, max]` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Window {
    pub fn points(&self) -> Result<Vec<f64>> {
        geometric_scales(self.min, self.max, self.count)
    }
}

impl Default for Window {
    fn default() -> Self {
        Self {
            min: 1.0 / 32.0,
            max: 32.0,
            count: 64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

/// Everything a run depends on. Loaded from TOML or JSON; missing fields
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub nu: f64,
    #[serde(alias = "rng_seed")]
    pub seed: u64,
    pub grid: GridSpec,
    pub wavelet: String,
    pub scales: Window,
    pub h: Window,
    /// Per-check overrides of the default tolerances, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            seed: 7,
            grid: GridSpec::default(),
            wavelet: "hankel_mexican:1".into(),
            scales: Window::default(),
            h: Window::default(),
            tolerances: BTreeMap::new(),
            output: OutputPaths::default(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    /// Parse a `.toml` or `.json` file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let cfg: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).map_err(config_err)?,
            Some("json") => serde_json::from_str(&text).map_err(config_err)?,
            _ => {
                return Err(config_err(format!(
                    "{}: expected a .toml or .json file",
                    path.display()
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        MeasureParams::new(self.nu).map_err(config_err)?;
        self.grid.validate().map_err(config_err)?;
        WaveletProfile::from_str(&self.wavelet).map_err(config_err)?;
        self.scales.points().map_err(config_err)?;
        self.h.points().map_err(config_err)?;
        for (name, &v) in &self.tolerances {
            if !CHECKS.iter().any(|c| c.name == name) {
                return Err(config_err(format!("unknown check `{name}` in tolerances")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(config_err(format!(
                    "tolerance for `{name}` must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Set the same tolerance on every check.
    pub fn with_uniform_tolerance(mut self, v: f64) -> Self {
        self.tolerances = CHECKS.iter().map(|c| (c.name.to_string(), v)).collect();
        self
    }

    fn tolerance(&self, spec: &CheckSpec) -> f64 {
        self.tolerances.get(spec.name).copied().unwrap_or(spec.tolerance)
    }
}

/// Test-function families. Spectral kinds are built in the Hankel domain
/// and inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunctionKind {
    /// `exp(-t²/(2w²))`
    Gaussian { width: f64 },
    /// Gaussian spectral window that falls below 1e-6 outside `(lo, hi)`.
    HankelBand { lo: f64, hi: f64 },
    /// Spectrum `exp(-rate (√(κ² + ω²) - κ))`, exponential decay at `rate`.
    SpectralDecay { rate: f64 },
    /// Seeded spectrum with random signs on a lattice of bumps, shaped so
    /// the wavelet coefficients do not decay at small scales.
    Noise { seed: u64 },
}

impl FromStr for TestFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            args.get(i)
                .ok_or_else(|| Error::Parameter(format!("`{s}`: missing argument {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parameter(format!("`{s}`: {e}")))
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() != n {
                return param(format!("`{s}`: `{kind}` takes {n} argument(s)"));
            }
            Ok(())
        };
        match kind {
            "gaussian" => {
                arity(1)?;
                Ok(Self::Gaussian { width: num(0)? })
            }
            "hankel_band" => {
                arity(2)?;
                Ok(Self::HankelBand {
                    lo: num(0)?,
                    hi: num(1)?,
                })
            }
            "spectral_decay" => {
                arity(1)?;
                Ok(Self::SpectralDecay { rate: num(0)? })
            }
            "noise" => {
                arity(1)?;
                let seed = args[0]
                    .parse::<u64>()
                    .map_err(|e| Error::Parameter(format!("`{s}`: {e}")))?;
                Ok(Self::Noise { seed })
            }
            _ => param(format!(
                "unknown test function `{s}`; expected gaussian:W, hankel_band:LO:HI, spectral_decay:R or noise:SEED"
            )),
        }
    }
}

/// Standard deviations between the centre of a band window and its edges.
pub const BAND_SIGMAS: f64 = 5.3;
/// Spatial envelope of a band must have decayed by this many of its own
/// standard deviations at `r_max`.
const BAND_SPATIAL_SIGMAS: f64 = 5.0;
const DECAY_KNEE: f64 = 2.0;

/// Centre and width of the window for `(lo, hi)`. The spectrum is even, so a
/// band starting at 0 is one window over `(-hi, hi)`.
fn band_window(lo: f64, hi: f64) -> (f64, f64) {
    if lo == 0.0 {
        (0.0, hi / BAND_SIGMAS)
    } else {
        (0.5 * (lo + hi), (hi - lo) / (2.0 * BAND_SIGMAS))
    }
}

fn band_spectrum(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    let (c, s) = band_window(lo, hi);
    move |w: f64| {
        let g = |d: f64| (-d * d / (2.0 * s * s)).exp();
        if c == 0.0 {
            g(w)
        } else {
            g(w - c) + g(w + c)
        }
    }
}

const NOISE_CELLS: usize = 13;
const NOISE_SPACING: f64 = 0.9;
const NOISE_SPREAD: f64 = 0.3;
const NOISE_KNEE: f64 = 0.2;

fn noise_spectrum(mu: f64, seed: u64) -> impl Fn(f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<f64> = (0..NOISE_CELLS)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    move |w: f64| {
        // |f̂|² dσ ~ dω/ω at high frequency, so every octave carries the same energy
        let env = w * w * (w * w + NOISE_KNEE * NOISE_KNEE).powf(-(mu + 1.0) / 2.0 - 1.0);
        let g = |d: f64| (-d * d / (2.0 * NOISE_SPREAD * NOISE_SPREAD)).exp();
        let sum: f64 = signs
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let c = (k + 1) as f64 * NOISE_SPACING;
                s * (g(w - c) + g(w + c))
            })
            .sum();
        env * sum
    }
}

/// Sample a test function on the plan's input grid.
pub fn generate_test_function(kind: TestFunctionKind, plan: &HankelPlan) -> Result<SampledFunction> {
    let grid = plan.input_grid();
    let spectral_max = plan.output_grid().r_max();
    let positive = |name: &str, v: f64| -> Result<()> {
        if !(v > 0.0 && v.is_finite()) {
            return param(format!("{name} must be positive, got {v}"));
        }
        Ok(())
    };
    match kind {
        TestFunctionKind::Gaussian { width } => {
            positive("width", width)?;
            SampledFunction::from_fn(grid, |t| (-t * t / (2.0 * width * width)).exp())
        }
        TestFunctionKind::HankelBand { lo, hi } => {
            if !(lo >= 0.0 && hi > lo && hi <= spectral_max) {
                return param(format!("band ({lo}, {hi}) must satisfy 0 <= lo < hi <= {spectral_max}"));
            }
            let (_, s) = band_window(lo, hi);
            if s * grid.r_max() < BAND_SPATIAL_SIGMAS {
                return Err(Error::Resolution(format!(
                    "band ({lo}, {hi}) is too narrow: its spatial envelope reaches past r_max = {}",
                    grid.r_max()
                )));
            }
            plan.synthesize(band_spectrum(lo, hi))
        }
        TestFunctionKind::SpectralDecay { rate } => {
            positive("rate", rate)?;
            plan.synthesize(|w| (-rate * ((DECAY_KNEE * DECAY_KNEE + w * w).sqrt() - DECAY_KNEE)).exp())
        }
        TestFunctionKind::Noise { seed } => plan.synthesize(noise_spectrum(plan.params().mu, seed)),
    }
}

/// Shared state of a verify run.
pub struct Workspace {
    pub config: RunConfig,
    pub params: MeasureParams,
    pub grid: Arc<RadialGrid>,
    pub plan: HankelPlan,
    pub cal: DKernelCalibration,
    pub wavelet: Wavelet,
    pub scales: Vec<f64>,
    pub h_grid: Vec<f64>,
    besov: OnceLock<Vec<(String, BesovReport)>>,
}

impl Workspace {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let params = MeasureParams::new(config.nu)?;
        let grid = Arc::new(RadialGrid::new(&params, config.grid)?);
        let plan = plan(&params, &grid, &grid)?;
        let cal = calibrate_d_constant(&params)?;
        let wavelet = make_wavelet(&params, config.wavelet.parse()?, &plan)?;
        Ok(Self {
            config: config.clone(),
            params,
            grid,
            plan,
            cal,
            wavelet,
            scales: config.scales.points()?,
            h_grid: config.h.points()?,
            besov: OnceLock::new(),
        })
    }

    pub fn function(&self, kind: TestFunctionKind) -> Result<SampledFunction> {
        generate_test_function(kind, &self.plan)
    }

    fn gaussian(&self, width: f64) -> Result<SampledFunction> {
        self.function(TestFunctionKind::Gaussian { width })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn besov_params(&self, alpha: f64) -> Result<BesovParams> {
        BesovParams::new(alpha, 2.0, 2.0)?
            .with_h_grid(self.h_grid.clone())?
            .with_scale_grid(self.scales.clone())
    }
}

/// What a check measured. A row passes when `measured <= tolerance`.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub measured: f64,
    pub detail: String,
    pub extras: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(measured: f64, detail: impl Into<String>) -> Self {
        Self {
            measured,
            detail: detail.into(),
            extras: BTreeMap::new(),
        }
    }

    fn extra(mut self, k: impl Into<String>, v: f64) -> Self {
        self.extras.insert(k.into(), v);
        self
    }
}

pub struct CheckSpec {
    pub name: &'static str,
    /// Acceptance criterion the check belongs to.
    pub criterion: u8,
    /// The identity or inequality under test.
    pub reference: &'static str,
    pub tolerance: f64,
    pub run: fn(&Workspace) -> Result<Outcome>,
}

/// Ratio rows allow this much quadrature slack above 1.
pub const INEQUALITY_SLACK: f64 = 1e-4;
const BESOV_SLACK: f64 = crate::besov::BOUND_TOL;

pub const CHECKS: &[CheckSpec] = &[
    CheckSpec {
        name: "hankel.gaussian_fixed_point",
        criterion: 1,
        reference: "self-reciprocity: H[exp(-t²/2)] = exp(-x²/2), max relative error on [0, 5]",
        tolerance: 1e-7,
        run: check_gaussian_fixed_point,
    },
    CheckSpec {
        name: "hankel.round_trip",
        criterion: 1,
        reference: "inversion: H[H[f]] = f, relative L² error on the Gaussian family",
        tolerance: 1e-6,
        run: check_round_trip,
    },
    CheckSpec {
        name: "hankel.parseval",
        criterion: 2,
        reference: "Parseval: <H f, H g> = <f, g>, relative residual on 10 band-limited pairs",
        tolerance: 1e-6,
        run: check_parseval,
    },
    CheckSpec {
        name: "kernel.normalization",
        criterion: 3,
        reference: "∫ D(x, y, z) dσ(z) = 1 on 8 probe pairs",
        tolerance: 1e-6,
        run: check_normalization,
    },
    CheckSpec {
        name: "kernel.product_formula",
        criterion: 3,
        reference: "product formula: ∫ j(zu) D(x, y, z) dσ(z) = j(xu) j(yu) on 20 random triples",
        tolerance: 1e-6,
        run: check_product_formula,
    },
    CheckSpec {
        name: "convolution.contraction",
        criterion: 4,
        reference: "contraction: ‖τ_y f‖_p / ‖f‖_p ≤ 1 for p in {1, 2, 4}, y in {0.1, 1, 3}",
        tolerance: 1.0 + INEQUALITY_SLACK,
        run: check_contraction,
    },
    CheckSpec {
        name: "convolution.young",
        criterion: 4,
        reference: "Young: ‖f # g‖_r / (‖f‖_p ‖g‖_q) ≤ 1 for 1/p + 1/q = 1 + 1/r",
        tolerance: 1.0 + INEQUALITY_SLACK,
        run: check_young,
    },
    CheckSpec {
        name: "convolution.theorem",
        criterion: 5,
        reference: "convolution theorem: H[f # g] = H[f] H[g], L² gap between direct and spectral f # g",
        tolerance: 1e-5,
        run: check_convolution_theorem,
    },
    CheckSpec {
        name: "wavelet.admissibility",
        criterion: 6,
        reference: "admissibility constant of ω² exp(-ω²) at ν = 1 equals 1/4",
        tolerance: 1e-8,
        run: check_admissibility,
    },
    CheckSpec {
        name: "cwt.parseval",
        criterion: 7,
        reference: "wavelet Parseval identity, relative residual with 64 scales on [1/32, 32]",
        tolerance: 1e-2,
        run: check_cwt_parseval,
    },
    CheckSpec {
        name: "cwt.parseval_monotone",
        criterion: 7,
        reference: "wavelet Parseval residual shrinks as the scale window widens (largest successive ratio)",
        tolerance: 1.0,
        run: check_cwt_parseval_monotone,
    },
    CheckSpec {
        name: "cwt.inversion",
        criterion: 8,
        reference: "wavelet inversion formula, relative L² error on Gaussians",
        tolerance: 2e-2,
        run: check_cwt_inversion,
    },
    CheckSpec {
        name: "cwt.inversion_monotone",
        criterion: 8,
        reference: "wavelet inversion error shrinks as the scale window widens (largest successive ratio)",
        tolerance: 1.0,
        run: check_cwt_inversion_monotone,
    },
    CheckSpec {
        name: "cwt.plancherel",
        criterion: 9,
        reference: "S₂ Plancherel: ‖B_ψ f‖²_S₂ / ‖f‖²₂ equals the reproducing constant, relative gap",
        tolerance: 2e-2,
        run: check_plancherel,
    },
    CheckSpec {
        name: "besov.direct",
        criterion: 10,
        reference: "direct inequality: |f|_wav / (C |f|_mod) ≤ 1, α in {0.25, 0.5, 0.75}, p = q = 2",
        tolerance: 1.0 + BESOV_SLACK,
        run: check_besov_direct,
    },
    CheckSpec {
        name: "besov.converse",
        criterion: 10,
        reference: "converse inequality: |f|_mod / (K |f|_wav) ≤ 1, α in {0.25, 0.5, 0.75}, p = q = 2",
        tolerance: 1.0 + BESOV_SLACK,
        run: check_besov_converse,
    },
    CheckSpec {
        name: "besov.bracket",
        criterion: 10,
        reference: "two-sided equivalence: |f|_wav / |f|_mod lies in [1/K, C] (worst excursion, 1 = on the edge)",
        tolerance: 1.0,
        run: check_besov_bracket,
    },
    CheckSpec {
        name: "besov.derivative_reduction",
        criterion: 10,
        reference: "α = 1.5 through f': worst of the direct and converse ratios",
        tolerance: 1.0 + BESOV_SLACK,
        run: check_besov_derivative,
    },
    CheckSpec {
        name: "besov.smoothness_gaussian",
        criterion: 10,
        reference: "small-scale slope of ‖B_ψ f(·, a)‖₂ for a Gaussian, |slope - 2|",
        tolerance: 0.2,
        run: check_smoothness_gaussian,
    },
    CheckSpec {
        name: "besov.smoothness_noise",
        criterion: 10,
        reference: "small-scale slope of ‖B_ψ f(·, a)‖₂ for seeded noise, |slope|",
        tolerance: 0.3,
        run: check_smoothness_noise,
    },
];

fn relative_l2(a: &SampledFunction, b: &SampledFunction) -> Result<f64> {
    Ok(lp_norm(&a.sub(b)?, 2.0)? / lp_norm(b, 2.0)?)
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

const ROUND_TRIP_WIDTHS: [f64; 5] = [0.5, 0.7, 1.0, 1.5, 2.0];

fn check_gaussian_fixed_point(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let fh = ws.plan.forward(&f)?;
    let err = max_of(
        ws.grid
            .nodes()
            .iter()
            .zip(fh.values())
            .filter(|(x, _)| **x <= 5.0)
            .map(|(x, v)| {
                let e = (-x * x / 2.0).exp();
                (v - e).abs() / e
            }),
    );
    Ok(Outcome::new(err, "width 1, x in [0, 5]"))
}

fn check_round_trip(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "Gaussian widths 0.5, 0.7, 1, 1.5, 2 and t² exp(-t²/2)");
    let mut family: Vec<(String, SampledFunction)> = Vec::new();
    for w in ROUND_TRIP_WIDTHS {
        family.push((format!("width_{w}"), ws.gaussian(w)?));
    }
    family.push((
        "t2_gaussian".into(),
        SampledFunction::from_fn(&ws.grid, |t| t * t * (-t * t / 2.0).exp())?,
    ));
    for (name, f) in family {
        let back = ws.plan.inverse(&ws.plan.forward(&f)?)?;
        let e = relative_l2(&back, &f)?;
        out.measured = out.measured.max(e);
        out.extras.insert(name, e);
    }
    Ok(out)
}

fn check_parseval(ws: &Workspace) -> Result<Outcome> {
    let mut rng = ws.rng(2);
    let mut out = Outcome::new(0.0, "10 seeded pairs of bands (lo, lo + 4..6), lo in [0, 1)");
    for _ in 0..10 {
        let mut band = || -> Result<SampledFunction> {
            let lo = rng.random::<f64>();
            let hi = lo + 4.0 + 2.0 * rng.random::<f64>();
            ws.function(TestFunctionKind::HankelBand { lo, hi })
        };
        let f = band()?;
        let g = band()?;
        out.measured = out.measured.max(parseval_residual(&ws.plan, &f, &g)?.relative);
    }
    Ok(out)
}

fn check_normalization(ws: &Workspace) -> Result<Outcome> {
    Ok(Outcome::new(ws.cal.calibration_residual, "8 probe pairs").extra("constant", ws.cal.constant))
}

fn check_product_formula(ws: &Workspace) -> Result<Outcome> {
    let mut rng = ws.rng(3);
    let mu = ws.params.mu;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut draw = || 0.1 + 2.9 * rng.random::<f64>();
        let (x, y, u) = (draw(), draw(), draw());
        let lhs = ws.cal.integrate_d(x, y, |z| normalized_j(mu, z * u));
        worst = worst.max((lhs - normalized_j(mu, x * u) * normalized_j(mu, y * u)).abs());
    }
    Ok(Outcome::new(worst, "20 triples in (0.1, 3)³, absolute residual"))
}

fn check_contraction(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let mut out = Outcome::new(0.0, "Gaussian width 1");
    for y in [0.1, 1.0, 3.0] {
        let t = translate(&ws.cal, &f, y)?;
        for p in [1.0, 2.0, 4.0] {
            let r = lp_norm(&t, p)? / lp_norm(&f, p)?;
            out.measured = out.measured.max(r);
            out.extras.insert(format!("y{y}_p{p}"), r);
        }
    }
    Ok(out)
}

fn check_young(ws: &Workspace) -> Result<Outcome> {
    let a = ws.gaussian(1.0)?;
    let b = ws.gaussian(0.5)?;
    let c = spectral_convolve(&ws.plan, &a, &b)?;
    let mut out = Outcome::new(0.0, "Gaussians of width 1 and 0.5");
    for (p, q, r) in [(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
        let ratio = lp_norm(&c, r)? / (lp_norm(&a, p)? * lp_norm(&b, q)?);
        out.measured = out.measured.max(ratio);
        out.extras.insert(format!("p{p}_q{q}_r{r}"), ratio);
    }
    Ok(out)
}

fn check_convolution_theorem(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "Gaussian pairs (1, 0.7) and (0.8, 1.2)");
    for (wa, wb) in [(1.0, 0.7), (0.8, 1.2)] {
        let a = ws.gaussian(wa)?;
        let b = ws.gaussian(wb)?;
        let direct = convolve(&ws.cal, &a, &b)?;
        let spectral = spectral_convolve(&ws.plan, &a, &b)?;
        let d = lp_norm(&direct.sub(&spectral)?, 2.0)?;
        out.measured = out.measured.max(d);
        out.extras.insert(format!("{wa}_{wb}"), d);
    }
    Ok(out)
}

fn check_admissibility(_: &Workspace) -> Result<Outcome> {
    let p = MeasureParams::new(1.0)?;
    let a = admissibility_of(&p, &WaveletProfile::HankelMexican(1))?;
    Ok(Outcome::new((a - 0.25).abs(), "ν = 1, ψ̂ = ω² exp(-ω²)").extra("admissibility", a))
}

fn check_cwt_parseval(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let g = ws.gaussian(0.7)?;
    let r = cwt_parseval(&ws.plan, &f, &g, &ws.wavelet, &ws.scales)?;
    Ok(Outcome::new(r.relative_residual(), "Gaussians of width 1 and 0.7")
        .extra("lhs", r.lhs)
        .extra("rhs", r.rhs))
}

/// `[2^-k, 2^k]` with 64 scales, `k = 1..=5`.
fn widening_windows() -> Result<Vec<Vec<f64>>> {
    (1..=5)
        .map(|k| geometric_scales(0.5f64.powi(k), 2f64.powi(k), 64))
        .collect()
}

fn monotone(residuals: &[f64], what: &str) -> Outcome {
    let worst = max_of(residuals.windows(2).map(|w| w[1] / w[0]));
    let mut out = Outcome::new(worst, format!("{what} on [2^-k, 2^k], k = 1..5"));
    for (k, r) in residuals.iter().enumerate() {
        out.extras.insert(format!("k{}", k + 1), *r);
    }
    out
}

fn check_cwt_parseval_monotone(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let res: Vec<f64> = widening_windows()?
        .iter()
        .map(|s| cwt_parseval(&ws.plan, &f, &f, &ws.wavelet, s).map(|r| r.relative_residual()))
        .collect::<Result<_>>()?;
    Ok(monotone(&res, "Parseval residual"))
}

fn inversion_error(ws: &Workspace, f: &SampledFunction, scales: &[f64]) -> Result<f64> {
    let s = cwt(&ws.plan, f, &ws.wavelet, scales)?;
    relative_l2(&cwt_invert(&ws.plan, &s, &ws.wavelet)?, f)
}

fn check_cwt_inversion(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "Gaussian widths 0.7, 1, 1.4");
    for w in [0.7, 1.0, 1.4] {
        let e = inversion_error(ws, &ws.gaussian(w)?, &ws.scales)?;
        out.measured = out.measured.max(e);
        out.extras.insert(format!("width_{w}"), e);
    }
    Ok(out)
}

fn check_cwt_inversion_monotone(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let res: Vec<f64> = widening_windows()?
        .iter()
        .map(|s| inversion_error(ws, &f, s))
        .collect::<Result<_>>()?;
    Ok(monotone(&res, "inversion error"))
}

fn check_plancherel(ws: &Workspace) -> Result<Outcome> {
    let f = ws.gaussian(1.0)?;
    let s = cwt(&ws.plan, &f, &ws.wavelet, &ws.scales)?;
    let ratio = sp_norm(&s, &ws.wavelet, 2.0)?.powi(2) / lp_norm(&f, 2.0)?.powi(2);
    let c = ws.wavelet.reproducing();
    Ok(Outcome::new((ratio / c - 1.0).abs(), "Gaussian width 1")
        .extra("ratio", ratio)
        .extra("reproducing_constant", c)
        .extra("admissibility_constant", ws.wavelet.admissibility()))
}

const BESOV_ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

fn besov_family() -> [(&'static str, TestFunctionKind); 5] {
    [
        ("gaussian_0.6", TestFunctionKind::Gaussian { width: 0.6 }),
        ("gaussian_1", TestFunctionKind::Gaussian { width: 1.0 }),
        ("gaussian_1.5", TestFunctionKind::Gaussian { width: 1.5 }),
        ("band_1_6", TestFunctionKind::HankelBand { lo: 1.0, hi: 6.0 }),
        ("decay_2", TestFunctionKind::SpectralDecay { rate: 2.0 }),
    ]
}

/// Reports for every `(α, function)` pair, computed once per workspace.
fn besov_sweep(ws: &Workspace) -> Result<&[(String, BesovReport)]> {
    if let Some(r) = ws.besov.get() {
        return Ok(r);
    }
    let mut out = Vec::new();
    for (name, kind) in besov_family() {
        let input = BesovInput::new(ws.function(kind)?);
        for alpha in BESOV_ALPHAS {
            let params = ws.besov_params(alpha)?;
            let r = besov_report(&ws.plan, &ws.cal, &input, &ws.wavelet, &params, DirectMoment::Positive)?;
            out.push((format!("a{alpha}_{name}"), r));
        }
    }
    Ok(ws.besov.get_or_init(|| out))
}

fn ratio_or_zero(r: Option<f64>) -> f64 {
    r.unwrap_or(0.0)
}

fn check_besov_direct(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "positive moment ∫ z^α |ψ| dσ; negative-moment ratios in extras");
    for (key, r) in besov_sweep(ws)? {
        let d = ratio_or_zero(r.direct.ratio);
        out.measured = out.measured.max(d);
        out.extras.insert(key.clone(), d);
        let negative = r.seminorm_wavelet / (r.direct_constants.negative_moment * r.seminorm_modulus);
        out.extras.insert(format!("{key}_negative_moment"), negative);
    }
    Ok(out)
}

fn check_besov_converse(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "5 functions × 3 exponents");
    for (key, r) in besov_sweep(ws)? {
        let c = ratio_or_zero(r.converse.ratio);
        out.measured = out.measured.max(c);
        out.extras.insert(key.clone(), c);
    }
    Ok(out)
}

fn bracket_excursion(r: &BesovReport) -> f64 {
    match r.ratio {
        Some(x) => (x / r.bracket.1).max(r.bracket.0 / x),
        None => 0.0,
    }
}

fn check_besov_bracket(ws: &Workspace) -> Result<Outcome> {
    let mut out = Outcome::new(0.0, "max(ratio / upper, lower / ratio)");
    for (key, r) in besov_sweep(ws)? {
        let e = bracket_excursion(r);
        out.measured = out.measured.max(e);
        out.extras.insert(key.clone(), e);
    }
    Ok(out)
}

fn check_besov_derivative(ws: &Workspace) -> Result<Outcome> {
    let wavelet = make_wavelet(&ws.params, WaveletProfile::HankelMexican(2), &ws.plan)?;
    let input = BesovInput::with_derivative(&ws.plan, ws.gaussian(1.0)?)?;
    let params = ws.besov_params(1.5)?;
    let r = besov_report(&ws.plan, &ws.cal, &input, &wavelet, &params, DirectMoment::Positive)?;
    let d = ratio_or_zero(r.direct.ratio);
    let c = ratio_or_zero(r.converse.ratio);
    Ok(Outcome::new(d.max(c), "Gaussian width 1, wavelet hankel_mexican:2")
        .extra("direct", d)
        .extra("converse", c)
        .extra("bracket_excursion", bracket_excursion(&r)))
}

fn slope(ws: &Workspace, f: &SampledFunction, scales: &[f64]) -> Result<f64> {
    let s = cwt(&ws.plan, f, &ws.wavelet, scales)?;
    smoothness_exponent(&s, 2.0)?.ok_or_else(|| Error::State("slope of a vanishing scalogram".into()))
}

fn check_smoothness_gaussian(ws: &Workspace) -> Result<Outcome> {
    let s = slope(ws, &ws.gaussian(1.0)?, &ws.scales)?;
    Ok(Outcome::new((s - 2.0).abs(), "Gaussian width 1").extra("slope", s))
}

/// Scales for the noise slope: eight below 1, starting where the spectrum is
/// still sampled by the lattice.
pub fn noise_slope_scales() -> Result<Vec<f64>> {
    geometric_scales(0.3, 3.0, 16)
}

fn check_smoothness_noise(ws: &Workspace) -> Result<Outcome> {
    let f = ws.function(TestFunctionKind::Noise { seed: ws.config.seed })?;
    let s = slope(ws, &f, &noise_slope_scales()?)?;
    Ok(Outcome::new(s.abs(), format!("noise seed {}", ws.config.seed)).extra("slope", s))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub criterion: u8,
    pub reference: String,
    /// `None` when the check could not run.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
    pub extras: BTreeMap<String, f64>,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub config: RunConfig,
    pub checks: Vec<CheckRow>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.checks.iter().find(|r| r.name == name)
    }

    /// 0 when every check passed, 1 on a failed check, 3 when a check
    /// could not run.
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors > 0 {
            3
        } else if self.summary.all_passed {
            0
        } else {
            1
        }
    }

    pub fn write_table<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let width = self.checks.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.checks {
            let status = match (&r.error, r.passed) {
                (Some(_), _) => "ERROR",
                (None, true) => "PASS",
                (None, false) => "FAIL",
            };
            let measured = r.measured.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
            writeln!(
                out,
                "{status:<5}  {:<width$}  {measured:>10} <= {:<10.3e}  {:>7.2}s  {}",
                r.name,
                r.tolerance,
                r.elapsed.as_secs_f64(),
                r.error.as_deref().unwrap_or(&r.reference),
            )?;
        }
        let s = &self.summary;
        writeln!(
            out,
            "{} checks: {} passed, {} failed, {} errors",
            s.total, s.passed, s.failed, s.errors
        )?;
        Ok(())
    }
}

/// Names of the checks selected by `only` (substring match); all when `None`.
pub fn select_checks(only: Option<&str>) -> Vec<&'static CheckSpec> {
    CHECKS
        .iter()
        .filter(|c| only.is_none_or(|o| c.name.contains(o)))
        .collect()
}

/// Run the selected checks and assemble the report ordered by name.
pub fn run_verify(config: &RunConfig, only: Option<&str>) -> Result<VerifyReport> {
    let selected = select_checks(only);
    if selected.is_empty() {
        return Err(config_err(format!(
            "--only {} matches no check",
            only.unwrap_or_default()
        )));
    }
    let ws = Workspace::new(config)?;
    let mut checks: Vec<CheckRow> = selected
        .into_iter()
        .map(|spec| {
            let tolerance = config.tolerance(spec);
            let start = Instant::now();
            let result = (spec.run)(&ws);
            let elapsed = start.elapsed();
            let (measured, detail, extras, error) = match result {
                Ok(o) => (Some(o.measured), o.detail, o.extras, None),
                Err(e) => (None, String::new(), BTreeMap::new(), Some(e.to_string())),
            };
            let passed = measured.is_some_and(|m| m <= tolerance);
            CheckRow {
                name: spec.name.into(),
                criterion: spec.criterion,
                reference: spec.reference.into(),
                measured,
                tolerance,
                passed,
                detail,
                extras,
                error,
                elapsed,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().filter(|r| r.passed).count();
    let errors = checks.iter().filter(|r| r.error.is_some()).count();
    let total = checks.len();
    Ok(VerifyReport {
        schema: REPORT_SCHEMA,
        config: config.clone(),
        checks,
        summary: Summary {
            total,
            passed,
            failed: total - passed,
            errors,
            all_passed: passed == total,
        },
    })
}
