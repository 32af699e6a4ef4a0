//! Planned Hankel transforms on composite grids.
//!
//! `f̂(x) = ∫ j(xt) f(t) dσ(t)` is applied as a dense quadrature matrix. The
//! transform is its own inverse, so a plan whose input and output grids
//! coincide runs the same code path in both directions.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::bessel::normalized_j;
use crate::error::{Error, Result};
use crate::grid::{inner_product, RadialGrid, SampledFunction};
use crate::measure::MeasureParams;
use puruspe::gamma as puruspe_gamma;

/// Upper bound on oscillation periods of `j(x t)` across a plan.
pub const OSCILLATION_BUDGET: f64 = 1000.0;

/// Largest phase `x · width` a Gauss–Legendre panel may sweep, per node.
pub const PHASE_PER_NODE: f64 = 0.4;

/// Precomputed kernel `j(xᵢ tₖ)` between an input and an output grid.
#[derive(Debug, Clone)]
pub struct HankelPlan {
    params: MeasureParams,
    input: Arc<RadialGrid>,
    output: Arc<RadialGrid>,
    /// Row-major `|output| × |input|`.
    kernel: Vec<f64>,
    symmetric: bool,
}

/// Build a reusable transform from `input` to `output`.
pub fn plan(params: &MeasureParams, input: &Arc<RadialGrid>, output: &Arc<RadialGrid>) -> Result<HankelPlan> {
    HankelPlan::new(params, input, output)
}

fn check_resolution(grid: &RadialGrid, partner_max: f64, label: &str) -> Result<()> {
    let npp = grid.spec().nodes_per_panel as f64;
    let limit = PHASE_PER_NODE * npp;
    let phase = grid.max_panel_phase(partner_max);
    if phase > limit {
        let span = grid.r_max() - grid.r_min();
        let panels = (span * partner_max / limit).ceil();
        return Err(Error::Resolution(format!(
            "{label} grid panels sweep {phase:.2} rad of j(x t) (limit {limit:.2}); \
             about {} uniformly spaced nodes are required",
            (panels * npp) as usize
        )));
    }
    Ok(())
}

impl HankelPlan {
    pub fn new(params: &MeasureParams, input: &Arc<RadialGrid>, output: &Arc<RadialGrid>) -> Result<Self> {
        if input.params() != params || output.params() != params {
            return Err(Error::Shape("grids were built for a different order".into()));
        }
        let periods = input.r_max() * output.r_max() / (2.0 * PI);
        if periods > OSCILLATION_BUDGET {
            let npp = input.spec().nodes_per_panel as f64;
            let needed = (periods * 2.0 * PI / (PHASE_PER_NODE * npp)).ceil() * npp;
            return Err(Error::Resolution(format!(
                "{periods:.0} oscillation periods exceed the budget of {OSCILLATION_BUDGET}; \
                 resolving them needs about {} nodes",
                needed as usize
            )));
        }
        check_resolution(input, output.r_max(), "input")?;
        check_resolution(output, input.r_max(), "output")?;

        let symmetric = input.same_as(output);
        let (n_out, n_in) = (output.len(), input.len());
        let mut kernel = vec![0.0; n_out * n_in];
        let mu = params.mu;
        for (i, &x) in output.nodes().iter().enumerate() {
            let row = &mut kernel[i * n_in..(i + 1) * n_in];
            let start = if symmetric { i } else { 0 };
            for (k, &t) in input.nodes().iter().enumerate().skip(start) {
                row[k] = normalized_j(mu, x * t);
            }
        }
        if symmetric {
            for i in 0..n_out {
                for k in 0..i {
                    kernel[i * n_in + k] = kernel[k * n_in + i];
                }
            }
        }
        Ok(Self {
            params: *params,
            input: Arc::clone(input),
            output: Arc::clone(output),
            kernel,
            symmetric,
        })
    }

    pub fn params(&self) -> &MeasureParams {
        &self.params
    }

    pub fn input_grid(&self) -> &Arc<RadialGrid> {
        &self.input
    }

    pub fn output_grid(&self) -> &Arc<RadialGrid> {
        &self.output
    }

    /// `j(xᵢ tₖ)` for output node `i` and input node `k`.
    pub fn kernel(&self, i: usize, k: usize) -> f64 {
        self.kernel[i * self.input.len() + k]
    }

    pub fn is_self_inverse(&self) -> bool {
        self.symmetric
    }

    /// `f̂` on the output grid from samples on the input grid.
    pub fn forward_values(&self, f: &[f64]) -> Vec<f64> {
        let n_in = self.input.len();
        let wf: Vec<f64> = self.input.weights().iter().zip(f).map(|(w, v)| w * v).collect();
        self.kernel
            .chunks_exact(n_in)
            .map(|row| row.iter().zip(&wf).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `f` on the input grid from samples of `f̂` on the output grid.
    pub fn inverse_values(&self, fhat: &[f64]) -> Vec<f64> {
        if self.symmetric {
            return self.forward_values(fhat);
        }
        let n_in = self.input.len();
        let mut out = vec![0.0; n_in];
        for ((row, w), v) in self.kernel.chunks_exact(n_in).zip(self.output.weights()).zip(fhat) {
            let c = w * v;
            if c != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += a * c;
                }
            }
        }
        out
    }

    pub fn forward(&self, f: &SampledFunction) -> Result<SampledFunction> {
        f.on_grid(&self.input)?;
        SampledFunction::new(Arc::clone(&self.output), self.forward_values(f.values()))
    }

    pub fn inverse(&self, fhat: &SampledFunction) -> Result<SampledFunction> {
        fhat.on_grid(&self.output)?;
        SampledFunction::new(Arc::clone(&self.input), self.inverse_values(fhat.values()))
    }

    /// Inverse transform of an analytic spectral profile sampled on the output grid.
    pub fn synthesize(&self, profile: impl Fn(f64) -> f64) -> Result<SampledFunction> {
        let fhat: Vec<f64> = self.output.nodes().iter().map(|&w| profile(w)).collect();
        SampledFunction::new(Arc::clone(&self.input), self.inverse_values(&fhat))
    }
}

/// Outcome of a Parseval check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParsevalResidual {
    /// `⟨f̂, ĝ⟩`
    pub spectral: f64,
    /// `⟨f, g⟩`
    pub spatial: f64,
    /// `|spectral - spatial|`
    pub raw: f64,
    /// `raw / max(|spatial|, 1e-300)`
    pub relative: f64,
}

pub const PARSEVAL_FLOOR: f64 = 1e-300;

/// `|⟨f̂, ĝ⟩ - ⟨f, g⟩| / max(|⟨f, g⟩|, ε)`.
pub fn parseval_residual(plan: &HankelPlan, f: &SampledFunction, g: &SampledFunction) -> Result<ParsevalResidual> {
    let fh = plan.forward(f)?;
    let gh = plan.forward(g)?;
    let spectral = inner_product(&fh, &gh)?;
    let spatial = inner_product(f, g)?;
    let raw = (spectral - spatial).abs();
    Ok(ParsevalResidual {
        spectral,
        spatial,
        raw,
        relative: raw / spatial.abs().max(PARSEVAL_FLOOR),
    })
}

/// Samples of `F, F', …, F^(order)` on `out`, where `F = H[profile]` and the
/// profile is given on the spectral grid `spectral`.
///
/// Uses `d/dt H_{mu+m}[φ](t) = -t H_{mu+m+1}[φ](t)`, where `H_{mu+m}` is the
/// transform of order `mu+m` with its own measure, so every derivative is a
/// polynomial combination of shifted-order transforms of the same profile.
pub fn spectral_derivatives(
    profile: &SampledFunction,
    out: &Arc<RadialGrid>,
    order: usize,
) -> Result<Vec<SampledFunction>> {
    let spectral = profile.grid();
    let params = *spectral.params();
    if out.params() != &params {
        return Err(Error::Shape("output grid was built for a different order".into()));
    }
    check_resolution(spectral, out.r_max(), "spectral")?;

    // shifted transforms g_m, m = 0..=order
    let mu = params.mu;
    let c0 = params.kernel_const;
    let shifted: Vec<Vec<f64>> = (0..=order)
        .map(|m| {
            let mm = mu + m as f64;
            // dσ_{mu+m}(ω) = ω^{2m} c0 / (2^{mu+m} Γ(mu+m+1)) dσ_mu(ω)
            let ratio = c0 / (2f64.powf(mm) * puruspe_gamma(mm + 1.0));
            let wv: Vec<f64> = spectral
                .nodes()
                .iter()
                .zip(spectral.weights())
                .zip(profile.values())
                .map(|((&w, &q), &v)| q * ratio * w.powi(2 * m as i32) * v)
                .collect();
            out.nodes()
                .iter()
                .map(|&t| {
                    spectral
                        .nodes()
                        .iter()
                        .zip(&wv)
                        .map(|(&w, &c)| normalized_j(mm, t * w) * c)
                        .sum()
                })
                .collect()
        })
        .collect();

    // F^(k) = Σ_m P_{k,m}(t) g_m(t); P stored as coefficient vectors in t
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut result = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let values = out
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                polys
                    .iter()
                    .enumerate()
                    .map(|(m, p)| eval_poly(p, t) * shifted[m][i])
                    .sum()
            })
            .collect();
        result.push(SampledFunction::new(Arc::clone(out), values)?);
        if k < order {
            polys = differentiate(&polys);
        }
    }
    Ok(result)
}

fn eval_poly(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// `(Σ_m P_m g_m)' = Σ_m (P_m' g_m - t P_m g_{m+1})`.
fn differentiate(polys: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut next: Vec<Vec<f64>> = vec![Vec::new(); polys.len() + 1];
    let add = |dst: &mut Vec<f64>, deg: usize, c: f64| {
        if dst.len() <= deg {
            dst.resize(deg + 1, 0.0);
        }
        dst[deg] += c;
    };
    for (m, p) in polys.iter().enumerate() {
        for (d, &c) in p.iter().enumerate() {
            if d > 0 {
                add(&mut next[m], d - 1, c * d as f64);
            }
            add(&mut next[m + 1], d + 1, -c);
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, GridSpec};

    fn setup(nu: f64) -> (MeasureParams, Arc<RadialGrid>, HankelPlan) {
        let p = MeasureParams::new(nu).unwrap();
        let g = Arc::new(RadialGrid::new(&p, GridSpec::default()).unwrap());
        let plan = plan(&p, &g, &g).unwrap();
        (p, g, plan)
    }

    #[test]
    fn gaussian_is_a_fixed_point() {
        for nu in [0.4, 1.0, 2.0] {
            let (_, g, plan) = setup(nu);
            let f = SampledFunction::from_fn(&g, |t| (-t * t / 2.0).exp()).unwrap();
            let fh = plan.forward(&f).unwrap();
            let worst = g
                .nodes()
                .iter()
                .zip(fh.values())
                .filter(|(x, _)| **x <= 5.0)
                .map(|(x, v)| (v / (-x * x / 2.0).exp() - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-7, "nu={nu}: {worst:e}");
        }
    }

    #[test]
    fn zero_maps_to_zero_and_is_deterministic() {
        let (_, g, plan) = setup(1.0);
        let z = SampledFunction::zeros(&g);
        assert!(plan.forward(&z).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(plan.inverse(&z).unwrap().values().iter().all(|&v| v == 0.0));
        let f = SampledFunction::from_fn(&g, |t| (1.0 + t).recip() * (-t).exp()).unwrap();
        let a = plan.forward(&f).unwrap();
        let b = plan.forward(&f).unwrap();
        assert!(a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn transform_at_zero_is_mass() {
        let (p, g, plan) = setup(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t * t).exp() * (1.0 + t)).unwrap();
        // first output node is ~1e-5; j(x t) = 1 + O((x t)²)
        let fh = plan.forward(&f).unwrap();
        assert!((fh.values()[0] - f.integral()).abs() < 1e-9);
        assert_eq!(kernel_zero(&p), 1.0);
    }

    fn kernel_zero(p: &MeasureParams) -> f64 {
        normalized_j(p.mu, 0.0)
    }

    #[test]
    fn constant_reproduces_truncated_integral() {
        let (p, g, plan) = setup(1.0);
        let one = SampledFunction::from_fn(&g, |_| 1.0).unwrap();
        let fh = plan.forward(&one).unwrap();
        let r = g.r_max();
        for i in [100, 400, 700] {
            let x = g.nodes()[i];
            let exact = p.mass(r) * normalized_j(p.mu + 1.0, x * r);
            assert!((fh.values()[i] - exact).abs() < 1e-8 * p.mass(r), "x={x}");
        }
    }

    #[test]
    fn linear_and_self_inverse() {
        let (_, g, plan) = setup(1.3);
        assert!(plan.is_self_inverse());
        let f = SampledFunction::from_fn(&g, |t| (-t * t / 2.0).exp()).unwrap();
        let h = SampledFunction::from_fn(&g, |t| t * t * (-t * t / 3.0).exp()).unwrap();
        let combo = f.axpby(2.0, &h, -0.5).unwrap();
        let lhs = plan.forward(&combo).unwrap();
        let rhs = plan
            .forward(&f)
            .unwrap()
            .axpby(2.0, &plan.forward(&h).unwrap(), -0.5)
            .unwrap();
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        for fun in [&f, &h] {
            let back = plan.inverse(&plan.forward(fun).unwrap()).unwrap();
            let err = lp_norm(&back.sub(fun).unwrap(), 2.0).unwrap() / lp_norm(fun, 2.0).unwrap();
            assert!(err <= 1e-6, "{err:e}");
        }
    }

    #[test]
    fn exponential_profile_round_trip() {
        let (_, g, plan) = setup(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t).exp()).unwrap();
        let back = plan.inverse(&plan.forward(&f).unwrap()).unwrap();
        // algebraic spectral tail, cut at r_max
        let err = lp_norm(&back.sub(&f).unwrap(), 2.0).unwrap() / lp_norm(&f, 2.0).unwrap();
        assert!(err <= 5e-3, "{err:e}");
    }

    #[test]
    fn parseval_gaussian_and_zero() {
        let (_, g, plan) = setup(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t * t / 2.0).exp()).unwrap();
        assert!(parseval_residual(&plan, &f, &f).unwrap().relative <= 1e-7);
        let z = SampledFunction::zeros(&g);
        let r = parseval_residual(&plan, &z, &f).unwrap();
        assert_eq!(r.relative, 0.0);
    }

    #[test]
    fn coarse_plans_are_rejected_with_node_count() {
        let p = MeasureParams::new(1.0).unwrap();
        let g = Arc::new(RadialGrid::new(&p, GridSpec::log(1e-4, 40.0, 96, 8)).unwrap());
        match plan(&p, &g, &g) {
            Err(Error::Resolution(msg)) => assert!(msg.contains("nodes"), "{msg}"),
            other => panic!("expected a resolution error, got {other:?}"),
        }
        let wide = Arc::new(RadialGrid::new(&p, GridSpec::linear(0.1, 200.0, 4000, 8)).unwrap());
        assert!(matches!(plan(&p, &wide, &wide), Err(Error::Resolution(_))));
    }

    #[test]
    fn derivative_polynomials() {
        // F' = -t g1 ; F'' = -g1 + t² g2
        let d1 = differentiate(&[vec![1.0]]);
        assert_eq!(d1, vec![vec![], vec![0.0, -1.0]]);
        let d2 = differentiate(&d1);
        assert_eq!(d2, vec![vec![], vec![-1.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn spectral_derivatives_of_gaussian() {
        let (_, g, _) = setup(1.0);
        // H[exp(-ω²/2)] = exp(-t²/2)
        let prof = SampledFunction::from_fn(&g, |w| (-w * w / 2.0).exp()).unwrap();
        let ds = spectral_derivatives(&prof, &g, 2).unwrap();
        for (i, &t) in g.nodes().iter().enumerate().step_by(37) {
            let e = (-t * t / 2.0).exp();
            assert!((ds[0].values()[i] - e).abs() < 1e-10);
            assert!((ds[1].values()[i] + t * e).abs() < 1e-10);
            assert!((ds[2].values()[i] - (t * t - 1.0) * e).abs() < 1e-10);
        }
    }
}
