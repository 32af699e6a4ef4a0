//! Hankel translation `τ_y` and Hankel convolution `#`.

use std::sync::Arc;

use crate::error::{param, Error, Result};
use crate::grid::{RadialGrid, SampledFunction};
use crate::hankel::HankelPlan;
use crate::kernels::DKernelCalibration;

fn check_params(cal: &DKernelCalibration, grid: &RadialGrid) -> Result<()> {
    if &cal.params != grid.params() {
        return Err(Error::Shape("kernel calibration and grid use different orders".into()));
    }
    Ok(())
}

fn check_shift(grid: &RadialGrid, y: f64) -> Result<()> {
    if !(y > 0.0 && y < grid.r_max()) {
        return param(format!("translation {y} must lie in (0, {})", grid.r_max()));
    }
    Ok(())
}

/// `τ_y` as a sparse matrix on a grid: row `i` holds the weights that map
/// node values of `f` to `(τ_y f)(xᵢ)`.
#[derive(Debug, Clone)]
pub struct TranslationOperator {
    y: f64,
    grid: Arc<RadialGrid>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TranslationOperator {
    pub fn new(cal: &DKernelCalibration, grid: &Arc<RadialGrid>, y: f64) -> Result<Self> {
        check_params(cal, grid)?;
        check_shift(grid, y)?;
        let mut coeffs = Vec::new();
        let rows = grid
            .nodes()
            .iter()
            .map(|&x| {
                let mut row: Vec<(usize, f64)> = Vec::new();
                for (z, c) in cal.support_quadrature(x, y) {
                    if let Some(start) = grid.stencil(z, &mut coeffs) {
                        row.extend(coeffs.iter().enumerate().map(|(k, &l)| (start + k, c * l)));
                    }
                }
                row.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
                for (k, v) in row {
                    match merged.last_mut() {
                        Some(last) if last.0 == k => last.1 += v,
                        _ => merged.push((k, v)),
                    }
                }
                merged
            })
            .collect();
        Ok(Self {
            y,
            grid: Arc::clone(grid),
            rows,
        })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `τ_y 1` at every node; equals 1 wherever `x + y <= r_max`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|e| e.1).sum()).collect()
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        f.on_grid(&self.grid)?;
        let v = f.values();
        let out = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(k, c)| c * v[k]).sum())
            .collect();
        SampledFunction::new(Arc::clone(&self.grid), out)
    }
}

/// `(τ_y f)(xᵢ)` at every node of `f`'s grid.
pub fn translate(cal: &DKernelCalibration, f: &SampledFunction, y: f64) -> Result<SampledFunction> {
    TranslationOperator::new(cal, f.grid(), y)?.apply(f)
}

/// Evaluate `rows` in parallel and collect them in order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(n.max(1));
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| s.spawn(move || (t * chunk..((t + 1) * chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// `(f # g)(x) = ∫ τ_y f(x) g(y) dσ(y)` by nested quadrature.
pub fn convolve(cal: &DKernelCalibration, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    let grid = f.grid();
    g.on_grid(grid)?;
    check_params(cal, grid)?;
    let wg: Vec<(f64, f64)> = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(g.values())
        .filter(|(_, &v)| v != 0.0)
        .map(|((&y, &w), &v)| (y, w * v))
        .collect();
    let r_max = grid.r_max();
    let values = par_map(grid.len(), |i| {
        let x = grid.nodes()[i];
        let mut buf = Vec::new();
        wg.iter()
            .filter(|&&(y, _)| (x - y).abs() < r_max)
            .map(|&(y, c)| {
                let t: f64 = cal
                    .support_quadrature(x, y)
                    .map(|(z, k)| k * f.eval_with(z, &mut buf))
                    .sum();
                c * t
            })
            .sum()
    });
    SampledFunction::new(Arc::clone(grid), values)
}

/// `f # g = H⁻¹[f̂ ĝ]`.
pub fn spectral_convolve(plan: &HankelPlan, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    let fh = plan.forward(f)?;
    let gh = plan.forward(g)?;
    plan.inverse(&fh.mul(&gh)?)
}

/// Which evaluation path `convolve`-style callers use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionPath {
    Direct,
    Spectral,
}
