//! Quadrature grids on `(0, r_max]` and functions sampled on them.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::measure::MeasureParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
    /// Geometric panels on `[r_min, r_break]`, then `n_panels` uniform panels
    /// on `[r_break, r_max]`; the geometric ratio is chosen so the last
    /// geometric panel is as wide as a uniform one.
    LogLinear,
}

/// Layout of a composite grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_panels: usize,
    pub nodes_per_panel: usize,
    pub spacing: Spacing,
    /// Switch-over radius for [`Spacing::LogLinear`].
    #[serde(default = "default_break")]
    pub r_break: f64,
}

fn default_break() -> f64 {
    GridSpec::DEFAULT_R_BREAK
}

impl GridSpec {
    pub const DEFAULT_R_MIN: f64 = 1e-4;
    pub const DEFAULT_R_MAX: f64 = 16.0;
    pub const DEFAULT_R_BREAK: f64 = 1.0;
    pub const DEFAULT_PANELS: usize = 80;
    pub const DEFAULT_NODES_PER_PANEL: usize = 8;

    pub fn log(r_min: f64, r_max: f64, n_panels: usize, nodes_per_panel: usize) -> Self {
        let r_break = Self::DEFAULT_R_BREAK;
        Self {
            r_min,
            r_max,
            n_panels,
            nodes_per_panel,
            spacing: Spacing::Log,
            r_break,
        }
    }

    pub fn linear(r_min: f64, r_max: f64, n_panels: usize, nodes_per_panel: usize) -> Self {
        let r_break = Self::DEFAULT_R_BREAK;
        Self {
            r_min,
            r_max,
            n_panels,
            nodes_per_panel,
            spacing: Spacing::Linear,
            r_break,
        }
    }

    pub fn log_linear(r_min: f64, r_break: f64, r_max: f64, n_panels: usize, nodes_per_panel: usize) -> Self {
        Self {
            r_min,
            r_max,
            n_panels,
            nodes_per_panel,
            spacing: Spacing::LogLinear,
            r_break,
        }
    }

    pub fn with_panels(self, n_panels: usize) -> Self {
        Self { n_panels, ..self }
    }

    pub fn with_r_max(self, r_max: f64) -> Self {
        Self { r_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return param("grid radii must be finite");
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return param(format!(
                "need 0 < r_min < r_max, got r_min={} r_max={}",
                self.r_min, self.r_max
            ));
        }
        if self.n_panels < 1 {
            return param("n_panels must be >= 1");
        }
        if self.nodes_per_panel < 2 {
            return param("nodes_per_panel must be >= 2");
        }
        if self.spacing == Spacing::LogLinear && !(self.r_break > self.r_min && self.r_break < self.r_max) {
            return param(format!("need r_min < r_break < r_max, got r_break={}", self.r_break));
        }
        Ok(())
    }

    /// Panel boundaries on `[r_min, r_max]`.
    fn outer_edges(&self) -> Vec<f64> {
        let n = self.n_panels;
        let lin = |a: f64, b: f64, k: usize| a + (b - a) * (k as f64 / n as f64);
        let mut edges: Vec<f64> = match self.spacing {
            Spacing::Log => (0..=n)
                .map(|k| self.r_min * (self.r_max / self.r_min).powf(k as f64 / n as f64))
                .collect(),
            Spacing::Linear => (0..=n).map(|k| lin(self.r_min, self.r_max, k)).collect(),
            Spacing::LogLinear => {
                let width = (self.r_max - self.r_break) / n as f64;
                let ratio = 1.0 + width / self.r_break;
                let n_log = ((self.r_break / self.r_min).ln() / ratio.ln()).ceil().max(1.0) as usize;
                let mut e: Vec<f64> = (0..n_log)
                    .map(|k| self.r_min * (self.r_break / self.r_min).powf(k as f64 / n_log as f64))
                    .collect();
                e.extend((0..=n).map(|k| lin(self.r_break, self.r_max, k)));
                e
            }
        };
        edges[0] = self.r_min;
        *edges.last_mut().unwrap() = self.r_max;
        edges
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::log_linear(
            Self::DEFAULT_R_MIN,
            Self::DEFAULT_R_BREAK,
            Self::DEFAULT_R_MAX,
            Self::DEFAULT_PANELS,
            Self::DEFAULT_NODES_PER_PANEL,
        )
    }
}

/// Composite Gauss grid whose weights integrate against `dσ`.
///
/// Panel 0 covers `[0, r_min]` with a Gauss–Jacobi rule for the weight
/// `t^(2mu+1)`; the remaining panels tile `[r_min, r_max]` (see [`Spacing`])
/// with Gauss–Legendre nodes and weights multiplied by the density.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    params: MeasureParams,
    spec: GridSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    edges: Vec<f64>,
    bary: Vec<Vec<f64>>,
}

/// Build a composite grid; see [`RadialGrid`].
pub fn build_grid(params: &MeasureParams, spec: GridSpec) -> Result<RadialGrid> {
    RadialGrid::new(params, spec)
}

impl RadialGrid {
    pub fn new(params: &MeasureParams, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let npp = spec.nodes_per_panel;
        let deg = NonZeroUsize::new(npp).expect("validated");

        let mut edges = vec![0.0];
        edges.extend(spec.outer_edges());

        let mut nodes = Vec::with_capacity(npp * edges.len());
        let mut weights = Vec::with_capacity(nodes.capacity());

        // origin panel: ∫_0^r g(t) t^e dt with t = r(1+s)/2
        let e = params.weight_exponent();
        let beta = FiniteAboveNegOneF64::new(e)
            .ok_or_else(|| Error::Parameter(format!("weight exponent {e} must exceed -1")))?;
        let alpha = FiniteAboveNegOneF64::new(0.0).unwrap();
        let jacobi = GaussJacobi::new(deg, alpha, beta);
        let mut pairs: Vec<(f64, f64)> = jacobi.iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let r0 = spec.r_min;
        let scale = params.measure_const * (r0 / 2.0).powf(e + 1.0);
        for (s, w) in pairs {
            nodes.push(0.5 * r0 * (1.0 + s));
            weights.push(w * scale);
        }

        let legendre = GaussLegendre::new(deg);
        let mut ref_pairs: Vec<(f64, f64)> = legendre.iter().map(|(x, w)| (*x, *w)).collect();
        ref_pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 1..edges.len() - 1 {
            let (a, b) = (edges[k], edges[k + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(s, w) in &ref_pairs {
                let t = mid + half * s;
                nodes.push(t);
                weights.push(w * half * params.density(t));
            }
        }

        let bary = (0..edges.len() - 1)
            .map(|k| barycentric_weights(&nodes[k * npp..(k + 1) * npp]))
            .collect();

        let grid = Self {
            params: *params,
            spec,
            nodes,
            weights,
            edges,
            bary,
        };
        if grid.nodes.windows(2).any(|w| w[1] <= w[0]) || grid.nodes[0] <= 0.0 {
            return param("grid nodes are not strictly increasing; panels too narrow");
        }
        Ok(grid)
    }

    pub fn params(&self) -> &MeasureParams {
        &self.params
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.spec.r_max
    }

    pub fn r_min(&self) -> f64 {
        self.spec.r_min
    }

    /// Panel boundaries, starting with `0` and ending with `r_max`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Widest panel of the grid.
    pub fn max_panel_width(&self) -> f64 {
        self.edges.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Largest phase `x·width` swept by `j(x t)` across one panel, for `x`
    /// up to `x_max`.
    pub fn max_panel_phase(&self, x_max: f64) -> f64 {
        x_max * self.max_panel_width()
    }

    /// Lagrange coefficients for evaluating the panel polynomial at `z`.
    ///
    /// Fills `coeffs` with `nodes_per_panel` values and returns the index of
    /// the first node of the panel, or `None` when `z` lies beyond `r_max`.
    /// Arguments below zero are clamped to zero.
    pub fn stencil(&self, z: f64, coeffs: &mut Vec<f64>) -> Option<usize> {
        if z > self.spec.r_max {
            return None;
        }
        let z = z.max(0.0);
        let npp = self.spec.nodes_per_panel;
        let panel = self.panel_of(z);
        let start = panel * npp;
        let xs = &self.nodes[start..start + npp];
        let bw = &self.bary[panel];
        coeffs.clear();
        if let Some(hit) = xs.iter().position(|&x| x == z) {
            coeffs.extend((0..npp).map(|k| if k == hit { 1.0 } else { 0.0 }));
            return Some(start);
        }
        let mut denom = 0.0;
        for k in 0..npp {
            let c = bw[k] / (z - xs[k]);
            coeffs.push(c);
            denom += c;
        }
        for c in coeffs.iter_mut() {
            *c /= denom;
        }
        Some(start)
    }

    fn panel_of(&self, z: f64) -> usize {
        // edges[k] <= z < edges[k+1]
        let k = self.edges.partition_point(|&e| e <= z);
        k.saturating_sub(1).min(self.edges.len() - 2)
    }

    /// Whether two handles describe the same grid.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

fn barycentric_weights(xs: &[f64]) -> Vec<f64> {
    // rescale to unit width so the products stay O(1)
    let width = xs[xs.len() - 1] - xs[0];
    (0..xs.len())
        .map(|k| {
            let prod: f64 = (0..xs.len())
                .filter(|&j| j != k)
                .map(|j| (xs[k] - xs[j]) / width)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Function values on the nodes of a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return param(format!("non-finite sample {} at node {i}", values[i]));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(Arc::clone(grid), values)
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Panel-polynomial interpolant; zero beyond `r_max`.
    pub fn eval(&self, z: f64) -> f64 {
        self.eval_with(z, &mut Vec::with_capacity(self.grid.spec().nodes_per_panel))
    }

    /// [`eval`](Self::eval) with a caller-provided scratch buffer.
    pub fn eval_with(&self, z: f64, c: &mut Vec<f64>) -> f64 {
        match self.grid.stencil(z, c) {
            Some(start) => c.iter().zip(&self.values[start..]).map(|(a, b)| a * b).sum(),
            None => 0.0,
        }
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|_, v| c * v)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &SampledFunction, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * y).collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    /// `∫ f dσ` over the grid.
    pub fn integral(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_grid(&self, other: &SampledFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::Shape("functions live on different grids".into()))
        }
    }

    pub(crate) fn on_grid(&self, grid: &RadialGrid) -> Result<()> {
        if std::ptr::eq(self.grid.as_ref(), grid) || self.grid.same_as(grid) {
            Ok(())
        } else {
            Err(Error::Shape("function is not sampled on the expected grid".into()))
        }
    }

    /// Serialisable snapshot.
    pub fn to_record(&self) -> SampledRecord {
        SampledRecord {
            nu: self.grid.params().nu,
            r_min: self.grid.r_min(),
            r_max: self.grid.r_max(),
            nodes: self.grid.nodes().to_vec(),
            values: self.values.clone(),
        }
    }

    /// Bind a tabulated function to `grid`. Tables whose abscissae coincide
    /// with the grid nodes are taken verbatim; anything else is resampled by
    /// linear interpolation, with zero outside the table range.
    pub fn from_table(grid: &Arc<RadialGrid>, xs: &[f64], values: &[f64]) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} abscissae but {} values",
                xs.len(),
                values.len()
            )));
        }
        let nodes = grid.nodes();
        let matches = xs.len() == nodes.len() && xs.iter().zip(nodes).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs());
        if matches {
            return Self::new(Arc::clone(grid), values.to_vec());
        }
        if xs.is_empty() {
            return param("empty table");
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return param("table abscissae must be strictly increasing");
        }
        let resampled = nodes
            .iter()
            .map(|&t| {
                if t < xs[0] || t > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&x| x <= t).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let s = (t - x0) / (x1 - x0);
                values[k - 1] + s * (values[k] - values[k - 1])
            })
            .collect();
        Self::new(Arc::clone(grid), resampled)
    }
}

/// Exponent of an `Lᵖ` norm: `p >= 1`, or `f64::INFINITY` for the sup norm.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    weighted_lp(f.grid.weights(), &f.values, p)
}

pub(crate) fn weighted_lp(weights: &[f64], values: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return param(format!("Lp exponent must be >= 1 or infinity, got {p}"));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let s: f64 = weights.iter().zip(values).map(|(w, v)| w * v.abs().powf(p)).sum();
    Ok(if p == 1.0 {
        s
    } else if p == 2.0 {
        s.sqrt()
    } else {
        s.powf(1.0 / p)
    })
}

/// `Σ wᵢ fᵢ gᵢ`.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    f.check_grid(g)?;
    Ok(f.grid
        .weights()
        .iter()
        .zip(f.values.iter().zip(&g.values))
        .map(|(w, (a, b))| w * (a * b))
        .sum())
}

/// JSON form of a sampled function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRecord {
    pub nu: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: std::io::Write>(out: W, xs: &[f64], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "value"])?;
    for (x, v) in xs.iter().zip(values) {
        w.write_record([fmt17(*x), fmt17(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(Error::Shape(format!(
            "expected header `x,value`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parameter(format!("row {}: {e}", line + 2)))
        };
        xs.push(parse(&rec[0])?);
        vs.push(parse(&rec[1])?);
    }
    Ok((xs, vs))
}

impl SampledFunction {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_csv(out, self.grid.nodes(), &self.values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nu: f64) -> Arc<RadialGrid> {
        let p = MeasureParams::new(nu).unwrap();
        Arc::new(RadialGrid::new(&p, GridSpec::default()).unwrap())
    }

    #[test]
    fn weights_sum_to_sigma_mass() {
        for nu in [0.25, 1.0, 1.5, 2.5] {
            let g = grid(nu);
            let s: f64 = g.weights().iter().sum();
            let exact = g.params().mass(g.r_max());
            assert!((s / exact - 1.0).abs() < 1e-10, "nu={nu}: {s} vs {exact}");
        }
    }

    #[test]
    fn linear_spacing_also_integrates_mass() {
        let p = MeasureParams::new(1.0).unwrap();
        let g = RadialGrid::new(&p, GridSpec::linear(1e-3, 10.0, 20, 8)).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s / p.mass(10.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let p = MeasureParams::new(1.0).unwrap();
        assert!(RadialGrid::new(&p, GridSpec::log(2.0, 1.0, 4, 8)).is_err());
        assert!(RadialGrid::new(&p, GridSpec::log(1.0, 1.0, 4, 8)).is_err());
        assert!(RadialGrid::new(&p, GridSpec::log(0.0, 1.0, 4, 8)).is_err());
        assert!(RadialGrid::new(&p, GridSpec::log(0.1, 1.0, 0, 8)).is_err());
        assert!(RadialGrid::new(&p, GridSpec::log(0.1, 1.0, 4, 1)).is_err());
    }

    #[test]
    fn nodes_increasing_and_weights_nonnegative() {
        let g = grid(0.7);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!(g.nodes()[0] > 0.0);
        assert!(g.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn polynomial_exactness_per_panel() {
        // nu = 1: density t², so t^k·t² with k <= 2n-3 is integrated exactly
        let p = MeasureParams::new(1.0).unwrap();
        let g = RadialGrid::new(&p, GridSpec::log(0.5, 4.0, 3, 8)).unwrap();
        for k in 0..=13 {
            let approx: f64 = g.nodes().iter().zip(g.weights()).map(|(t, w)| w * t.powi(k)).sum();
            let exact = p.power_moment(k as f64, 4.0);
            assert!((approx / exact - 1.0).abs() < 1e-13, "k={k}");
        }
        // generic order: degree up to 2n-1 against the density, to rounding
        let p = MeasureParams::new(0.8).unwrap();
        let g = RadialGrid::new(&p, GridSpec::log(0.5, 4.0, 6, 8)).unwrap();
        for k in 0..=15 {
            let approx: f64 = g.nodes().iter().zip(g.weights()).map(|(t, w)| w * t.powi(k)).sum();
            let exact = p.power_moment(k as f64, 4.0);
            assert!((approx / exact - 1.0).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn gaussian_l2_norm_closed_form() {
        let g = grid(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t * t / 2.0).exp()).unwrap();
        // ||f||² = ∫ exp(-t²) dσ
        let exact = g.params().gaussian_moment(0.0, 1.0).sqrt();
        assert!((lp_norm(&f, 2.0).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let g = grid(1.0);
        let z = SampledFunction::zeros(&g);
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            assert_eq!(lp_norm(&z, p).unwrap(), 0.0);
        }
        assert!(lp_norm(&z, 0.5).is_err());
    }

    #[test]
    fn l1_dominates_signed_integral() {
        let g = grid(1.0);
        let f = SampledFunction::from_fn(&g, |t| (1.0 - t * t) * (-t * t).exp()).unwrap();
        assert!(lp_norm(&f, 1.0).unwrap() >= f.integral().abs());
    }

    #[test]
    fn inner_product_properties() {
        let g = grid(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t * t / 3.0).exp()).unwrap();
        let h = SampledFunction::from_fn(&g, |t| t.cos() * (-t).exp()).unwrap();
        let n2 = lp_norm(&f, 2.0).unwrap();
        assert!((inner_product(&f, &f).unwrap() - n2 * n2).abs() < 1e-14);
        assert_eq!(inner_product(&f, &SampledFunction::zeros(&g)).unwrap(), 0.0);
        assert_eq!(
            inner_product(&f, &h).unwrap().to_bits(),
            inner_product(&h, &f).unwrap().to_bits()
        );
        let other = grid(1.5);
        let k = SampledFunction::zeros(&other);
        assert!(matches!(inner_product(&f, &k), Err(Error::Shape(_))));
    }

    #[test]
    fn interpolation_reproduces_smooth_functions() {
        let g = grid(1.0);
        let f = SampledFunction::from_fn(&g, |t| (-t * t / 2.0).exp()).unwrap();
        for z in [0.0, 5e-5, 1e-3, 0.37, 1.0, 2.2, 7.9, 39.9] {
            let exact = (-z * z / 2.0f64).exp();
            assert!((f.eval(z) - exact).abs() < 1e-10, "z={z}: {}", f.eval(z) - exact);
        }
        assert_eq!(f.eval(40.5), 0.0);
        // exact at nodes
        let t = g.nodes()[123];
        assert_eq!(f.eval(t), f.values()[123]);
    }

    #[test]
    fn csv_and_json_round_trip_bit_exact() {
        let g = grid(1.0);
        let f = SampledFunction::from_fn(&g, |t| (0.1 + t).ln() * (-t).exp()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"x,value\n"));
        let (xs, vs) = read_csv(buf.as_slice()).unwrap();
        let back = SampledFunction::from_table(&g, &xs, &vs).unwrap();
        assert!(back
            .values()
            .iter()
            .zip(f.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));

        let json = f.to_json().unwrap();
        let rec: SampledRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec, f.to_record());
    }

    #[test]
    fn table_resampling_is_linear() {
        let g = grid(1.0);
        let f = SampledFunction::from_table(&g, &[0.0, 10.0], &[0.0, 10.0]).unwrap();
        for (x, v) in g.nodes().iter().zip(f.values()) {
            if *x <= 10.0 {
                assert!((x - v).abs() < 1e-12);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }
}
