//! Numerical Hankel analysis on the half line.
//!
//! * [`measure`] / [`grid`]: the weighted measure `dσ`, composite quadrature
//!   grids and `Lᵖ(dσ)` norms.
//! * [`bessel`] / [`kernels`]: the normalised Bessel kernel `j` and the
//!   triangle kernel `D(x, y, z)` behind the Hankel translation.
//! * [`hankel`]: planned forward/inverse Hankel transforms.
//! * [`convolution`]: Hankel translation and convolution.
//! * [`wavelet`] / [`cwt`]: Bessel wavelets and the continuous Bessel wavelet
//!   transform.
//! * [`besov`]: Besov–Hankel seminorms via moduli of smoothness and via
//!   wavelet coefficients.
//! * [`harness`]: test-function generation, run configuration and the
//!   `verify` suite used by the command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod bessel;
pub mod convolution;
pub mod cwt;
pub mod error;
pub mod grid;
pub mod hankel;
pub mod harness;
pub mod kernels;
pub mod measure;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::{build_grid, inner_product, lp_norm, GridSpec, RadialGrid, SampledFunction, Spacing};
pub use measure::MeasureParams;
