//! Rank-based change-point statistics for long-range dependent time series.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian_core`]: standard normal functions, Hermite polynomials and
//!   coefficients, and the exact scaling sequence `d_{n,r}`.
//! - [`lrd_sim`]: fractional Gaussian noise by circulant embedding,
//!   subordination to target marginals, level-shift injection.
//! - [`scores`]: score vectors `a(i) = h(i/(n+1))` and the weighted
//!   total-variation integrability check for `h`.
//! - [`cp_stats`]: ranks, rank CuSum trajectories `S_{k,n}(a)` and the plain
//!   CuSum trajectory.
//! - [`self_norm`]: self-normalized trajectories `T_{k,n}` for scores and raw
//!   observations.
//! - [`subsampling`]: sampling-window null distributions, quantiles,
//!   p-values and the composed test.
//! - [`efficiency`]: score integrals, asymptotic relative efficiency and the
//!   local-alternative drift curve.

pub mod cp_stats;
pub mod efficiency;
mod error;
pub mod gaussian_core;
pub mod lrd_sim;
pub mod quadrature;
pub mod scores;
pub mod self_norm;
mod series;
pub mod subsampling;

pub use error::{Error, Result};
pub use series::TimeSeries;
