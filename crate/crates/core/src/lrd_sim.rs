//! Fractional Gaussian noise, subordination to target marginals and
//! level-shift injection.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::gaussian_core::{
    cauchy_from_gaussian, fgn_acvf_unchecked, normal_cdf, normal_quantile, SublevelSets,
};
use crate::series::TimeSeries;

/// Autocovariance of fractional Gaussian noise,
/// `γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_acvf(hurst: f64, k: usize) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::domain(format!(
            "Hurst index must lie in (0, 1), got {hurst}"
        )));
    }
    Ok(fgn_acvf_unchecked(hurst, k))
}

/// RNG for replication `stream` under `master_seed`.
///
/// ChaCha is counter based, so each `(seed, stream)` pair is an independent
/// sequence no matter which thread draws it or in which order.
pub fn replication_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Circulant-embedding sampler for fGn of a fixed length. The embedding
/// eigenvalues and FFT plan are computed once and reused across draws.
#[derive(Clone)]
pub struct FgnGenerator {
    n: usize,
    hurst: f64,
    /// `sqrt(λ_j / m)` for the `m = 2n − 2` embedding eigenvalues.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("n", &self.n)
            .field("hurst", &self.hurst)
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(n: usize, hurst: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("fGn length must be >= 2, got {n}")));
        }
        fgn_acvf(hurst, 0)?;
        let eigen = embedding_eigenvalues(n, hurst);
        let max = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = eigen.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-8 * max {
            return Err(Error::EmbeddingFailure {
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }
        let m = eigen.len() as f64;
        let scale = eigen.iter().map(|&l| (l.max(0.0) / m).sqrt()).collect();
        let fft = FftPlanner::new().plan_fft_forward(eigen.len());
        Ok(Self {
            n,
            hurst,
            scale,
            fft,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// One sample path. With `Z` complex standard normal, the real part of
    /// `FFT(sqrt(λ/m) Z)` has exactly the circulant covariance; its first
    /// `n` entries are the fGn path.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Eigenvalues of the circulant matrix whose first row is
/// `γ(0), …, γ(n−1), γ(n−2), …, γ(1)` (period `2n − 2`).
pub fn embedding_eigenvalues(n: usize, hurst: f64) -> Vec<f64> {
    let m = 2 * (n - 1);
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j < n { j } else { m - j };
            Complex64::new(fgn_acvf_unchecked(hurst, lag), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut row);
    row.into_iter().map(|c| c.re).collect()
}

/// A length-`n` fGn path with Hurst index `hurst`, deterministic in `seed`.
pub fn simulate_fgn(n: usize, hurst: f64, seed: u64) -> Result<TimeSeries> {
    let generator = FgnGenerator::new(n, hurst)?;
    let mut rng = replication_rng(seed, 0);
    Ok(TimeSeries::new(generator.sample(&mut rng)))
}

/// Marginal law of a subordinated Gaussian sequence `Y = G(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalSpec {
    /// `G(t) = t`.
    Normal,
    /// Standardized Pareto(α, k): mean zero, unit variance, `G` decreasing.
    Pareto { alpha: f64, k_scale: f64 },
    /// `G(t) = tan(π(Φ(t) − ½))`.
    Cauchy,
    /// `G(t) = ½(t² − 1)`, a centred χ²(1) scaled by ½.
    ChiSq1,
}

impl MarginalSpec {
    pub fn pareto(alpha: f64, k_scale: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "Pareto marginal needs alpha > 2 for a finite variance, got {alpha}"
            )));
        }
        if !(k_scale > 0.0) || !k_scale.is_finite() {
            return Err(Error::domain(format!(
                "Pareto scale must be positive, got {k_scale}"
            )));
        }
        Ok(MarginalSpec::Pareto { alpha, k_scale })
    }

    /// Pareto(3, 1), the harness default.
    pub fn pareto_default() -> Self {
        MarginalSpec::Pareto {
            alpha: 3.0,
            k_scale: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MarginalSpec::Normal => "normal",
            MarginalSpec::Pareto { .. } => "pareto",
            MarginalSpec::Cauchy => "cauchy",
            MarginalSpec::ChiSq1 => "chisq",
        }
    }

    /// Hermite rank of the indicator class `1{G(ξ) ≤ x} − F(x)`.
    pub fn hermite_rank(&self) -> usize {
        match self {
            MarginalSpec::ChiSq1 => 2,
            _ => 1,
        }
    }

    /// Applies `G` to one standard Gaussian value.
    pub fn transform(&self, t: f64) -> f64 {
        match *self {
            MarginalSpec::Normal => t,
            MarginalSpec::Pareto { alpha, k_scale } => {
                let (norm, offset) = pareto_constants(alpha, k_scale);
                norm * (k_scale * normal_cdf(t).powf(-1.0 / alpha) - offset)
            }
            MarginalSpec::Cauchy => cauchy_from_gaussian(t),
            MarginalSpec::ChiSq1 => 0.5 * (t * t - 1.0),
        }
    }
}

/// `((αk²)/((α−1)²(α−2)))^{−1/2}` and `αk/(α−1)`.
fn pareto_constants(alpha: f64, k: f64) -> (f64, f64) {
    let var = alpha * k * k / ((alpha - 1.0).powi(2) * (alpha - 2.0));
    (var.powf(-0.5), alpha * k / (alpha - 1.0))
}

fn quantile_or_edge(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        normal_quantile(p).expect("p checked to lie in (0,1)")
    }
}

impl SublevelSets for MarginalSpec {
    fn sublevel_intervals(&self, x: f64) -> Vec<(f64, f64)> {
        if x.is_nan() {
            return Vec::new();
        }
        match *self {
            MarginalSpec::Normal => vec![(f64::NEG_INFINITY, x)],
            MarginalSpec::Pareto { alpha, k_scale } => {
                // G(t) <= x  <=>  Φ(t)^{-1/α} <= y  <=>  Φ(t) >= y^{-α}
                let (norm, offset) = pareto_constants(alpha, k_scale);
                let y = (x / norm + offset) / k_scale;
                if y <= 1.0 {
                    Vec::new()
                } else {
                    vec![(quantile_or_edge(y.powf(-alpha)), f64::INFINITY)]
                }
            }
            MarginalSpec::Cauchy => {
                let p = 0.5 + x.atan() / std::f64::consts::PI;
                vec![(f64::NEG_INFINITY, quantile_or_edge(p))]
            }
            MarginalSpec::ChiSq1 => {
                let s2 = 2.0 * x + 1.0;
                if s2 < 0.0 {
                    Vec::new()
                } else {
                    let s = s2.sqrt();
                    vec![(-s, s)]
                }
            }
        }
    }
}

/// Applies the marginal transform elementwise; labels are kept.
pub fn subordinate(base: &TimeSeries, marginal: &MarginalSpec) -> Result<TimeSeries> {
    if let Some(bad) = base.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "subordinate requires finite input; value {} at index {} is not",
            base.values()[bad],
            bad + 1
        )));
    }
    Ok(base.map_values(|t| marginal.transform(t)))
}

/// Change-point location `τ ∈ (0,1)` and level-shift height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSpec {
    tau: f64,
    height: f64,
}

impl ShiftSpec {
    pub fn new(tau: f64, height: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::domain(format!(
                "change-point fraction tau must lie in (0, 1), got {tau}"
            )));
        }
        if !height.is_finite() {
            return Err(Error::domain("shift height must be finite"));
        }
        Ok(Self { tau, height })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// `⌊nτ⌋`, the last unshifted 1-based index.
    pub fn change_index(&self, n: usize) -> usize {
        ((n as f64) * self.tau).floor() as usize
    }
}

/// Adds `h` to every observation with 1-based index `i > ⌊nτ⌋`.
pub fn inject_shift(series: &TimeSeries, shift: &ShiftSpec) -> Result<TimeSeries> {
    if series.is_empty() {
        return Err(Error::domain("inject_shift requires a nonempty series"));
    }
    let mut out = series.clone();
    inject_shift_values(out.values_mut(), shift);
    Ok(out)
}

/// Shifts a raw buffer in place; the Monte Carlo hot path avoids cloning.
pub fn inject_shift_values(values: &mut [f64], shift: &ShiftSpec) {
    let k = shift.change_index(values.len());
    if shift.height == 0.0 {
        return;
    }
    for v in &mut values[k..] {
        *v += shift.height;
    }
}
