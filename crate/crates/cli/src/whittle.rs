//! Local Whittle estimate of the Hurst index.

use std::f64::consts::PI;

use lrdcp_core::Error;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const H_LO: f64 = 0.01;
const H_HI: f64 = 0.99;

/// Default bandwidth `⌊n^{2/3}⌋`.
pub fn default_bandwidth(n: usize) -> usize {
    ((n as f64).powf(2.0 / 3.0) + 1e-9).floor() as usize
}

/// Periodogram `I(λ_j) = |Σ_t x_t e^{−iλ_j t}|² / (2πn)` for `j = 1..m`.
pub fn periodogram(x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[1..=m]
        .iter()
        .map(|z| z.norm_sqr() / (2.0 * PI * n as f64))
        .collect()
}

/// Minimizer over `H ∈ [0.01, 0.99]` of
/// `R(H) = log((1/m) Σ λ_j^{2H−1} I(λ_j)) − (2H−1)(1/m) Σ log λ_j`.
///
/// `R` is convex in `H`, so its derivative is bisected to full precision.
pub fn local_whittle_h(x: &[f64], bandwidth: Option<usize>) -> Result<f64, Error> {
    let n = x.len();
    if n < 64 {
        return Err(Error::Domain(format!(
            "local Whittle needs at least 64 observations, got {n}"
        )));
    }
    let m = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    if m < 1 || m > n / 2 {
        return Err(Error::Domain(format!(
            "bandwidth must satisfy 1 <= m <= n/2 = {}, got {m}",
            n / 2
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series contains non-finite values".into()));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let energy: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let scale: f64 = x.iter().map(|v| v * v).sum::<f64>() + f64::MIN_POSITIVE;
    let pgram = periodogram(x, m);
    if energy <= 1e-24 * scale || pgram.iter().sum::<f64>() <= 1e-24 * scale {
        return Err(Error::Numerical {
            context: "local_whittle_h".into(),
            detail: "periodogram vanishes at the Fourier frequencies (constant series?)".into(),
        });
    }
    let log_l: Vec<f64> = (1..=m)
        .map(|j| (2.0 * PI * j as f64 / n as f64).ln())
        .collect();
    let mean_log = log_l.iter().sum::<f64>() / m as f64;

    let slope = |h: f64| {
        let e = 2.0 * h - 1.0;
        let (mut s, mut sl) = (0.0, 0.0);
        for (&ll, &i) in log_l.iter().zip(&pgram) {
            let w = (e * ll).exp() * i;
            s += w;
            sl += w * ll;
        }
        2.0 * sl / s - 2.0 * mean_log
    };

    let (mut lo, mut hi) = (H_LO, H_HI);
    if slope(lo) >= 0.0 {
        return Ok(lo);
    }
    if slope(hi) <= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
