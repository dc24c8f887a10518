//! Asymptotic relative efficiency of two score functions and the drift
//! curve of a level shift under local alternatives.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gaussian_core::{hermite_coefficient, hermite_poly, normal_cdf, normal_pdf, normal_quantile};
use crate::lrd_sim::MarginalSpec;
use crate::quadrature::{adaptive, Integral};
use crate::scores::{ScoreKind, ScoreSpec};

const REL_TOL: f64 = 1e-8;
const ABS_TOL: f64 = 1e-13;
/// Half-widths of the `u`-range for the Φ-substitution. `Φ(8)` is still
/// below 1 in double precision.
const VDW_RANGES: [f64; 3] = [4.0, 6.0, 8.0];
const VDW_TAIL_TOL: f64 = 1e-6;

/// `∫₀¹ g(x) dh(x)` for the score generator of `spec`.
///
/// Wilcoxon integrates `g` directly, Van der Waerden substitutes `x = Φ(u)`,
/// the median score is a point mass of size 2 at `½`, and piecewise-linear
/// custom scores integrate segment by segment.
pub fn dh_integral(g: &dyn Fn(f64) -> f64, spec: &ScoreSpec) -> Result<Integral> {
    match spec.kind() {
        ScoreKind::Wilcoxon => integrate(g, 0.0, 1.0, spec.name()),
        ScoreKind::VanDerWaerden => {
            let f = |u: f64| g(normal_cdf(u));
            let mut values = Vec::with_capacity(VDW_RANGES.len());
            let mut err = 0.0;
            for &l in &VDW_RANGES {
                let i = integrate(&f, -l, l, spec.name())?;
                err = i.error;
                values.push(i.value);
            }
            let last = values[values.len() - 1];
            let prev = values[values.len() - 2];
            let tail = (last - prev).abs();
            if tail > VDW_TAIL_TOL * last.abs().max(1e-12) {
                return Err(Error::Divergence(format!(
                    "integral against dΦ⁻¹ does not settle as the range widens: {values:?}"
                )));
            }
            Ok(Integral {
                value: last,
                error: err + tail,
            })
        }
        ScoreKind::Median => {
            let v = 2.0 * g(0.5);
            if !v.is_finite() {
                return Err(Error::Divergence(format!("g(1/2) is not finite: {v}")));
            }
            Ok(Integral { value: v, error: 0.0 })
        }
        ScoreKind::Custom(c) => {
            let knots = c.knots().ok_or_else(|| {
                Error::Unsupported(format!(
                    "score '{}' has no piecewise-linear representation for dh",
                    spec.name()
                ))
            })?;
            let mut total = Integral { value: 0.0, error: 0.0 };
            for w in knots.windows(2) {
                let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                if slope == 0.0 {
                    continue;
                }
                let i = integrate(g, w[0].0, w[1].0, spec.name())?;
                total.value += slope * i.value;
                total.error += slope.abs() * i.error;
            }
            Ok(total)
        }
    }
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, what: &str) -> Result<Integral> {
    adaptive(f, a, b, REL_TOL, ABS_TOL).ok_or_else(|| {
        Error::Divergence(format!(
            "integral over ({a}, {b}) for score '{what}' did not converge"
        ))
    })
}

/// Quantities of the marginal law that enter the efficiency ratio, each
/// evaluated at the quantile `F⁻(x)`.
pub trait MarginalModel: Send + Sync {
    fn name(&self) -> &str;
    /// `J_r(F⁻(x))`.
    fn hermite_at_quantile(&self, r: usize, x: f64) -> Result<f64>;
    /// `f(F⁻(x))`.
    fn density_at_quantile(&self, x: f64) -> Result<f64>;
}

/// Standard normal marginal with closed-form `J_r(c) = −H_{r−1}(c) φ(c)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianMarginal;

impl MarginalModel for GaussianMarginal {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn hermite_at_quantile(&self, r: usize, x: f64) -> Result<f64> {
        if r == 0 {
            return Err(Error::domain("Hermite coefficient order must be >= 1"));
        }
        let c = normal_quantile(x)?;
        Ok(-hermite_poly(r - 1, c) * normal_pdf(c))
    }

    fn density_at_quantile(&self, x: f64) -> Result<f64> {
        Ok(normal_pdf(normal_quantile(x)?))
    }
}

/// Marginal of `G(ξ)` for one of the simulation transforms; `J_r` by
/// quadrature over `G`'s sublevel sets.
#[derive(Debug, Clone, Copy)]
pub struct SubordinatedMarginal(pub MarginalSpec);

impl SubordinatedMarginal {
    fn quantile(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0,1), got {x}")));
        }
        Ok(match self.0 {
            MarginalSpec::Normal => normal_quantile(x)?,
            MarginalSpec::Pareto { alpha, k_scale } => {
                let (norm, offset) = pareto_constants(alpha, k_scale);
                norm * (k_scale * (1.0 - x).powf(-1.0 / alpha) - offset)
            }
            MarginalSpec::Cauchy => (PI * (x - 0.5)).tan(),
            MarginalSpec::ChiSq1 => {
                let s = normal_quantile(0.5 * (1.0 + x))?;
                0.5 * (s * s - 1.0)
            }
        })
    }
}

fn pareto_constants(alpha: f64, k: f64) -> (f64, f64) {
    let var = alpha * k * k / ((alpha - 1.0).powi(2) * (alpha - 2.0));
    (var.powf(-0.5), alpha * k / (alpha - 1.0))
}

impl MarginalModel for SubordinatedMarginal {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn hermite_at_quantile(&self, r: usize, x: f64) -> Result<f64> {
        hermite_coefficient(&self.0, r, self.quantile(x)?)
    }

    fn density_at_quantile(&self, x: f64) -> Result<f64> {
        let y = self.quantile(x)?;
        Ok(match self.0 {
            MarginalSpec::Normal => normal_pdf(y),
            MarginalSpec::Pareto { alpha, k_scale } => {
                let (norm, offset) = pareto_constants(alpha, k_scale);
                let z = y / norm + offset;
                alpha * k_scale.powf(alpha) / z.powf(alpha + 1.0) / norm
            }
            MarginalSpec::Cauchy => 1.0 / (PI * (1.0 + y * y)),
            MarginalSpec::ChiSq1 => {
                let s = (2.0 * y + 1.0).sqrt();
                2.0 * normal_pdf(s) / s
            }
        })
    }
}

/// The four integrals and `Δ₁/Δ₂ = (∫J dh₁ / ∫J dh₂)(∫f dh₂ / ∫f dh₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AREResult {
    pub integral_j_1: f64,
    pub integral_j_2: f64,
    pub integral_f_1: f64,
    pub integral_f_2: f64,
    pub ratio: f64,
    pub quadrature_error: f64,
}

/// Ratio of the level shifts detectable by the two score tests.
pub fn are_ratio(
    spec1: &ScoreSpec,
    spec2: &ScoreSpec,
    marginal: &dyn MarginalModel,
    r: usize,
) -> Result<AREResult> {
    if r == 0 {
        return Err(Error::domain("Hermite rank must be >= 1"));
    }
    // quadrature cannot return errors, so failures are parked and reported
    let first_error = std::sync::Mutex::new(None::<Error>);
    let guard = |v: Result<f64>| match v {
        Ok(v) => v,
        Err(e) => {
            first_error.lock().unwrap().get_or_insert(e);
            f64::NAN
        }
    };
    let j = |x: f64| guard(marginal.hermite_at_quantile(r, x));
    let f = |x: f64| guard(marginal.density_at_quantile(x));

    let mut parts = [(0.0, 0.0); 4];
    let jobs: [(&dyn Fn(f64) -> f64, &ScoreSpec, &str); 4] = [
        (&j, spec1, "J_r against dh1"),
        (&j, spec2, "J_r against dh2"),
        (&f, spec1, "f against dh1"),
        (&f, spec2, "f against dh2"),
    ];
    for (slot, (g, spec, label)) in parts.iter_mut().zip(jobs) {
        let i = dh_integral(g, spec).map_err(|e| match first_error.lock().unwrap().take() {
            Some(inner) => inner,
            None => relabel(e, label),
        })?;
        *slot = (i.value, i.error);
    }
    let [(j1, e1), (j2, e2), (f1, e3), (f2, e4)] = parts;
    if j2 == 0.0 {
        return Err(Error::numerical("are_ratio", "J_r against dh2 is zero"));
    }
    if f1 == 0.0 {
        return Err(Error::numerical("are_ratio", "f against dh1 is zero"));
    }
    Ok(AREResult {
        integral_j_1: j1,
        integral_j_2: j2,
        integral_f_1: f1,
        integral_f_2: f2,
        ratio: (j1 / j2) * (f2 / f1),
        quadrature_error: e1 + e2 + e3 + e4,
    })
}

fn relabel(e: Error, label: &str) -> Error {
    match e {
        Error::Divergence(msg) => Error::Divergence(format!("{label}: {msg}")),
        other => other,
    }
}

/// `δ_τ(t) = t(1−τ)` for `t ≤ τ` and `τ(1−t)` otherwise.
pub fn drift_curve(tau: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0,1), got {tau}")));
    }
    Ok(grid
        .iter()
        .map(|&t| if t <= tau { t * (1.0 - tau) } else { tau * (1.0 - t) })
        .collect())
}
