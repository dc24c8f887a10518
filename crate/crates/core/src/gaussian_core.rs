//! Standard normal functions, Hermite polynomials and coefficients, and the
//! long-memory scaling sequence `d_{n,r}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function `Φ(x)`.
///
/// Evaluated through the complementary error function, which keeps full
/// relative precision in the lower tail; the absolute error is below 1e-15
/// over the whole real line.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

// Rational approximation of Acklam (relative error < 1.15e-9), used as the
// starting point for Halley refinement.
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

/// Standard normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)`.
///
/// Acklam's rational approximation refined by Halley steps on the lower
/// half; the upper half uses the exact reflection `Φ⁻¹(p) = -Φ⁻¹(1-p)`
/// (`1 - p` is exact for `p ≥ 1/2`).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "normal_quantile requires 0 < p < 1, got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 0.5);
    let mut x = if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((ACKLAM_C[0] * q + ACKLAM_C[1]) * q + ACKLAM_C[2]) * q + ACKLAM_C[3]) * q
            + ACKLAM_C[4])
            * q
            + ACKLAM_C[5])
            / ((((ACKLAM_D[0] * q + ACKLAM_D[1]) * q + ACKLAM_D[2]) * q + ACKLAM_D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((ACKLAM_A[0] * r + ACKLAM_A[1]) * r + ACKLAM_A[2]) * r + ACKLAM_A[3]) * r
            + ACKLAM_A[4])
            * r
            + ACKLAM_A[5])
            * q
            / (((((ACKLAM_B[0] * r + ACKLAM_B[1]) * r + ACKLAM_B[2]) * r + ACKLAM_B[3]) * r
                + ACKLAM_B[4])
                * r
                + 1.0)
    };
    for _ in 0..4 {
        // relative residual keeps the step accurate deep in the tail
        let cdf = normal_cdf(x);
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let u = (cdf - p) / pdf;
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x.min(0.0)
}

/// Probabilists' Hermite polynomial `H_r(x)` via the three-term recurrence
/// `H_{r+1} = x H_r - r H_{r-1}`.
pub fn hermite_poly(r: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if r == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..r {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Transforms `G` for which the sublevel set `{t : G(t) ≤ x}` can be written
/// down as a finite union of intervals. Infinite endpoints are allowed.
pub trait SublevelSets {
    fn sublevel_intervals(&self, x: f64) -> Vec<(f64, f64)>;
}

/// `G(t) = t`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl SublevelSets for Identity {
    fn sublevel_intervals(&self, x: f64) -> Vec<(f64, f64)> {
        if x.is_nan() {
            Vec::new()
        } else {
            vec![(f64::NEG_INFINITY, x)]
        }
    }
}

/// Integration range for Gaussian-weighted integrands; `φ(12) ≈ 2e-32`.
const GAUSS_TRUNCATION: f64 = 12.0;
const HERMITE_COEFF_TOL: f64 = 1e-8;
const HERMITE_NODE_SCHEDULE: [usize; 3] = [64, 128, 256];

/// Hermite coefficient `J_r(G; x) = E[1{G(ξ) ≤ x} H_r(ξ)]` for standard
/// normal `ξ`.
///
/// The indicator boundary is located through `G`'s sublevel intervals; on
/// each interval the smooth integrand `H_r(u) φ(u)` is integrated by
/// Gauss–Legendre with the node count doubled 64 → 128 → 256 until two
/// successive values agree to 1e-8 relative.
pub fn hermite_coefficient(g: &dyn SublevelSets, r: usize, x: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::domain("Hermite coefficient order must be >= 1"));
    }
    let intervals: Vec<(f64, f64)> = g
        .sublevel_intervals(x)
        .into_iter()
        .filter_map(|(a, b)| {
            let a = a.max(-GAUSS_TRUNCATION);
            let b = b.min(GAUSS_TRUNCATION);
            (b > a).then_some((a, b))
        })
        .collect();
    if intervals.is_empty() {
        return Ok(0.0);
    }
    let integrand = |u: f64| hermite_poly(r, u) * normal_pdf(u);
    let eval = |nodes: usize| -> f64 {
        let rule = GaussLegendre::new(nodes);
        intervals
            .iter()
            .map(|&(a, b)| rule.integrate(integrand, a, b))
            .sum()
    };
    let mut previous = eval(HERMITE_NODE_SCHEDULE[0]);
    let mut history = vec![previous];
    for &nodes in &HERMITE_NODE_SCHEDULE[1..] {
        let current = eval(nodes);
        history.push(current);
        if (current - previous).abs() <= HERMITE_COEFF_TOL * current.abs() + 1e-14 {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::numerical(
        "hermite_coefficient",
        format!(
            "no convergence for r={r}, x={x}: values at {:?} nodes were {:?}",
            HERMITE_NODE_SCHEDULE, history
        ),
    ))
}

/// Hermite rank together with an optional closed form of `x ↦ J_r(G; x)`.
#[derive(Clone)]
pub struct HermiteSpec {
    rank: usize,
    coefficient: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl HermiteSpec {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::domain("Hermite rank must be >= 1"));
        }
        Ok(Self {
            rank,
            coefficient: None,
        })
    }

    pub fn with_coefficient(
        mut self,
        coefficient: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.coefficient = Some(Arc::new(coefficient));
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coefficient(&self, x: f64) -> Option<f64> {
        self.coefficient.as_ref().map(|f| f(x))
    }
}

impl fmt::Debug for HermiteSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermiteSpec")
            .field("rank", &self.rank)
            .field("coefficient", &self.coefficient.is_some())
            .finish()
    }
}

/// Autocovariance `γ(k)` of a unit-variance stationary Gaussian sequence.
#[derive(Clone)]
pub struct AcvfFn {
    name: String,
    eval: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl AcvfFn {
    /// Wraps `eval`, checking `γ(0) = 1`.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let g0 = eval(0);
        if (g0 - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "autocovariance must satisfy gamma(0) = 1, got {g0}"
            )));
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
        })
    }

    /// `γ(k) = 1{k = 0}`.
    pub fn white_noise() -> Self {
        Self {
            name: "white-noise".into(),
            eval: Arc::new(|k| if k == 0 { 1.0 } else { 0.0 }),
        }
    }

    /// Fractional Gaussian noise with Hurst index `hurst`.
    pub fn fgn(hurst: f64) -> Result<Self> {
        crate::lrd_sim::fgn_acvf(hurst, 0)?;
        Ok(Self {
            name: format!("fgn(H={hurst})"),
            eval: Arc::new(move |k| fgn_acvf_unchecked(hurst, k)),
        })
    }

    pub fn eval(&self, lag: usize) -> f64 {
        (self.eval)(lag)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for AcvfFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AcvfFn").field("name", &self.name).finish()
    }
}

pub(crate) fn fgn_acvf_unchecked(hurst: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Tiny negative variances from rounding are clamped to zero; anything
/// below this indicates an inconsistent autocovariance.
const VARIANCE_CLAMP: f64 = 1e-9;

/// Exact scaling `d_{n,r} = sqrt(Var(Σ_{i≤n} H_r(ξ_i)))`
/// `= sqrt(r! Σ_{|k|<n} (n - |k|) γ(k)^r)`.
pub fn scaling_dnr(n: usize, r: usize, acvf: &AcvfFn) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("scaling_dnr requires n >= 1"));
    }
    if r == 0 {
        return Err(Error::domain("scaling_dnr requires r >= 1"));
    }
    let r_i32 = i32::try_from(r).map_err(|_| Error::domain("Hermite order too large"))?;
    let nf = n as f64;
    let mut sum = nf * acvf.eval(0).powi(r_i32);
    let mut comp = 0.0;
    for k in 1..n {
        // Kahan summation: the lag terms span many orders of magnitude
        let term = 2.0 * (nf - k as f64) * acvf.eval(k).powi(r_i32) - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    let factorial: f64 = (1..=r).map(|i| i as f64).product();
    let var = factorial * sum;
    if !var.is_finite() {
        return Err(Error::numerical(
            "scaling_dnr",
            format!("non-finite variance for n={n}, r={r}"),
        ));
    }
    if var < -VARIANCE_CLAMP {
        return Err(Error::numerical(
            "scaling_dnr",
            format!(
                "negative variance {var:e} for n={n}, r={r}; autocovariance {} is not positive definite",
                acvf.name()
            ),
        ));
    }
    Ok(var.max(0.0).sqrt())
}

/// `π`-scaled helper used by transforms: `tan(π (Φ(t) - 1/2))` evaluated
/// from the nearer tail so that large `|t|` stay accurate.
pub(crate) fn cauchy_from_gaussian(t: f64) -> f64 {
    let tail = normal_cdf(-t.abs());
    let v = (PI * (0.5 - tail)).tan();
    if t < 0.0 {
        -v
    } else {
        v
    }
}
