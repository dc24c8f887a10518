//! Score vectors for rank statistics and the weighted total-variation
//! integrability check for their generating function `h`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gaussian_core::normal_quantile;
use crate::quadrature::GaussLegendre;

/// User-supplied score generator `h : (0,1) → ℝ`.
///
/// `breakpoints` splits `(0,1)` into pieces on which `h` is monotone. When
/// absent, `h` is assumed monotone on all of `(0,1)` (checked numerically
/// where it matters).
#[derive(Clone)]
pub struct CustomScore {
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Option<Vec<f64>>,
    knots: Option<Vec<(f64, f64)>>,
}

impl CustomScore {
    pub fn from_fn(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Option<Vec<f64>>,
    ) -> Result<Self> {
        if let Some(bp) = &breakpoints {
            validate_increasing_unit(bp.iter().copied(), "monotone-piece breakpoints")?;
        }
        Ok(Self {
            h: Arc::new(h),
            breakpoints,
            knots: None,
        })
    }

    /// Piecewise-linear interpolation through `(x, h(x))` pairs with strictly
    /// increasing `x ∈ (0,1)`; constant beyond the outermost knots.
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("custom score needs at least one (x, h) pair"));
        }
        validate_increasing_unit(points.iter().map(|p| p.0), "custom score abscissae")?;
        if let Some(p) = points.iter().find(|p| !p.1.is_finite()) {
            return Err(Error::domain(format!(
                "custom score value at x = {} is not finite",
                p.0
            )));
        }
        let table = points.clone();
        let h = move |x: f64| interpolate(&table, x);
        Ok(Self {
            h: Arc::new(h),
            breakpoints: Some(points.iter().map(|p| p.0).collect()),
            knots: Some(points),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.h)(x)
    }

    pub fn breakpoints(&self) -> Option<&[f64]> {
        self.breakpoints.as_deref()
    }

    /// Knots of a piecewise-linear score, if it was built from pairs.
    pub fn knots(&self) -> Option<&[(f64, f64)]> {
        self.knots.as_deref()
    }
}

fn validate_increasing_unit(xs: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut prev = 0.0;
    for (i, x) in xs.enumerate() {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!(
                "{what}: entry {} = {x} is outside (0, 1)",
                i + 1
            )));
        }
        if i > 0 && x <= prev {
            return Err(Error::domain(format!(
                "{what}: entry {} = {x} is not strictly greater than {prev}",
                i + 1
            )));
        }
        prev = x;
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let idx = points.partition_point(|p| p.0 <= x);
    if idx == 0 {
        return points[0].1;
    }
    if idx == points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, y0) = points[idx - 1];
    let (x1, y1) = points[idx];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl fmt::Debug for CustomScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomScore")
            .field("breakpoints", &self.breakpoints)
            .field("knots", &self.knots.as_ref().map(|k| k.len()))
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ScoreKind {
    /// `h(x) = x`, so `a(i) = i/(n+1)`.
    Wilcoxon,
    /// `h = Φ⁻¹`.
    VanDerWaerden,
    /// `h(x) = sign(x − ½)`.
    Median,
    Custom(CustomScore),
}

#[derive(Debug, Clone)]
pub struct ScoreSpec {
    kind: ScoreKind,
    name: String,
}

impl ScoreSpec {
    pub fn wilcoxon() -> Self {
        Self {
            kind: ScoreKind::Wilcoxon,
            name: "wilcoxon".into(),
        }
    }

    pub fn van_der_waerden() -> Self {
        Self {
            kind: ScoreKind::VanDerWaerden,
            name: "vdw".into(),
        }
    }

    pub fn median() -> Self {
        Self {
            kind: ScoreKind::Median,
            name: "median".into(),
        }
    }

    pub fn custom(name: impl Into<String>, score: CustomScore) -> Self {
        Self {
            kind: ScoreKind::Custom(score),
            name: name.into(),
        }
    }

    pub fn kind(&self) -> &ScoreKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The generating function `h`. Van der Waerden returns ∓∞ at 0 and 1.
    pub fn h(&self, x: f64) -> f64 {
        match &self.kind {
            ScoreKind::Wilcoxon => x,
            ScoreKind::VanDerWaerden => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else if x >= 1.0 {
                    f64::INFINITY
                } else {
                    normal_quantile(x).expect("x in (0,1)")
                }
            }
            ScoreKind::Median => sign(x - 0.5),
            ScoreKind::Custom(c) => c.eval(x),
        }
    }

    /// `h(1 − q)`, exact for Van der Waerden even when `1 − q` rounds to 1.
    fn h_reflected(&self, q: f64) -> f64 {
        match &self.kind {
            ScoreKind::VanDerWaerden => -self.h(q),
            _ => self.h(1.0 - q),
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Scores `a(1), …, a(n)` with `a(i) = h(i/(n+1))`.
pub fn make_scores(spec: &ScoreSpec, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain(format!("scores need n >= 2, got {n}")));
    }
    let denom = (n + 1) as f64;
    match &spec.kind {
        ScoreKind::Wilcoxon => Ok((1..=n).map(|i| i as f64 / denom).collect()),
        ScoreKind::VanDerWaerden => {
            let mut a = vec![0.0; n];
            for i in 1..=n {
                // lower half computed directly, upper half mirrored exactly
                if 2 * i < n + 1 {
                    let v = normal_quantile(i as f64 / denom)?;
                    a[i - 1] = v;
                    a[n - i] = -v;
                }
            }
            Ok(a)
        }
        ScoreKind::Median => Ok((1..=n)
            .map(|i| match (2 * i).cmp(&(n + 1)) {
                std::cmp::Ordering::Less => -1.0,
                std::cmp::Ordering::Equal => 0.0,
                std::cmp::Ordering::Greater => 1.0,
            })
            .collect()),
        ScoreKind::Custom(c) => (1..=n)
            .map(|i| {
                let x = i as f64 / denom;
                let v = c.eval(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::domain(format!(
                        "custom score '{}' is not finite at x = {x} (i = {i}, n = {n}): {v}",
                        spec.name
                    )))
                }
            })
            .collect(),
    }
}

/// Value of `∫₀¹ (min{x, 1−x})^λ dh̄(x)` and whether it is stable under grid
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HBarIntegral {
    pub lambda: f64,
    /// `+∞` when the evaluation itself overflowed.
    pub value: f64,
    pub converged: bool,
    pub grid_size: usize,
}

const HBAR_LOG_DEPTH_PER_CELL: f64 = 0.345;
/// `e^{-700}` is still a normal f64.
const HBAR_MAX_LOG_DEPTH: f64 = 700.0;
const HBAR_REL_STABILITY: f64 = 0.01;

/// Numerical check of the weighted integrability condition on `h`.
///
/// Writing `V(q)` for the variation of `h` between `q` and `½` (and between
/// `½` and `1 − q` on the right), integration by parts turns each half into
/// `λ ∫₀^{½} q^{λ−1} V(q) dq`, which is evaluated in `s = ln q` on
/// `grid_size` Gauss–Legendre panels. The panels are geometric in `q` and
/// their depth toward the endpoints grows with the grid, so a divergent
/// integral keeps growing when the grid is doubled. The reported value is
/// the one on the doubled grid; `converged` means the two differ by < 1%.
pub fn check_score_assumption(
    spec: &ScoreSpec,
    lambda: f64,
    grid_size: usize,
) -> Result<HBarIntegral> {
    if !(lambda > 0.0 && lambda < 1.0 / 3.0) {
        return Err(Error::domain(format!(
            "lambda must lie in (0, 1/3), got {lambda}"
        )));
    }
    if grid_size < 1000 {
        return Err(Error::domain(format!(
            "grid_size must be >= 1000, got {grid_size}"
        )));
    }
    let pieces = monotone_pieces(spec)?;
    let coarse = hbar_integral(spec, &pieces, lambda, grid_size);
    let fine = hbar_integral(spec, &pieces, lambda, 2 * grid_size);
    let converged = coarse.is_finite()
        && fine.is_finite()
        && (fine - coarse).abs() <= HBAR_REL_STABILITY * fine.abs().max(f64::MIN_POSITIVE);
    let converged = converged || (coarse == 0.0 && fine == 0.0);
    Ok(HBarIntegral {
        lambda,
        value: if fine.is_finite() { fine } else { f64::INFINITY },
        converged,
        grid_size,
    })
}

/// Interior breakpoints between monotone pieces of `h`.
fn monotone_pieces(spec: &ScoreSpec) -> Result<Vec<f64>> {
    match &spec.kind {
        ScoreKind::Custom(c) => match c.breakpoints() {
            Some(bp) => Ok(bp.to_vec()),
            None => {
                if probe_monotone(c) {
                    Ok(Vec::new())
                } else {
                    Err(Error::Unsupported(format!(
                        "custom score '{}' is not monotone on (0,1) and no monotone-piece \
                         breakpoints were supplied",
                        spec.name
                    )))
                }
            }
        },
        _ => Ok(Vec::new()),
    }
}

fn probe_monotone(c: &CustomScore) -> bool {
    let mut xs: Vec<f64> = (1..2000).map(|i| i as f64 / 2000.0).collect();
    for k in 4..60 {
        let e = 2f64.powi(-k);
        xs.push(e);
        xs.push(1.0 - e);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.iter().map(|&x| c.eval(x)).collect();
    let nondecreasing = vals.windows(2).all(|w| w[1] >= w[0]);
    let nonincreasing = vals.windows(2).all(|w| w[1] <= w[0]);
    nondecreasing || nonincreasing
}

fn hbar_integral(spec: &ScoreSpec, pieces: &[f64], lambda: f64, cells: usize) -> f64 {
    let depth = (HBAR_LOG_DEPTH_PER_CELL * cells as f64).min(HBAR_MAX_LOG_DEPTH);
    let top = 0.5f64.ln();
    let bottom = -depth;
    let width = (top - bottom) / cells as f64;
    let rule = GaussLegendre::new(8);
    let h_half = spec.h(0.5);

    // variation of h over [q, 1/2] through the interior breakpoints
    let left = |q: f64| -> f64 {
        let mut total = 0.0;
        let mut prev = spec.h(q);
        for &b in pieces.iter().filter(|&&b| b > q && b < 0.5) {
            let cur = spec.h(b);
            total += (cur - prev).abs();
            prev = cur;
        }
        total + (h_half - prev).abs()
    };
    // variation over [1/2, 1 - q]
    let right = |q: f64| -> f64 {
        let mut total = 0.0;
        let mut prev = h_half;
        for &b in pieces.iter().filter(|&&b| b > 0.5 && b < 1.0 - q) {
            let cur = spec.h(b);
            total += (cur - prev).abs();
            prev = cur;
        }
        total + (spec.h_reflected(q) - prev).abs()
    };
    let integrand = |s: f64| {
        let q = s.exp();
        let v = left(q) + right(q);
        if v == 0.0 {
            0.0
        } else {
            lambda * (lambda * s).exp() * v
        }
    };
    let mut sum = 0.0;
    for c in 0..cells {
        let a = bottom + c as f64 * width;
        let b = if c + 1 == cells { top } else { a + width };
        sum += rule.integrate(integrand, a, b);
    }
    sum
}
