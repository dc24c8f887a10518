//! Sampling-window estimate of a statistic's null distribution and the
//! composed self-normalized change-point test.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scores::ScoreSpec;
use crate::self_norm::{sn_cusum_stat, sn_rank_stat, SNTrajectory};

/// Sorted statistic values over all `m = n − l + 1` windows of length `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    sorted_values: Vec<f64>,
    block_length: usize,
}

impl NullDistribution {
    /// Wraps precomputed window values; they are sorted here.
    pub fn from_values(mut values: Vec<f64>, block_length: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty null distribution"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("NaN in null distribution"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            sorted_values: values,
            block_length,
        })
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }
}

/// Evaluates `stat` on every window `(X_k, …, X_{k+l−1})`, `k = 1..n−l+1`.
///
/// Windows run on the rayon pool; the result does not depend on scheduling.
pub fn subsample_distribution<F>(series: &[f64], l: usize, stat: F) -> Result<NullDistribution>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = series.len();
    if l < 2 || l >= n {
        return Err(Error::domain(format!(
            "block length must satisfy 2 <= l < n, got l = {l}, n = {n}"
        )));
    }
    let values = (0..=n - l)
        .into_par_iter()
        .map(|k| stat(&series[k..k + l]))
        .collect::<Result<Vec<f64>>>()?;
    NullDistribution::from_values(values, l)
}

/// Right-continuous empirical quantile at `1 − level` and the upper-tail
/// p-value `#{v ≥ observed}/m`.
pub fn quantile_and_pvalue(dist: &NullDistribution, level: f64, observed: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level must lie in (0,1), got {level}")));
    }
    let v = &dist.sorted_values;
    if v.is_empty() {
        return Err(Error::domain("empty null distribution"));
    }
    let m = v.len();
    // smallest j with j/m ≥ 1 − level; the slack absorbs rounding in (1 − level)·m
    let j = (((1.0 - level) * m as f64 - 1e-9).ceil() as usize).clamp(1, m);
    let critical = v[j - 1];
    let below = v.partition_point(|&x| x < observed);
    let p_value = (m - below) as f64 / m as f64;
    Ok((critical, p_value))
}

/// Block length: explicit, or `⌊n^γ⌋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockRule {
    Fixed(usize),
    Gamma(f64),
}

impl BlockRule {
    pub fn resolve(&self, n: usize) -> Result<usize> {
        let l = match *self {
            BlockRule::Fixed(l) => l,
            BlockRule::Gamma(g) => {
                if !(g > 0.0 && g < 1.0) {
                    return Err(Error::domain(format!("gamma must lie in (0,1), got {g}")));
                }
                // n^γ can land a hair below an exact integer
                ((n as f64).powf(g) + 1e-9).floor() as usize
            }
        };
        if l < 3 {
            return Err(Error::domain(format!("block length {l} is below 3 (n = {n})")));
        }
        if l >= n {
            return Err(Error::domain(format!("block length {l} is not below n = {n}")));
        }
        Ok(l)
    }
}

impl fmt::Display for BlockRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockRule::Fixed(l) => write!(f, "{l}"),
            BlockRule::Gamma(g) => write!(f, "gamma:{g}"),
        }
    }
}

/// Which self-normalized statistic a test uses.
#[derive(Debug, Clone)]
pub enum TestKind {
    Wilcoxon,
    Vdw,
    Median,
    Custom(ScoreSpec),
    Cusum,
}

impl TestKind {
    pub fn name(&self) -> &str {
        match self {
            TestKind::Wilcoxon => "wilcoxon",
            TestKind::Vdw => "vdw",
            TestKind::Median => "median",
            TestKind::Custom(s) => s.name(),
            TestKind::Cusum => "cusum",
        }
    }

    /// Score specification, or `None` for the CuSum test.
    pub fn score_spec(&self) -> Option<ScoreSpec> {
        match self {
            TestKind::Wilcoxon => Some(ScoreSpec::wilcoxon()),
            TestKind::Vdw => Some(ScoreSpec::van_der_waerden()),
            TestKind::Median => Some(ScoreSpec::median()),
            TestKind::Custom(s) => Some(s.clone()),
            TestKind::Cusum => None,
        }
    }

    pub fn trajectory(&self, series: &[f64]) -> Result<SNTrajectory> {
        match self.score_spec() {
            Some(spec) => sn_rank_stat(series, &spec),
            None => sn_cusum_stat(series),
        }
    }
}

/// Outcome of one test on one series.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub statistic_name: String,
    pub observed: f64,
    pub p_value: f64,
    pub critical_value: f64,
    pub level: f64,
    pub reject: bool,
    pub argmax_k: usize,
    pub block_length: usize,
}

impl TestReport {
    pub const CSV_HEADER: &'static str =
        "statistic,observed,p_value,critical_value,level,reject,argmax_k,block_length";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.statistic_name,
            self.observed,
            self.p_value,
            self.critical_value,
            self.level,
            self.reject,
            self.argmax_k,
            self.block_length
        )
    }

    /// Flat `key=value` block, one pair per line.
    pub fn key_values(&self) -> String {
        format!(
            "statistic={}\nobserved={}\np_value={}\ncritical_value={}\nlevel={}\nreject={}\nargmax_k={}\nblock_length={}\n",
            self.statistic_name,
            self.observed,
            self.p_value,
            self.critical_value,
            self.level,
            self.reject,
            self.argmax_k,
            self.block_length
        )
    }
}

/// Full-sample statistic against its sampling-window distribution.
pub fn run_test(series: &[f64], test: &TestKind, block: BlockRule, level: f64) -> Result<TestReport> {
    let n = series.len();
    if n < 10 {
        return Err(Error::domain(format!("test needs at least 10 observations, got {n}")));
    }
    let l = block.resolve(n)?;
    let full = test.trajectory(series)?;
    let dist = subsample_distribution(series, l, |w| Ok(test.trajectory(w)?.max_abs()))?;
    let (critical_value, p_value) = quantile_and_pvalue(&dist, level, full.max_abs())?;
    Ok(TestReport {
        statistic_name: test.name().to_string(),
        observed: full.max_abs(),
        p_value,
        critical_value,
        level,
        reject: full.max_abs() > critical_value,
        argmax_k: full.argmax_k(),
        block_length: l,
    })
}
