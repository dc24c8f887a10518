//! Ranks, rank CuSum trajectories `S_{k,n}(a)`, the plain CuSum trajectory
//! and the rank empirical distribution function.

use crate::error::{Error, Result};
use crate::scores::{make_scores, ScoreSpec};

/// `R_i = #{j : X_j ≤ X_i}`; tied observations share their maximal rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    ranks: Vec<usize>,
    has_ties: bool,
}

impl RankVector {
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Ranks by sorting and tie grouping, `O(n log n)`.
pub fn ranks(x: &[f64]) -> Result<RankVector> {
    if x.is_empty() {
        return Err(Error::domain("ranks of an empty series"));
    }
    if let Some(i) = x.iter().position(|v| v.is_nan()) {
        return Err(Error::domain(format!("NaN at index {}", i + 1)));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0usize; x.len()];
    let mut has_ties = false;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal as observations
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            has_ties = true;
        }
        for &idx in &order[start..end] {
            out[idx] = end;
        }
        start = end;
    }
    Ok(RankVector {
        ranks: out,
        has_ties,
    })
}

/// Per-`k` statistic values for `k = 1..n−1` and their maximum modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct StatTrajectory {
    values: Vec<f64>,
    max_abs: f64,
    argmax_k: usize,
}

impl StatTrajectory {
    /// `values[k-1]` holds the statistic at `k`. Needs at least one entry.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("trajectory needs n >= 2"));
        }
        let (argmax_k, max_abs) = argmax_abs(&values);
        Ok(Self {
            values,
            max_abs,
            argmax_k,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at 1-based `k`.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// Smallest `k` attaining the maximum modulus.
    pub fn argmax_k(&self) -> usize {
        self.argmax_k
    }
}

/// 1-based index of the first maximum of `|v|`, and that maximum.
pub(crate) fn argmax_abs(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut max = f64::NEG_INFINITY;
    for (i, v) in values.iter().enumerate() {
        if v.abs() > max {
            max = v.abs();
            best = i;
        }
    }
    (best + 1, max)
}

/// `a(R_1), …, a(R_n)` for the given scores.
pub fn scored_ranks(x: &[f64], spec: &ScoreSpec) -> Result<Vec<f64>> {
    let r = ranks(x)?;
    let scores = make_scores(spec, x.len())?;
    Ok(lookup(&r, &scores))
}

pub(crate) fn lookup(r: &RankVector, scores: &[f64]) -> Vec<f64> {
    r.ranks.iter().map(|&ri| scores[ri - 1]).collect()
}

/// Centred partial sums `Σ_{i≤k} v_i − (k/n) Σ_{i≤n} v_i`, `k = 1..n−1`.
pub(crate) fn centred_partial_sums(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let total: f64 = v.iter().sum();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n - 1);
    for (i, &x) in v[..n - 1].iter().enumerate() {
        acc += x;
        out.push(acc - (i + 1) as f64 / n as f64 * total);
    }
    out
}

/// `S_{k,n}(a) = Σ_{i≤k} a(R_i) − (k/n) Σ_{i≤n} a(R_i)`; `max_abs` is `S_n(a)`.
pub fn rank_cusum_trajectory(x: &[f64], spec: &ScoreSpec) -> Result<StatTrajectory> {
    if x.len() < 2 {
        return Err(Error::domain("rank CuSum needs n >= 2"));
    }
    let v = scored_ranks(x, spec)?;
    StatTrajectory::from_values(centred_partial_sums(&v))
}

/// CuSum trajectory of raw observations; `max_abs` is `C_n`.
pub fn cusum_trajectory(x: &[f64]) -> Result<StatTrajectory> {
    if x.len() < 2 {
        return Err(Error::domain("CuSum needs n >= 2"));
    }
    if let Some(i) = x.iter().position(|v| v.is_nan()) {
        return Err(Error::domain(format!("NaN at index {}", i + 1)));
    }
    StatTrajectory::from_values(centred_partial_sums(x))
}

/// `Ĝ_k(x) = #{i ≤ k : R_i/(n+1) ≤ x}`.
pub fn rank_edf(series: &[f64], k: usize, x: f64) -> Result<usize> {
    let n = series.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!(
            "rank_edf needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let r = ranks(series)?;
    let denom = (n + 1) as f64;
    Ok(r.ranks[..k]
        .iter()
        .filter(|&&ri| ri as f64 / denom <= x)
        .count())
}
