//! Self-normalized change-point trajectories `T_{k,n}` for score sequences
//! and for raw observations.

use crate::cp_stats::{argmax_abs, scored_ranks};
use crate::error::{Error, Result};
use crate::scores::ScoreSpec;

/// `T_{k,n}` for `k = 1..n−1`, with the `k` whose denominator vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct SNTrajectory {
    values: Vec<f64>,
    max_abs: f64,
    argmax_k: usize,
    degenerate_ks: Vec<usize>,
}

impl SNTrajectory {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at 1-based `k`.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// `T_n = max_k |T_{k,n}|`.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// Smallest `k` attaining `T_n`.
    pub fn argmax_k(&self) -> usize {
        self.argmax_k
    }

    pub fn degenerate_ks(&self) -> &[usize] {
        &self.degenerate_ks
    }
}

/// `S_{t;j,k} = Σ_{h=j}^t (v_h − v̄_{j,k})` for `t = j..k` (1-based, inclusive).
pub fn segment_partial_sums(v: &[f64], j: usize, k: usize) -> Result<Vec<f64>> {
    if j == 0 || j > k || k > v.len() {
        return Err(Error::domain(format!(
            "segment [{j}, {k}] is empty or outside 1..={}",
            v.len()
        )));
    }
    let seg = &v[j - 1..k];
    let mean = seg.iter().sum::<f64>() / seg.len() as f64;
    let mut acc = 0.0;
    let mut out: Vec<f64> = seg
        .iter()
        .map(|&x| {
            acc += x - mean;
            acc
        })
        .collect();
    // the last sum is zero by construction; drop the rounding residue
    *out.last_mut().unwrap() = 0.0;
    Ok(out)
}

fn segment_square_sum(seg: &[f64]) -> f64 {
    let mean = seg.iter().sum::<f64>() / seg.len() as f64;
    let mut acc = 0.0;
    let mut sq = 0.0;
    for &x in &seg[..seg.len() - 1] {
        acc += x - mean;
        sq += acc * acc;
    }
    sq
}

/// `Σ_{t=1}^k S²_{t;1,k}` for `k = 1..c.len()`.
///
/// Uses prefix sums of `P_t²` and `t·P_t`. Where the closed form loses more
/// than half the available digits to cancellation the two-pass sum is used.
fn left_square_sums(c: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len());
    let (mut p, mut a, mut b) = (0.0, 0.0, 0.0);
    for (i, &x) in c.iter().enumerate() {
        let t = (i + 1) as f64;
        p += x;
        a += p * p;
        b += t * p;
        let m = p / t;
        let tt = m * m * t * (t + 1.0) * (2.0 * t + 1.0) / 6.0;
        let s = a - 2.0 * m * b + tt;
        if s < 1e-8 * (a + tt) {
            out.push(segment_square_sum(&c[..=i]));
        } else {
            out.push(s);
        }
    }
    out
}

/// `T_{k,n}` for all `1 ≤ k < n`.
pub fn sn_trajectory(v: &[f64]) -> Result<SNTrajectory> {
    let n = v.len();
    if n < 3 {
        return Err(Error::domain(format!(
            "self-normalized statistic needs n >= 3, got {n}"
        )));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::domain(format!("non-finite value at index {}", i + 1)));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let left = left_square_sums(&c[..n - 1]);
    let rev: Vec<f64> = c[1..].iter().rev().copied().collect();
    let right = left_square_sums(&rev);

    let max_v = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * (max_v * max_v + 1.0);
    let c_mean = c.iter().sum::<f64>() / n as f64;
    let mut values = Vec::with_capacity(n - 1);
    let mut degenerate_ks = Vec::new();
    let mut p = 0.0;
    for k in 1..n {
        p += c[k - 1];
        let num = p - k as f64 * c_mean;
        let denom = (left[k - 1] + right[n - k - 1]).max(0.0) / n as f64;
        if denom < tol {
            values.push(0.0);
            degenerate_ks.push(k);
        } else {
            values.push(num / denom.sqrt());
        }
    }
    let (argmax_k, max_abs) = argmax_abs(&values);
    Ok(SNTrajectory {
        values,
        max_abs,
        argmax_k,
        degenerate_ks,
    })
}

/// Self-normalized rank statistic `T_n(a)` computed from the scores `a(R_i)`.
pub fn sn_rank_stat(series: &[f64], spec: &ScoreSpec) -> Result<SNTrajectory> {
    if series.len() < 3 {
        return Err(Error::domain(format!(
            "self-normalized statistic needs n >= 3, got {}",
            series.len()
        )));
    }
    sn_trajectory(&scored_ranks(series, spec)?)
}

/// Self-normalized CuSum: the same functional applied to the observations.
pub fn sn_cusum_stat(series: &[f64]) -> Result<SNTrajectory> {
    sn_trajectory(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_examples() {
        assert_eq!(
            segment_partial_sums(&[1.0, 2.0, 3.0], 1, 3).unwrap(),
            vec![-1.0, -1.0, 0.0]
        );
        assert_eq!(segment_partial_sums(&[4.0, 9.0], 2, 2).unwrap(), vec![0.0]);
        assert!(segment_partial_sums(&[2.0; 5], 2, 4)
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        assert!(segment_partial_sums(&[1.0, 2.0], 2, 1).is_err());
        assert!(segment_partial_sums(&[1.0, 2.0], 0, 1).is_err());
        assert!(segment_partial_sums(&[1.0, 2.0], 1, 3).is_err());
    }

    #[test]
    fn degenerate_split_is_recorded() {
        let t = sn_trajectory(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(t.at(3), 0.0);
        assert!(t.degenerate_ks().contains(&3));
        assert!(t.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn constant_series_is_all_degenerate() {
        let t = sn_cusum_stat(&[2.5; 7]).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert_eq!(t.degenerate_ks(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn positive_affine_invariance() {
        let v = [0.3, -1.1, 2.4, 0.9, 1.7, -0.2, 3.3, 0.0];
        let w: Vec<f64> = v.iter().map(|x| 3.0 * x + 7.0).collect();
        let a = sn_trajectory(&v).unwrap();
        let b = sn_trajectory(&w).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-9);
        }
        assert_eq!(a.argmax_k(), b.argmax_k());
    }

    #[test]
    fn short_input_rejected() {
        assert!(sn_trajectory(&[1.0, 2.0]).is_err());
        assert!(sn_rank_stat(&[1.0, 2.0], &ScoreSpec::wilcoxon()).is_err());
    }
}
