//! Gauss–Legendre rules and an adaptive bisection integrator built on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are found by Newton iteration from the Chebyshev-like
/// initial guess; weights follow from `P_n'` at the roots.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A Gauss–Legendre rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Result of an adaptive integration: value and an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive bisection with a 10-point Gauss–Legendre rule.
///
/// Each interval carries the estimate `|Q(a,b) − Q(a,m) − Q(m,b)|`; the
/// interval with the largest estimate is split until the total falls below
/// `max(abs_tol, rel_tol·|value|)`.
///
/// Returns `None` when `MAX_INTERVALS` is reached first or a non-finite value
/// appears, which is how non-integrable endpoint behaviour shows up.
pub fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Option<Integral> {
    let rule = GaussLegendre::new(10);
    let mut heap = BinaryHeap::new();
    heap.push(Piece::new(f, &rule, a, b)?);
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Some(Integral { value, error });
        }
        if heap.len() >= MAX_INTERVALS {
            return None;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return None;
        }
        heap.push(Piece::new(f, &rule, worst.a, mid)?);
        heap.push(Piece::new(f, &rule, mid, worst.b)?);
    }
}

const MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Piece {
    fn new(f: &dyn Fn(f64) -> f64, rule: &GaussLegendre, a: f64, b: f64) -> Option<Self> {
        let mid = 0.5 * (a + b);
        let whole = rule.integrate(f, a, b);
        let value = rule.integrate(f, a, mid) + rule.integrate(f, mid, b);
        if !value.is_finite() || !whole.is_finite() {
            return None;
        }
        Some(Self {
            a,
            b,
            value,
            error: (value - whole).abs(),
        })
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        // x^9 on [0, 2]: 2^10 / 10
        let v = rule.integrate(|x| x.powi(9), 0.0, 2.0);
        assert!((v - 102.4).abs() < 1e-11);
        let v = rule.integrate(|x| x.powi(8) - 3.0 * x, -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 64, 128, 256] {
            let (_, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_peak() {
        // integral of 1/sqrt(x) over (0,1] is 2; the rule never touches x = 0
        let r = adaptive(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn adaptive_reports_log_divergence() {
        assert!(adaptive(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-8, 1e-12).is_none());
    }
}
