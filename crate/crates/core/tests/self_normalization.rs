use lrdcp_core::lrd_sim::replication_rng;
use lrdcp_core::scores::{CustomScore, ScoreSpec};
use lrdcp_core::self_norm::{segment_partial_sums, sn_cusum_stat, sn_rank_stat, sn_trajectory};
use rand::Rng;

/// `T_{k,n}` straight from the definition, two-pass sums per segment.
fn direct(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let sq = |j: usize, k: usize| -> f64 {
        segment_partial_sums(v, j, k)
            .unwrap()
            .iter()
            .map(|s| s * s)
            .sum()
    };
    (1..n)
        .map(|k| {
            let num = segment_partial_sums(v, 1, n).unwrap()[k - 1];
            let den = ((sq(1, k) + sq(k + 1, n)) / n as f64).sqrt();
            num / den
        })
        .collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol * (1.0 + y.abs()), "k={} {x} vs {y}", k + 1);
    }
}

#[test]
fn fast_path_matches_direct_formula() {
    let mut rng = replication_rng(31, 0);
    for case in 0..100 {
        let n = [10, 50, 200][case % 3];
        let shift: f64 = rng.random_range(-2.0..2.0);
        let v: Vec<f64> = (0..n)
            .map(|i| rng.random_range(-1.0..1.0) + if i > n / 3 { shift } else { 0.0 })
            .collect();
        let t = sn_trajectory(&v).unwrap();
        assert!(t.degenerate_ks().is_empty());
        assert_close(t.values(), &direct(&v), 1e-8);
    }
}

#[test]
fn alternating_series_matches_direct_formula() {
    let v: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect();
    assert_close(sn_trajectory(&v).unwrap().values(), &direct(&v), 1e-10);
}

#[test]
fn shifted_halves_example() {
    let x: Vec<f64> = (1..=5).chain(11..=15).map(f64::from).collect();
    let t = sn_rank_stat(&x, &ScoreSpec::wilcoxon()).unwrap();
    let scores: Vec<f64> = (1..=10).map(|i| i as f64 / 11.0).collect();
    let oracle = direct(&scores);
    assert_close(t.values(), &oracle, 1e-10);
    let max = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((t.max_abs() - max).abs() < 1e-10);
    assert_eq!(t.argmax_k(), 5);
}

#[test]
fn cusum_example_matches_direct_formula() {
    let x = [0.0, 0.0, 0.0, 0.0, 4.0, 4.0, 4.0, 5.0];
    let t = sn_cusum_stat(&x).unwrap();
    assert_close(t.values(), &direct(&x), 1e-10);
}

#[test]
fn affine_maps_of_data() {
    let mut rng = replication_rng(32, 0);
    let x: Vec<f64> = (0..120).map(|_| rng.random_range(-3.0..3.0)).collect();
    let base = sn_cusum_stat(&x).unwrap();
    for (a, b) in [(3.0, 7.0), (0.01, -50.0), (-1.0, 0.0), (-2.5, 1.0), (1e6, 0.0)] {
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let t = sn_cusum_stat(&y).unwrap();
        assert!((t.max_abs() - base.max_abs()).abs() < 1e-9);
        for (u, w) in base.values().iter().zip(t.values()) {
            let expect = if a > 0.0 { *u } else { -u };
            assert!((w - expect).abs() < 1e-9);
        }
    }
}

#[test]
fn scaling_scores_is_harmless() {
    let mut rng = replication_rng(33, 0);
    let v: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..1.0)).collect();
    let big: Vec<f64> = v.iter().map(|x| x * 1e6).collect();
    assert_close(
        sn_trajectory(&v).unwrap().values(),
        sn_trajectory(&big).unwrap().values(),
        1e-9,
    );
}

#[test]
fn identity_scores_give_the_wilcoxon_statistic() {
    let mut rng = replication_rng(34, 0);
    let x: Vec<f64> = (0..80).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = x.len() as f64;
    let identity = ScoreSpec::custom(
        "identity",
        CustomScore::from_fn(move |u| u * (n + 1.0), None).unwrap(),
    );
    let a = sn_rank_stat(&x, &ScoreSpec::wilcoxon()).unwrap();
    let b = sn_rank_stat(&x, &identity).unwrap();
    assert!((a.max_abs() - b.max_abs()).abs() < 1e-9);
    assert_eq!(a.argmax_k(), b.argmax_k());
}

#[test]
fn median_scores_with_degenerate_splits_stay_finite() {
    let x = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0];
    let t = sn_rank_stat(&x, &ScoreSpec::median()).unwrap();
    assert!(t.values().iter().all(|v| v.is_finite()));
    assert!(t.degenerate_ks().contains(&3));
}
