mod common;

use fastgm::bench::{gen_synthetic, run_bench, BenchGrid, WeightDist};
use fastgm::{sketch_fastgm_with_stats, Method, SketchConfig};

#[test]
fn speedup_grows_with_k() {
    let ks = vec![64u32, 512, 4096];
    let grid = BenchGrid {
        n_plus: vec![2000],
        k: ks.clone(),
        dists: vec![WeightDist::Exponential],
        methods: vec![Method::FastGm, Method::Direct],
        trials: 3,
        seed: 1,
    };
    let report = run_bench(&grid).unwrap();
    let speedups: Vec<f64> = ks
        .iter()
        .map(|&k| {
            report
                .find(Method::FastGm, 2000, k, WeightDist::Exponential)
                .unwrap()
                .speedup_vs_direct
                .unwrap()
        })
        .collect();
    assert!(speedups.windows(2).all(|w| w[1] > w[0]), "{speedups:?}");
    let direct = report
        .find(Method::Direct, 2000, 64, WeightDist::Exponential)
        .unwrap();
    assert_eq!(direct.speedup_vs_direct, Some(1.0));
}

#[test]
fn balls_grow_like_k_log_k() {
    // With few elements the k ln k term dominates; fit the slope of mean
    // balls against k ln k over a range of k.
    let n = 10;
    let ks = [256u32, 512, 1024, 2048, 4096];
    let points: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let mean = (0..5u64)
                .map(|t| {
                    let v = gen_synthetic(n, WeightDist::Uniform, t).unwrap();
                    sketch_fastgm_with_stats(&v, &SketchConfig::new(k, t))
                        .unwrap()
                        .1
                        .balls as f64
                })
                .sum::<f64>()
                / 5.0;
            (k as f64 * (k as f64).ln(), mean)
        })
        .collect();
    let (x0, y0) = points[0];
    let (x1, y1) = points[points.len() - 1];
    let slope = (y1 - y0) / (x1 - x0);
    assert!(
        (0.7..=1.3).contains(&slope),
        "slope {slope} over {points:?}"
    );
}

#[test]
fn work_counters_are_reported() {
    let grid = BenchGrid {
        n_plus: vec![100],
        k: vec![32],
        dists: vec![WeightDist::Uniform, WeightDist::Exponential],
        methods: vec![Method::FastGm, Method::Exhaustive, Method::Direct],
        trials: 3,
        seed: 2,
    };
    let report = run_bench(&grid).unwrap();
    assert_eq!(report.rows.len(), 6);
    for r in &report.rows {
        assert!(r.mean_ms >= 0.0 && r.balls > 0.0 && r.calls > 0.0);
        assert_eq!(r.trials, 3);
    }
    let direct = report
        .find(Method::Direct, 100, 32, WeightDist::Uniform)
        .unwrap();
    assert_eq!(direct.balls, 3200.0);
}
