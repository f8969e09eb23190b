mod common;

use common::{dense, random_vector, test_rng};
use fastgm::stats::{ks_critical, ks_statistic, ks_two_sample, ks_two_sample_critical};
use fastgm::{
    max_register, sketch_all, sketch_exhaustive, sketch_fastgm, sketch_fastgm_with_stats,
    sketch_gumbel_direct, Error, GumbelMaxSketch, Method, SketchConfig, SparseVector,
};

fn same_bits(a: &GumbelMaxSketch, b: &GumbelMaxSketch) -> bool {
    a.s() == b.s()
        && a.y()
            .iter()
            .zip(b.y())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

#[test]
fn fastgm_matches_exhaustive_for_any_budget_and_threshold() {
    let mut rng = test_rng(100);
    for case in 0..200u64 {
        let n = rng.next_int(40).unwrap() as usize;
        let k = rng.next_int(100).unwrap() as u32;
        let v = random_vector(&mut rng, n, 1000);
        let phi = rng.next_uniform() * (k as f64 - 1.0).max(0.0);
        let delta = rng.next_int(3 * k as u64).unwrap();
        let cfg = SketchConfig::new(k, case).with_phi(phi).with_delta(delta);
        let fast = sketch_fastgm(&v, &cfg).unwrap();
        let exact = sketch_exhaustive(&v, &cfg).unwrap();
        assert!(
            same_bits(&fast, &exact),
            "case {case}: n={n} k={k} phi={phi} delta={delta}"
        );
    }
}

#[test]
fn registers_are_exponential_in_total_weight() {
    let v = dense(&[0.5, 2.0, 0.25, 1.25]);
    let total = v.total();
    let k = 16u32;
    let mut ys = vec![Vec::new(); k as usize];
    for seed in 0..5000 {
        let sk = sketch_fastgm(&v, &SketchConfig::new(k, seed)).unwrap();
        for (j, &y) in sk.y().iter().enumerate() {
            ys[j].push(y);
        }
    }
    let crit = ks_critical(5000, 0.001);
    for (j, xs) in ys.iter().enumerate() {
        let d = ks_statistic(xs, |x| 1.0 - (-total * x).exp());
        assert!(d < crit, "register {j}: D = {d}");
    }
}

#[test]
fn direct_and_fastgm_agree_in_distribution() {
    let v = dense(&[3.0, 1.0, 0.5, 0.5, 2.0]);
    let k = 8u32;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let (mut ca, mut cb) = ([0u64; 5], [0u64; 5]);
    for seed in 0..5000 {
        let cfg = SketchConfig::new(k, seed);
        let f = sketch_fastgm(&v, &cfg).unwrap();
        let d = sketch_gumbel_direct(&v, &cfg).unwrap();
        a.push(f.y()[0]);
        b.push(d.y()[0]);
        for &s in f.s() {
            ca[s as usize] += 1;
        }
        for &s in d.s() {
            cb[s as usize] += 1;
        }
    }
    let crit = ks_two_sample_critical(a.len(), b.len(), 0.001);
    assert!(ks_two_sample(&a, &b) < crit);
    let n = 40_000.0;
    for i in 0..5 {
        let p = v.weights()[i] / v.total();
        let sigma = (p * (1.0 - p) / n).sqrt();
        assert!((ca[i] as f64 / n - p).abs() < 4.0 * sigma);
        assert!((cb[i] as f64 / n - p).abs() < 4.0 * sigma);
    }
}

#[test]
fn sketches_depend_only_on_indices_and_weights() {
    let v = SparseVector::new(vec![(900, 1.0), (3, 0.5), (40, 2.0)]).unwrap();
    let cfg = SketchConfig::new(64, 77);
    let a = sketch_fastgm(&v, &cfg).unwrap();
    let b = sketch_fastgm(&v.clone().with_dim(10_000), &cfg).unwrap();
    assert!(same_bits(&a, &b));
    assert!(a.s().iter().all(|s| [3, 40, 900].contains(s)));
    let other_seed = sketch_fastgm(&v, &SketchConfig::new(64, 78)).unwrap();
    assert_ne!(a.y(), other_seed.y());
}

#[test]
fn single_element_owns_every_register() {
    let v = SparseVector::new(vec![(12, 4.0)]).unwrap();
    let sk = sketch_fastgm(&v, &SketchConfig::new(33, 1)).unwrap();
    assert!(sk.s().iter().all(|&s| s == 12));
    assert!(sk.is_complete());
}

#[test]
fn invalid_inputs_are_rejected() {
    let v = dense(&[1.0]);
    assert!(matches!(
        sketch_fastgm(&v, &SketchConfig::new(0, 1)),
        Err(Error::InvalidArgument(_))
    ));
    assert!(sketch_fastgm(&v, &SketchConfig::new(4, 1).with_phi(4.0)).is_err());
    assert!(sketch_fastgm(&v, &SketchConfig::new(4, 1).with_delta(0)).is_err());
    let empty = SparseVector::new(vec![]).unwrap();
    assert!(matches!(
        sketch_fastgm(&empty, &SketchConfig::new(4, 1)),
        Err(Error::NoPositiveElements)
    ));
    assert!(SparseVector::new(vec![(1, 0.0)]).is_err());
    assert!(SparseVector::new(vec![(1, 1.0), (1, 2.0)]).is_err());
    assert!(SparseVector::new(vec![(1, f64::NAN)]).is_err());
}

#[test]
fn work_stays_near_k_log_k_plus_n() {
    let mut rng = test_rng(101);
    for &(n, k) in &[(10usize, 512u32), (5000, 16), (2000, 2000)] {
        let v = random_vector(&mut rng, n, 100_000);
        let (_, st) = sketch_fastgm_with_stats(&v, &SketchConfig::new(k, 3)).unwrap();
        let bound = k as f64 * (k as f64).ln() + n as f64;
        assert!(
            (st.balls as f64) < 4.0 * bound,
            "n={n} k={k}: {} balls",
            st.balls
        );
    }
}

#[test]
fn max_register_picks_largest_value() {
    let sk = GumbelMaxSketch::from_parts(4, 0, vec![1, 2, 3, 4], vec![0.5, 2.0, 2.0, 1.0]).unwrap();
    assert_eq!(max_register(&sk).unwrap(), (1, 2.0));
}

#[test]
fn batch_sketching_preserves_order_across_threads() {
    let mut rng = test_rng(102);
    let vs: Vec<SparseVector> = (0..50)
        .map(|n| random_vector(&mut rng, 1 + n % 20, 300))
        .collect();
    let cfg = SketchConfig::new(32, 4);
    for method in [Method::FastGm, Method::Exhaustive, Method::Direct] {
        let one = sketch_all(&vs, &cfg, method, 1).unwrap();
        let many = sketch_all(&vs, &cfg, method, 4).unwrap();
        assert_eq!(one, many);
        for (v, sk) in vs.iter().zip(&one) {
            assert_eq!(*sk, method.sketch(v, &cfg).unwrap());
        }
    }
    assert_eq!("fastgm".parse::<Method>().unwrap(), Method::FastGm);
    assert!("nope".parse::<Method>().is_err());
}
