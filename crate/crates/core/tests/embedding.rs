mod common;

use fastgm::{build_sla, embed_nodes, hamming_similarity, Edge, SketchConfig};

fn cycle4() -> Vec<Edge> {
    (0..4).map(|u| Edge::new(u, (u + 1) % 4, 1.0)).collect()
}

#[test]
fn adjacency_is_symmetric_with_self_loops() {
    let g = build_sla(
        &[
            Edge::new(0, 1, 2.0),
            Edge::new(0, 1, 1.0),
            Edge::new(2, 2, 5.0),
        ],
        4,
        1.0,
    )
    .unwrap();
    assert_eq!(g.row(0).get(1), Some(3.0));
    assert_eq!(g.row(1).get(0), Some(3.0));
    assert_eq!(g.row(0).get(0), Some(1.0));
    assert_eq!(g.row(2).get(2), Some(6.0));
    assert_eq!(g.row(3).nnz(), 1);
    assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1]);
    assert!(build_sla(&[Edge::new(0, 9, 1.0)], 4, 1.0).is_err());
    assert!(build_sla(&[], 4, 0.0).is_err());
}

#[test]
fn four_cycle_is_symmetric_on_average() {
    let g = build_sla(&cycle4(), 4, 1.0).unwrap();
    let (mut adjacent, mut opposite) = (Vec::new(), Vec::new());
    for seed in 0..200 {
        let e = embed_nodes(&g, &SketchConfig::new(64, seed), 3, 0.005).unwrap();
        let sim = |a: usize, b: usize| hamming_similarity(&e.sketches[a], &e.sketches[b]).unwrap();
        adjacent.push((sim(0, 1) + sim(1, 2) + sim(2, 3) + sim(3, 0)) / 4.0);
        opposite.push((sim(0, 2) + sim(1, 3)) / 2.0);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&adjacent) > 0.2 && mean(&opposite) > 0.2);
    let per_edge: Vec<f64> = (0..4)
        .map(|u| {
            (0..200)
                .map(|seed| {
                    let e = embed_nodes(&g, &SketchConfig::new(64, seed), 3, 0.005).unwrap();
                    hamming_similarity(&e.sketches[u], &e.sketches[(u + 1) % 4]).unwrap()
                })
                .sum::<f64>()
                / 200.0
        })
        .collect();
    let (lo, hi) = per_edge
        .iter()
        .fold((1.0f64, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    assert!(hi - lo < 0.05, "edge similarities {per_edge:?}");
}

#[test]
fn two_cliques_separate() {
    let mut edges = Vec::new();
    for base in [0u32, 4] {
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push(Edge::new(base + a, base + b, 1.0));
            }
        }
    }
    edges.push(Edge::new(3, 4, 1.0));
    let g = build_sla(&edges, 8, 1.0).unwrap();
    let e = embed_nodes(&g, &SketchConfig::new(256, 5), 5, 0.005).unwrap();
    let sim = |a: usize, b: usize| hamming_similarity(&e.sketches[a], &e.sketches[b]).unwrap();
    assert!(sim(0, 1) > sim(0, 5) + 0.3);
    assert!(sim(6, 7) > sim(1, 6) + 0.3);
}

#[test]
fn embedding_is_deterministic_and_validates() {
    let g = build_sla(&cycle4(), 4, 1.0).unwrap();
    let cfg = SketchConfig::new(16, 2);
    assert_eq!(
        embed_nodes(&g, &cfg, 4, 0.01).unwrap(),
        embed_nodes(&g, &cfg, 4, 0.01).unwrap()
    );
    assert!(embed_nodes(&g, &cfg, 0, 0.01).is_err());
    assert!(embed_nodes(&g, &cfg, 2, -1.0).is_err());
    assert_eq!(embed_nodes(&g, &cfg, 1, 0.01).unwrap().order, 1);
}
