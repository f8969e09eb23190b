//! Node embeddings from sketches of self-loop-augmented adjacency rows.
//!
//! Order 1 sketches each SLA row directly. For order `r > 1`, row `u` is
//! first augmented with `decay * hist(w)` for every neighbor `w`, where
//! `hist(w)` is the relative frequency of each node id among the `k`
//! registers of `w`'s order `r - 1` sketch, and then sketched again.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::similarity::estimate_similarity;
use crate::sketch::{sketch_fastgm, GumbelMaxSketch, SketchConfig};
use crate::vector::{Index, SparseVector};

pub const DEFAULT_DECAY: f64 = 0.005;
pub const DEFAULT_ORDER: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: Index,
    pub to: Index,
    pub weight: f64,
}

impl Edge {
    pub fn new(from: Index, to: Index, weight: f64) -> Self {
        Edge { from, to, weight }
    }
}

/// Self-loop-augmented adjacency rows of an undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaGraph {
    rows: Vec<SparseVector>,
}

impl SlaGraph {
    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn row(&self, node: usize) -> &SparseVector {
        &self.rows[node]
    }

    /// Neighbors of `node`, excluding itself.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = Index> + '_ {
        self.rows[node]
            .indices()
            .iter()
            .copied()
            .filter(move |&w| w as usize != node)
    }
}

/// Builds symmetric adjacency rows and adds `self_weight` on the diagonal.
/// Repeated edges accumulate; an input self-loop adds to the diagonal once.
pub fn build_sla(edges: &[Edge], n: usize, self_weight: f64) -> Result<SlaGraph> {
    if !(self_weight.is_finite() && self_weight > 0.0) {
        return Err(invalid(format!(
            "self-loop weight must be positive, got {self_weight}"
        )));
    }
    if n >= Index::MAX as usize {
        return Err(invalid(format!("too many nodes: {n}")));
    }
    let mut acc: Vec<BTreeMap<Index, f64>> = vec![BTreeMap::new(); n];
    for (u, row) in acc.iter_mut().enumerate() {
        row.insert(u as Index, self_weight);
    }
    for e in edges {
        if e.from as usize >= n || e.to as usize >= n {
            return Err(invalid(format!(
                "edge ({}, {}) references a node >= {n}",
                e.from, e.to
            )));
        }
        if !(e.weight.is_finite() && e.weight >= 0.0) {
            return Err(invalid(format!(
                "edge ({}, {}) has invalid weight {}",
                e.from, e.to, e.weight
            )));
        }
        *acc[e.from as usize].entry(e.to).or_insert(0.0) += e.weight;
        if e.from != e.to {
            *acc[e.to as usize].entry(e.from).or_insert(0.0) += e.weight;
        }
    }
    let rows = acc
        .into_iter()
        .map(|row| SparseVector::new(row.into_iter().filter(|&(_, w)| w > 0.0).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SlaGraph { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbedding {
    pub order: u32,
    pub sketches: Vec<GumbelMaxSketch>,
}

/// Order-`order` embedding of every node.
pub fn embed_nodes(
    g: &SlaGraph,
    cfg: &SketchConfig,
    order: u32,
    decay: f64,
) -> Result<NodeEmbedding> {
    if order == 0 {
        return Err(invalid("embedding order must be >= 1"));
    }
    if !(decay.is_finite() && decay > 0.0) {
        return Err(invalid(format!("decay must be positive, got {decay}")));
    }
    cfg.validate()?;
    let mut sketches = sketch_rows(g.rows(), cfg)?;
    for _ in 1..order {
        let augmented = (0..g.node_count())
            .into_par_iter()
            .map(|u| augment_row(g, u, &sketches, decay))
            .collect::<Result<Vec<_>>>()?;
        sketches = sketch_rows(&augmented, cfg)?;
    }
    Ok(NodeEmbedding { order, sketches })
}

fn sketch_rows(rows: &[SparseVector], cfg: &SketchConfig) -> Result<Vec<GumbelMaxSketch>> {
    rows.par_iter().map(|row| sketch_fastgm(row, cfg)).collect()
}

fn augment_row(
    g: &SlaGraph,
    u: usize,
    prev: &[GumbelMaxSketch],
    decay: f64,
) -> Result<SparseVector> {
    let mut acc: BTreeMap<Index, f64> = g.row(u).iter().collect();
    for w in g.neighbors(u) {
        let sk = &prev[w as usize];
        let share = decay / sk.k() as f64;
        for &node in sk.s() {
            *acc.entry(node).or_insert(0.0) += share;
        }
    }
    SparseVector::new(acc.into_iter().collect())
}

/// Fraction of registers on which two node embeddings agree.
pub fn hamming_similarity(a: &GumbelMaxSketch, b: &GumbelMaxSketch) -> Result<f64> {
    estimate_similarity(a, b).map(|e| e.value)
}
