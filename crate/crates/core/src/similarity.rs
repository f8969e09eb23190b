//! Exact probability / weighted Jaccard similarity and sketch-based estimates.

use crate::error::{invalid, Result};
use crate::sketch::{GumbelMaxSketch, EMPTY_REGISTER};
use crate::vector::SparseVector;

/// An exact similarity value. `empty_input` is set when a vector had no
/// positive entries, in which case `value` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSimilarity {
    pub value: f64,
    pub empty_input: bool,
}

/// Union of the supports of `u` and `v` as `(u_l, v_l)` pairs in index
/// order; absent entries are 0.
fn merged(u: &SparseVector, v: &SparseVector) -> Vec<(f64, f64)> {
    let (ui, uw) = (u.indices(), u.weights());
    let (vi, vw) = (v.indices(), v.weights());
    let mut out = Vec::with_capacity(ui.len() + vi.len());
    let (mut a, mut b) = (0, 0);
    while a < ui.len() || b < vi.len() {
        if b == vi.len() || (a < ui.len() && ui[a] < vi[b]) {
            out.push((uw[a], 0.0));
            a += 1;
        } else if a == ui.len() || vi[b] < ui[a] {
            out.push((0.0, vw[b]));
            b += 1;
        } else {
            out.push((uw[a], vw[b]));
            a += 1;
            b += 1;
        }
    }
    out
}

/// Probability Jaccard similarity
/// `Σ_{i: u_i, v_i > 0} 1 / Σ_l max(u_l / u_i, v_l / v_i)`.
///
/// For a fixed `i`, `max(u_l/u_i, v_l/v_i)` is `u_l/u_i` exactly when
/// `u_l/v_l >= u_i/v_i`. Sorting the union by `u_l/v_l` turns every inner sum
/// into one suffix sum of `u` plus one prefix sum of `v`, so the whole
/// computation is `O(n log n)`.
pub fn jaccard_p(u: &SparseVector, v: &SparseVector) -> ExactSimilarity {
    if u.is_empty() || v.is_empty() {
        return ExactSimilarity {
            value: 0.0,
            empty_input: true,
        };
    }
    let mut entries = merged(u, v);
    // Stable sort keeps index order among equal ratios.
    entries.sort_by(|a, b| (a.0 / a.1).total_cmp(&(b.0 / b.1)));

    let n = entries.len();
    let mut suffix_u = vec![0.0; n + 1];
    for p in (0..n).rev() {
        suffix_u[p] = suffix_u[p + 1] + entries[p].0;
    }
    let mut value = 0.0;
    let mut prefix_v = 0.0;
    for (p, &(ui, vi)) in entries.iter().enumerate() {
        if ui > 0.0 && vi > 0.0 {
            value += 1.0 / (suffix_u[p] / ui + prefix_v / vi);
        }
        prefix_v += vi;
    }
    ExactSimilarity {
        value: value.min(1.0),
        empty_input: false,
    }
}

/// Weighted Jaccard similarity `Σ min(u_i, v_i) / Σ max(u_i, v_i)`; 0 when
/// both vectors are empty.
pub fn jaccard_w(u: &SparseVector, v: &SparseVector) -> ExactSimilarity {
    let empty_input = u.is_empty() || v.is_empty();
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in merged(u, v) {
        num += a.min(b);
        den += a.max(b);
    }
    let value = if den > 0.0 { num / den } else { 0.0 };
    ExactSimilarity { value, empty_input }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityEstimate {
    /// `matches / k`.
    pub value: f64,
    pub matches: u32,
    pub k: u32,
}

/// Fraction of registers whose winning element agrees. Both sketches must
/// share `k` and the seed; an empty register never matches.
pub fn estimate_similarity(a: &GumbelMaxSketch, b: &GumbelMaxSketch) -> Result<SimilarityEstimate> {
    a.compatible_with(b)?;
    let matches = a
        .s()
        .iter()
        .zip(b.s())
        .filter(|(x, y)| x == y && **x != EMPTY_REGISTER)
        .count() as u32;
    Ok(SimilarityEstimate {
        value: matches as f64 / a.k() as f64,
        matches,
        k: a.k(),
    })
}

/// Root mean square error of `estimates` around `truth`.
pub fn rmse(estimates: &[f64], truth: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(invalid("rmse needs at least one estimate"));
    }
    let sq: f64 = estimates.iter().map(|e| (e - truth).powi(2)).sum();
    Ok((sq / estimates.len() as f64).sqrt())
}
