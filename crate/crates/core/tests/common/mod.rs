#![allow(dead_code)]

use fastgm::keyed_rng::{derive_stream, Domain, RandomStream, StreamKey};
use fastgm::SparseVector;

/// Test-side randomness, kept apart from every stream the library consumes.
pub fn test_rng(tag: u64) -> RandomStream {
    derive_stream(StreamKey::new(0x7e57, tag, 0).in_domain(Domain::Synthetic))
}

/// Random sparse vector with `n` entries drawn from `0..span` and weights
/// spread over several orders of magnitude.
pub fn random_vector(rng: &mut RandomStream, n: usize, span: u32) -> SparseVector {
    let mut idx = std::collections::BTreeSet::new();
    while idx.len() < n {
        idx.insert(rng.next_int(span as u64).unwrap() as u32 - 1);
    }
    let entries = idx
        .into_iter()
        .map(|i| (i, (rng.next_uniform() * 8.0 - 4.0).exp()))
        .collect();
    SparseVector::new(entries).unwrap()
}

pub fn dense(values: &[f64]) -> SparseVector {
    SparseVector::from_dense(values).unwrap()
}

pub const EIGHT_WEIGHTS: [f64; 8] = [0.3, 0.1, 0.05, 0.05, 0.2, 0.07, 0.1, 0.03];

/// Prints one verdict line and fails the test if `pass` is false.
pub fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "[{}] criterion {id:>2}: {name} | {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}
