//! Consistent Gumbel-Max sketches of nonnegative sparse vectors.
//!
//! [`sketch_fastgm`] produces `k` Gumbel-Max variables of a vector in
//! expected `O(k ln k + n⁺)` time by generating each element's exponential
//! variables in ascending order and stopping early. Sketches of two vectors
//! built with the same seed collide on a register with probability equal to
//! their probability Jaccard similarity ([`jaccard_p`]).
//!
//! ```
//! use fastgm::{estimate_similarity, sketch_fastgm, SketchConfig, SparseVector};
//!
//! let cfg = SketchConfig::new(256, 42);
//! let u = SparseVector::from_dense(&[2.0, 1.0]).unwrap();
//! let v = SparseVector::from_dense(&[1.0, 1.0]).unwrap();
//! let est = estimate_similarity(&sketch_fastgm(&u, &cfg).unwrap(), &sketch_fastgm(&v, &cfg).unwrap()).unwrap();
//! assert!((est.value - 5.0 / 6.0).abs() < 0.15);
//! ```

pub mod bbm;
pub mod bench;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod io;
pub mod keyed_rng;
pub mod similarity;
pub mod sketch;
pub mod stats;
pub mod vector;

pub use bbm::{
    bbm_hash_full, bbm_mix_full, bbm_permutation_full, get_next_balls, BallEvent, ProcessState,
};
pub use embedding::{build_sla, embed_nodes, hamming_similarity, Edge, NodeEmbedding, SlaGraph};
pub use error::{Error, Result};
pub use similarity::{
    estimate_similarity, jaccard_p, jaccard_w, rmse, ExactSimilarity, SimilarityEstimate,
};
pub use sketch::{
    max_register, sketch_all, sketch_exhaustive, sketch_exhaustive_with_stats, sketch_fastgm,
    sketch_fastgm_with_stats, sketch_gumbel_direct, GumbelMaxSketch, Method, SketchConfig,
    SketchStats,
};
pub use vector::{Index, SparseVector};
