//! Gumbel-Max sketches: the FastGM engine and its two baselines.
//!
//! A sketch of `v` holds, for each register `j < k`, the element
//! `s_j = argmin_i -ln(a_{i,j}) / v_i` and the minimal value `y_j`. The
//! `a_{i,j}` come from keyed streams that depend on `i` but never on `v`, so
//! `P(s_j(u) = s_j(v))` equals the probability Jaccard similarity of `u` and
//! `v`.
//!
//! * [`sketch_fastgm`] generates each element's arrivals in ascending order
//!   ([`ProcessState`]), first filling every register cheaply and then pruning
//!   elements whose next arrival exceeds the largest register. Expected cost
//!   is `O(k ln k + n⁺)`.
//! * [`sketch_exhaustive`] runs every element's process to completion on the
//!   same streams. Its output is the definition of the correct answer for
//!   `sketch_fastgm`.
//! * [`sketch_gumbel_direct`] draws all `k * n⁺` uniforms directly. Same
//!   distribution as the other two but different random values; it is the
//!   `O(k n⁺)` timing baseline.
//!
//! Registers are 0-based. Ties in `y` between two elements resolve to the
//! smaller element index in every method.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::bbm::{scale_time, ProcessState};
use crate::error::{invalid, Error, Result};
use crate::keyed_rng::{derive_stream, Domain, StreamKey};
use crate::vector::{Index, SparseVector};

/// Marks a register that has not received any ball.
pub const EMPTY_REGISTER: Index = Index::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SketchConfig {
    /// Number of registers.
    pub k: u32,
    /// Per-round increment of the ball budget.
    pub delta: u64,
    /// Hash/gamma switch: a process uses the gamma step once it has at most
    /// `phi` empty bins.
    pub phi: f64,
    pub global_seed: u64,
}

impl SketchConfig {
    /// Defaults: `delta = k`, `phi = k / 10`.
    pub fn new(k: u32, global_seed: u64) -> Self {
        SketchConfig {
            k,
            delta: k as u64,
            phi: k as f64 / 10.0,
            global_seed,
        }
    }

    pub fn with_delta(mut self, delta: u64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        if self.delta == 0 {
            return Err(invalid("delta must be >= 1"));
        }
        if !(self.phi >= 0.0 && self.phi < self.k as f64) {
            return Err(invalid(format!("phi must lie in [0, k), got {}", self.phi)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GumbelMaxSketch {
    k: u32,
    global_seed: u64,
    s: Vec<Index>,
    y: Vec<f64>,
}

impl GumbelMaxSketch {
    /// A sketch with every register empty.
    pub fn empty(k: u32, global_seed: u64) -> Self {
        GumbelMaxSketch {
            k,
            global_seed,
            s: vec![EMPTY_REGISTER; k as usize],
            y: vec![f64::INFINITY; k as usize],
        }
    }

    pub fn from_parts(k: u32, global_seed: u64, s: Vec<Index>, y: Vec<f64>) -> Result<Self> {
        if s.len() != k as usize || y.len() != k as usize {
            return Err(invalid(format!(
                "register arrays have lengths {} and {}, expected k = {k}",
                s.len(),
                y.len()
            )));
        }
        Ok(GumbelMaxSketch {
            k,
            global_seed,
            s,
            y,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn global_seed(&self) -> u64 {
        self.global_seed
    }

    /// Winning element per register.
    pub fn s(&self) -> &[Index] {
        &self.s
    }

    /// Winning time per register.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn is_filled(&self, j: usize) -> bool {
        self.s[j] != EMPTY_REGISTER && self.y[j].is_finite()
    }

    pub fn first_unfilled(&self) -> Option<usize> {
        (0..self.k as usize).find(|&j| !self.is_filled(j))
    }

    pub fn is_complete(&self) -> bool {
        self.first_unfilled().is_none()
    }

    /// Offers `(time, element)` to register `j`; returns true if it won.
    #[inline]
    fn offer(&mut self, j: usize, time: f64, element: Index) -> bool {
        if beats(time, element, self.y[j], self.s[j]) {
            self.y[j] = time;
            self.s[j] = element;
            true
        } else {
            false
        }
    }

    pub(crate) fn compatible_with(&self, other: &GumbelMaxSketch) -> Result<()> {
        if self.k != other.k {
            return Err(Error::IncompatibleSketch(format!(
                "k differs: {} vs {}",
                self.k, other.k
            )));
        }
        if self.global_seed != other.global_seed {
            return Err(Error::IncompatibleSketch(format!(
                "seed differs: {} vs {}",
                self.global_seed, other.global_seed
            )));
        }
        Ok(())
    }
}

/// Strict lexicographic order on `(time, element)`.
#[inline]
fn beats(time: f64, element: Index, cur_time: f64, cur_element: Index) -> bool {
    match time.partial_cmp(&cur_time) {
        Some(Ordering::Less) => true,
        Some(Ordering::Equal) => element < cur_element,
        _ => false,
    }
}

/// Work counters for one sketch computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SketchStats {
    /// Balls emitted, counting every ball of a gamma batch.
    pub balls: u64,
    /// Generator calls (`next_balls` for FastGM, uniform draws for direct).
    pub calls: u64,
    /// Budget rounds spent in the fill phase.
    pub fill_rounds: u64,
    /// Budget rounds spent in the prune phase.
    pub prune_rounds: u64,
}

fn check_input(v: &SparseVector, cfg: &SketchConfig) -> Result<()> {
    cfg.validate()?;
    if v.is_empty() {
        return Err(Error::NoPositiveElements);
    }
    Ok(())
}

#[inline]
fn budget(r: u64, vstar: f64) -> u64 {
    (r as f64 * vstar).ceil() as u64
}

/// Smallest round `q > after` whose budget `ceil(q * delta * v*)` exceeds `z`.
fn next_round(after: u64, z: u64, vstar: f64, delta: u64) -> u64 {
    let grows = |q: u64| budget(q.saturating_mul(delta), vstar) > z;
    let guess = (z as f64 / (vstar * delta as f64)).floor();
    let mut q = if guess.is_finite() && guess < u64::MAX as f64 {
        (guess as u64).max(after + 1)
    } else {
        u64::MAX
    };
    // The float estimate can be off by a round either way.
    while q > after + 1 && grows(q - 1) {
        q -= 1;
    }
    while !grows(q) && q < u64::MAX {
        q += 1;
    }
    q
}

/// Number of whole `delta` steps that can be skipped from budget `r` without
/// any process in `procs` reaching its next ball. Skipped rounds would have
/// generated nothing.
fn idle_rounds<'a>(
    r: u64,
    delta: u64,
    procs: impl Iterator<Item = (&'a ProcessState, f64)>,
) -> u64 {
    let mut skip = u64::MAX;
    for (st, vstar) in procs {
        // Next ball needs ceil(R * v*) > z, i.e. R > z / v*.
        let needed = st.balls() as f64 / vstar;
        let steps = ((needed - r as f64) / delta as f64).floor();
        let steps = if steps.is_finite() && steps > 1.0 {
            (steps as u64).saturating_sub(1)
        } else {
            0
        };
        skip = skip.min(steps);
        if skip == 0 {
            break;
        }
    }
    if skip == u64::MAX {
        0
    } else {
        skip
    }
}

/// FastGM sketch of `v`.
pub fn sketch_fastgm(v: &SparseVector, cfg: &SketchConfig) -> Result<GumbelMaxSketch> {
    sketch_fastgm_with_stats(v, cfg).map(|(s, _)| s)
}

/// FastGM sketch of `v` together with its work counters.
pub fn sketch_fastgm_with_stats(
    v: &SparseVector,
    cfg: &SketchConfig,
) -> Result<(GumbelMaxSketch, SketchStats)> {
    check_input(v, cfg)?;
    let k = cfg.k;
    let seed = cfg.global_seed;
    let indices = v.indices();
    let weights = v.weights();
    let vstar = v.normalized_weights();
    let mut procs = indices
        .iter()
        .map(|_| ProcessState::new(k))
        .collect::<Result<Vec<_>>>()?;

    let mut sketch = GumbelMaxSketch::empty(k, seed);
    let mut stats = SketchStats::default();
    let mut unfilled = k as u64;
    let mut r = 0u64;

    // Fill phase: grow every process's ball budget in proportion to its
    // weight until each register has been hit at least once.
    while unfilled > 0 {
        r = r.saturating_add(cfg.delta);
        stats.fill_rounds += 1;
        let calls_before = stats.calls;
        for (p, st) in procs.iter_mut().enumerate() {
            let target = budget(r, vstar[p]);
            while !st.is_exhausted() && st.balls() < target {
                let ev = st.next_balls(cfg.phi, seed, indices[p] as u64)?;
                stats.calls += 1;
                let b = scale_time(ev.raw_time, k, weights[p]);
                let c = ev.bin as usize;
                let was_empty = !sketch.is_filled(c);
                if sketch.offer(c, b, indices[p]) && was_empty {
                    unfilled -= 1;
                }
            }
        }
        if stats.calls == calls_before && unfilled > 0 {
            let live = procs
                .iter()
                .zip(vstar.iter().copied())
                .filter(|(st, _)| !st.is_exhausted());
            r = r.saturating_add(idle_rounds(r, cfg.delta, live) * cfg.delta);
        }
    }

    // Prune phase: keep generating, dropping a process as soon as one of its
    // arrivals lands beyond the largest register (all later ones would too)
    // or it has no empty bins left.
    //
    // The budget is always `round * delta`. Instead of scanning every active
    // process each round, a min-heap orders them by (next round in which
    // their budget exceeds their ball count, position). Rounds are visited in
    // increasing order and processes within a round in index order, the same
    // schedule as a full scan, minus the processes that would do nothing.
    let mut j_star = argmax(sketch.y());
    let round_now = r / cfg.delta;
    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = (0..procs.len())
        .filter(|&p| !procs[p].is_exhausted())
        .map(|p| {
            Reverse((
                next_round(round_now, procs[p].balls(), vstar[p], cfg.delta),
                p,
            ))
        })
        .collect();
    let mut last_round = round_now;
    while let Some(Reverse((round, p))) = queue.pop() {
        if round != last_round {
            stats.prune_rounds += 1;
            last_round = round;
        }
        let st = &mut procs[p];
        let target = budget(round.saturating_mul(cfg.delta), vstar[p]);
        let mut keep = true;
        while !st.is_exhausted() && st.balls() < target {
            let ev = st.next_balls(cfg.phi, seed, indices[p] as u64)?;
            stats.calls += 1;
            let b = scale_time(ev.raw_time, k, weights[p]);
            if b > sketch.y()[j_star] {
                keep = false;
                break;
            }
            let c = ev.bin as usize;
            if sketch.offer(c, b, indices[p]) && c == j_star {
                j_star = argmax(sketch.y());
            }
        }
        if keep && !st.is_exhausted() {
            queue.push(Reverse((
                next_round(round, st.balls(), vstar[p], cfg.delta),
                p,
            )));
        }
    }

    stats.balls = procs
        .iter()
        .map(|st| st.balls())
        .fold(0, u64::saturating_add);
    Ok((sketch, stats))
}

/// Index of the largest value; ties go to the smallest index.
fn argmax(y: &[f64]) -> usize {
    let mut best = 0;
    for (j, &val) in y.iter().enumerate().skip(1) {
        if val > y[best] {
            best = j;
        }
    }
    best
}

/// Exact oracle: every element's process runs until all its bins are filled,
/// then each register takes the per-bin minimum.
pub fn sketch_exhaustive(v: &SparseVector, cfg: &SketchConfig) -> Result<GumbelMaxSketch> {
    sketch_exhaustive_with_stats(v, cfg).map(|(s, _)| s)
}

pub fn sketch_exhaustive_with_stats(
    v: &SparseVector,
    cfg: &SketchConfig,
) -> Result<(GumbelMaxSketch, SketchStats)> {
    check_input(v, cfg)?;
    let k = cfg.k;
    let mut sketch = GumbelMaxSketch::empty(k, cfg.global_seed);
    let mut stats = SketchStats::default();
    for (i, w) in v.iter() {
        let mut state = ProcessState::new(k)?;
        while !state.is_exhausted() {
            let ev = state.next_balls(cfg.phi, cfg.global_seed, i as u64)?;
            if ev.first_in_bin {
                sketch.offer(ev.bin as usize, scale_time(ev.raw_time, k, w), i);
            }
        }
        stats.balls = stats.balls.saturating_add(state.balls());
        stats.calls += state.calls();
    }
    Ok((sketch, stats))
}

/// Direct Gumbel-Max: `k` fresh exponentials per element.
pub fn sketch_gumbel_direct(v: &SparseVector, cfg: &SketchConfig) -> Result<GumbelMaxSketch> {
    sketch_gumbel_direct_with_stats(v, cfg).map(|(s, _)| s)
}

pub fn sketch_gumbel_direct_with_stats(
    v: &SparseVector,
    cfg: &SketchConfig,
) -> Result<(GumbelMaxSketch, SketchStats)> {
    check_input(v, cfg)?;
    let k = cfg.k as usize;
    let mut sketch = GumbelMaxSketch::empty(cfg.k, cfg.global_seed);
    for (i, w) in v.iter() {
        // Draw j of this counter-based stream is keyed by (seed, i, j).
        let mut rng =
            derive_stream(StreamKey::new(cfg.global_seed, i as u64, 0).in_domain(Domain::Direct));
        for j in 0..k {
            let b = -rng.next_uniform().ln() / w;
            sketch.offer(j, b, i);
        }
    }
    let draws = (v.nnz() as u64).saturating_mul(k as u64);
    let stats = SketchStats {
        balls: draws,
        calls: draws,
        ..SketchStats::default()
    };
    Ok((sketch, stats))
}

/// Index and value of the largest register; ties go to the smallest index.
pub fn max_register(sketch: &GumbelMaxSketch) -> Result<(usize, f64)> {
    if let Some(j) = sketch.first_unfilled() {
        return Err(Error::IncompleteSketch(j));
    }
    let j = argmax(sketch.y());
    Ok((j, sketch.y()[j]))
}

/// Sketching algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FastGm,
    Exhaustive,
    Direct,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::FastGm, Method::Exhaustive, Method::Direct];

    pub fn name(&self) -> &'static str {
        match self {
            Method::FastGm => "fastgm",
            Method::Exhaustive => "exhaustive",
            Method::Direct => "direct",
        }
    }

    pub fn sketch(&self, v: &SparseVector, cfg: &SketchConfig) -> Result<GumbelMaxSketch> {
        self.sketch_with_stats(v, cfg).map(|(s, _)| s)
    }

    pub fn sketch_with_stats(
        &self,
        v: &SparseVector,
        cfg: &SketchConfig,
    ) -> Result<(GumbelMaxSketch, SketchStats)> {
        match self {
            Method::FastGm => sketch_fastgm_with_stats(v, cfg),
            Method::Exhaustive => sketch_exhaustive_with_stats(v, cfg),
            Method::Direct => sketch_gumbel_direct_with_stats(v, cfg),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fastgm" => Ok(Method::FastGm),
            "exhaustive" => Ok(Method::Exhaustive),
            "direct" => Ok(Method::Direct),
            other => Err(invalid(format!(
                "unknown method '{other}' (expected fastgm, exhaustive or direct)"
            ))),
        }
    }
}

/// Sketches many vectors, optionally on a dedicated thread pool. Output order
/// always follows input order.
pub fn sketch_all(
    vectors: &[SparseVector],
    cfg: &SketchConfig,
    method: Method,
    threads: usize,
) -> Result<Vec<GumbelMaxSketch>> {
    use rayon::prelude::*;

    if threads <= 1 {
        return vectors.iter().map(|v| method.sketch(v, cfg)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("cannot start thread pool: {e}")))?;
    pool.install(|| vectors.par_iter().map(|v| method.sketch(v, cfg)).collect())
}
