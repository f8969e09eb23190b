//! Balls-and-bins generators.
//!
//! For one element `i` with weight `v_i`, the `k` values `-ln(a_{i,j}) / v_i`
//! are the first-arrival times of `k` independent rate-`v_i` Poisson
//! processes. Equivalently, balls arrive at rate `k * v_i` and each lands in a
//! uniformly random bin; a bin's value is the time of its first ball. The
//! generators here produce those first arrivals in ascending time order so a
//! caller can stop as soon as later arrivals cannot matter.
//!
//! Three variants are provided:
//!
//! * [`bbm_hash_full`]: one ball per iteration, uniform bin choice
//!   (coupon-collector cost, about `k ln k` iterations).
//! * [`bbm_permutation_full`]: skips straight to the next empty bin with a
//!   geometric batch size and a Gamma-distributed time increment; exactly `k`
//!   iterations.
//! * [`bbm_mix_full`]: the hash step while more than `phi` bins are empty,
//!   the permutation step afterwards. [`ProcessState::next_balls`] is its
//!   incremental form and is what the sketch engine drives.
//!
//! Bins are 0-based in this API.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::error::{invalid, Error, Result};
use crate::keyed_rng::{derive_stream, Domain, StreamKey};

/// Converts a unit-rate arrival time of process `i` into the time scale of
/// weight `v`: `raw / (k * v)`. Every sketcher goes through this one
/// expression so oracle and fast paths agree bit for bit.
#[inline]
pub fn scale_time(raw: f64, k: u32, v: f64) -> f64 {
    raw / (k as f64 * v)
}

#[derive(Default)]
struct IdentityHasher(u64);

impl Hasher for IdentityHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u32 keys are hashed")
    }
    fn write_u32(&mut self, n: u32) {
        self.0 = (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type PositionMap = HashMap<u32, u32, BuildHasherDefault<IdentityHasher>>;

/// Dense vectors below this `k` are always cheaper than a map.
const DENSE_K: u32 = 256;

/// A permutation of `0..k` that starts as the identity and stores only the
/// displaced positions until enough swaps make a dense array cheaper.
///
/// Most processes in a large sketch receive a handful of balls, so keeping a
/// full `k`-entry array per element would dominate memory at `n⁺ * k`.
#[derive(Debug, Clone)]
enum Permutation {
    Sparse { k: u32, moved: PositionMap },
    Dense(Vec<u32>),
}

impl Permutation {
    fn identity(k: u32) -> Self {
        if k <= DENSE_K {
            Permutation::Dense((0..k).collect())
        } else {
            Permutation::Sparse {
                k,
                moved: PositionMap::default(),
            }
        }
    }

    #[inline]
    fn get(&self, pos: u32) -> u32 {
        match self {
            Permutation::Dense(p) => p[pos as usize],
            Permutation::Sparse { moved, .. } => moved.get(&pos).copied().unwrap_or(pos),
        }
    }

    fn swap(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        match self {
            Permutation::Dense(p) => p.swap(a as usize, b as usize),
            Permutation::Sparse { k, moved } => {
                let va = moved.get(&a).copied().unwrap_or(a);
                let vb = moved.get(&b).copied().unwrap_or(b);
                moved.insert(a, vb);
                moved.insert(b, va);
                if moved.len() as u32 > *k / 8 {
                    let mut dense: Vec<u32> = (0..*k).collect();
                    for (&pos, &val) in moved.iter() {
                        dense[pos as usize] = val;
                    }
                    *self = Permutation::Dense(dense);
                }
            }
        }
    }

    fn to_vec(&self) -> Vec<u32> {
        match self {
            Permutation::Dense(p) => p.clone(),
            Permutation::Sparse { k, .. } => (0..*k).map(|pos| self.get(pos)).collect(),
        }
    }
}

/// Incremental simulation state of one element's ball process.
#[derive(Debug, Clone)]
pub struct ProcessState {
    k: u32,
    /// Unit-rate time of the latest ball.
    x: f64,
    /// Balls emitted so far.
    z: u64,
    /// Bins of this process still empty; they occupy positions `0..m` of `perm`.
    m: u32,
    perm: Permutation,
    calls: u64,
}

/// One `next_balls` step: `batch` balls arrived, the last at `raw_time`
/// (unit-rate clock), landing in `bin`. `first_in_bin` is false only for a
/// hash-step ball that hit a bin this process had already filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEvent {
    pub raw_time: f64,
    pub bin: u32,
    pub batch: u64,
    pub first_in_bin: bool,
}

/// Which branch a step took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Hash,
    Gamma,
}

impl ProcessState {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        Ok(ProcessState {
            k,
            x: 0.0,
            z: 0,
            m: k,
            perm: Permutation::identity(k),
            calls: 0,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn raw_time(&self) -> f64 {
        self.x
    }

    pub fn balls(&self) -> u64 {
        self.z
    }

    pub fn empty_bins(&self) -> u32 {
        self.m
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn is_exhausted(&self) -> bool {
        self.m == 0
    }

    /// Current bin order; positions `0..empty_bins()` hold the empty bins.
    pub fn permutation(&self) -> Vec<u32> {
        self.perm.to_vec()
    }

    /// The branch the next call will take for threshold `phi`.
    pub fn branch(&self, phi: f64) -> Branch {
        if self.m == self.k || self.m as f64 > phi {
            Branch::Hash
        } else {
            Branch::Gamma
        }
    }

    /// Emits the next ball (hash step) or batch of balls ending at the next
    /// empty bin (gamma step).
    ///
    /// The stream for each call is keyed by `(global_seed, i, z)` where `z`
    /// is the number of balls emitted before the call, so the sequence of
    /// events depends only on `(global_seed, i, k, phi)`.
    pub fn next_balls(&mut self, phi: f64, global_seed: u64, i: u64) -> Result<BallEvent> {
        if self.m == 0 {
            return Err(Error::ExhaustedProcess(i));
        }
        let mut rng = derive_stream(StreamKey::new(global_seed, i, self.z));
        let u = rng.next_uniform();
        self.calls += 1;
        match self.branch(phi) {
            Branch::Hash => {
                self.x += -u.ln();
                self.z += 1;
                let j = rng.next_int_unchecked(self.k as u64) as u32 - 1;
                if j < self.m {
                    let last = self.m - 1;
                    self.perm.swap(j, last);
                    self.m = last;
                    Ok(self.event(self.perm.get(last), 1, true))
                } else {
                    Ok(self.event(self.perm.get(j), 1, false))
                }
            }
            Branch::Gamma => {
                let p = self.m as f64 / self.k as f64;
                let batch = ((u.ln() / (-p).ln_1p()).floor() as u64).saturating_add(1);
                self.x += rng.next_gamma_unchecked(batch);
                self.z = self.z.saturating_add(batch);
                let j = rng.next_int_unchecked(self.m as u64) as u32 - 1;
                let last = self.m - 1;
                self.perm.swap(j, last);
                self.m = last;
                Ok(self.event(self.perm.get(last), batch, true))
            }
        }
    }

    fn event(&self, bin: u32, batch: u64, first_in_bin: bool) -> BallEvent {
        BallEvent {
            raw_time: self.x,
            bin,
            batch,
            first_in_bin,
        }
    }
}

/// Free-function form of [`ProcessState::next_balls`].
pub fn get_next_balls(
    state: &mut ProcessState,
    phi: f64,
    global_seed: u64,
    i: u64,
) -> Result<BallEvent> {
    state.next_balls(phi, global_seed, i)
}

/// Result of a full run of a reference generator.
#[derive(Debug, Clone)]
pub struct BbmRun {
    /// Scaled first-arrival time per bin.
    pub times: Vec<f64>,
    /// Loop iterations (generator calls) until every bin was filled.
    pub iterations: u64,
    /// Total balls emitted.
    pub balls: u64,
    /// Final bin permutation (permutation variant only; empty otherwise).
    pub permutation: Vec<u32>,
}

fn check_weight(v: f64, k: u32) -> Result<()> {
    if k == 0 {
        return Err(invalid("k must be >= 1"));
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(format!(
            "weight must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Unscaled first-arrival times of process `i`, indexed by bin.
pub fn bbm_mix_raw(i: u64, k: u32, phi: f64, global_seed: u64) -> Result<Vec<f64>> {
    let mut state = ProcessState::new(k)?;
    let mut raw = vec![f64::NAN; k as usize];
    while !state.is_exhausted() {
        let ev = state.next_balls(phi, global_seed, i)?;
        if ev.first_in_bin {
            raw[ev.bin as usize] = ev.raw_time;
        }
    }
    Ok(raw)
}

/// All `k` first-arrival times of element `i` with weight `v_i`, via BBM-Mix.
pub fn bbm_mix_full(i: u64, v_i: f64, k: u32, phi: f64, global_seed: u64) -> Result<Vec<f64>> {
    check_weight(v_i, k)?;
    Ok(bbm_mix_raw(i, k, phi, global_seed)?
        .into_iter()
        .map(|x| scale_time(x, k, v_i))
        .collect())
}

/// Reference BBM-Hash: one ball per iteration into a uniformly chosen bin
/// until no bin is empty.
pub fn bbm_hash_full(i: u64, v_i: f64, k: u32, global_seed: u64) -> Result<BbmRun> {
    check_weight(v_i, k)?;
    let mut times = vec![f64::INFINITY; k as usize];
    let mut empty = k;
    let mut x = 0.0;
    let mut iterations = 0u64;
    while empty > 0 {
        let mut rng =
            derive_stream(StreamKey::new(global_seed, i, iterations).in_domain(Domain::Hash));
        let u = rng.next_uniform();
        x -= u.ln() / (k as f64 * v_i);
        let j = (rng.next_int_unchecked(k as u64) - 1) as usize;
        if times[j].is_infinite() {
            empty -= 1;
            times[j] = x;
        }
        iterations += 1;
    }
    Ok(BbmRun {
        times,
        iterations,
        balls: iterations,
        permutation: Vec::new(),
    })
}

/// Reference BBM-Permutation: every iteration fills one empty bin chosen
/// uniformly, with a geometric number of balls arriving together.
pub fn bbm_permutation_full(i: u64, v_i: f64, k: u32, global_seed: u64) -> Result<BbmRun> {
    check_weight(v_i, k)?;
    let mut times = vec![f64::NAN; k as usize];
    let mut perm: Vec<u32> = (0..k).collect();
    let mut m = k;
    let mut x = 0.0;
    let mut iterations = 0u64;
    let mut balls = 0u64;
    while m > 0 {
        let mut rng = derive_stream(
            StreamKey::new(global_seed, i, iterations).in_domain(Domain::Permutation),
        );
        let u = rng.next_uniform();
        let z = if m == k {
            1
        } else {
            let p = m as f64 / k as f64;
            ((u.ln() / (-p).ln_1p()).floor() as u64).saturating_add(1)
        };
        x += rng.next_gamma_unchecked(z) / (k as f64 * v_i);
        let j = (rng.next_int_unchecked(m as u64) - 1) as usize;
        let last = (m - 1) as usize;
        perm.swap(j, last);
        times[perm[last] as usize] = x;
        m -= 1;
        iterations += 1;
        balls = balls.saturating_add(z);
    }
    Ok(BbmRun {
        times,
        iterations,
        balls,
        permutation: perm,
    })
}
