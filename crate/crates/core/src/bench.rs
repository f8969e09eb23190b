//! Benchmark harness: synthetic vectors, timed sketching, work counters.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{invalid, Error, Result};
use crate::keyed_rng::{derive_stream, Domain, StreamKey};
use crate::sketch::{Method, SketchConfig};
use crate::stats;
use crate::vector::{Index, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightDist {
    /// UNI(0, 1).
    Uniform,
    /// EXP(1).
    Exponential,
}

impl WeightDist {
    pub fn name(&self) -> &'static str {
        match self {
            WeightDist::Uniform => "uniform",
            WeightDist::Exponential => "exponential",
        }
    }
}

impl fmt::Display for WeightDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightDist::Uniform),
            "exponential" => Ok(WeightDist::Exponential),
            other => Err(invalid(format!("unknown distribution '{other}'"))),
        }
    }
}

/// A vector with `n_plus` positive entries at indices `0..n_plus`.
pub fn gen_synthetic(n_plus: usize, dist: WeightDist, seed: u64) -> Result<SparseVector> {
    if n_plus == 0 {
        return Err(invalid("n_plus must be >= 1"));
    }
    if n_plus >= Index::MAX as usize {
        return Err(invalid(format!("n_plus too large: {n_plus}")));
    }
    let mut rng =
        derive_stream(StreamKey::new(seed, n_plus as u64, 0).in_domain(Domain::Synthetic));
    let entries = (0..n_plus as Index)
        .map(|i| {
            let w = match dist {
                WeightDist::Uniform => rng.next_uniform(),
                WeightDist::Exponential => rng.next_exp(),
            };
            (i, w)
        })
        .collect();
    Ok(SparseVector::new(entries)?.with_dim(n_plus as u64))
}

#[derive(Debug, Clone)]
pub struct BenchGrid {
    pub n_plus: Vec<usize>,
    pub k: Vec<u32>,
    pub dists: Vec<WeightDist>,
    pub methods: Vec<Method>,
    /// Timed trials per cell; one extra warm-up run is discarded.
    pub trials: usize,
    pub seed: u64,
}

impl BenchGrid {
    pub fn cells(&self) -> usize {
        self.n_plus.len() * self.k.len() * self.dists.len() * self.methods.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n_plus: usize,
    pub k: u32,
    pub dist: WeightDist,
    pub trials: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub stddev_ms: f64,
    /// Mean balls per sketch.
    pub balls: f64,
    /// Mean generator calls per sketch.
    pub calls: f64,
    /// `mean_ms(direct) / mean_ms(method)`; `None` when direct was not run.
    pub speedup_vs_direct: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

pub const CSV_HEADER: &str =
    "method,n_plus,k,dist,trials,mean_ms,median_ms,stddev_ms,balls,calls,speedup_vs_direct";

impl BenchReport {
    pub fn find(
        &self,
        method: Method,
        n_plus: usize,
        k: u32,
        dist: WeightDist,
    ) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n_plus == n_plus && r.k == k && r.dist == dist)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            let speedup = r
                .speedup_vs_direct
                .map(|s| format!("{s:.3}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{:.6},{:.6},{:.6},{:.1},{:.1},{}",
                r.method,
                r.n_plus,
                r.k,
                r.dist,
                r.trials,
                r.mean_ms,
                r.median_ms,
                r.stddev_ms,
                r.balls,
                r.calls,
                speedup
            )?;
        }
        Ok(())
    }
}

pub fn run_bench(grid: &BenchGrid) -> Result<BenchReport> {
    if grid.cells() == 0 {
        return Err(invalid("benchmark grid is empty"));
    }
    if grid.trials < 3 {
        return Err(invalid("at least 3 trials are required"));
    }
    let mut report = BenchReport::default();
    for &dist in &grid.dists {
        for &n_plus in &grid.n_plus {
            let vectors = (0..grid.trials as u64)
                .map(|t| gen_synthetic(n_plus, dist, grid.seed.wrapping_add(t)))
                .collect::<Result<Vec<_>>>()?;
            for &k in &grid.k {
                let first = report.rows.len();
                for &method in &grid.methods {
                    report
                        .rows
                        .push(time_cell(method, &vectors, k, dist, grid.seed)?);
                }
                let direct_ms = report.rows[first..]
                    .iter()
                    .find(|r| r.method == Method::Direct)
                    .map(|r| r.mean_ms);
                if let Some(d) = direct_ms {
                    for row in &mut report.rows[first..] {
                        row.speedup_vs_direct = Some(d / row.mean_ms);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn time_cell(
    method: Method,
    vectors: &[SparseVector],
    k: u32,
    dist: WeightDist,
    seed: u64,
) -> Result<BenchRow> {
    let cfg = |t: usize| SketchConfig::new(k, seed.wrapping_add(t as u64));
    black_box(method.sketch(&vectors[0], &cfg(0))?);

    let mut times = Vec::with_capacity(vectors.len());
    let (mut balls, mut calls) = (0.0, 0.0);
    for (t, v) in vectors.iter().enumerate() {
        let c = cfg(t);
        let start = Instant::now();
        let (sk, st) = method.sketch_with_stats(v, &c)?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
        black_box(sk);
        balls += st.balls as f64;
        calls += st.calls as f64;
    }
    let n = vectors.len() as f64;
    Ok(BenchRow {
        method,
        n_plus: vectors[0].nnz(),
        k,
        dist,
        trials: vectors.len(),
        mean_ms: stats::mean(&times),
        median_ms: stats::median(&times),
        stddev_ms: stats::stddev(&times),
        balls: balls / n,
        calls: calls / n,
        speedup_vs_direct: None,
    })
}

/// Host-measured cost of one hash step versus one gamma step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCalibration {
    pub k: u32,
    pub hash_ns: f64,
    pub gamma_ns: f64,
    /// `gamma_ns / hash_ns`.
    pub ratio: f64,
    /// `k * hash_ns / gamma_ns`, the break-even number of empty bins.
    pub implied_phi: f64,
}

/// Times `steps` hash steps and `steps` gamma steps (empty-bin counts swept
/// over `1..=k/2`) with the same keyed streams the sketcher uses.
pub fn calibrate_phi(k: u32, steps: u64) -> Result<PhiCalibration> {
    if k < 2 || steps == 0 {
        return Err(invalid("calibration needs k >= 2 and steps >= 1"));
    }
    let kf = k as f64;

    let start = Instant::now();
    let mut acc = 0.0;
    for z in 0..steps {
        let mut rng = derive_stream(StreamKey::new(1, 7, z));
        acc += -rng.next_uniform().ln();
        acc += rng.next_int_unchecked(k as u64) as f64;
    }
    black_box(acc);
    let hash_ns = start.elapsed().as_nanos() as f64 / steps as f64;

    let half = (k / 2).max(1) as u64;
    let start = Instant::now();
    let mut acc = 0.0;
    for z in 0..steps {
        let m = 1 + z % half;
        let mut rng = derive_stream(StreamKey::new(1, 7, z));
        let u = rng.next_uniform();
        let batch = ((u.ln() / (-(m as f64) / kf).ln_1p()).floor() as u64).saturating_add(1);
        acc += rng.next_gamma_unchecked(batch);
        acc += rng.next_int_unchecked(m) as f64;
    }
    black_box(acc);
    let gamma_ns = start.elapsed().as_nanos() as f64 / steps as f64;

    let ratio = gamma_ns / hash_ns;
    Ok(PhiCalibration {
        k,
        hash_ns,
        gamma_ns,
        ratio,
        implied_phi: kf / ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_vectors() {
        let v = gen_synthetic(10_000, WeightDist::Uniform, 3).unwrap();
        assert_eq!(v.nnz(), 10_000);
        assert!(v.weights().iter().all(|&w| w > 0.0 && w < 1.0));
        assert_eq!(v, gen_synthetic(10_000, WeightDist::Uniform, 3).unwrap());
        assert_ne!(v, gen_synthetic(10_000, WeightDist::Uniform, 4).unwrap());
        assert!(gen_synthetic(0, WeightDist::Exponential, 0).is_err());
        let e = gen_synthetic(100, WeightDist::Exponential, 0).unwrap();
        assert!(e.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn single_cell_gives_one_row() {
        let grid = BenchGrid {
            n_plus: vec![50],
            k: vec![16],
            dists: vec![WeightDist::Uniform],
            methods: vec![Method::FastGm],
            trials: 3,
            seed: 1,
        };
        let report = run_bench(&grid).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].speedup_vs_direct, None);
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("fastgm,50,16,uniform,3,"));
        assert!(lines[1].ends_with(','));
    }

    #[test]
    fn rejects_bad_grids() {
        let mut grid = BenchGrid {
            n_plus: vec![],
            k: vec![16],
            dists: vec![WeightDist::Uniform],
            methods: vec![Method::FastGm],
            trials: 3,
            seed: 1,
        };
        assert!(run_bench(&grid).is_err());
        grid.n_plus = vec![10];
        grid.trials = 2;
        assert!(run_bench(&grid).is_err());
    }

    #[test]
    fn calibration_reports_positive_costs() {
        let c = calibrate_phi(64, 2000).unwrap();
        assert!(c.hash_ns > 0.0 && c.gamma_ns > 0.0);
        assert!(c.implied_phi > 0.0);
        assert!(calibrate_phi(1, 10).is_err());
    }
}
