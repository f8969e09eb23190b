//! `fastgm` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (I/O, parse, format).

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bench::{calibrate_phi, run_bench, BenchGrid, WeightDist};
use crate::embedding::{build_sla, embed_nodes, DEFAULT_DECAY, DEFAULT_ORDER};
use crate::error::Error;
use crate::io::{
    parse_graph, parse_pairs, parse_vectors, read_sketches, write_sketches, SketchSet,
};
use crate::similarity::{estimate_similarity, jaccard_p, jaccard_w, rmse};
use crate::sketch::{Method, SketchConfig};
use crate::vector::SparseVector;

pub const DEFAULT_SEED: u64 = 42;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fastgm",
    version,
    about = "Fast consistent Gumbel-Max sketches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sketch every vector of a corpus into a sketch file.
    Sketch(SketchArgs),
    /// Estimate similarities of sketch pairs, optionally against exact values.
    Similarity(SimilarityArgs),
    /// Sketch-based node embeddings of an edge list.
    Embed(EmbedArgs),
    /// Time sketching methods on synthetic vectors.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SketchArgs {
    /// Vector corpus (`<id>\t<idx>:<weight> ...`).
    #[arg(long)]
    input: PathBuf,
    /// Number of registers.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output sketch file.
    #[arg(long)]
    out: PathBuf,
    /// fastgm | exhaustive | direct
    #[arg(long, default_value = "fastgm", value_parser = parse_method)]
    method: Method,
    /// Ball budget increment per round [default: k].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    delta: Option<u64>,
    /// Hash/gamma threshold on empty bins [default: k/10].
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Per-vector progress on stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    /// Sketch file.
    #[arg(long)]
    sketches: PathBuf,
    /// Pair list (`<id1>\t<id2>`).
    #[arg(long)]
    pairs: PathBuf,
    /// Vector corpus for exact J_P / J_W.
    #[arg(long)]
    exact: Option<PathBuf>,
    /// Write per-pair CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    /// Edge list (`<u>\t<v>[\t<weight>]`).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_ORDER, value_parser = clap::value_parser!(u32).range(1..))]
    order: u32,
    #[arg(long, default_value_t = DEFAULT_DECAY)]
    decay: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output sketch file; record ids are node numbers.
    #[arg(long)]
    out: PathBuf,
    /// Node count [default: largest id + 1].
    #[arg(long)]
    nodes: Option<usize>,
    /// Self-loop weight added to every node.
    #[arg(long, default_value_t = 1.0)]
    self_weight: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Positive entries per vector (comma-separated list).
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    n: Vec<usize>,
    /// Registers (comma-separated list).
    #[arg(long, value_delimiter = ',', default_value = "256")]
    k: Vec<u32>,
    /// uniform | exponential (comma-separated list).
    #[arg(long, value_delimiter = ',', default_value = "uniform", value_parser = parse_dist)]
    dist: Vec<WeightDist>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Methods to time (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "fastgm,direct", value_parser = parse_method)]
    methods: Vec<Method>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Measure hash vs gamma step cost for each k and report the implied phi.
    #[arg(long)]
    calibrate_phi: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dist(s: &str) -> Result<WeightDist, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn with_path<T>(path: &Path, r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::Usage(m),
        other => Failure::Data(format!("{}: {other}", path.display())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// Runs the CLI against the process's stdout/stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => write!(err, "{e}"),
            };
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Sketch(a) => cmd_sketch(a, out, err),
        Command::Similarity(a) => cmd_similarity(a, out),
        Command::Embed(a) => cmd_embed(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DATA
        }
    }
}

fn cmd_sketch(a: SketchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = SketchConfig::new(a.k, a.seed);
    if let Some(d) = a.delta {
        cfg = cfg.with_delta(d);
    }
    if let Some(p) = a.phi {
        cfg = cfg.with_phi(p);
    }
    cfg.validate()?;
    if a.threads == 0 {
        return Err(Failure::Usage("--threads must be >= 1".into()));
    }

    let corpus = with_path(&a.input, parse_vectors(open(&a.input)?))?;
    let (ids, vectors): (Vec<String>, Vec<SparseVector>) = corpus.into_iter().unzip();
    let start = Instant::now();
    let sketches = if a.verbose && a.threads <= 1 {
        let mut v = Vec::with_capacity(vectors.len());
        for (id, vec) in ids.iter().zip(&vectors) {
            let (sk, st) = a
                .method
                .sketch_with_stats(vec, &cfg)
                .map_err(|e| Failure::Data(format!("vector '{id}': {e}")))?;
            writeln!(
                err,
                "{id}: n+={} balls={} calls={}",
                vec.nnz(),
                st.balls,
                st.calls
            )?;
            v.push(sk);
        }
        v
    } else {
        crate::sketch::sketch_all(&vectors, &cfg, a.method, a.threads)
            .map_err(|e| Failure::Data(e.to_string()))?
    };
    let elapsed = start.elapsed();

    let set = SketchSet {
        k: cfg.k,
        global_seed: cfg.global_seed,
        records: ids.into_iter().zip(sketches).collect(),
    };
    with_path(&a.out, write_sketches(&a.out, &set))?;
    writeln!(
        out,
        "sketched {} vectors (k={}, method={}) in {:.3} ms -> {}",
        set.records.len(),
        cfg.k,
        a.method,
        elapsed.as_secs_f64() * 1e3,
        a.out.display()
    )?;
    Ok(())
}

fn cmd_similarity(a: SimilarityArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let set = with_path(&a.sketches, read_sketches(&a.sketches))?;
    let pairs = with_path(&a.pairs, parse_pairs(open(&a.pairs)?))?;
    let index: HashMap<&str, usize> = set
        .records
        .iter()
        .enumerate()
        .map(|(n, (id, _))| (id.as_str(), n))
        .collect();
    let exact: Option<HashMap<String, SparseVector>> = match &a.exact {
        Some(p) => Some(with_path(p, parse_vectors(open(p)?))?.into_iter().collect()),
        None => None,
    };

    let mut rows = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        let sketch_of = |id: &str| {
            index.get(id).map(|&n| &set.records[n].1).ok_or_else(|| {
                Failure::Data(format!("id '{id}' not found in {}", a.sketches.display()))
            })
        };
        let est = estimate_similarity(sketch_of(x)?, sketch_of(y)?)?.value;
        let truth = match &exact {
            Some(vs) => {
                let vec_of = |id: &str| {
                    vs.get(id).ok_or_else(|| {
                        Failure::Data(format!("id '{id}' not found in exact corpus"))
                    })
                };
                let (u, v) = (vec_of(x)?, vec_of(y)?);
                Some((jaccard_p(u, v).value, jaccard_w(u, v).value))
            }
            None => None,
        };
        rows.push((x.as_str(), y.as_str(), est, truth));
    }

    writeln!(
        out,
        "{:<20} {:<20} {:>9} {:>9} {:>9} {:>9}",
        "id1", "id2", "estimate", "J_P", "J_W", "abs_err"
    )?;
    for (x, y, est, truth) in &rows {
        match truth {
            Some((jp, jw)) => writeln!(
                out,
                "{x:<20} {y:<20} {est:>9.5} {jp:>9.5} {jw:>9.5} {:>9.5}",
                (est - jp).abs()
            )?,
            None => writeln!(out, "{x:<20} {y:<20} {est:>9.5}")?,
        }
    }
    if exact.is_some() && !rows.is_empty() {
        // Truth differs per pair, so take the RMSE of the deviations around 0.
        let deviations: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.3.map(|(jp, _)| r.2 - jp))
            .collect();
        let err = rmse(&deviations, 0.0)?;
        writeln!(out, "pairs={} rmse_vs_J_P={err:.6}", rows.len())?;
    }

    if let Some(path) = &a.csv {
        let mut w = io::BufWriter::new(
            File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        );
        if exact.is_some() {
            writeln!(w, "id1,id2,estimate,J_P,J_W,abs_error")?;
        } else {
            writeln!(w, "id1,id2,estimate")?;
        }
        for (x, y, est, truth) in &rows {
            match truth {
                Some((jp, jw)) => writeln!(w, "{x},{y},{est},{jp},{jw},{}", (est - jp).abs())?,
                None => writeln!(w, "{x},{y},{est}")?,
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn cmd_embed(a: EmbedArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = SketchConfig::new(a.k, a.seed);
    let edges = with_path(&a.graph, parse_graph(open(&a.graph)?))?;
    let max_id = edges
        .iter()
        .map(|e| e.from.max(e.to) as usize + 1)
        .max()
        .unwrap_or(0);
    let n = a.nodes.unwrap_or(max_id);
    let g = build_sla(&edges, n, a.self_weight).map_err(|e| match e {
        Error::InvalidArgument(m) if m.contains("references a node") => Failure::Data(m),
        other => other.into(),
    })?;
    let emb = embed_nodes(&g, &cfg, a.order, a.decay)?;
    let set = SketchSet {
        k: cfg.k,
        global_seed: cfg.global_seed,
        records: emb
            .sketches
            .into_iter()
            .enumerate()
            .map(|(u, s)| (u.to_string(), s))
            .collect(),
    };
    with_path(&a.out, write_sketches(&a.out, &set))?;
    writeln!(
        out,
        "embedded {n} nodes ({} edges, k={}, order={}) -> {}",
        edges.len(),
        a.k,
        a.order,
        a.out.display()
    )?;
    Ok(())
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if a.calibrate_phi {
        writeln!(
            out,
            "{:>8} {:>10} {:>10} {:>8} {:>12}",
            "k", "hash_ns", "gamma_ns", "ratio", "implied_phi"
        )?;
        for &k in &a.k {
            let c = calibrate_phi(k, 1_000_000)?;
            writeln!(
                out,
                "{:>8} {:>10.2} {:>10.2} {:>8.2} {:>12.1}",
                c.k, c.hash_ns, c.gamma_ns, c.ratio, c.implied_phi
            )?;
        }
        return Ok(());
    }
    let grid = BenchGrid {
        n_plus: a.n,
        k: a.k,
        dists: a.dist,
        methods: a.methods,
        trials: a.trials,
        seed: a.seed,
    };
    if grid.k.contains(&0) || grid.n_plus.contains(&0) {
        return Err(Failure::Usage("--n and --k values must be >= 1".into()));
    }
    let report = run_bench(&grid)?;
    writeln!(
        out,
        "{:<11} {:>7} {:>6} {:<12} {:>11} {:>11} {:>12} {:>10}",
        "method", "n_plus", "k", "dist", "mean_ms", "median_ms", "balls", "speedup"
    )?;
    for r in &report.rows {
        let speedup = r
            .speedup_vs_direct
            .map(|s| format!("{s:.1}x"))
            .unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{:<11} {:>7} {:>6} {:<12} {:>11.4} {:>11.4} {:>12.1} {:>10}",
            r.method.name(),
            r.n_plus,
            r.k,
            r.dist.name(),
            r.mean_ms,
            r.median_ms,
            r.balls,
            speedup
        )?;
    }
    if let Some(path) = &a.csv {
        let f =
            File::create(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        let mut w = io::BufWriter::new(f);
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}
