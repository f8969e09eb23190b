//! Text corpora and the binary sketch file.
//!
//! Text formats are UTF-8, tab-delimited, one record per line. Blank lines
//! and lines starting with `#` are skipped.
//!
//! * vectors: `<id>\t<idx>:<weight>[ <idx>:<weight>]*`
//! * graph:   `<u>\t<v>[\t<weight>]` (weight defaults to 1)
//! * pairs:   `<id1>\t<id2>`
//!
//! Sketch file, all integers little-endian:
//!
//! ```text
//! magic        4 bytes  "FGMS"
//! version      u16      1
//! k            u32
//! global_seed  u64
//! record_count u64
//! record_count times:
//!   id_len     u16
//!   id         id_len bytes, UTF-8
//!   s          k x u32
//!   y          k x f64 (IEEE-754 bits)
//! ```

use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::embedding::Edge;
use crate::error::{Error, Result};
use crate::sketch::{GumbelMaxSketch, EMPTY_REGISTER};
use crate::vector::{Index, SparseVector};

pub const MAGIC: &[u8; 4] = b"FGMS";
pub const FORMAT_VERSION: u16 = 1;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Yields `(1-based line number, content)` for every non-comment, non-blank line.
fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(n, line)| match line {
            Err(e) => Some(Err(Error::Io(e))),
            Ok(l) => {
                let l = l.trim_end_matches('\r');
                if l.trim().is_empty() || l.starts_with('#') {
                    None
                } else {
                    Some(Ok((n + 1, l.to_string())))
                }
            }
        })
}

pub fn parse_vectors<R: BufRead>(reader: R) -> Result<Vec<(String, SparseVector)>> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(n, "expected '<id>\\t<idx>:<weight> ...'"))?;
        if id.is_empty() {
            return Err(parse_err(n, "empty id"));
        }
        let mut entries = Vec::new();
        for tok in body.split_whitespace() {
            let (idx, w) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(n, format!("malformed entry '{tok}'")))?;
            let idx: Index = idx
                .parse()
                .map_err(|_| parse_err(n, format!("bad index in '{tok}'")))?;
            let w: f64 = w
                .parse()
                .map_err(|_| parse_err(n, format!("bad weight in '{tok}'")))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(parse_err(n, format!("weight must be positive in '{tok}'")));
            }
            entries.push((idx, w));
        }
        let v = SparseVector::new(entries).map_err(|e| parse_err(n, e.to_string()))?;
        out.push((id.to_string(), v));
    }
    Ok(out)
}

pub fn parse_graph<R: BufRead>(reader: R) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(n, "expected '<u>\\t<v>[\\t<weight>]'"));
        }
        let node = |s: &str| -> Result<Index> {
            s.parse::<Index>()
                .ok()
                .filter(|&x| x != Index::MAX)
                .ok_or_else(|| parse_err(n, format!("bad node id '{s}'")))
        };
        let weight = match fields.get(2) {
            Some(w) => w
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| parse_err(n, format!("bad edge weight '{w}'")))?,
            None => 1.0,
        };
        edges.push(Edge::new(node(fields[0])?, node(fields[1])?, weight));
    }
    Ok(edges)
}

pub fn parse_pairs<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        match line.split('\t').collect::<Vec<_>>()[..] {
            [a, b] if !a.is_empty() && !b.is_empty() => pairs.push((a.to_string(), b.to_string())),
            _ => return Err(parse_err(n, "expected '<id1>\\t<id2>'")),
        }
    }
    Ok(pairs)
}

/// Contents of a sketch file: sketches sharing one `(k, seed)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchSet {
    pub k: u32,
    pub global_seed: u64,
    pub records: Vec<(String, GumbelMaxSketch)>,
}

impl SketchSet {
    pub fn new(k: u32, global_seed: u64) -> Self {
        SketchSet {
            k,
            global_seed,
            records: Vec::new(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&GumbelMaxSketch> {
        self.records
            .iter()
            .find(|(rid, _)| rid == id)
            .map(|(_, s)| s)
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let k = self.k as usize;
        let mut buf = Vec::with_capacity(26 + self.records.len() * (2 + 16 + 12 * k));
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.k.to_le_bytes());
        buf.extend_from_slice(&self.global_seed.to_le_bytes());
        buf.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        for (id, sk) in &self.records {
            if sk.k() != self.k || sk.global_seed() != self.global_seed {
                return Err(Error::Format(format!(
                    "record '{id}' has (k, seed) = ({}, {}), file has ({}, {})",
                    sk.k(),
                    sk.global_seed(),
                    self.k,
                    self.global_seed
                )));
            }
            let id_len = u16::try_from(id.len())
                .map_err(|_| Error::Format(format!("id '{id}' longer than 65535 bytes")))?;
            if let Some(j) = sk.first_unfilled() {
                return Err(Error::Format(format!(
                    "record '{id}' has unfilled register {j}"
                )));
            }
            buf.extend_from_slice(&id_len.to_le_bytes());
            buf.extend_from_slice(id.as_bytes());
            for s in sk.s() {
                buf.extend_from_slice(&s.to_le_bytes());
            }
            for y in sk.y() {
                buf.extend_from_slice(&y.to_bits().to_le_bytes());
            }
        }
        Ok(buf)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic (not a sketch file)".into()));
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let k = r.u32()?;
        let global_seed = r.u64()?;
        let count = r.u64()?;
        let mut records = Vec::new();
        for n in 0..count {
            let id_len = r.u16()? as usize;
            let id = std::str::from_utf8(r.take(id_len)?)
                .map_err(|_| Error::Format(format!("record {n}: id is not UTF-8")))?
                .to_string();
            let s = (0..k).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            if s.contains(&EMPTY_REGISTER) {
                return Err(Error::Format(format!(
                    "record '{id}' holds the reserved index"
                )));
            }
            let y = (0..k)
                .map(|_| r.u64().map(f64::from_bits))
                .collect::<Result<Vec<_>>>()?;
            records.push((id, GumbelMaxSketch::from_parts(k, global_seed, s, y)?));
        }
        if r.pos != bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(SketchSet {
            k,
            global_seed,
            records,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::Format(format!(
                "truncated file at byte {}",
                self.pos
            ))),
        }
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn write_sketches(path: impl AsRef<Path>, set: &SketchSet) -> Result<()> {
    let bytes = set.encode()?;
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn read_sketches(path: impl AsRef<Path>) -> Result<SketchSet> {
    SketchSet::decode(&fs::read(path)?)
}
