//! C ABI over the `fastgm` library.
//!
//! Every fallible function returns an [`FgmStatus`]; on failure a message is
//! stored per thread and can be read with [`fgm_last_error_message`].
//! Objects are opaque handles created by `*_new`/constructor functions and
//! released with the matching `*_free`. Panics never cross the boundary; they
//! are reported as `FGM_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fastgm::io::{read_sketches, write_sketches, SketchSet};
use fastgm::{
    estimate_similarity, jaccard_p, jaccard_w, sketch_fastgm, Error, GumbelMaxSketch, SketchConfig,
    SparseVector,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoPositiveElements = 3,
    IncompatibleSketch = 4,
    Io = 5,
    Format = 6,
    OutOfRange = 7,
    Internal = 99,
}

/// Sketching parameters: `k`, seed, ball budget increment and hash/gamma
/// threshold.
pub struct FgmConfig(SketchConfig);

/// A finished sketch.
pub struct FgmSketch(GumbelMaxSketch);

/// An ordered collection of named sketches sharing `k` and the seed; the
/// unit of file I/O.
pub struct FgmSketchSet(SketchSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> FgmStatus {
    match e {
        Error::InvalidArgument(_) | Error::ExhaustedProcess(_) => FgmStatus::InvalidArgument,
        Error::NoPositiveElements => FgmStatus::NoPositiveElements,
        Error::IncompatibleSketch(_) | Error::IncompleteSketch(_) => FgmStatus::IncompatibleSketch,
        Error::Io(_) => FgmStatus::Io,
        Error::Parse { .. } | Error::Format(_) => FgmStatus::Format,
    }
}

struct Fail(FgmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FgmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FgmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FgmStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            FgmStatus::Internal
        }
    }
}

/// Writes `value` through `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `p` must be null or a live handle of type `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// Unless `len == 0`, `p` must point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// Unless `len == 0`, `indices` and `weights` must each point to `len` values.
unsafe fn vector(
    indices: *const u32,
    weights: *const f64,
    len: usize,
) -> Result<SparseVector, Fail> {
    let idx = slice(indices, len, "indices")?;
    let w = slice(weights, len, "weights")?;
    Ok(SparseVector::new(
        idx.iter().copied().zip(w.iter().copied()).collect(),
    )?)
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        Fail(
            FgmStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fgm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator, or 0 when no error has been recorded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a configuration with `k` registers and the default ball budget
/// increment (`k`) and threshold (`k/10`).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_config_new(
    k: u32,
    global_seed: u64,
    out: *mut *mut FgmConfig,
) -> FgmStatus {
    guard(|| {
        let cfg = SketchConfig::new(k, global_seed);
        cfg.validate()?;
        put(out, Box::into_raw(Box::new(FgmConfig(cfg))), "out")
    })
}

/// Sets the hash/gamma threshold; must satisfy `0 <= phi < k`.
///
/// # Safety
/// `cfg` must be null or a live config handle.
#[no_mangle]
pub unsafe extern "C" fn fgm_config_set_phi(cfg: *mut FgmConfig, phi: f64) -> FgmStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let next = c.0.with_phi(phi);
        next.validate()?;
        c.0 = next;
        Ok(())
    })
}

/// Sets the per-round ball budget increment; must be at least 1.
///
/// # Safety
/// `cfg` must be null or a live config handle.
#[no_mangle]
pub unsafe extern "C" fn fgm_config_set_delta(cfg: *mut FgmConfig, delta: u64) -> FgmStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let next = c.0.with_delta(delta);
        next.validate()?;
        c.0 = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`fgm_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fgm_config_free(cfg: *mut FgmConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Sketches the sparse vector given by `len` parallel `(indices, weights)`
/// entries. Indices must be distinct and below `UINT32_MAX`; weights must be
/// positive and finite.
///
/// # Safety
/// `cfg` must be a live config handle, `indices`/`weights` must each hold
/// `len` values, and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_new(
    cfg: *const FgmConfig,
    indices: *const u32,
    weights: *const f64,
    len: usize,
    out: *mut *mut FgmSketch,
) -> FgmStatus {
    guard(|| {
        let cfg = handle(cfg, "cfg")?;
        let v = vector(indices, weights, len)?;
        let sk = sketch_fastgm(&v, &cfg.0)?;
        put(out, Box::into_raw(Box::new(FgmSketch(sk))), "out")
    })
}

/// # Safety
/// `sketch` must be null or a live sketch handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_free(sketch: *mut FgmSketch) {
    if !sketch.is_null() {
        drop(Box::from_raw(sketch));
    }
}

/// Number of registers, or 0 for a null handle.
///
/// # Safety
/// `sketch` must be null or a live sketch handle.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_k(sketch: *const FgmSketch) -> u32 {
    sketch.as_ref().map_or(0, |s| s.0.k())
}

/// Copies the `k` register indices into `s` and register values into `y`.
/// Either output may be null to skip it; `len` must equal `k`.
///
/// # Safety
/// `sketch` must be a live sketch handle; non-null outputs must be valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_registers(
    sketch: *const FgmSketch,
    s: *mut u32,
    y: *mut f64,
    len: usize,
) -> FgmStatus {
    guard(|| {
        let sk = &handle(sketch, "sketch")?.0;
        if len != sk.k() as usize {
            return Err(Fail(
                FgmStatus::InvalidArgument,
                format!("buffer length {len} does not match k = {}", sk.k()),
            ));
        }
        if !s.is_null() {
            ptr::copy_nonoverlapping(sk.s().as_ptr(), s, len);
        }
        if !y.is_null() {
            ptr::copy_nonoverlapping(sk.y().as_ptr(), y, len);
        }
        Ok(())
    })
}

/// Fraction of registers on which two sketches agree, an unbiased estimate of
/// the probability Jaccard similarity of their vectors.
///
/// # Safety
/// `a` and `b` must be live sketch handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_similarity(
    a: *const FgmSketch,
    b: *const FgmSketch,
    out: *mut f64,
) -> FgmStatus {
    guard(|| {
        let e = estimate_similarity(&handle(a, "a")?.0, &handle(b, "b")?.0)?;
        put(out, e.value, "out")
    })
}

/// Exact probability Jaccard similarity of two sparse vectors.
///
/// # Safety
/// Each index/weight array must hold its stated number of values; `out` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_jaccard_p(
    u_indices: *const u32,
    u_weights: *const f64,
    u_len: usize,
    v_indices: *const u32,
    v_weights: *const f64,
    v_len: usize,
    out: *mut f64,
) -> FgmStatus {
    guard(|| {
        let u = vector(u_indices, u_weights, u_len)?;
        let v = vector(v_indices, v_weights, v_len)?;
        put(out, jaccard_p(&u, &v).value, "out")
    })
}

/// Exact weighted Jaccard similarity of two sparse vectors.
///
/// # Safety
/// As for [`fgm_jaccard_p`].
#[no_mangle]
pub unsafe extern "C" fn fgm_jaccard_w(
    u_indices: *const u32,
    u_weights: *const f64,
    u_len: usize,
    v_indices: *const u32,
    v_weights: *const f64,
    v_len: usize,
    out: *mut f64,
) -> FgmStatus {
    guard(|| {
        let u = vector(u_indices, u_weights, u_len)?;
        let v = vector(v_indices, v_weights, v_len)?;
        put(out, jaccard_w(&u, &v).value, "out")
    })
}

/// Creates an empty sketch set for sketches with `k` registers and `global_seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_new(
    k: u32,
    global_seed: u64,
    out: *mut *mut FgmSketchSet,
) -> FgmStatus {
    guard(|| {
        if k == 0 {
            return Err(Fail(FgmStatus::InvalidArgument, "k must be >= 1".into()));
        }
        put(
            out,
            Box::into_raw(Box::new(FgmSketchSet(SketchSet::new(k, global_seed)))),
            "out",
        )
    })
}

/// Reads a sketch file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_read(
    path: *const c_char,
    out: *mut *mut FgmSketchSet,
) -> FgmStatus {
    guard(|| {
        let set = read_sketches(string(path, "path")?)?;
        put(out, Box::into_raw(Box::new(FgmSketchSet(set))), "out")
    })
}

/// Writes a sketch file.
///
/// # Safety
/// `set` must be a live set handle and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_write(
    set: *const FgmSketchSet,
    path: *const c_char,
) -> FgmStatus {
    guard(|| {
        Ok(write_sketches(
            string(path, "path")?,
            &handle(set, "set")?.0,
        )?)
    })
}

/// Appends a copy of `sketch` under `id`. The sketch must match the set's `k`
/// and seed.
///
/// # Safety
/// `set` and `sketch` must be live handles; `id` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_push(
    set: *mut FgmSketchSet,
    id: *const c_char,
    sketch: *const FgmSketch,
) -> FgmStatus {
    guard(|| {
        let set = &mut set.as_mut().ok_or_else(|| null("set"))?.0;
        let id = string(id, "id")?;
        let sk = &handle(sketch, "sketch")?.0;
        if sk.k() != set.k || sk.global_seed() != set.global_seed {
            return Err(Fail(
                FgmStatus::IncompatibleSketch,
                format!(
                    "sketch (k={}, seed={}) does not match set (k={}, seed={})",
                    sk.k(),
                    sk.global_seed(),
                    set.k,
                    set.global_seed
                ),
            ));
        }
        if id.len() > u16::MAX as usize {
            return Err(Fail(
                FgmStatus::InvalidArgument,
                "id longer than 65535 bytes".into(),
            ));
        }
        set.records.push((id.to_string(), sk.clone()));
        Ok(())
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live set handle.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_len(set: *const FgmSketchSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.records.len())
}

/// Returns a new sketch handle holding a copy of record `index`; free it
/// with [`fgm_sketch_free`].
///
/// # Safety
/// `set` must be a live set handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_get(
    set: *const FgmSketchSet,
    index: usize,
    out: *mut *mut FgmSketch,
) -> FgmStatus {
    guard(|| {
        let set = &handle(set, "set")?.0;
        let (_, sk) = set.records.get(index).ok_or_else(|| {
            Fail(
                FgmStatus::OutOfRange,
                format!(
                    "record {index} out of range ({} records)",
                    set.records.len()
                ),
            )
        })?;
        put(out, Box::into_raw(Box::new(FgmSketch(sk.clone()))), "out")
    })
}

/// Copies the id of record `index` into `buf` (truncated, NUL-terminated when
/// `len > 0`) and stores its full byte length in `id_len`.
///
/// # Safety
/// `set` must be a live set handle, `buf` null or valid for `len` bytes, and
/// `id_len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_id(
    set: *const FgmSketchSet,
    index: usize,
    buf: *mut c_char,
    len: usize,
    id_len: *mut usize,
) -> FgmStatus {
    guard(|| {
        let set = &handle(set, "set")?.0;
        let (id, _) = set.records.get(index).ok_or_else(|| {
            Fail(
                FgmStatus::OutOfRange,
                format!(
                    "record {index} out of range ({} records)",
                    set.records.len()
                ),
            )
        })?;
        if !buf.is_null() && len > 0 {
            let n = id.len().min(len - 1);
            ptr::copy_nonoverlapping(id.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        put(id_len, id.len(), "id_len")
    })
}

/// # Safety
/// `set` must be null or a live set handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fgm_sketch_set_free(set: *mut FgmSketchSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}
