use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fastgm::{sketch_fastgm, SketchConfig, SparseVector};
use fastgm_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        fgm_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn config(k: u32, seed: u64) -> *mut FgmConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { fgm_config_new(k, seed, &mut cfg) }, FgmStatus::Ok);
    cfg
}

fn sketch(cfg: *const FgmConfig, idx: &[u32], w: &[f64]) -> *mut FgmSketch {
    let mut out = ptr::null_mut();
    let st = unsafe { fgm_sketch_new(cfg, idx.as_ptr(), w.as_ptr(), idx.len(), &mut out) };
    assert_eq!(st, FgmStatus::Ok, "{}", last_error());
    out
}

#[test]
fn sketches_match_the_library() {
    let (idx, w) = ([3u32, 10, 99], [0.5, 2.0, 1.25]);
    let cfg = config(64, 7);
    unsafe {
        assert_eq!(fgm_config_set_phi(cfg, 3.0), FgmStatus::Ok);
        assert_eq!(fgm_config_set_delta(cfg, 10), FgmStatus::Ok);
    }
    let sk = sketch(cfg, &idx, &w);
    let (mut s, mut y) = (vec![0u32; 64], vec![0f64; 64]);
    unsafe {
        assert_eq!(fgm_sketch_k(sk), 64);
        assert_eq!(
            fgm_sketch_registers(sk, s.as_mut_ptr(), y.as_mut_ptr(), 64),
            FgmStatus::Ok
        );
        assert_eq!(
            fgm_sketch_registers(sk, s.as_mut_ptr(), ptr::null_mut(), 63),
            FgmStatus::InvalidArgument
        );
    }
    let v = SparseVector::new(idx.iter().copied().zip(w).collect()).unwrap();
    let expected =
        sketch_fastgm(&v, &SketchConfig::new(64, 7).with_phi(3.0).with_delta(10)).unwrap();
    assert_eq!(s, expected.s());
    assert_eq!(y, expected.y());
    unsafe {
        fgm_sketch_free(sk);
        fgm_config_free(cfg);
    }
}

#[test]
fn similarities() {
    let idx = [0u32, 1];
    let (u, v) = ([2.0, 1.0], [1.0, 1.0]);
    let (mut jp, mut jw, mut est) = (0.0, 0.0, 0.0);
    let cfg = config(2048, 1);
    let (a, b) = (sketch(cfg, &idx, &u), sketch(cfg, &idx, &v));
    unsafe {
        assert_eq!(
            fgm_jaccard_p(
                idx.as_ptr(),
                u.as_ptr(),
                2,
                idx.as_ptr(),
                v.as_ptr(),
                2,
                &mut jp
            ),
            FgmStatus::Ok
        );
        assert_eq!(
            fgm_jaccard_w(
                idx.as_ptr(),
                u.as_ptr(),
                2,
                idx.as_ptr(),
                v.as_ptr(),
                2,
                &mut jw
            ),
            FgmStatus::Ok
        );
        assert_eq!(fgm_sketch_similarity(a, b, &mut est), FgmStatus::Ok);
        fgm_sketch_free(a);
        fgm_sketch_free(b);
        fgm_config_free(cfg);
    }
    assert!((jp - 5.0 / 6.0).abs() < 1e-15);
    assert!((jw - 2.0 / 3.0).abs() < 1e-15);
    assert!((est - jp).abs() < 0.05);
}

#[test]
fn errors_set_status_and_message() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(fgm_config_new(0, 1, &mut cfg), FgmStatus::InvalidArgument);
        assert!(last_error().contains('k'));
        assert_eq!(
            fgm_config_new(8, 1, ptr::null_mut()),
            FgmStatus::NullPointer
        );
    }
    let cfg = config(8, 1);
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(fgm_config_set_phi(cfg, 8.0), FgmStatus::InvalidArgument);
        assert_eq!(fgm_config_set_delta(cfg, 0), FgmStatus::InvalidArgument);
        assert_eq!(
            fgm_sketch_new(cfg, ptr::null(), ptr::null(), 0, &mut out),
            FgmStatus::NoPositiveElements
        );
        let (idx, w) = ([1u32, 1], [1.0, 1.0]);
        assert_eq!(
            fgm_sketch_new(cfg, idx.as_ptr(), w.as_ptr(), 2, &mut out),
            FgmStatus::InvalidArgument
        );
        assert_eq!(
            fgm_sketch_new(cfg, ptr::null(), w.as_ptr(), 2, &mut out),
            FgmStatus::NullPointer
        );
        assert!(out.is_null());

        let other = config(8, 2);
        let (a, b) = (sketch(cfg, &[1], &[1.0]), sketch(other, &[1], &[1.0]));
        let mut est = 0.0;
        assert_eq!(
            fgm_sketch_similarity(a, b, &mut est),
            FgmStatus::IncompatibleSketch
        );
        assert!(last_error().contains("seed"), "{}", last_error());
        fgm_sketch_free(a);
        fgm_sketch_free(b);
        fgm_config_free(other);
        fgm_config_free(cfg);

        // Freeing null is a no-op.
        fgm_config_free(ptr::null_mut());
        fgm_sketch_free(ptr::null_mut());
        fgm_sketch_set_free(ptr::null_mut());
        assert_eq!(fgm_sketch_k(ptr::null()), 0);
    }
    let mut small = [0 as std::ffi::c_char; 4];
    let full = unsafe { fgm_last_error_message(small.as_mut_ptr(), small.len()) };
    assert!(full > 3);
    assert_eq!(small[3], 0);
}

#[test]
fn sketch_set_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("s.fgms").to_str().unwrap()).unwrap();
    let cfg = config(16, 3);
    let a = sketch(cfg, &[1, 2], &[1.0, 3.0]);
    let mut set = ptr::null_mut();
    unsafe {
        assert_eq!(fgm_sketch_set_new(16, 3, &mut set), FgmStatus::Ok);
        let id = CString::new("first").unwrap();
        assert_eq!(fgm_sketch_set_push(set, id.as_ptr(), a), FgmStatus::Ok);
        let wrong = config(16, 4);
        let b = sketch(wrong, &[1], &[1.0]);
        assert_eq!(
            fgm_sketch_set_push(set, id.as_ptr(), b),
            FgmStatus::IncompatibleSketch
        );
        assert_eq!(fgm_sketch_set_write(set, path.as_ptr()), FgmStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(fgm_sketch_set_read(path.as_ptr(), &mut back), FgmStatus::Ok);
        assert_eq!(fgm_sketch_set_len(back), 1);
        let mut got = ptr::null_mut();
        assert_eq!(fgm_sketch_set_get(back, 0, &mut got), FgmStatus::Ok);
        assert_eq!(fgm_sketch_set_get(back, 1, &mut got), FgmStatus::OutOfRange);
        let mut est = 0.0;
        assert_eq!(fgm_sketch_similarity(a, got, &mut est), FgmStatus::Ok);
        assert_eq!(est, 1.0);
        let mut buf = [0 as std::ffi::c_char; 3];
        let mut len = 0;
        assert_eq!(
            fgm_sketch_set_id(back, 0, buf.as_mut_ptr(), 3, &mut len),
            FgmStatus::Ok
        );
        assert_eq!(len, 5);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "fi");

        let missing = CString::new(dir.path().join("none").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(
            fgm_sketch_set_read(missing.as_ptr(), &mut none),
            FgmStatus::Io
        );
        std::fs::write(dir.path().join("junk"), b"junk").unwrap();
        let junk = CString::new(dir.path().join("junk").to_str().unwrap()).unwrap();
        assert_eq!(
            fgm_sketch_set_read(junk.as_ptr(), &mut none),
            FgmStatus::Format
        );

        fgm_sketch_free(got);
        fgm_sketch_free(b);
        fgm_config_free(wrong);
        fgm_sketch_set_free(back);
        fgm_sketch_set_free(set);
        fgm_sketch_free(a);
        fgm_config_free(cfg);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(fgm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles `tests/c/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libfastgm_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );

    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());

    let out = Command::new(&exe)
        .arg(dir.path().join("c.fgms"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
