use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use coep_ffi::*;

fn new_matrix(rows: usize, cols: usize, entries: &[f64]) -> *mut CoepMatrix {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_new(rows, cols, entries.as_ptr(), &mut m) }, CoepStatus::Ok);
    m
}

fn entries(m: *const CoepMatrix) -> Vec<f64> {
    let len = unsafe { 2 * coep_matrix_rows(m) * coep_matrix_cols(m) };
    let mut out = vec![0.0; len];
    assert_eq!(unsafe { coep_matrix_copy_entries(m, out.as_mut_ptr(), len) }, CoepStatus::Ok);
    out
}

fn last_error() -> String {
    let p = coep_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const E: [f64; 8] = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];

#[test]
fn round_trip_and_mp_inverse() {
    let a = new_matrix(2, 2, &E);
    assert_eq!(unsafe { (coep_matrix_rows(a), coep_matrix_cols(a)) }, (2, 2));
    assert_eq!(entries(a), E);

    let mut x = ptr::null_mut();
    assert_eq!(unsafe { coep_mp_inverse_l2(a, &mut x) }, CoepStatus::Ok);
    let got = entries(x);
    let want = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    assert!(got.iter().zip(want).all(|(g, w)| (g - w).abs() < 1e-12));
    unsafe {
        coep_matrix_free(x);
        coep_matrix_free(a);
    }
}

#[test]
fn json_round_trip() {
    let a = new_matrix(1, 2, &[1.5, -2.0, 0.25, 0.0]);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_to_json(a, &mut s) }, CoepStatus::Ok);
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_from_json(s, &mut b) }, CoepStatus::Ok);
    assert_eq!(entries(b), entries(a));
    unsafe {
        coep_string_free(s);
        coep_matrix_free(a);
        coep_matrix_free(b);
    }

    let bad = CString::new(r#"{"rows":2"#).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_from_json(bad.as_ptr(), &mut c) }, CoepStatus::Parse);
    assert!(c.is_null());
    assert!(last_error().contains("parse error"));
}

#[test]
fn classify_reports_json() {
    let a = new_matrix(2, 2, &E);
    let norm = CString::new("l2").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { coep_classify_json(a, norm.as_ptr(), &mut s) }, CoepStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(s) }.to_str().unwrap()).unwrap();
    assert_eq!(v["is_co_ep"], true);
    assert_eq!(v["is_hermitian_co_ep"], true);
    unsafe {
        coep_string_free(s);
        coep_matrix_free(a);
    }
}

#[test]
fn operator_norms() {
    let a = new_matrix(2, 2, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0]);
    let mut v = 0.0;
    for (name, want) in [("l1", 6.0), ("linf", 7.0)] {
        let n = CString::new(name).unwrap();
        assert_eq!(unsafe { coep_operator_norm(a, n.as_ptr(), &mut v) }, CoepStatus::Ok);
        assert!((v - want).abs() < 1e-12, "{name}: {v}");
    }
    let bad = CString::new("l7").unwrap();
    assert_eq!(unsafe { coep_operator_norm(a, bad.as_ptr(), &mut v) }, CoepStatus::Parse);
    unsafe { coep_matrix_free(a) };
}

#[test]
fn perturbed_mp_matches_svd() {
    // a = diag(2, 0); b adds 0.5 in the corner aa† A a†a.
    let a = new_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let b = new_matrix(2, 2, &[2.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { coep_perturbed_mp(a, b, &mut x) }, CoepStatus::Ok);
    assert!((entries(x)[0] - 0.4).abs() < 1e-12);

    let off = new_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let mut y = ptr::null_mut();
    assert_eq!(unsafe { coep_perturbed_mp(a, off, &mut y) }, CoepStatus::Precondition);
    assert!(y.is_null());
    unsafe {
        coep_matrix_free(x);
        coep_matrix_free(a);
        coep_matrix_free(b);
        coep_matrix_free(off);
    }
}

#[test]
fn errors_and_null_handles() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_new(2, 2, ptr::null(), &mut m) }, CoepStatus::NullPointer);
    assert!(last_error().contains("entries"));
    assert_eq!(unsafe { coep_matrix_rows(ptr::null()) }, 0);
    let mut x = ptr::null_mut();
    assert_eq!(unsafe { coep_mp_inverse_l2(ptr::null(), &mut x) }, CoepStatus::NullPointer);

    let rect = new_matrix(1, 2, &[1.0, 0.0, 0.0, 0.0]);
    assert_eq!(unsafe { coep_mp_inverse_l2(rect, &mut x) }, CoepStatus::Shape);
    let mut short = [0.0; 2];
    assert_eq!(unsafe { coep_matrix_copy_entries(rect, short.as_mut_ptr(), 2) }, CoepStatus::Shape);

    let one = new_matrix(1, 1, &[1.0, 0.0]);
    assert_eq!(unsafe { coep_mp_inverse_l2(one, &mut x) }, CoepStatus::Ok);
    assert!(coep_last_error().is_null());
    unsafe {
        coep_matrix_free(x);
        coep_matrix_free(rect);
        coep_matrix_free(one);
        coep_matrix_free(ptr::null_mut());
        coep_string_free(ptr::null_mut());
    }
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { coep_matrix_new(1, 1, [f64::NAN, 0.0].as_ptr(), &mut bad) }, CoepStatus::InvalidInput);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(coep_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/coep.h")).unwrap();
    for f in [
        "coep_matrix_new",
        "coep_matrix_free",
        "coep_matrix_copy_entries",
        "coep_matrix_from_json",
        "coep_matrix_to_json",
        "coep_mp_inverse_l2",
        "coep_operator_norm",
        "coep_classify_json",
        "coep_perturbed_mp",
        "coep_string_free",
        "coep_last_error",
        "typedef struct CoepMatrix CoepMatrix",
        "COEP_STATUS_NOT_MP_INVERTIBLE = 8",
    ] {
        assert!(header.contains(f), "header lacks {f}");
    }
}

/// Directory holding `libcoep_ffi.so`: the parent of `deps/`.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    }
    let lib = lib_dir();
    assert!(
        lib.join("libcoep_ffi.so").exists() || lib.join("libcoep_ffi.dylib").exists(),
        "cdylib missing in {}",
        lib.display()
    );
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new(&cc)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg("-L")
        .arg(&lib)
        .arg("-lcoep_ffi")
        .arg(format!("-Wl,-rpath,{}", lib.display()))
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "0 0 1 0 1");
}
