//! C ABI for `coep`.
//!
//! Matrices cross the boundary as opaque `CoepMatrix` handles. Entries are
//! exchanged as interleaved `re, im` doubles in row-major order. Every
//! function returns a `CoepStatus`; on failure `coep_last_error` describes
//! the error until the next call on the same thread. Strings returned by the
//! library are released with `coep_string_free`, handles with
//! `coep_matrix_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use coep::classification::classify;
use coep::io::{matrix_from_json, matrix_to_json};
use coep::linalg::{operator_norm, ComplexMatrix, NormSpec, ToleranceConfig};
use coep::perturbation::{perturbed_mp, PerturbationPair};
use coep::pseudoinverse::mp_inverse_euclidean;
use coep::CoepError;
use num_complex::Complex64;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Shape = 3,
    Singular = 4,
    Contract = 5,
    Precondition = 6,
    Unsupported = 7,
    NotMpInvertible = 8,
    Parse = 9,
    Internal = 10,
}

/// Opaque square or rectangular complex matrix.
pub struct CoepMatrix(ComplexMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &CoepError) -> CoepStatus {
    match e {
        CoepError::InvalidInput(_) | CoepError::Io(_) => CoepStatus::InvalidInput,
        CoepError::Shape(_) => CoepStatus::Shape,
        CoepError::Singular { .. } => CoepStatus::Singular,
        CoepError::Contract { .. } => CoepStatus::Contract,
        CoepError::Precondition(_) => CoepStatus::Precondition,
        CoepError::Unsupported(_) => CoepStatus::Unsupported,
        CoepError::NotMpInvertible(_) => CoepStatus::NotMpInvertible,
        CoepError::Parse(_) => CoepStatus::Parse,
    }
}

enum Failure {
    Null(&'static str),
    Coep(CoepError),
}

impl From<CoepError> for Failure {
    fn from(e: CoepError) -> Self {
        Failure::Coep(e)
    }
}

/// Runs `f`, recording any error or panic for `coep_last_error`.
fn guard(f: impl FnOnce() -> Result<(), Failure> + UnwindSafe) -> CoepStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => CoepStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CoepStatus::NullPointer
        }
        Ok(Err(Failure::Coep(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error: panic inside coep");
            CoepStatus::Internal
        }
    }
}

unsafe fn matrix<'a>(m: *const CoepMatrix, what: &'static str) -> Result<&'a ComplexMatrix, Failure> {
    m.as_ref().map(|m| &m.0).ok_or(Failure::Null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Coep(CoepError::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn put_matrix(out: *mut *mut CoepMatrix, m: ComplexMatrix) {
    *out = Box::into_raw(Box::new(CoepMatrix(m)));
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| CoepError::InvalidInput("output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn parse_norm(s: &str) -> Result<NormSpec, Failure> {
    Ok(s.parse::<NormSpec>()?)
}

/// Message for the last failed call on this thread, or NULL. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn coep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn coep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a `rows x cols` matrix from `2 * rows * cols` interleaved doubles.
///
/// # Safety
/// `entries` must point to `2 * rows * cols` readable doubles and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_new(
    rows: usize,
    cols: usize,
    entries: *const f64,
    out: *mut *mut CoepMatrix,
) -> CoepStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(2))
            .ok_or_else(|| CoepError::InvalidInput(format!("{rows}x{cols} is too large")))?;
        if entries.is_null() && len > 0 {
            return Err(Failure::Null("entries"));
        }
        let raw = if len == 0 { &[][..] } else { std::slice::from_raw_parts(entries, len) };
        let values = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        put_matrix(out, ComplexMatrix::new(rows, cols, values)?);
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_free(m: *mut CoepMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_rows(m: *const CoepMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// Column count, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_cols(m: *const CoepMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Copies the entries, interleaved and row-major, into `out[0..len]`;
/// `len` must equal `2 * rows * cols`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_copy_entries(m: *const CoepMatrix, out: *mut f64, len: usize) -> CoepStatus {
    guard(|| {
        let m = matrix(m, "matrix")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let want = 2 * m.rows() * m.cols();
        if len != want {
            return Err(CoepError::Shape(format!("buffer holds {len} doubles, matrix needs {want}")).into());
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, z) in dst.chunks_exact_mut(2).zip(m.entries_row_major()) {
            d[0] = z.re;
            d[1] = z.im;
        }
        Ok(())
    })
}

/// Parses the JSON matrix format `{"rows", "cols", "entries": [[re, im], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_from_json(json: *const c_char, out: *mut *mut CoepMatrix) -> CoepStatus {
    guard(|| {
        let s = text(json, "json")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        put_matrix(out, matrix_from_json(s)?);
        Ok(())
    })
}

/// Serializes a matrix; release the string with `coep_string_free`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coep_matrix_to_json(m: *const CoepMatrix, out: *mut *mut c_char) -> CoepStatus {
    guard(|| {
        let m = matrix(m, "matrix")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        put_string(out, matrix_to_json(m))
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn coep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Euclidean Moore-Penrose inverse. Fails with `Contract` if the computed
/// inverse does not certify.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coep_mp_inverse_l2(a: *const CoepMatrix, out: *mut *mut CoepMatrix) -> CoepStatus {
    guard(|| {
        let a = matrix(a, "a")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let (x, cert) = mp_inverse_euclidean(a, &ToleranceConfig::default())?;
        if !cert.valid {
            return Err(CoepError::Contract {
                what: "Euclidean Moore-Penrose certificate".into(),
                residual: cert.residual_aba.max(cert.residual_bab),
            }
            .into());
        }
        put_matrix(out, x);
        Ok(())
    })
}

/// Induced operator norm; `norm` is `"l1"`, `"l2"`, `"linf"` or `"lp:<p>"`.
///
/// # Safety
/// `a` must be a live handle, `norm` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn coep_operator_norm(a: *const CoepMatrix, norm: *const c_char, out: *mut f64) -> CoepStatus {
    guard(|| {
        let a = matrix(a, "a")?;
        let spec = parse_norm(text(norm, "norm")?)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = operator_norm(a, &spec)?;
        Ok(())
    })
}

/// Classification report as JSON. A matrix without a Moore-Penrose inverse
/// under `norm` still yields `Ok` with `mp_invertible: false`.
///
/// # Safety
/// `a` must be a live handle, `norm` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn coep_classify_json(
    a: *const CoepMatrix,
    norm: *const c_char,
    out: *mut *mut c_char,
) -> CoepStatus {
    guard(|| {
        let a = matrix(a, "a")?;
        let spec = parse_norm(text(norm, "norm")?)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let report = classify(a, &spec, &ToleranceConfig::default())?;
        let json = serde_json::to_string(&report).map_err(|e| CoepError::Parse(e.to_string()))?;
        put_string(out, json)
    })
}

/// Moore-Penrose inverse of `b` from the closed form around `a` under the
/// Euclidean norm. Fails with `Precondition` unless the pair obeys (P).
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coep_perturbed_mp(
    a: *const CoepMatrix,
    b: *const CoepMatrix,
    out: *mut *mut CoepMatrix,
) -> CoepStatus {
    guard(|| {
        let (a, b) = (matrix(a, "a")?, matrix(b, "b")?);
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let cfg = ToleranceConfig::default();
        let pair = PerturbationPair::euclidean(a.clone(), b.clone(), &cfg)?;
        let (b_dag, _) = perturbed_mp(&pair, &cfg)?;
        put_matrix(out, b_dag);
        Ok(())
    })
}
