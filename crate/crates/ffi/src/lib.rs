//! C interface to `shrinker-core`.
//!
//! Curves are opaque [`ShrinkerCurve`] handles owned by the caller and
//! released with [`shrinker_curve_free`]. Every fallible call returns a
//! [`ShrinkerStatus`]; on failure the message is kept per thread and read
//! with [`shrinker_last_error`]. Output pointers are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use shrinker_core::io::{read_curve, write_curve};
use shrinker_core::spectral::{compute_index_with, eigenvalues, IndexOptions};
use shrinker_core::{
    assemble_l0, assemble_lk, discrete_length, normal_field, solve_geodesic, Error,
};
use shrinker_core::{DiscreteCurve, HalfPlanePoint, SolveConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// The geodesic solver stopped without meeting its tolerances.
    NonConvergence = 3,
    /// The curve is not a shrinker cross-section: ambiguous normals, missing
    /// symmetry modes or no positive mode up to the `k` limit.
    Consistency = 4,
    Io = 5,
    Parse = 6,
    /// Any other numerical failure.
    Runtime = 7,
    Panic = 8,
}

/// Opaque discrete cross-section curve.
pub struct ShrinkerCurve(DiscreteCurve);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShrinkerIndex {
    pub index: usize,
    /// Negative eigenvalues counted with multiplicity, before exclusions.
    pub negative: usize,
    /// Dilation and translation modes removed from the count.
    pub excluded: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> ShrinkerStatus {
    match err {
        Error::InvalidInput(_) => ShrinkerStatus::InvalidInput,
        Error::NonConvergence { .. } | Error::CurveCollapse(_) => ShrinkerStatus::NonConvergence,
        Error::AmbiguousNormal { .. }
        | Error::ExclusionMismatch(_)
        | Error::UnboundedIndex { .. } => ShrinkerStatus::Consistency,
        Error::Io(_) => ShrinkerStatus::Io,
        Error::Parse(_) => ShrinkerStatus::Parse,
        _ => ShrinkerStatus::Runtime,
    }
}

fn fail(status: ShrinkerStatus, msg: impl Into<String>) -> ShrinkerStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), ShrinkerStatus>) -> ShrinkerStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ShrinkerStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(ShrinkerStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: shrinker_core::Result<T>) -> Result<T, ShrinkerStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), ShrinkerStatus> {
    if p.is_null() {
        Err(fail(ShrinkerStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn curve_ref<'a>(curve: *const ShrinkerCurve) -> Result<&'a DiscreteCurve, ShrinkerStatus> {
    non_null(curve, "curve")?;
    Ok(&(*curve).0)
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, ShrinkerStatus> {
    non_null(path, "path")?;
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| fail(ShrinkerStatus::InvalidInput, "path is not valid UTF-8"))
}

fn emit(curve: DiscreteCurve, out: *mut *mut ShrinkerCurve) {
    // SAFETY: callers check `out` before computing the curve.
    unsafe { *out = Box::into_raw(Box::new(ShrinkerCurve(curve))) };
}

/// Solves for the cross-section with `points` vertices from the default seed.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn shrinker_solve(
    points: usize,
    out: *mut *mut ShrinkerCurve,
) -> ShrinkerStatus {
    guard(|| {
        non_null(out, "out")?;
        let curve = core(solve_geodesic(&SolveConfig::with_points(points)))?;
        emit(curve, out);
        Ok(())
    })
}

/// Builds a curve from `n` points `(r[i], z[i])`.
///
/// # Safety
/// `r` and `z` must each point to `n` readable doubles; `out` must be valid
/// for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_from_points(
    r: *const f64,
    z: *const f64,
    n: usize,
    out: *mut *mut ShrinkerCurve,
) -> ShrinkerStatus {
    guard(|| {
        non_null(r, "r")?;
        non_null(z, "z")?;
        non_null(out, "out")?;
        let (r, z) = (
            std::slice::from_raw_parts(r, n),
            std::slice::from_raw_parts(z, n),
        );
        let pts = r
            .iter()
            .zip(z)
            .map(|(&r, &z)| HalfPlanePoint::new(r, z))
            .collect();
        let curve = core(DiscreteCurve::new(pts))?;
        emit(curve, out);
        Ok(())
    })
}

/// Reads a curve CSV with header `m,r,z`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for a pointer
/// write.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_read_csv(
    path: *const c_char,
    out: *mut *mut ShrinkerCurve,
) -> ShrinkerStatus {
    guard(|| {
        non_null(out, "out")?;
        let curve = core(read_curve(path_arg(path)?))?;
        emit(curve, out);
        Ok(())
    })
}

/// # Safety
/// `curve` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_write_csv(
    curve: *const ShrinkerCurve,
    path: *const c_char,
) -> ShrinkerStatus {
    guard(|| core(write_curve(curve_ref(curve)?, path_arg(path)?)))
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_len(curve: *const ShrinkerCurve) -> usize {
    if curve.is_null() {
        0
    } else {
        (*curve).0.len()
    }
}

/// Copies the coordinates into `r` and `z`, which hold `capacity` doubles
/// each. Fails with `InvalidInput` if `capacity` is below the curve length.
///
/// # Safety
/// `curve` must be a live handle; `r` and `z` must each be writable for
/// `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_copy_points(
    curve: *const ShrinkerCurve,
    r: *mut f64,
    z: *mut f64,
    capacity: usize,
) -> ShrinkerStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        non_null(r, "r")?;
        non_null(z, "z")?;
        if capacity < c.len() {
            return Err(fail(
                ShrinkerStatus::InvalidInput,
                format!("capacity {capacity} is below the {} curve points", c.len()),
            ));
        }
        for (i, q) in c.points().iter().enumerate() {
            *r.add(i) = q.r;
            *z.add(i) = q.z;
        }
        Ok(())
    })
}

/// Discrete length of the curve in the half-plane metric, which is the
/// entropy estimate for a solved cross-section.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_entropy(
    curve: *const ShrinkerCurve,
    out: *mut f64,
) -> ShrinkerStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        non_null(out, "out")?;
        *out = discrete_length(c);
        Ok(())
    })
}

/// Lowest `count` eigenvalues of `-L_k`, ascending.
///
/// # Safety
/// `curve` must be a live handle; `out` writable for `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn shrinker_spectrum(
    curve: *const ShrinkerCurve,
    k: u32,
    count: usize,
    out: *mut f64,
) -> ShrinkerStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        non_null(out, "out")?;
        if count == 0 || count > c.len() {
            return Err(fail(
                ShrinkerStatus::InvalidInput,
                format!("count must be in 1..={}, got {count}", c.len()),
            ));
        }
        let normals = core(normal_field(c))?;
        let values = core(eigenvalues(&assemble_lk(
            &core(assemble_l0(c, &normals))?,
            c,
            k,
        )))?;
        std::slice::from_raw_parts_mut(out, count).copy_from_slice(&values[..count]);
        Ok(())
    })
}

/// Morse index with dilations and translations removed, scanning
/// `k = 0..=k_max`.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn shrinker_index(
    curve: *const ShrinkerCurve,
    k_max: u32,
    out: *mut ShrinkerIndex,
) -> ShrinkerStatus {
    guard(|| {
        let c = curve_ref(curve)?;
        non_null(out, "out")?;
        let opts = IndexOptions {
            k_max,
            ..IndexOptions::default()
        };
        let report = core(compute_index_with(c, opts))?;
        *out = ShrinkerIndex {
            index: report.index,
            negative: report.total_negative_with_multiplicity,
            excluded: report.excluded_count(),
        };
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn shrinker_curve_free(curve: *mut ShrinkerCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length. The
/// message is empty after a successful call.
///
/// # Safety
/// `buf` must be null or writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn shrinker_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
