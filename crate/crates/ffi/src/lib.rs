//! C interface to `mixquant`.
//!
//! Results and measures are handed out as opaque pointers that the caller
//! releases with the matching `*_free` function. Every fallible call returns
//! an [`MqStatus`]; on failure a message is available from
//! [`mq_last_error`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mixquant::circle_diameter::{self, AllocationTriple};
use mixquant::exact;
use mixquant::oracle::{self, LloydConfig};
use mixquant::{Allocation, Codebook, Error, MixedMeasure, Model, Point, QuantizationResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MqStatus {
    Ok = 0,
    InvalidArg = 1,
    NonConvergence = 2,
    ZeroMass = 3,
    DegenerateCell = 4,
    NoRealSolution = 5,
    Assertion = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MqModel {
    CircleDiameter = 0,
    Disconnected = 1,
    Connected = 2,
}

impl From<MqModel> for Model {
    fn from(m: MqModel) -> Self {
        match m {
            MqModel::CircleDiameter => Model::CircleDiameter,
            MqModel::Disconnected => Model::Disconnected,
            MqModel::Connected => Model::Connected,
        }
    }
}

/// An optimal or oracle codebook with its error.
pub struct MqResult {
    inner: QuantizationResult,
}

/// One of the three model measures.
pub struct MqMeasure {
    inner: MixedMeasure,
}

/// Returned through `k`, `n1` or `n2` when that count does not apply.
pub const MQ_NO_COUNT: usize = !0;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MqStatus {
    match e {
        Error::InvalidArg(_) => MqStatus::InvalidArg,
        Error::NonConvergence { .. } => MqStatus::NonConvergence,
        Error::ZeroMass { .. } => MqStatus::ZeroMass,
        Error::DegenerateCell { .. } => MqStatus::DegenerateCell,
        Error::NoRealSolution(_) => MqStatus::NoRealSolution,
        Error::Assertion(_) => MqStatus::Assertion,
    }
}

fn fail(status: MqStatus, msg: impl Into<String>) -> MqStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), MqStatus>) -> MqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MqStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(MqStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: mixquant::Result<T>) -> Result<T, MqStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), MqStatus> {
    if p.is_null() {
        Err(fail(MqStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
unsafe fn emit(out: *mut *mut MqResult, r: QuantizationResult) {
    *out = Box::into_raw(Box::new(MqResult { inner: r }));
}

/// Message of the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Closed-form optimal set of `n`-means for `model`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mq_optimal_set(model: MqModel, n: usize, out: *mut *mut MqResult) -> MqStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lift(Model::from(model).optimal_set(n))?;
        emit(out, r);
        Ok(())
    })
}

/// Best-of-`restarts` Lloyd iteration with the given seed and tolerance.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mq_lloyd(
    model: MqModel,
    n: usize,
    seed: u64,
    restarts: usize,
    tol: f64,
    out: *mut *mut MqResult,
) -> MqStatus {
    guard(|| {
        non_null(out, "out")?;
        let config = LloydConfig {
            restarts,
            tol,
            seed,
            ..LloydConfig::default()
        };
        let r = lift(oracle::lloyd(&Model::from(model).measure(), n, &config))?;
        emit(out, r);
        Ok(())
    })
}

/// Exhaustive partition search, `n ≤ 3`, `grid ≥ 512`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mq_brute_force(model: MqModel, n: usize, grid: usize, out: *mut *mut MqResult) -> MqStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lift(oracle::brute_force(&Model::from(model).measure(), n, grid))?;
        emit(out, r);
        Ok(())
    })
}

/// Number of points; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mq_result_len(r: *const MqResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.codebook.len())
}

/// Coordinates per point (1 or 2); 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mq_result_dim(r: *const MqResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.codebook.dim())
}

/// Quantization error; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mq_result_error(r: *const MqResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.error)
}

/// Copies the points, row-major, into `buf` of `len * dim` doubles.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `buf_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mq_result_points(r: *const MqResult, buf: *mut f64, buf_len: usize) -> MqStatus {
    guard(|| {
        non_null(r, "result")?;
        non_null(buf, "buf")?;
        let cb = &(*r).inner.codebook;
        let dim = cb.dim();
        let need = cb.len() * dim;
        if buf_len < need {
            return Err(fail(MqStatus::BufferTooSmall, format!("need {need} doubles, got {buf_len}")));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (i, p) in cb.points().iter().enumerate() {
            dst[i * dim] = p.x;
            if dim == 2 {
                dst[i * dim + 1] = p.y;
            }
        }
        Ok(())
    })
}

/// Allocation of the codebook. For the circle model all three counts are
/// set; for the interval models only `k`. Missing counts are
/// [`MQ_NO_COUNT`]. Any output pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mq_result_allocation(
    r: *const MqResult,
    k: *mut usize,
    n1: *mut usize,
    n2: *mut usize,
) -> MqStatus {
    guard(|| {
        non_null(r, "result")?;
        let (a, b, c) = match (*r).inner.allocation {
            Some(Allocation::Circle(t)) => (t.k, t.n1, t.n2),
            Some(Allocation::Split { k }) => (k, MQ_NO_COUNT, MQ_NO_COUNT),
            None => (MQ_NO_COUNT, MQ_NO_COUNT, MQ_NO_COUNT),
        };
        for (p, v) in [(k, a), (n1, b), (n2, c)] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Writes the exact error as a NUL-terminated "p/q" string. Returns
/// `NoRealSolution` when no exact value is known; `BufferTooSmall` when
/// `buf_len` cannot hold the string and its terminator.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mq_result_error_exact(r: *const MqResult, buf: *mut c_char, buf_len: usize) -> MqStatus {
    guard(|| {
        non_null(r, "result")?;
        non_null(buf, "buf")?;
        let Some(q) = (*r).inner.error_exact else {
            return Err(fail(MqStatus::NoRealSolution, "no exact error for this result"));
        };
        let s = exact::format(q);
        if s.len() + 1 > buf_len {
            return Err(fail(MqStatus::BufferTooSmall, format!("need {} bytes, got {buf_len}", s.len() + 1)));
        }
        ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, s.len());
        *buf.add(s.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mq_result_free(r: *mut MqResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mq_measure_new(model: MqModel, out: *mut *mut MqMeasure) -> MqStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(MqMeasure {
            inner: Model::from(model).measure(),
        }));
        Ok(())
    })
}

/// Expected squared distance to the nearest of `n` points given row-major
/// in `points` (`n * dim` doubles, dim as for the model).
///
/// # Safety
/// `m` must be a live handle; `points` must hold `n * dim` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn mq_measure_distortion(
    m: *const MqMeasure,
    points: *const f64,
    n: usize,
    out: *mut f64,
) -> MqStatus {
    guard(|| {
        non_null(m, "measure")?;
        non_null(points, "points")?;
        non_null(out, "out")?;
        let measure = &(*m).inner;
        let dim = measure.ambient_dim();
        let raw = std::slice::from_raw_parts(points, n * dim);
        let pts: Vec<Point> = raw
            .chunks_exact(dim)
            .map(|c| if dim == 1 { Point::on_line(c[0]) } else { Point::new(c[0], c[1]) })
            .collect();
        let cb = lift(Codebook::with_dim(dim, pts))?;
        *out = lift(measure.distortion(&cb))?;
        Ok(())
    })
}

/// Mean and variance of the measure; `mean` receives `dim` doubles.
///
/// # Safety
/// `m` must be a live handle; `mean` must hold two doubles; `variance`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn mq_measure_moments(m: *const MqMeasure, mean: *mut f64, variance: *mut f64) -> MqStatus {
    guard(|| {
        non_null(m, "measure")?;
        non_null(mean, "mean")?;
        non_null(variance, "variance")?;
        let measure = &(*m).inner;
        let c = measure.mean();
        *mean = c.x;
        if measure.ambient_dim() == 2 {
            *mean.add(1) = c.y;
        }
        *variance = measure.variance();
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mq_measure_free(m: *mut MqMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Boundary angles and diameter cut for the circle model with `n1` points
/// on the upper arc, `n2` on the lower arc and `k` interior diameter points,
/// plus the resulting distortion.
///
/// # Safety
/// All output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn mq_circle_boundaries(
    n1: usize,
    n2: usize,
    k: usize,
    a: *mut f64,
    b: *mut f64,
    c: *mut f64,
    distortion: *mut f64,
) -> MqStatus {
    guard(|| {
        for (p, name) in [(a, "a"), (b, "b"), (c, "c"), (distortion, "distortion")] {
            non_null(p, name)?;
        }
        let alloc = AllocationTriple::new(n1, n2, k);
        let p = lift(circle_diameter::solve_boundaries(&alloc))?;
        let v = lift(circle_diameter::distortion_v(&alloc, &p))?;
        *a = p.a;
        *b = p.b;
        *c = p.c;
        *distortion = v;
        Ok(())
    })
}
