//! C ABI for the framealg library.
//!
//! Frames live behind an opaque handle created by [`fa_frame_new`] and
//! released by [`fa_frame_free`]; every fallible call returns an
//! [`FaStatus`] and writes results through caller-allocated buffers.
//! The generated header is `include/framealg.h`.

use std::os::raw::c_char;
use std::slice;

use framealg::algorithms::{classical_run, greedy_s_run, Measurements, StoppingRule};
use framealg::saturation::{saturated_run, SaturatedMeasurements, SaturatedMode};
use framealg::{Frame, FrameError};

/// Status code of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NotAFrame = 3,
    NonFinite = 4,
    StalledActiveSet = 5,
    InvalidParameter = 6,
    InternalError = 7,
}

fn status_of(err: &FrameError) -> FaStatus {
    match err {
        FrameError::DimensionMismatch { .. } => FaStatus::DimensionMismatch,
        FrameError::NotAFrame { .. } => FaStatus::NotAFrame,
        FrameError::NonFinite { .. } => FaStatus::NonFinite,
        FrameError::StalledActiveSet { .. } => FaStatus::StalledActiveSet,
        FrameError::InvalidParameter(_) => FaStatus::InvalidParameter,
        FrameError::NonPositiveStep { .. } | FrameError::Io { .. } | FrameError::Parse { .. } => {
            FaStatus::InternalError
        }
    }
}

/// Opaque frame handle.
pub struct FaFrame {
    inner: Frame,
}

/// Creates a frame from `count` row vectors of length `dim`, stored
/// contiguously row-major in `data`. On success writes the new handle
/// to `out`; free it with [`fa_frame_free`].
///
/// # Safety
/// `data` must point to `count * dim` readable doubles and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn fa_frame_new(
    data: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut FaFrame,
) -> FaStatus {
    if out.is_null() {
        return FaStatus::NullPointer;
    }
    *out = std::ptr::null_mut();
    if data.is_null() && count * dim != 0 {
        return FaStatus::NullPointer;
    }
    let flat = if count * dim == 0 {
        Vec::new()
    } else {
        slice::from_raw_parts(data, count * dim).to_vec()
    };
    match Frame::from_flat(flat, count, dim) {
        Ok(frame) => {
            *out = Box::into_raw(Box::new(FaFrame { inner: frame }));
            FaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a frame handle. A null pointer is a no-op.
///
/// # Safety
/// `frame` must be null or a pointer returned by [`fa_frame_new`] that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn fa_frame_free(frame: *mut FaFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// Number of frame vectors N; 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fa_frame_count(frame: *const FaFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.count())
}

/// Ambient dimension d; 0 for a null handle.
///
/// # Safety
/// `frame` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fa_frame_dim(frame: *const FaFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.inner.dim())
}

/// Optimal frame bounds (the extreme eigenvalues of the frame
/// operator). Fails with `NotAFrame` when the vectors do not span.
///
/// # Safety
/// `frame` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fa_frame_bounds(
    frame: *const FaFrame,
    lower: *mut f64,
    upper: *mut f64,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if lower.is_null() || upper.is_null() {
        return FaStatus::NullPointer;
    }
    match frame.inner.optimal_frame_bounds() {
        Ok(bounds) => {
            *lower = bounds.lower();
            *upper = bounds.upper();
            FaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Analysis operator: writes the N coefficients ⟨x, x_j⟩ to `out`.
///
/// # Safety
/// `x` must hold `x_len` doubles and `out` must hold `out_len` writable
/// doubles (`x_len == dim`, `out_len == count`).
#[no_mangle]
pub unsafe extern "C" fn fa_analyze(
    frame: *const FaFrame,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if x.is_null() || out.is_null() {
        return FaStatus::NullPointer;
    }
    if out_len != frame.inner.count() {
        return FaStatus::DimensionMismatch;
    }
    let x = slice::from_raw_parts(x, x_len);
    match frame.inner.analyze(x) {
        Ok(coeffs) => {
            slice::from_raw_parts_mut(out, out_len).copy_from_slice(&coeffs);
            FaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Synthesis operator: writes Σ c_j x_j to `out`.
///
/// # Safety
/// `coeffs` must hold `coeffs_len` doubles and `out` must hold
/// `out_len` writable doubles (`coeffs_len == count`, `out_len == dim`).
#[no_mangle]
pub unsafe extern "C" fn fa_synthesize(
    frame: *const FaFrame,
    coeffs: *const f64,
    coeffs_len: usize,
    out: *mut f64,
    out_len: usize,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if coeffs.is_null() || out.is_null() {
        return FaStatus::NullPointer;
    }
    if out_len != frame.inner.dim() {
        return FaStatus::DimensionMismatch;
    }
    let coeffs = slice::from_raw_parts(coeffs, coeffs_len);
    match frame.inner.synthesize(coeffs) {
        Ok(x) => {
            slice::from_raw_parts_mut(out, out_len).copy_from_slice(&x);
            FaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn write_reconstruction(
    result: Result<framealg::algorithms::IterationTrace, FrameError>,
    dim: usize,
    out_x: *mut f64,
    out_len: usize,
    iterations: *mut usize,
) -> FaStatus {
    if out_len != dim {
        return FaStatus::DimensionMismatch;
    }
    match result {
        Ok(trace) => {
            slice::from_raw_parts_mut(out_x, out_len).copy_from_slice(trace.final_iterate());
            if !iterations.is_null() {
                *iterations = trace.steps.len();
            }
            FaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Classical frame algorithm with fixed relaxation `alpha`. Runs at
/// most `max_iters` steps, stopping early once the residual falls to
/// `residual_tol` (pass a negative tolerance for the machine-level
/// default). Writes the final iterate to `out_x` and, when `iterations`
/// is non-null, the number of steps taken.
///
/// # Safety
/// Pointer arguments must reference buffers of the stated lengths;
/// `out_len` must equal the frame dimension.
#[no_mangle]
pub unsafe extern "C" fn fa_reconstruct_classical(
    frame: *const FaFrame,
    coeffs: *const f64,
    coeffs_len: usize,
    alpha: f64,
    max_iters: usize,
    residual_tol: f64,
    out_x: *mut f64,
    out_len: usize,
    iterations: *mut usize,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if coeffs.is_null() || out_x.is_null() {
        return FaStatus::NullPointer;
    }
    let coeffs = slice::from_raw_parts(coeffs, coeffs_len).to_vec();
    let stop = stopping_rule(max_iters, residual_tol);
    let result = classical_run(
        &frame.inner,
        &Measurements::exact(coeffs),
        alpha,
        &stop,
        None,
    );
    write_reconstruction(result, frame.inner.dim(), out_x, out_len, iterations)
}

/// Greedy frame algorithm (adaptive S-norm step): reconstructs from
/// possibly noisy coefficients without knowledge of the frame bounds.
///
/// # Safety
/// As for [`fa_reconstruct_classical`].
#[no_mangle]
pub unsafe extern "C" fn fa_reconstruct_greedy(
    frame: *const FaFrame,
    coeffs: *const f64,
    coeffs_len: usize,
    max_iters: usize,
    residual_tol: f64,
    out_x: *mut f64,
    out_len: usize,
    iterations: *mut usize,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if coeffs.is_null() || out_x.is_null() {
        return FaStatus::NullPointer;
    }
    let coeffs = slice::from_raw_parts(coeffs, coeffs_len).to_vec();
    let stop = stopping_rule(max_iters, residual_tol);
    let result = greedy_s_run(&frame.inner, &Measurements::exact(coeffs), &stop, None);
    write_reconstruction(result, frame.inner.dim(), out_x, out_len, iterations)
}

/// λ-saturated frame algorithm over clipped coefficients (entries in
/// [−lambda, lambda]; values at ±lambda count as saturated). `greedy`
/// selects the adaptive step; otherwise `relaxation` is used as the
/// fixed step.
///
/// # Safety
/// As for [`fa_reconstruct_classical`].
#[no_mangle]
pub unsafe extern "C" fn fa_reconstruct_saturated(
    frame: *const FaFrame,
    coeffs: *const f64,
    coeffs_len: usize,
    lambda: f64,
    greedy: bool,
    relaxation: f64,
    max_iters: usize,
    residual_tol: f64,
    out_x: *mut f64,
    out_len: usize,
    iterations: *mut usize,
) -> FaStatus {
    let Some(frame) = frame.as_ref() else {
        return FaStatus::NullPointer;
    };
    if coeffs.is_null() || out_x.is_null() {
        return FaStatus::NullPointer;
    }
    let coeffs = slice::from_raw_parts(coeffs, coeffs_len).to_vec();
    let sat = match SaturatedMeasurements::new(coeffs, lambda) {
        Ok(sat) => sat,
        Err(e) => return status_of(&e),
    };
    let mode = if greedy {
        SaturatedMode::Greedy
    } else {
        SaturatedMode::Fixed { relaxation }
    };
    let stop = stopping_rule(max_iters, residual_tol);
    let result = saturated_run(&frame.inner, &sat, mode, &stop, None);
    write_reconstruction(result, frame.inner.dim(), out_x, out_len, iterations)
}

fn stopping_rule(max_iters: usize, residual_tol: f64) -> StoppingRule {
    if residual_tol >= 0.0 {
        StoppingRule::with_tol(max_iters, residual_tol)
    } else {
        StoppingRule::new(max_iters)
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fa_status_message(status: FaStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        FaStatus::Ok => b"ok\0",
        FaStatus::NullPointer => b"null pointer argument\0",
        FaStatus::DimensionMismatch => b"dimension mismatch\0",
        FaStatus::NotAFrame => b"vectors do not form a frame\0",
        FaStatus::NonFinite => b"non-finite value encountered\0",
        FaStatus::StalledActiveSet => b"saturated active set is empty\0",
        FaStatus::InvalidParameter => b"invalid parameter\0",
        FaStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}
