//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! caller-allocated buffers, and status codes.

use std::ffi::CStr;
use std::ptr;

use framealg_ffi::*;

fn toy_frame() -> *mut FaFrame {
    // Rows {(1,0),(0,1),(1,1)}: bounds A=1, B=3.
    let data = [1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let mut handle: *mut FaFrame = ptr::null_mut();
    let status = unsafe { fa_frame_new(data.as_ptr(), 3, 2, &mut handle) };
    assert_eq!(status, FaStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn frame_lifecycle_and_bounds() {
    let frame = toy_frame();
    unsafe {
        assert_eq!(fa_frame_count(frame), 3);
        assert_eq!(fa_frame_dim(frame), 2);
        let (mut lower, mut upper) = (0.0, 0.0);
        assert_eq!(fa_frame_bounds(frame, &mut lower, &mut upper), FaStatus::Ok);
        assert!((lower - 1.0).abs() < 1e-12);
        assert!((upper - 3.0).abs() < 1e-12);
        fa_frame_free(frame);
        fa_frame_free(ptr::null_mut()); // no-op
    }
}

#[test]
fn analyze_and_synthesize_roundtrip() {
    let frame = toy_frame();
    unsafe {
        let x = [1.0, 0.0];
        let mut coeffs = [0.0; 3];
        assert_eq!(
            fa_analyze(frame, x.as_ptr(), 2, coeffs.as_mut_ptr(), 3),
            FaStatus::Ok
        );
        assert_eq!(coeffs, [1.0, 0.0, 1.0]);

        let mut back = [0.0; 2];
        assert_eq!(
            fa_synthesize(frame, coeffs.as_ptr(), 3, back.as_mut_ptr(), 2),
            FaStatus::Ok
        );
        // T*Tx = Sx = (2, 1).
        assert_eq!(back, [2.0, 1.0]);
        fa_frame_free(frame);
    }
}

#[test]
fn greedy_reconstruction_recovers_target() {
    let frame = toy_frame();
    unsafe {
        let x = [0.3, -0.8];
        let mut coeffs = [0.0; 3];
        assert_eq!(
            fa_analyze(frame, x.as_ptr(), 2, coeffs.as_mut_ptr(), 3),
            FaStatus::Ok
        );
        let mut recovered = [0.0; 2];
        let mut iterations = 0usize;
        let status = fa_reconstruct_greedy(
            frame,
            coeffs.as_ptr(),
            3,
            200,
            -1.0, // default stagnation tolerance
            recovered.as_mut_ptr(),
            2,
            &mut iterations,
        );
        assert_eq!(status, FaStatus::Ok);
        assert!(iterations > 0);
        for (a, b) in recovered.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10, "{recovered:?} vs {x:?}");
        }

        let mut classical = [0.0; 2];
        let status = fa_reconstruct_classical(
            frame,
            coeffs.as_ptr(),
            3,
            0.5, // optimal α for A=1, B=3
            500,
            -1.0,
            classical.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(status, FaStatus::Ok);
        for (a, b) in classical.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
        fa_frame_free(frame);
    }
}

#[test]
fn saturated_reconstruction_roundtrip() {
    // Orthonormal basis of R^2, one clipped coefficient.
    let data = [1.0, 0.0, 0.0, 1.0];
    let mut frame: *mut FaFrame = ptr::null_mut();
    unsafe {
        assert_eq!(fa_frame_new(data.as_ptr(), 2, 2, &mut frame), FaStatus::Ok);
        let clipped = [0.5, 0.2]; // x = (1.0, 0.2) clipped at λ = 0.5
        let mut out = [0.0; 2];
        let status = fa_reconstruct_saturated(
            frame,
            clipped.as_ptr(),
            2,
            0.5,
            true,
            1.0,
            100,
            -1.0,
            out.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(status, FaStatus::Ok);
        // The unsaturated coordinate is recovered exactly; the
        // saturated one is pushed to the threshold.
        assert!((out[1] - 0.2).abs() < 1e-10);
        assert!(out[0] >= 0.5 - 1e-10);

        // Out-of-range coefficients are rejected.
        let bad = [0.9, 0.0];
        let status = fa_reconstruct_saturated(
            frame,
            bad.as_ptr(),
            2,
            0.5,
            false,
            1.0,
            10,
            -1.0,
            out.as_mut_ptr(),
            2,
            ptr::null_mut(),
        );
        assert_eq!(status, FaStatus::InvalidParameter);
        fa_frame_free(frame);
    }
}

#[test]
fn error_paths_report_status() {
    unsafe {
        let mut handle: *mut FaFrame = ptr::null_mut();
        assert_eq!(
            fa_frame_new(ptr::null(), 2, 2, &mut handle),
            FaStatus::NullPointer
        );
        let nan = [f64::NAN, 0.0];
        assert_eq!(
            fa_frame_new(nan.as_ptr(), 1, 2, &mut handle),
            FaStatus::NonFinite
        );

        // Rank-deficient: bounds must say NotAFrame.
        let deficient = [1.0, 0.0, 2.0, 0.0];
        assert_eq!(
            fa_frame_new(deficient.as_ptr(), 2, 2, &mut handle),
            FaStatus::Ok
        );
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(
            fa_frame_bounds(handle, &mut lo, &mut hi),
            FaStatus::NotAFrame
        );

        // Wrong output length.
        let x = [1.0, 2.0];
        let mut small = [0.0; 1];
        assert_eq!(
            fa_analyze(handle, x.as_ptr(), 2, small.as_mut_ptr(), 1),
            FaStatus::DimensionMismatch
        );
        fa_frame_free(handle);

        assert_eq!(fa_frame_count(ptr::null()), 0);
        assert_eq!(fa_frame_dim(ptr::null()), 0);
    }
}

#[test]
fn status_messages_are_static_strings() {
    for status in [
        FaStatus::Ok,
        FaStatus::NullPointer,
        FaStatus::DimensionMismatch,
        FaStatus::NotAFrame,
        FaStatus::NonFinite,
        FaStatus::StalledActiveSet,
        FaStatus::InvalidParameter,
        FaStatus::InternalError,
    ] {
        let ptr = fa_status_message(status);
        assert!(!ptr.is_null());
        let text = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap();
        assert!(!text.is_empty());
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = include_str!("../include/framealg.h");
    for symbol in [
        "typedef struct FaFrame FaFrame",
        "fa_frame_new",
        "fa_frame_free",
        "fa_frame_bounds",
        "fa_analyze",
        "fa_synthesize",
        "fa_reconstruct_classical",
        "fa_reconstruct_greedy",
        "fa_reconstruct_saturated",
        "fa_status_message",
        "FA_STATUS_OK",
    ] {
        assert!(header.contains(symbol), "header missing {symbol}");
    }
}
