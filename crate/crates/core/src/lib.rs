//! Reconstruction of vectors from frame coefficients.
//!
//! The library implements the classical frame algorithm (Richardson
//! iteration with a fixed relaxation parameter), its greedy variants
//! with adaptive step sizes in the S-norm and the standard norm, the
//! robust greedy algorithm for noisy measurements, and the λ-saturated
//! frame algorithm for clipped coefficients — together with an
//! experiment harness that reproduces the reference Monte-Carlo
//! studies.
//!
//! Entry points:
//! * [`frame::Frame`] — frame vectors and the operators T, T*, S.
//! * [`algorithms`] — the iterative solvers and verification oracles.
//! * [`saturation`] — clipping and saturation recovery.
//! * [`generators`] — seeded construction of random experiment inputs.
//! * [`experiments`] — multi-trial statistics, CSV and SVG output.

pub mod algorithms;
pub mod error;
pub mod experiments;
pub mod frame;
pub mod generators;
mod linalg;
pub mod saturation;
pub mod svg;

pub use error::{FrameError, Result};
pub use frame::{Frame, FrameBounds, OperatorPolynomial};
