//! Iterative reconstruction from frame coefficients.
//!
//! Four solvers share the recursion y_{n+1} = y_n + α_n·T*(c − T y_n):
//!
//! * `classical_run` — fixed relaxation α; contracts at
//!   C_α = max(|1−αA|, |1−αB|) for 0 < α < 2/B.
//! * `greedy_s_run` — adaptive α_n = ‖T*(c−Ty_n)‖² / ‖T*(c−Ty_n)‖_S²,
//!   the step that maximizes the S-norm error reduction. Needs no frame
//!   bounds and is computable from (possibly noisy) measurements.
//! * `greedy_std_run` — adaptive α_n = ‖x−y_n‖_S² / ‖S(x−y_n)‖²,
//!   optimal in the standard norm. Its step size is not computable from
//!   measurements alone, so this variant takes the ground truth.
//! * `saturated_run` (see the `saturation` module) — the clipped-
//!   coefficient variant.
//!
//! `neumann_partial` and `project_onto_range` are oracle operations:
//! the first reproduces classical iterates through the truncated
//! Neumann series for S⁻¹, the second computes the least-squares
//! projection that the robustness analysis is built on.

use crate::error::{FrameError, Result};
use crate::frame::Frame;
use crate::linalg::{self, dot, norm};

/// Stagnation floor: a run stops once ‖T*(c−Ty_n)‖ ≤ scale·(1+‖c‖).
/// The adaptive step is 0/0 at an exact fixed point, so runs detect
/// machine-level stagnation instead of dividing.
pub const DEFAULT_RESIDUAL_TOL_SCALE: f64 = 1e-14;

/// Default stagnation tolerance for a coefficient sequence.
pub fn default_residual_tol(coeffs: &[f64]) -> f64 {
    DEFAULT_RESIDUAL_TOL_SCALE * (1.0 + norm(coeffs))
}

/// A coefficient sequence c with its noise budget δ₀ (`0.0` for exact
/// data, `f64::INFINITY` when unknown).
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub coeffs: Vec<f64>,
    pub noise_bound: f64,
}

impl Measurements {
    pub fn exact(coeffs: Vec<f64>) -> Self {
        Measurements {
            coeffs,
            noise_bound: 0.0,
        }
    }

    pub fn noisy(coeffs: Vec<f64>, noise_bound: f64) -> Result<Self> {
        if noise_bound < 0.0 || noise_bound.is_nan() {
            return Err(FrameError::InvalidParameter(format!(
                "noise bound must be nonnegative, got {noise_bound}"
            )));
        }
        Ok(Measurements {
            coeffs,
            noise_bound,
        })
    }
}

/// Iteration budget and stagnation tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub max_iters: usize,
    /// Stop once ‖T*(c−Ty_n)‖ ≤ this; `None` uses
    /// [`default_residual_tol`] of the measurement sequence.
    pub residual_tol: Option<f64>,
}

impl StoppingRule {
    pub fn new(max_iters: usize) -> Self {
        StoppingRule {
            max_iters: max_iters.max(1),
            residual_tol: None,
        }
    }

    pub fn with_tol(max_iters: usize, residual_tol: f64) -> Self {
        StoppingRule {
            max_iters: max_iters.max(1),
            residual_tol: Some(residual_tol),
        }
    }

    fn effective_tol(&self, coeffs: &[f64]) -> f64 {
        self.residual_tol
            .unwrap_or_else(|| default_residual_tol(coeffs))
    }
}

/// Per-step record of a solver run. `iterates` always starts at
/// y_0 = 0 and has one more entry than `steps`; the error arrays are
/// populated only when ground truth was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iterates: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    /// ‖x − y_k‖ per iterate when truth was supplied.
    pub err_std: Option<Vec<f64>>,
    /// ‖x − y_k‖_S per iterate when truth was supplied.
    pub err_s: Option<Vec<f64>>,
    /// ‖T*(c − T y_k)‖ per iterate.
    pub residual_norms: Vec<f64>,
    /// Active-set size per iterate (saturated runs only).
    pub active_set_sizes: Option<Vec<usize>>,
    /// Index of the iterate whose residual met the tolerance, if the
    /// run stopped before exhausting `max_iters`.
    pub converged_at: Option<usize>,
}

impl IterationTrace {
    fn new(with_truth: bool) -> Self {
        IterationTrace {
            iterates: Vec::new(),
            steps: Vec::new(),
            err_std: with_truth.then(Vec::new),
            err_s: with_truth.then(Vec::new),
            residual_norms: Vec::new(),
            active_set_sizes: None,
            converged_at: None,
        }
    }

    pub fn final_iterate(&self) -> &[f64] {
        self.iterates.last().expect("trace always holds y_0")
    }

    /// Standard-norm errors padded to `iters + 1` entries: a run that
    /// stagnated early holds its final iterate, so its error repeats.
    pub fn padded_err_std(&self, iters: usize) -> Option<Vec<f64>> {
        let errs = self.err_std.as_ref()?;
        let mut padded = errs.clone();
        let last = *padded.last()?;
        padded.resize(iters + 1, last);
        Some(padded)
    }

    fn record(&mut self, y: &[f64], residual_norm: f64, truth: Option<(&[f64], &[f64], &[f64])>) {
        self.iterates.push(y.to_vec());
        self.residual_norms.push(residual_norm);
        if let Some((x, a_x, a_y)) = truth {
            let std_err = x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let s_err = a_x
                .iter()
                .zip(a_y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            self.err_std.as_mut().expect("allocated").push(std_err);
            self.err_s.as_mut().expect("allocated").push(s_err);
        }
    }
}

/// Outcome of a single greedy step.
#[derive(Debug, Clone, PartialEq)]
pub enum GreedyStep {
    Step { alpha: f64, next: Vec<f64> },
    /// The residual is at the stagnation floor; no step was taken.
    Converged,
}

enum StepSize {
    Fixed(f64),
    GreedyS,
}

fn check_finite(y: &[f64], context: &'static str) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(FrameError::NonFinite { context })
    }
}

fn run_measurement_driven(
    frame: &Frame,
    coeffs: &[f64],
    step: StepSize,
    stop: &StoppingRule,
    truth: Option<&[f64]>,
) -> Result<IterationTrace> {
    if coeffs.len() != frame.count() {
        return Err(FrameError::DimensionMismatch {
            context: "measurement coefficients",
            expected: frame.count(),
            actual: coeffs.len(),
        });
    }
    check_finite(coeffs, "measurement coefficients")?;
    let tol = stop.effective_tol(coeffs);
    let a_truth = match truth {
        Some(x) => Some((x, frame.analyze(x)?)),
        None => None,
    };

    let mut trace = IterationTrace::new(truth.is_some());
    let mut y = vec![0.0; frame.dim()];
    loop {
        let a_y = frame.analyze(&y)?;
        let diff: Vec<f64> = coeffs.iter().zip(&a_y).map(|(c, a)| c - a).collect();
        let r = frame.synthesize(&diff)?;
        let residual_norm = norm(&r);
        if !residual_norm.is_finite() {
            return Err(FrameError::NonFinite {
                context: "iteration residual",
            });
        }
        trace.record(&y, residual_norm, a_truth.as_ref().map(|(x, ax)| (*x, &ax[..], &a_y[..])));

        if residual_norm <= tol {
            trace.converged_at = Some(trace.steps.len());
            break;
        }
        if trace.steps.len() >= stop.max_iters {
            break;
        }

        let alpha = match step {
            StepSize::Fixed(a) => a,
            StepSize::GreedyS => {
                let s_r = frame.analyze(&r)?;
                let denom = dot(&s_r, &s_r);
                let alpha = residual_norm * residual_norm / denom;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(FrameError::NonPositiveStep { alpha });
                }
                alpha
            }
        };
        for (yi, ri) in y.iter_mut().zip(&r) {
            *yi += alpha * ri;
        }
        check_finite(&y, "iterate")?;
        trace.steps.push(alpha);
    }
    Ok(trace)
}

/// Classical frame algorithm with fixed relaxation α, driven by
/// measurements: y_{n+1} = y_n + α·T*(c − T y_n).
///
/// With exact coefficients c = Tx and 0 < α < 2/B the error satisfies
/// ‖x − y_n‖ ≤ C_α^n ‖x‖. The caller chooses α; values at or above 2/B
/// simply do not contract (and may diverge, which surfaces as a
/// `NonFinite` abort).
pub fn classical_run(
    frame: &Frame,
    measurements: &Measurements,
    alpha: f64,
    stop: &StoppingRule,
    truth: Option<&[f64]>,
) -> Result<IterationTrace> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FrameError::InvalidParameter(format!(
            "relaxation parameter must be positive and finite, got {alpha}"
        )));
    }
    run_measurement_driven(frame, &measurements.coeffs, StepSize::Fixed(alpha), stop, truth)
}

/// One adaptive step in the S-norm: with residual r = T*(c − Ty),
/// α = ‖r‖²/‖r‖_S² and y_next = y + α·r. The step size always lies in
/// [1/B, 1/A]. Returns `Converged` without stepping once ‖r‖ is at or
/// below `residual_tol`.
pub fn greedy_s_step(
    frame: &Frame,
    coeffs: &[f64],
    y: &[f64],
    residual_tol: f64,
) -> Result<GreedyStep> {
    let a_y = frame.analyze(y)?;
    if coeffs.len() != a_y.len() {
        return Err(FrameError::DimensionMismatch {
            context: "measurement coefficients",
            expected: a_y.len(),
            actual: coeffs.len(),
        });
    }
    let diff: Vec<f64> = coeffs.iter().zip(&a_y).map(|(c, a)| c - a).collect();
    let r = frame.synthesize(&diff)?;
    let residual_norm = norm(&r);
    if !residual_norm.is_finite() {
        return Err(FrameError::NonFinite {
            context: "greedy residual",
        });
    }
    if residual_norm <= residual_tol {
        return Ok(GreedyStep::Converged);
    }
    let s_r = frame.analyze(&r)?;
    let denom = dot(&s_r, &s_r);
    let alpha = residual_norm * residual_norm / denom;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FrameError::NonPositiveStep { alpha });
    }
    let next: Vec<f64> = y.iter().zip(&r).map(|(yi, ri)| yi + alpha * ri).collect();
    check_finite(&next, "greedy iterate")?;
    Ok(GreedyStep::Step { alpha, next })
}

/// Greedy frame algorithm in the S-norm, driven by measurements.
///
/// With exact data the S-norm error satisfies
/// ‖x−y_n‖_S ≤ ((B−A)/(B+A))^n ‖x‖_S; with ‖Tx−c‖ ≤ δ₀ it satisfies
/// ‖x−y_n‖_S ≤ ((B−A)/(B+A))^n (‖x‖_S + 2δ₀) + 2δ₀.
pub fn greedy_s_run(
    frame: &Frame,
    measurements: &Measurements,
    stop: &StoppingRule,
    truth: Option<&[f64]>,
) -> Result<IterationTrace> {
    run_measurement_driven(frame, &measurements.coeffs, StepSize::GreedyS, stop, truth)
}

/// Greedy frame algorithm in the standard norm:
/// α_n = ‖x−y_n‖_S² / ‖S(x−y_n)‖², y_{n+1} = y_n + α_n·S(x−y_n).
///
/// The step size needs ‖x−y_n‖_S, which cannot be recovered from noisy
/// measurements, so this variant takes the ground truth directly and is
/// an exact-data algorithm by design. The standard-norm error satisfies
/// ‖x−y_n‖ ≤ ((B−A)/(B+A))^n ‖x‖.
pub fn greedy_std_run(frame: &Frame, x: &[f64], stop: &StoppingRule) -> Result<IterationTrace> {
    let a_x = frame.analyze(x)?;
    check_finite(&a_x, "target coefficients")?;
    let tol = stop.effective_tol(&a_x);

    let mut trace = IterationTrace::new(true);
    let mut y = vec![0.0; frame.dim()];
    loop {
        let a_y = frame.analyze(&y)?;
        let diff: Vec<f64> = a_x.iter().zip(&a_y).map(|(c, a)| c - a).collect();
        let r = frame.synthesize(&diff)?; // S(x - y)
        let residual_norm = norm(&r);
        if !residual_norm.is_finite() {
            return Err(FrameError::NonFinite {
                context: "iteration residual",
            });
        }
        trace.record(&y, residual_norm, Some((x, &a_x, &a_y)));

        if residual_norm <= tol {
            trace.converged_at = Some(trace.steps.len());
            break;
        }
        if trace.steps.len() >= stop.max_iters {
            break;
        }

        let numerator = dot(&diff, &diff); // ‖x−y‖_S²
        let alpha = numerator / (residual_norm * residual_norm);
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(FrameError::NonPositiveStep { alpha });
        }
        for (yi, ri) in y.iter_mut().zip(&r) {
            *yi += alpha * ri;
        }
        check_finite(&y, "iterate")?;
        trace.steps.push(alpha);
    }
    Ok(trace)
}

/// Evaluates F_n·Sx where F_n = α·Σ_{k=0}^{n−1} (I − αS)^k by
/// Horner-style repeated application of (I − αS); no matrix powers are
/// materialized. Equals the classical iterate y_n for exact data.
/// n = 0 gives the empty sum, the zero vector.
pub fn neumann_partial(frame: &Frame, alpha: f64, n: usize, x: &[f64]) -> Result<Vec<f64>> {
    if !alpha.is_finite() {
        return Err(FrameError::InvalidParameter(format!(
            "relaxation parameter must be finite, got {alpha}"
        )));
    }
    check_finite(x, "neumann input")?;
    let v = frame.apply_frame_operator(x)?;
    if n == 0 {
        return Ok(vec![0.0; frame.dim()]);
    }
    let mut acc = v.clone();
    for _ in 1..n {
        let s_acc = frame.apply_frame_operator(&acc)?;
        for ((a, &vi), &si) in acc.iter_mut().zip(&v).zip(&s_acc) {
            *a = vi + *a - alpha * si;
        }
    }
    Ok(acc.into_iter().map(|a| alpha * a).collect())
}

/// Least-squares decomposition of a coefficient sequence: x̃ = S⁻¹T*c
/// solves min_z ‖Tz − c‖, and c̃ = c − Tx̃ is the residual component in
/// the null space of T* (so T*c̃ = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProjection {
    pub x_tilde: Vec<f64>,
    pub c_tilde: Vec<f64>,
}

/// Orthogonal projection of `coeffs` onto the range of the analysis
/// operator, via a symmetric positive-definite solve of S x̃ = T*c
/// (no explicit inverse).
pub fn project_onto_range(frame: &Frame, coeffs: &[f64]) -> Result<RangeProjection> {
    if coeffs.len() != frame.count() {
        return Err(FrameError::DimensionMismatch {
            context: "projection coefficients",
            expected: frame.count(),
            actual: coeffs.len(),
        });
    }
    let d = frame.dim();
    let s = frame.operator_matrix();
    let (eigenvalues, _) = linalg::sym_eigen(&s, d);
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    if min <= crate::frame::POSITIVE_DEFINITE_TOL * max.max(0.0) {
        return Err(FrameError::NotAFrame {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    let b = frame.synthesize(coeffs)?;
    let x_tilde = linalg::cholesky_solve(&s, d, &b).ok_or(FrameError::NotAFrame {
        min_eigenvalue: min,
        max_eigenvalue: max,
    })?;
    let a_xt = frame.analyze(&x_tilde)?;
    let c_tilde: Vec<f64> = coeffs.iter().zip(&a_xt).map(|(c, a)| c - a).collect();
    Ok(RangeProjection { x_tilde, c_tilde })
}

/// Evaluates both sides of the identity
/// ‖x̃ − y‖_S² = ‖c − Ty‖² − ‖c̃‖² by independent routes: the left via
/// the range projection and the S-norm, the right directly in
/// coefficient space. Returns (lhs, rhs) for the caller to compare.
pub fn projection_identity_check(frame: &Frame, coeffs: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let projection = project_onto_range(frame, coeffs)?;
    let diff: Vec<f64> = projection
        .x_tilde
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .collect();
    let lhs = frame.s_norm(&diff)?.powi(2);

    let a_y = frame.analyze(y)?;
    let res_sq: f64 = coeffs
        .iter()
        .zip(&a_y)
        .map(|(c, a)| (c - a) * (c - a))
        .sum();
    let c_tilde_sq: f64 = projection.c_tilde.iter().map(|c| c * c).sum();
    Ok((lhs, res_sq - c_tilde_sq))
}
