//! Seeded multi-trial reproductions of the two numerical studies:
//!
//! * Example 1 — noisy measurements with erasures: a random Parseval
//!   frame (N = 200, d = 100) measures a random unit vector, Gaussian
//!   noise of norm δ₀ = 1e-6 is added, 10 coefficients are erased, and
//!   the classical (α = 1) and greedy solvers reconstruct from the
//!   surviving sub-frame, whose bounds are unknown.
//! * Example 2 — saturation recovery: coefficients of a random unit
//!   vector against a random Parseval frame (N = 250, d = 100) are
//!   clipped at λ = 0.08 and recovered by the λ-saturated algorithm
//!   with fixed relaxation 1 and with the greedy step.
//!
//! Each experiment aggregates ‖x − y_n‖ across trials into per-iteration
//! mean and 10th/90th nearest-rank percentiles, plus the geometric
//! per-iteration reduction rate of the mean-error curve over a fixed
//! window (iterations 1→15 for Example 1, 1→50 for Example 2).
//!
//! Determinism: trial t draws everything from the child seed
//! `mix_seed(seed, t)`; degenerate trials (sub-frame fails to span,
//! stalled active set) are redrawn from `mix_seed(child, attempt)` and
//! tallied, keeping the trial count fixed. Trials run in parallel and
//! are aggregated by trial index, so summaries are independent of
//! scheduling.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::algorithms::{classical_run, greedy_s_run, Measurements, StoppingRule};
use crate::error::{FrameError, Result};
use crate::generators::{
    apply_erasures, gaussian_noise, mix_seed, random_parseval_frame, random_unit_vector, SeededRng,
};
use crate::saturation::{saturate, saturated_run, SaturatedMode};

/// Seed used when the command line does not supply one.
pub const DEFAULT_SEED: u64 = 42;

/// Attempt budget per trial before a degenerate draw becomes an error.
const MAX_REDRAWS: u64 = 32;

/// Parameters of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Ambient dimension d.
    pub dim: usize,
    /// Number of frame vectors N.
    pub count: usize,
    pub trials: usize,
    pub iters: usize,
    pub seed: u64,
    /// Noise norm δ₀ added to the coefficients (Example 1).
    pub noise_norm: f64,
    /// Number of erased coefficients (Example 1).
    pub erasures: usize,
    /// Saturation level λ (Example 2 only).
    pub lambda: Option<f64>,
    /// Relaxation for the classical solver (Example 1).
    pub classical_alpha: f64,
}

impl TrialConfig {
    pub fn example1_defaults() -> Self {
        TrialConfig {
            dim: 100,
            count: 200,
            trials: 1000,
            iters: 50,
            seed: DEFAULT_SEED,
            noise_norm: 1e-6,
            erasures: 10,
            lambda: None,
            classical_alpha: 1.0,
        }
    }

    pub fn example2_defaults() -> Self {
        TrialConfig {
            dim: 100,
            count: 250,
            trials: 1000,
            iters: 50,
            seed: DEFAULT_SEED,
            noise_norm: 0.0,
            erasures: 0,
            lambda: Some(0.08),
            classical_alpha: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.count == 0 {
            return Err(FrameError::InvalidParameter(
                "dimensions must be at least 1".into(),
            ));
        }
        if self.dim > self.count {
            return Err(FrameError::InvalidParameter(format!(
                "d={} must not exceed N={}",
                self.dim, self.count
            )));
        }
        if self.erasures > self.count {
            return Err(FrameError::InvalidParameter(format!(
                "erasures={} exceed N={}",
                self.erasures, self.count
            )));
        }
        if self.count - self.erasures < self.dim {
            return Err(FrameError::InvalidParameter(format!(
                "N−erasures = {} leaves fewer vectors than d={}: no surviving sub-collection can span",
                self.count - self.erasures,
                self.dim
            )));
        }
        if self.iters == 0 || self.trials == 0 {
            return Err(FrameError::InvalidParameter(
                "trials and iters must be at least 1".into(),
            ));
        }
        if self.noise_norm < 0.0 || self.noise_norm.is_nan() {
            return Err(FrameError::InvalidParameter(format!(
                "noise norm must be nonnegative, got {}",
                self.noise_norm
            )));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(FrameError::InvalidParameter(format!(
                    "lambda must be positive and finite, got {l}"
                )));
            }
        }
        if !(self.classical_alpha > 0.0 && self.classical_alpha.is_finite()) {
            return Err(FrameError::InvalidParameter(format!(
                "alpha must be positive and finite, got {}",
                self.classical_alpha
            )));
        }
        Ok(())
    }
}

/// Geometric per-iteration reduction rate of the mean error between two
/// iterations, with a degeneracy flag when a nonpositive mean makes the
/// rate meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionRate {
    pub rate: f64,
    pub window: (usize, usize),
    pub degenerate: bool,
}

impl fmt::Display for ReductionRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} (iterations {}..{}{})",
            self.rate,
            self.window.0,
            self.window.1,
            if self.degenerate { ", degenerate" } else { "" }
        )
    }
}

/// (mean_err[n2] / mean_err[n1])^(1/(n2−n1)).
pub fn reduction_rate(mean_err: &[f64], n1: usize, n2: usize) -> Result<ReductionRate> {
    if n1 >= n2 || n2 >= mean_err.len() {
        return Err(FrameError::InvalidParameter(format!(
            "rate window {n1}..{n2} invalid for {} iterations",
            mean_err.len().saturating_sub(1)
        )));
    }
    if mean_err[n1] <= 0.0 || mean_err[n2] <= 0.0 {
        return Ok(ReductionRate {
            rate: 0.0,
            window: (n1, n2),
            degenerate: true,
        });
    }
    Ok(ReductionRate {
        rate: (mean_err[n2] / mean_err[n1]).powf(1.0 / (n2 - n1) as f64),
        window: (n1, n2),
        degenerate: false,
    })
}

fn windowed_rate(mean_err: &[f64], wanted_end: usize) -> ReductionRate {
    let n2 = wanted_end.min(mean_err.len().saturating_sub(1));
    if n2 <= 1 {
        return ReductionRate {
            rate: 1.0,
            window: (1, n2),
            degenerate: true,
        };
    }
    reduction_rate(mean_err, 1, n2).expect("window checked")
}

/// Per-iteration aggregate statistics for one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmStats {
    pub name: String,
    /// Mean of ‖x − y_n‖ across trials, indexed by iteration (0..=iters).
    pub mean: Vec<f64>,
    /// 10th nearest-rank percentile per iteration.
    pub p10: Vec<f64>,
    /// 90th nearest-rank percentile per iteration.
    pub p90: Vec<f64>,
    pub reduction_rate: ReductionRate,
}

/// Aggregated outcome of a multi-trial experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsSummary {
    pub iters: usize,
    pub algorithms: Vec<AlgorithmStats>,
    /// Number of degenerate trials that were redrawn.
    pub redraws: u64,
}

/// Nearest-rank percentile: the order statistic at index ⌈p·n⌉ of the
/// sorted sample.
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

fn aggregate(
    names: [&str; 2],
    per_trial: &[[Vec<f64>; 2]],
    iters: usize,
    rate_end: usize,
    redraws: u64,
) -> StatsSummary {
    let trials = per_trial.len();
    let mut algorithms = Vec::with_capacity(2);
    for (alg, name) in names.iter().enumerate() {
        let mut mean = Vec::with_capacity(iters + 1);
        let mut p10 = Vec::with_capacity(iters + 1);
        let mut p90 = Vec::with_capacity(iters + 1);
        let mut column = vec![0.0; trials];
        for n in 0..=iters {
            for (t, errs) in per_trial.iter().enumerate() {
                column[t] = errs[alg][n];
            }
            mean.push(column.iter().sum::<f64>() / trials as f64);
            let mut sorted = column.clone();
            sorted.sort_by(f64::total_cmp);
            p10.push(nearest_rank(&sorted, 0.10));
            p90.push(nearest_rank(&sorted, 0.90));
        }
        let reduction_rate = windowed_rate(&mean, rate_end);
        algorithms.push(AlgorithmStats {
            name: name.to_string(),
            mean,
            p10,
            p90,
            reduction_rate,
        });
    }
    algorithms.sort_by(|a, b| a.name.cmp(&b.name));
    StatsSummary {
        iters,
        algorithms,
        redraws,
    }
}

fn example1_trial(cfg: &TrialConfig, trial: u64) -> Result<([Vec<f64>; 2], u64)> {
    let trial_seed = mix_seed(cfg.seed, trial);
    for attempt in 0..MAX_REDRAWS {
        let mut rng = SeededRng::from_seed(mix_seed(trial_seed, attempt));
        let frame = random_parseval_frame(cfg.count, cfg.dim, &mut rng)?;
        let x = random_unit_vector(cfg.dim, &mut rng);
        let noise = gaussian_noise(cfg.count, cfg.noise_norm, &mut rng)?;
        let mut coeffs = frame.analyze(&x)?;
        for (c, e) in coeffs.iter_mut().zip(&noise) {
            *c += e;
        }
        let (sub_frame, sub_coeffs, _) = apply_erasures(&frame, &coeffs, cfg.erasures, &mut rng)?;
        if !sub_frame.spans() {
            continue; // redrawn with the next derived seed
        }
        let stop = StoppingRule::new(cfg.iters);
        let measurements = Measurements::noisy(sub_coeffs, cfg.noise_norm)?;
        let classical = classical_run(
            &sub_frame,
            &measurements,
            cfg.classical_alpha,
            &stop,
            Some(&x),
        )?;
        let greedy = greedy_s_run(&sub_frame, &measurements, &stop, Some(&x))?;
        let c_err = classical.padded_err_std(cfg.iters).expect("truth supplied");
        let g_err = greedy.padded_err_std(cfg.iters).expect("truth supplied");
        return Ok(([c_err, g_err], attempt));
    }
    Err(FrameError::InvalidParameter(format!(
        "trial {trial} exhausted {MAX_REDRAWS} redraw attempts"
    )))
}

/// Example 1: classical (fixed α) versus greedy reconstruction from
/// noisy, erased measurements.
pub fn run_example1(cfg: &TrialConfig) -> Result<StatsSummary> {
    cfg.validate()?;
    if cfg.lambda.is_some() {
        return Err(FrameError::InvalidParameter(
            "example 1 takes no saturation level".into(),
        ));
    }
    let results: Vec<Result<([Vec<f64>; 2], u64)>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| example1_trial(cfg, t))
        .collect();
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut redraws = 0;
    for r in results {
        let (errs, attempts) = r?;
        per_trial.push(errs);
        redraws += attempts;
    }
    Ok(aggregate(
        ["classical", "greedy"],
        &per_trial,
        cfg.iters,
        15,
        redraws,
    ))
}

fn example2_trial(cfg: &TrialConfig, trial: u64) -> Result<([Vec<f64>; 2], u64)> {
    let lambda = cfg.lambda.expect("validated");
    let trial_seed = mix_seed(cfg.seed, trial);
    for attempt in 0..MAX_REDRAWS {
        let mut rng = SeededRng::from_seed(mix_seed(trial_seed, attempt));
        let frame = random_parseval_frame(cfg.count, cfg.dim, &mut rng)?;
        let x = random_unit_vector(cfg.dim, &mut rng);
        let sat = saturate(&frame, &x, lambda)?;
        let stop = StoppingRule::new(cfg.iters);
        // Ambient frame is Parseval, so 2/(A+B) is exactly 1.
        let fixed = saturated_run(
            &frame,
            &sat,
            SaturatedMode::Fixed { relaxation: 1.0 },
            &stop,
            Some(&x),
        );
        let greedy = saturated_run(&frame, &sat, SaturatedMode::Greedy, &stop, Some(&x));
        match (fixed, greedy) {
            (Ok(f), Ok(g)) => {
                let f_err = f.padded_err_std(cfg.iters).expect("truth supplied");
                let g_err = g.padded_err_std(cfg.iters).expect("truth supplied");
                return Ok(([f_err, g_err], attempt));
            }
            (Err(FrameError::StalledActiveSet { .. }), _)
            | (_, Err(FrameError::StalledActiveSet { .. })) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(FrameError::InvalidParameter(format!(
        "trial {trial} exhausted {MAX_REDRAWS} redraw attempts"
    )))
}

/// Example 2: λ-saturated frame algorithm with fixed relaxation versus
/// its greedy variant.
pub fn run_example2(cfg: &TrialConfig) -> Result<StatsSummary> {
    cfg.validate()?;
    if cfg.lambda.is_none() {
        return Err(FrameError::InvalidParameter(
            "example 2 needs a saturation level".into(),
        ));
    }
    if cfg.erasures != 0 || cfg.noise_norm != 0.0 {
        return Err(FrameError::InvalidParameter(
            "example 2 runs with exact, un-erased coefficients".into(),
        ));
    }
    let results: Vec<Result<([Vec<f64>; 2], u64)>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| example2_trial(cfg, t))
        .collect();
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut redraws = 0;
    for r in results {
        let (errs, attempts) = r?;
        per_trial.push(errs);
        redraws += attempts;
    }
    Ok(aggregate(
        ["fixed", "greedy"],
        &per_trial,
        cfg.iters,
        50,
        redraws,
    ))
}

/// Writes the summary as CSV: header `iter,alg,mean,p10,p90`, one row
/// per (iteration, algorithm), sorted by (alg, iter), values rendered
/// with 17 significant digits so parsing them back is bit-exact.
pub fn write_csv(summary: &StatsSummary, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| FrameError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    let io_err = |source| FrameError::Io {
        path: path.to_path_buf(),
        source,
    };
    writeln!(out, "iter,alg,mean,p10,p90").map_err(io_err)?;
    let mut algorithms: Vec<&AlgorithmStats> = summary.algorithms.iter().collect();
    algorithms.sort_by(|a, b| a.name.cmp(&b.name));
    for alg in algorithms {
        for n in 0..alg.mean.len() {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e}",
                n, alg.name, alg.mean[n], alg.p10[n], alg.p90[n]
            )
            .map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// In-memory CSV bytes, used for determinism checks.
pub fn csv_bytes(summary: &StatsSummary) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("iter,alg,mean,p10,p90\n");
    let mut algorithms: Vec<&AlgorithmStats> = summary.algorithms.iter().collect();
    algorithms.sort_by(|a, b| a.name.cmp(&b.name));
    for alg in algorithms {
        for n in 0..alg.mean.len() {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e}\n",
                n, alg.name, alg.mean[n], alg.p10[n], alg.p90[n]
            ));
        }
    }
    out.into_bytes()
}
