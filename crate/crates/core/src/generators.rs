//! Deterministic, seedable construction of the experimental objects:
//! the orthonormal DCT basis, random Parseval frames obtained by
//! coordinate projection, uniform unit vectors, renormalized Gaussian
//! noise, and random erasures.
//!
//! Reproducibility contract: every generator is a pure function of its
//! parameters and a 64-bit seed. The stream is ChaCha8 seeded via
//! `seed_from_u64`; normal draws use the rand_distr ziggurat transform;
//! index subsets come from a partial Fisher-Yates shuffle. Parallel
//! trials derive independent child seeds with `mix_seed`, a splitmix64
//! finalizer over (master seed, trial index).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{FrameError, Result};
use crate::frame::Frame;

/// Seedable deterministic generator backing all random constructions.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn from_seed(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Child generator for a parallel trial: seeded by
    /// `mix_seed(master, index)`.
    pub fn child(master: u64, index: u64) -> Self {
        Self::from_seed(mix_seed(master, index))
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform index in [0, n).
    pub fn index_below(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// `k` distinct indices drawn uniformly from [0, n) by partial
    /// Fisher-Yates, returned sorted ascending.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index_below(n - i);
            pool.swap(i, j);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }
}

/// Fixed 64-bit mixing function deriving child seeds from a master seed
/// and an index (splitmix64 finalizer).
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Orthonormal discrete cosine basis of R^N, rows being the basis
/// vectors: e_0(k) = √(1/N) and e_j(k) = √(2/N)·cos((π/N)·j·(k+½)) for
/// j ≥ 1 (the standard orthonormal DCT-II convention; rows are pairwise
/// orthonormal to well below 1e-10).
pub fn dct_basis(n: usize) -> Result<Frame> {
    if n == 0 {
        return Err(FrameError::InvalidParameter(
            "basis size must be at least 1".into(),
        ));
    }
    let inv_sqrt_n = (1.0 / n as f64).sqrt();
    let scale = (2.0 / n as f64).sqrt();
    let mut rows = vec![0.0; n * n];
    rows[..n].fill(inv_sqrt_n);
    for j in 1..n {
        for k in 0..n {
            let angle = std::f64::consts::PI / n as f64 * j as f64 * (k as f64 + 0.5);
            rows[j * n + k] = scale * angle.cos();
        }
    }
    Frame::from_flat(rows, n, n)
}

/// Parseval frame of N vectors in R^d: the DCT basis of R^N restricted
/// to d coordinates selected uniformly at random without replacement.
/// The resulting frame operator is the identity.
pub fn random_parseval_frame(n: usize, d: usize, rng: &mut SeededRng) -> Result<Frame> {
    if d == 0 || n == 0 {
        return Err(FrameError::InvalidParameter(
            "frame sizes must be at least 1".into(),
        ));
    }
    if d > n {
        return Err(FrameError::InvalidParameter(format!(
            "projection dimension d={d} exceeds basis size N={n}"
        )));
    }
    let basis = dct_basis(n)?;
    let coords = rng.sample_indices(n, d);
    let mut rows = Vec::with_capacity(n * d);
    for j in 0..n {
        let full = basis.vector(j);
        rows.extend(coords.iter().map(|&k| full[k]));
    }
    Frame::from_flat(rows, n, d)
}

/// Unit vector with direction uniform on the sphere (normalized
/// standard normal draws).
pub fn random_unit_vector(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    assert!(d >= 1, "dimension must be at least 1");
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
        // All-zeros draw has probability zero; redraw if it happens.
    }
}

/// Gaussian noise rescaled so its Euclidean norm equals `target_norm`
/// exactly (to rounding).
pub fn gaussian_noise(n: usize, target_norm: f64, rng: &mut SeededRng) -> Result<Vec<f64>> {
    if target_norm < 0.0 || target_norm.is_nan() {
        return Err(FrameError::InvalidParameter(format!(
            "noise norm must be nonnegative, got {target_norm}"
        )));
    }
    if target_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(v.into_iter().map(|x| x * target_norm / norm).collect());
        }
    }
}

/// Erases `k` coefficients (and their frame vectors) chosen uniformly
/// at random. Returns the surviving sub-frame, the surviving
/// coefficients in their original relative order, and the sorted list
/// of erased indices. The sub-frame's bounds are unknown a priori and
/// must be recomputed by the caller.
pub fn apply_erasures(
    frame: &Frame,
    coeffs: &[f64],
    k: usize,
    rng: &mut SeededRng,
) -> Result<(Frame, Vec<f64>, Vec<usize>)> {
    let n = frame.count();
    if coeffs.len() != n {
        return Err(FrameError::DimensionMismatch {
            context: "erasure coefficients",
            expected: n,
            actual: coeffs.len(),
        });
    }
    if k > n {
        return Err(FrameError::InvalidParameter(format!(
            "cannot erase {k} of {n} coefficients"
        )));
    }
    let erased = rng.sample_indices(n, k);
    let mut is_erased = vec![false; n];
    for &j in &erased {
        is_erased[j] = true;
    }
    let survivors: Vec<usize> = (0..n).filter(|&j| !is_erased[j]).collect();
    let sub_frame = frame.select(&survivors)?;
    let sub_coeffs: Vec<f64> = survivors.iter().map(|&j| coeffs[j]).collect();
    Ok((sub_frame, sub_coeffs, erased))
}
