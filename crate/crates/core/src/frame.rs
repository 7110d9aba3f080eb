//! Finite frames of R^d and their associated operators.
//!
//! A frame is stored as its analysis matrix: N rows of length d, row j
//! being the frame vector x_j. The analysis operator T maps x to the
//! coefficient sequence {⟨x, x_j⟩}, its adjoint T* maps coefficients to
//! Σ c_j x_j, and the frame operator S = T*T is symmetric positive
//! definite exactly when the vectors span. Iterative solvers only ever
//! need the *action* of these operators, so everything here is
//! matrix-free; `operator_matrix` materializes S on demand for
//! eigenvalue work.

use crate::error::{FrameError, Result};
use crate::linalg;

/// Relative floor below which the smallest frame-operator eigenvalue is
/// treated as zero: the vectors do not span.
pub const POSITIVE_DEFINITE_TOL: f64 = 1e-10;

/// An ordered, finite collection of frame vectors in R^d.
///
/// Immutable after construction. An empty collection is representable
/// (erasing every coefficient leaves one behind) but is never a frame:
/// bound computations report `NotAFrame`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<f64>,
    count: usize,
    dim: usize,
}

impl Frame {
    /// Builds a frame from a flat row-major buffer of `count` vectors of
    /// length `dim`.
    pub fn from_flat(vectors: Vec<f64>, count: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(FrameError::InvalidParameter(
                "frame dimension must be at least 1".into(),
            ));
        }
        if vectors.len() != count * dim {
            return Err(FrameError::DimensionMismatch {
                context: "frame data buffer",
                expected: count * dim,
                actual: vectors.len(),
            });
        }
        if !vectors.iter().all(|v| v.is_finite()) {
            return Err(FrameError::NonFinite {
                context: "frame vectors",
            });
        }
        Ok(Frame {
            vectors,
            count,
            dim,
        })
    }

    /// Builds a frame from individual row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(FrameError::DimensionMismatch {
                    context: "frame row",
                    expected: dim,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(flat, rows.len(), dim.max(1))
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Frame vector x_j.
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.dim..(j + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.dim)
    }

    /// The sub-collection of vectors at `indices` (kept in order).
    pub fn select(&self, indices: &[usize]) -> Result<Frame> {
        let mut flat = Vec::with_capacity(indices.len() * self.dim);
        for &j in indices {
            if j >= self.count {
                return Err(FrameError::InvalidParameter(format!(
                    "frame index {j} out of range (count {})",
                    self.count
                )));
            }
            flat.extend_from_slice(self.vector(j));
        }
        Frame::from_flat(flat, indices.len(), self.dim)
    }

    fn check_dim(&self, x: &[f64], context: &'static str) -> Result<()> {
        if x.len() != self.dim {
            return Err(FrameError::DimensionMismatch {
                context,
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn check_count(&self, c: &[f64], context: &'static str) -> Result<()> {
        if c.len() != self.count {
            return Err(FrameError::DimensionMismatch {
                context,
                expected: self.count,
                actual: c.len(),
            });
        }
        Ok(())
    }

    /// Analysis operator: (Tx)_j = ⟨x, x_j⟩.
    pub fn analyze(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x, "analyze input")?;
        Ok(self.rows().map(|row| linalg::dot(row, x)).collect())
    }

    /// Synthesis operator: T*c = Σ c_j x_j.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_count(coeffs, "synthesize input")?;
        let mut out = vec![0.0; self.dim];
        for (row, &c) in self.rows().zip(coeffs) {
            if c != 0.0 {
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += c * v;
                }
            }
        }
        Ok(out)
    }

    /// Frame operator: Sx = T*Tx = Σ ⟨x, x_j⟩ x_j, applied matrix-free.
    pub fn apply_frame_operator(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x, "frame operator input")?;
        let mut out = vec![0.0; self.dim];
        for row in self.rows() {
            let c = linalg::dot(row, x);
            if c != 0.0 {
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += c * v;
                }
            }
        }
        Ok(out)
    }

    /// S-weighted inner product ⟨x, y⟩_S = ⟨Sx, y⟩ = ⟨Tx, Ty⟩.
    ///
    /// Computed in coefficient space, which keeps it exactly symmetric
    /// and keeps ⟨x, x⟩_S nonnegative in floating point.
    pub fn s_inner(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x, "s_inner left input")?;
        self.check_dim(y, "s_inner right input")?;
        let mut sum = 0.0;
        for row in self.rows() {
            sum += linalg::dot(row, x) * linalg::dot(row, y);
        }
        Ok(sum)
    }

    /// S-norm ‖x‖_S = √⟨Sx, x⟩ = ‖Tx‖.
    pub fn s_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x, "s_norm input")?;
        let mut sum = 0.0;
        for row in self.rows() {
            let c = linalg::dot(row, x);
            sum += c * c;
        }
        Ok(sum.sqrt())
    }

    /// Materializes the frame operator as a dense row-major d×d matrix.
    pub fn operator_matrix(&self) -> Vec<f64> {
        let d = self.dim;
        let mut s = vec![0.0; d * d];
        for row in self.rows() {
            for i in 0..d {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in 0..d {
                    s[i * d + j] += ri * row[j];
                }
            }
        }
        s
    }

    /// Optimal frame bounds: the extreme eigenvalues of S.
    ///
    /// Fails with `NotAFrame` when the smallest eigenvalue is not
    /// strictly positive relative to the largest (the vectors do not
    /// span R^d).
    pub fn optimal_frame_bounds(&self) -> Result<FrameBounds> {
        let s = self.operator_matrix();
        let (eigenvalues, _) = linalg::sym_eigen(&s, self.dim);
        let min = eigenvalues.first().copied().unwrap_or(0.0);
        let max = eigenvalues.last().copied().unwrap_or(0.0);
        if min <= POSITIVE_DEFINITE_TOL * max.max(0.0) {
            return Err(FrameError::NotAFrame {
                min_eigenvalue: min,
                max_eigenvalue: max,
            });
        }
        Ok(FrameBounds {
            lower: min,
            upper: max,
        })
    }

    /// Cheap spanning check used by trial redraw logic: Cholesky of S
    /// with a relative pivot floor instead of a full eigendecomposition.
    pub fn spans(&self) -> bool {
        if self.count == 0 {
            return false;
        }
        let s = self.operator_matrix();
        linalg::cholesky_factor(&s, self.dim).is_some()
    }
}

/// Optimal lower and upper frame bounds A ≤ B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    lower: f64,
    upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && upper >= lower && upper.is_finite()) {
            return Err(FrameError::InvalidParameter(format!(
                "frame bounds must satisfy 0 < A <= B < inf, got A={lower}, B={upper}"
            )));
        }
        Ok(FrameBounds { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Contraction constant C_α = max(|1 − αA|, |1 − αB|).
    ///
    /// Strictly below 1 exactly when 0 < α < 2/B.
    pub fn contraction_constant(&self, alpha: f64) -> f64 {
        let a = (1.0 - alpha * self.lower).abs();
        let b = (1.0 - alpha * self.upper).abs();
        a.max(b)
    }

    /// The relaxation parameter α = 2/(A+B) minimizing C_α.
    pub fn optimal_relaxation(&self) -> f64 {
        2.0 / (self.lower + self.upper)
    }

    /// C_α at the optimal relaxation: (B−A)/(B+A).
    pub fn optimal_contraction(&self) -> f64 {
        (self.upper - self.lower) / (self.upper + self.lower)
    }
}

/// A polynomial p(S) = Σ c_k S^k in the frame operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPolynomial {
    coeffs: Vec<f64>,
}

impl OperatorPolynomial {
    /// Coefficients c_0..c_m, constant term first.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(FrameError::InvalidParameter(
                "polynomial needs at least a constant coefficient".into(),
            ));
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(FrameError::NonFinite {
                context: "polynomial coefficients",
            });
        }
        Ok(OperatorPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Scalar evaluation p(λ) by Horner's rule.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * lambda + c)
    }

    /// Applies p(S) to a vector by Horner's rule through repeated
    /// frame-operator applications (no matrix powers).
    pub fn apply(&self, frame: &Frame, x: &[f64]) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; x.len()];
        for &c in self.coeffs.iter().rev() {
            let mut next = frame.apply_frame_operator(&acc)?;
            for (n, &xi) in next.iter_mut().zip(x) {
                *n += c * xi;
            }
            acc = next;
        }
        Ok(acc)
    }
}

/// Operator norm of p(S) in the standard norm and in the S-norm.
///
/// The two results are computed by genuinely different routes so their
/// equality is a meaningful check rather than a tautology: the standard
/// norm is max_k |p(λ_k)| over the eigenvalues of S; the S-norm side
/// materializes p(S) column by column through matrix-free operator
/// applications, conjugates it by S^(1/2), and takes the spectral norm
/// of the conjugated matrix.
pub fn polynomial_operator_norms(frame: &Frame, p: &OperatorPolynomial) -> Result<(f64, f64)> {
    let d = frame.dim();
    let s = frame.operator_matrix();
    let (eigenvalues, vectors) = linalg::sym_eigen(&s, d);
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    if min <= POSITIVE_DEFINITE_TOL * max.max(0.0) {
        return Err(FrameError::NotAFrame {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }

    let standard = eigenvalues
        .iter()
        .map(|&l| p.eval(l).abs())
        .fold(0.0, f64::max);

    // Materialize p(S) by applying it to each standard basis vector.
    let mut p_mat = vec![0.0; d * d];
    let mut basis = vec![0.0; d];
    for col in 0..d {
        basis[col] = 1.0;
        let image = p.apply(frame, &basis)?;
        basis[col] = 0.0;
        for row in 0..d {
            p_mat[row * d + col] = image[row];
        }
    }

    // S^(±1/2) from the eigendecomposition: V diag(λ^(±1/2)) Vᵀ.
    let half = sym_function(&vectors, &eigenvalues, d, f64::sqrt);
    let inv_half = sym_function(&vectors, &eigenvalues, d, |l| 1.0 / l.sqrt());
    let conjugated = linalg::mat_mul(&linalg::mat_mul(&half, &p_mat, d), &inv_half, d);
    let s_norm_value = linalg::spectral_norm(&conjugated, d);

    Ok((standard, s_norm_value))
}

fn sym_function(
    vectors: &[f64],
    eigenvalues: &[f64],
    d: usize,
    f: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for (k, &l) in eigenvalues.iter().enumerate() {
        let fl = f(l);
        for i in 0..d {
            let vik = vectors[i * d + k];
            if vik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += fl * vik * vectors[j * d + k];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_frame() -> Frame {
        Frame::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn analyze_identity_basis() {
        let frame = Frame::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(frame.analyze(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn analyze_toy() {
        let frame = toy_frame();
        assert_eq!(frame.analyze(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(frame.analyze(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn synthesize_toy() {
        let frame = toy_frame();
        assert_eq!(frame.synthesize(&[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0]);
        // Unit coefficient recovers the frame vector.
        assert_eq!(frame.synthesize(&[0.0, 0.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(frame.synthesize(&[0.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn frame_operator_toy() {
        let frame = toy_frame();
        // S = [[2,1],[1,2]]
        assert_eq!(
            frame.apply_frame_operator(&[1.0, 1.0]).unwrap(),
            vec![3.0, 3.0]
        );
        assert_eq!(
            frame.apply_frame_operator(&[0.0, 0.0]).unwrap(),
            vec![0.0, 0.0]
        );
        let composed = frame
            .synthesize(&frame.analyze(&[0.3, -0.7]).unwrap())
            .unwrap();
        let direct = frame.apply_frame_operator(&[0.3, -0.7]).unwrap();
        assert!((composed[0] - direct[0]).abs() < 1e-15);
        assert!((composed[1] - direct[1]).abs() < 1e-15);
    }

    #[test]
    fn s_inner_and_norm_toy() {
        let frame = toy_frame();
        assert!((frame.s_inner(&[1.0, 1.0], &[1.0, 1.0]).unwrap() - 6.0).abs() < 1e-14);
        assert!((frame.s_norm(&[1.0, 1.0]).unwrap() - 6.0_f64.sqrt()).abs() < 1e-14);
        assert_eq!(frame.s_inner(&[0.0, 0.0], &[0.5, -2.0]).unwrap(), 0.0);
        assert_eq!(frame.s_norm(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn bounds_toy() {
        let frame = toy_frame();
        let bounds = frame.optimal_frame_bounds().unwrap();
        assert!((bounds.lower() - 1.0).abs() < 1e-12);
        assert!((bounds.upper() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_rank_deficient() {
        let frame = Frame::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(
            frame.optimal_frame_bounds(),
            Err(FrameError::NotAFrame { .. })
        ));
        assert!(!frame.spans());
    }

    #[test]
    fn bounds_empty_frame() {
        let frame = Frame::from_flat(vec![], 0, 2).unwrap();
        assert!(matches!(
            frame.optimal_frame_bounds(),
            Err(FrameError::NotAFrame { .. })
        ));
    }

    #[test]
    fn contraction_and_relaxation() {
        let b13 = FrameBounds::new(1.0, 3.0).unwrap();
        assert_eq!(b13.contraction_constant(0.5), 0.5);
        assert_eq!(b13.contraction_constant(2.0 / 3.0), 1.0);
        assert_eq!(b13.optimal_relaxation(), 0.5);
        assert_eq!(b13.optimal_contraction(), 0.5);

        let parseval = FrameBounds::new(1.0, 1.0).unwrap();
        assert_eq!(parseval.contraction_constant(1.0), 0.0);
        assert_eq!(parseval.optimal_relaxation(), 1.0);

        let b22 = FrameBounds::new(2.0, 2.0).unwrap();
        assert_eq!(b22.optimal_relaxation(), 0.5);
    }

    #[test]
    fn polynomial_norms_identity() {
        let frame = toy_frame();
        let ident = OperatorPolynomial::new(vec![1.0]).unwrap();
        let (std_norm, s_norm) = polynomial_operator_norms(&frame, &ident).unwrap();
        assert!((std_norm - 1.0).abs() < 1e-10);
        assert!((s_norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial_norms_toy() {
        let frame = toy_frame();
        // p(S) = I - 0.5 S, eigenvalues {1, 3} -> max |1 - 0.5 λ| = 0.5.
        let p = OperatorPolynomial::new(vec![1.0, -0.5]).unwrap();
        let (std_norm, s_norm) = polynomial_operator_norms(&frame, &p).unwrap();
        assert!((std_norm - 0.5).abs() < 1e-12);
        assert!((s_norm - 0.5).abs() < 1e-10);
    }

    #[test]
    fn polynomial_norms_of_s_on_parseval() {
        // p(S) = S on a Parseval frame is the identity.
        let mut rng = crate::generators::SeededRng::from_seed(19);
        let frame = crate::generators::random_parseval_frame(10, 4, &mut rng).unwrap();
        let p = OperatorPolynomial::new(vec![0.0, 1.0]).unwrap();
        let (std_norm, s_norm) = polynomial_operator_norms(&frame, &p).unwrap();
        assert!((std_norm - 1.0).abs() < 1e-10);
        assert!((s_norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let frame = toy_frame();
        assert!(matches!(
            frame.analyze(&[1.0, 2.0, 3.0]),
            Err(FrameError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            frame.synthesize(&[1.0]),
            Err(FrameError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            frame.s_inner(&[1.0], &[1.0, 2.0]),
            Err(FrameError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nonfinite_rejected() {
        assert!(matches!(
            Frame::from_rows(&[vec![1.0, f64::NAN]]),
            Err(FrameError::NonFinite { .. })
        ));
    }
}
