//! Dense complex-matrix substrate.
//!
//! Everything downstream (states, channels, divergences) runs on the small
//! dense types defined here: a row-major `ComplexMatrix`, a `ComplexVector`
//! for pure states, Kronecker products with row-major index convention
//! (`i_a * d_b + i_b`), partial traces over labeled tensor factors, and a
//! cyclic Jacobi eigensolver for Hermitian matrices. Target scale is
//! dimension ≲ 100, where Jacobi is slower than QR-based methods but
//! unconditionally robust.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::ops::{Index, IndexMut};
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Maximum Jacobi sweeps before the eigensolver gives up. Convergence is
/// quadratic once rotations get small; well-conditioned Hermitian matrices
/// of dimension ≤ 100 settle in well under 20 sweeps.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Errors from the matrix substrate.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {left} vs {right} in {op}")]
    DimMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid subsystem selection {keep:?} for {n_factors} tensor factors")]
    InvalidSubsystems { keep: Vec<usize>, n_factors: usize },

    #[error("entry count {len} does not match shape {rows}x{cols}")]
    BadShape {
        len: usize,
        rows: usize,
        cols: usize,
    },

    #[error("non-finite entry at index {idx}")]
    NonFinite { idx: usize },
}

/// A complex column vector; used for pure states and Kraus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(reals: &[f64]) -> Self {
        Self {
            data: reals.iter().map(|&r| C64::new(r, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self {
            data: self.data.iter().map(|c| c / n).collect(),
        }
    }

    /// Inner product `⟨self|other⟩` (conjugate-linear in the first slot).
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rank-one projector `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.data[i] * self.data[j].conj();
            }
        }
        m
    }

    /// Tensor product `|self⟩ ⊗ |other⟩` with row-major index convention.
    pub fn tensor(&self, other: &ComplexVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::BadShape {
                len: data.len(),
                rows,
                cols,
            });
        }
        if let Some(idx) = data
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(MatrixError::NonFinite { idx });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a square diagonal matrix from real diagonal entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row_out = i * other.cols;
                let row_b = k * other.cols;
                for j in 0..other.cols {
                    out.data[row_out + j] += a * other.data[row_b + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matvec shape mismatch");
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            let row = i * self.cols;
            for j in 0..self.cols {
                acc += self.data[row + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Frobenius norm of `M − M†`.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                acc += d.norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitized(&self) -> ComplexMatrix {
        self.add(&self.dagger()).scale(C64::new(0.5, 0.0))
    }

    /// Real diagonal as a vector (imaginary parts dropped).
    pub fn real_diagonal(&self) -> Vec<f64> {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].re).collect()
    }

    /// Zeroes every off-diagonal entry.
    pub fn diagonal_part(&self) -> ComplexMatrix {
        assert!(self.is_square());
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            out[(i, i)] = self[(i, i)];
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product with row-major composite index `(i_a, i_b) ↦ i_a·d_b + i_b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Row-major strides for a list of tensor-factor dimensions.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

fn unravel(mut idx: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut multi = vec![0usize; dims.len()];
    for f in 0..dims.len() {
        multi[f] = idx / strides[f];
        idx %= strides[f];
    }
    multi
}

/// Partial trace of a square matrix on `∏ dims` over the factors NOT listed
/// in `keep`. Kept factors retain their original relative order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, MatrixError> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(MatrixError::DimMismatch {
            op: "partial_trace",
            left: format!("{}x{}", m.rows(), m.cols()),
            right: format!("prod(dims)={total}"),
        });
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || seen[k] {
            return Err(MatrixError::InvalidSubsystems {
                keep: keep.to_vec(),
                n_factors: dims.len(),
            });
        }
        seen[k] = true;
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();

    let traced: Vec<usize> = (0..dims.len()).filter(|f| !seen[*f]).collect();
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let full_strides = strides(dims);
    let kept_strides = strides(&kept_dims);
    let traced_strides = strides(&traced_dims);

    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    for ik in 0..kept_total {
        let ik_multi = unravel(ik, &kept_dims, &kept_strides);
        for jk in 0..kept_total {
            let jk_multi = unravel(jk, &kept_dims, &kept_strides);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_total {
                let t_multi = unravel(t, &traced_dims, &traced_strides);
                let mut row = 0usize;
                let mut col = 0usize;
                for (pos, &f) in keep_sorted.iter().enumerate() {
                    row += ik_multi[pos] * full_strides[f];
                    col += jk_multi[pos] * full_strides[f];
                }
                for (pos, &f) in traced.iter().enumerate() {
                    row += t_multi[pos] * full_strides[f];
                    col += t_multi[pos] * full_strides[f];
                }
                acc += m[(row, col)];
            }
            out[(ik, jk)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on the second factor of a bipartite `d_a·d_b` matrix.
pub fn partial_transpose_b(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<ComplexMatrix, MatrixError> {
    let total = dim_a * dim_b;
    if !m.is_square() || m.rows() != total {
        return Err(MatrixError::DimMismatch {
            op: "partial_transpose",
            left: format!("{}x{}", m.rows(), m.cols()),
            right: format!("{total}x{total}"),
        });
    }
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..dim_a {
        for j in 0..dim_b {
            for k in 0..dim_a {
                for l in 0..dim_b {
                    out[(i * dim_b + j, k * dim_b + l)] = m[(i * dim_b + l, k * dim_b + j)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with matching eigenvector columns,
/// so `m = V diag(λ) V†`. Fails if `m` is not Hermitian within `herm_tol` or
/// if the off-diagonal norm has not dropped below the convergence threshold
/// after the sweep budget.
pub fn eig_hermitian(
    m: &ComplexMatrix,
    herm_tol: f64,
) -> Result<(Vec<f64>, ComplexMatrix), MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let residual = m.hermiticity_residual();
    if residual > herm_tol {
        return Err(MatrixError::NotHermitian {
            residual,
            tol: herm_tol,
        });
    }
    let n = m.rows();
    // Work on the exactly-Hermitian part so tolerated asymmetry cannot leak
    // into the rotations.
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(1.0);
    let target = 1e-14 * scale;

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0usize;
    while off > target {
        if sweeps >= MAX_JACOBI_SWEEPS {
            return Err(MatrixError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let beta = a[(p, q)];
                let absb = beta.norm();
                if absb <= target / (n as f64) {
                    continue;
                }
                let phase = beta / absb;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * absb);
                // Small-magnitude root of t² − 2θt − 1 = 0.
                let t = if theta.abs() > 1e12 {
                    // First-order root; avoids overflow in theta*theta.
                    -1.0 / (2.0 * theta)
                } else {
                    -theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update: A <- A U with U_pp=c, U_pq=-s*phase,
                // U_qp = s*conj(phase), U_qq = c.
                let s_conj_phase = s * phase.conj();
                let s_phase = s * phase;
                for j in 0..n {
                    let ajp = a[(j, p)];
                    let ajq = a[(j, q)];
                    a[(j, p)] = ajp * c + ajq * s_conj_phase;
                    a[(j, q)] = ajq * c - ajp * s_phase;
                }
                // Row update: A <- U† A.
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * s_phase;
                    a[(q, j)] = aqj * c - apj * s_conj_phase;
                }
                // Accumulate eigenvectors: V <- V U.
                for j in 0..n {
                    let vjp = v[(j, p)];
                    let vjq = v[(j, q)];
                    v[(j, p)] = vjp * c + vjq * s_conj_phase;
                    v[(j, q)] = vjq * c - vjp * s_phase;
                }
                // Clean rounding drift off the invariants: the rotated pivot
                // is zero and the diagonal is real by construction.
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok((eigenvalues, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One standard normal draw.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex Ginibre matrix: independent entries `(N + iN)/√2`.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = C64::new(
                standard_normal(rng) * inv_sqrt2,
                standard_normal(rng) * inv_sqrt2,
            );
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix by modified Gram-Schmidt.
/// MGS leaves the R diagonal real and positive, which is exactly the phase
/// convention that makes Q Haar-distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<ComplexVector> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        // Two orthogonalization passes keep loss of orthogonality at the
        // rounding level even for nearly dependent draws.
        for _ in 0..2 {
            for k in 0..j {
                let proj = {
                    let ck = &cols[k];
                    ck.inner(&cols[j])
                };
                let ck = cols[k].clone();
                for i in 0..dim {
                    let correction = proj * ck[i];
                    cols[j][i] -= correction;
                }
            }
        }
        cols[j] = cols[j].normalized();
    }
    let mut q = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            q[(i, j)] = col[i];
        }
    }
    q
}
