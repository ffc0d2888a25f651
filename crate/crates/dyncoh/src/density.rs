//! Density matrices on labeled tensor-factor spaces, plus the von Neumann
//! entropy. Entropies are in bits.

use crate::matrix::{
    eig_hermitian, kron, partial_trace_matrix, ComplexMatrix, ComplexVector, MatrixError, C64,
};
use crate::tolerances::Tolerances;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix size {got} does not match product of subsystem dimensions {expected}")]
    SizeMismatch { got: usize, expected: usize },

    #[error("state is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("state trace {trace} deviates from 1 beyond {tol:.3e}")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error("state has negative eigenvalue {min_eig:.3e} beyond -{tol:.3e}")]
    NotPositive { min_eig: f64, tol: f64 },

    #[error("empty subsystem list")]
    NoSubsystems,

    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Hermitian, unit-trace, positive-semidefinite operator on an ordered list
/// of tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates against the default [`Tolerances`].
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self, StateError> {
        Self::new_with(dims, matrix, &Tolerances::default())
    }

    pub fn new_with(
        dims: Vec<usize>,
        matrix: ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self, StateError> {
        if dims.is_empty() {
            return Err(StateError::NoSubsystems);
        }
        let expected: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != expected {
            return Err(StateError::SizeMismatch {
                got: matrix.rows(),
                expected,
            });
        }
        let residual = matrix.hermiticity_residual();
        if residual > tol.herm {
            return Err(StateError::NotHermitian {
                residual,
                tol: tol.herm,
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(StateError::NotUnitTrace {
                trace,
                tol: tol.trace,
            });
        }
        let (eigs, _) = eig_hermitian(&matrix, tol.herm)?;
        if let Some(&min_eig) = eigs.last() {
            if min_eig < -tol.psd {
                return Err(StateError::NotPositive {
                    min_eig,
                    tol: tol.psd,
                });
            }
        }
        Ok(Self { dims, matrix })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector is normalized first.
    pub fn from_pure(dims: Vec<usize>, psi: &ComplexVector) -> Result<Self, StateError> {
        let expected: usize = dims.iter().product();
        if psi.dim() != expected {
            return Err(StateError::SizeMismatch {
                got: psi.dim(),
                expected,
            });
        }
        Ok(Self {
            dims,
            matrix: psi.normalized().projector(),
        })
    }

    /// Diagonal state with the given probability vector on the product basis.
    pub fn from_probabilities(dims: Vec<usize>, probs: &[f64]) -> Result<Self, StateError> {
        let m = ComplexMatrix::from_real_diagonal(probs);
        Self::new(dims, m)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { dims, matrix: m }
    }

    /// `|Φ+⟩⟨Φ+|` on two factors of dimension `d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut psi = ComplexVector::zeros(d * d);
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            psi[i * d + i] = amp;
        }
        Self {
            dims: vec![d, d],
            matrix: psi.projector(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reinterprets the same operator with a different factor structure
    /// (e.g. grouping two qubits into one 4-level system).
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self, StateError> {
        let expected: usize = dims.iter().product();
        if expected != self.dim() {
            return Err(StateError::SizeMismatch {
                got: self.dim(),
                expected,
            });
        }
        Ok(Self {
            dims,
            matrix: self.matrix.clone(),
        })
    }

    /// Tensor product with another state; factor labels concatenate.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Partial trace keeping the listed factors (in their original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        if keep.is_empty() {
            return Err(StateError::NoSubsystems);
        }
        let reduced = partial_trace_matrix(&self.matrix, &self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let dims = keep_sorted.iter().map(|&f| self.dims[f]).collect();
        Ok(DensityMatrix {
            dims,
            matrix: reduced,
        })
    }

    /// Eigenvalues in descending order, clamped into `[0, 1]` at `psd_tol`.
    pub fn spectrum(&self, tol: &Tolerances) -> Result<Vec<f64>, StateError> {
        let (eigs, _) = eig_hermitian(&self.matrix, tol.herm)?;
        Ok(eigs
            .into_iter()
            .map(|l| if l < 0.0 && l >= -tol.psd { 0.0 } else { l })
            .collect())
    }
}

/// Von Neumann entropy (bits) of a raw Hermitian PSD matrix; eigenvalues at
/// or below zero contribute nothing. Skips state validation, for use inside
/// optimization loops on operators that are states by construction.
pub(crate) fn entropy_of_hermitian(m: &ComplexMatrix) -> f64 {
    let (eigs, _) =
        eig_hermitian(&m.hermitized(), f64::INFINITY).expect("hermitized matrix diagonalizes");
    shannon_entropy_bits(&eigs)
}

/// Shannon entropy (bits) of a nonnegative vector; zero entries contribute 0.
pub fn shannon_entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Von Neumann entropy `−Σ λ log₂ λ` in bits, with `0·log 0 := 0`.
///
/// Eigenvalues within the PSD tolerance below zero are clamped to zero, so
/// validated density matrices never produce NaN.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy_with(rho, &Tolerances::default())
}

pub fn von_neumann_entropy_with(rho: &DensityMatrix, tol: &Tolerances) -> f64 {
    let eigs = rho
        .spectrum(tol)
        .expect("validated density matrix must diagonalize");
    shannon_entropy_bits(&eigs)
}
