//! Validation tolerances used across the crate.
//!
//! All logarithms in this crate are base 2, so entropic quantities are in
//! bits. Trace norms follow the unnormalized convention, `‖ρ−σ‖₁ ∈ [0,2]`.

use serde::{Deserialize, Serialize};

/// Hermiticity residual accepted when validating operators.
pub const DEFAULT_HERM_TOL: f64 = 1e-9;
/// Trace residual accepted for unit-trace and trace-preservation checks.
pub const DEFAULT_TRACE_TOL: f64 = 1e-9;
/// Most-negative eigenvalue accepted before an operator is rejected as
/// non-positive. Eigenvalues in `[-psd, 0)` are clamped to 0.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Eigendecomposition reconstruction accuracy (`‖VΛV† − H‖_F`).
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Numerical tolerances for operator validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity residual (Frobenius norm of `M − M†`).
    pub herm: f64,
    /// Trace residual.
    pub trace: f64,
    /// Eigenvalue negativity allowance for positive-semidefinite checks.
    pub psd: f64,
    /// Eigensolver accuracy target.
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: DEFAULT_HERM_TOL,
            trace: DEFAULT_TRACE_TOL,
            psd: DEFAULT_PSD_TOL,
            eig: DEFAULT_EIG_TOL,
        }
    }
}

impl Tolerances {
    /// Checks that every tolerance is nonnegative.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("herm", self.herm),
            ("trace", self.trace),
            ("psd", self.psd),
            ("eig", self.eig),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("tolerance {name} must be nonnegative, got {v}"));
            }
        }
        Ok(())
    }
}
