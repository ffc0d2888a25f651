//! Relative-entropy dynamical coherence.
//!
//! The measure has a closed form as a coherence power: the maximum over the
//! incoherent input simplex of the relative entropy of coherence of the
//! output, `f(p) = S(ΔΘ diag p) − S(Θ diag p)`. The value is the same for
//! every free set between SIO and MIO, so no per-set infimum is computed.
//! The simplex maximization runs a deterministic grid (step 1/32 per
//! coordinate up to three outcomes) followed by projected gradient ascent;
//! the grid contains the vertices, so unitary channels evaluate exactly.

use crate::channels::QuantumChannel;
use crate::density::{entropy_of_hermitian, shannon_entropy_bits};
use crate::divergences::{DivergenceKind, MeasurementMode, StateClass};
use crate::matrix::ComplexMatrix;
use crate::monotones::report::{
    Bound, Diagnostics, MonotoneError, MonotoneKind, MonotoneReport, OptimizerConfig, Resource,
    Witness,
};
use crate::optim::maximize_on_simplex;
use serde::{Deserialize, Serialize};

pub(crate) fn coherence_grid_steps(dim: usize) -> usize {
    if dim <= 3 {
        32
    } else {
        8
    }
}

/// Relative entropy of coherence of the channel output on the incoherent
/// input `diag(p)`, in bits.
pub(crate) fn output_coherence(theta: &QuantumChannel, p: &[f64]) -> f64 {
    let input = ComplexMatrix::from_real_diagonal(p);
    let out = theta.apply_matrix(&input);
    let dephased = shannon_entropy_bits(&out.real_diagonal());
    dephased - entropy_of_hermitian(&out)
}

/// Coherence power `max_{σ∈I} [S(ΔΘσ) − S(Θσ)]` in bits.
///
/// Reported as a certified lower bound with the optimal simplex point as
/// witness; the objective is convex on the simplex (a partial minimum of the
/// jointly convex relative entropy composed with an affine map), so the
/// grid-plus-ascent search, which always visits the vertices, is exact up to
/// floating-point error.
pub fn coherence_power(theta: &QuantumChannel, cfg: &OptimizerConfig) -> MonotoneReport {
    let d = theta.dim_in();
    let result = maximize_on_simplex(
        |p: &[f64]| output_coherence(theta, p),
        d,
        coherence_grid_steps(d),
        8,
        cfg.max_iters.min(300),
        cfg.tol,
    );
    MonotoneReport {
        value: result.value.max(0.0),
        kind: MonotoneKind {
            resource: Resource::Coherence,
            divergence: DivergenceKind::RelativeEntropy,
            states: StateClass::IncoherentStates,
            measurement: MeasurementMode::No,
            free_set: "SIO..MIO (value is independent of the choice)".into(),
        },
        bound: Bound::LowerBound,
        witness: Witness::Probabilities(result.point),
        diagnostics: Diagnostics {
            iterations: result.ascent_iterations,
            restarts: 8,
            evaluations: result.evaluations,
            seed: cfg.seed,
            gap: None,
            heuristic: false,
            notes: vec![],
        },
    }
}

/// Two sides of a monotonicity or convexity check; violations are recorded,
/// never thrown.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
    pub tol: f64,
    pub satisfied: bool,
}

impl PropertyReport {
    fn from_sides(lhs: f64, rhs: f64, tol: f64) -> Self {
        let violation = (lhs - rhs).max(0.0);
        Self {
            lhs,
            rhs,
            violation,
            tol,
            satisfied: violation <= tol,
        }
    }
}

/// Monotonicity under free pre/post-processing:
/// `C(Φ₂ ∘ (Θ⊗1) ∘ Φ₁) ≤ C(Θ) + tol`. The ancilla dimension is inferred
/// from `Φ₁`'s output; both `Φ_i` must pass the MIO membership test.
pub fn verify_monotonicity(
    theta: &QuantumChannel,
    phi1: &QuantumChannel,
    phi2: &QuantumChannel,
    cfg: &OptimizerConfig,
    tol: f64,
) -> Result<PropertyReport, MonotoneError> {
    for (name, phi) in [("Φ1", phi1), ("Φ2", phi2)] {
        if !phi.is_mio() {
            return Err(MonotoneError::NotFree(format!(
                "{name} fails the MIO membership test"
            )));
        }
    }
    if !phi1.dim_out().is_multiple_of(theta.dim_in()) {
        return Err(MonotoneError::BadDims(format!(
            "Φ1 output {} does not factor through Θ input {}",
            phi1.dim_out(),
            theta.dim_in()
        )));
    }
    let ancilla = phi1.dim_out() / theta.dim_in();
    let theta_ext = QuantumChannel::tensor(theta, &QuantumChannel::identity(ancilla));
    if phi2.dim_in() != theta_ext.dim_out() {
        return Err(MonotoneError::BadDims(format!(
            "Φ2 input {} vs extended Θ output {}",
            phi2.dim_in(),
            theta_ext.dim_out()
        )));
    }
    let composite = QuantumChannel::compose(phi2, &QuantumChannel::compose(&theta_ext, phi1)?)?;
    let lhs = coherence_power(&composite, cfg).value;
    let rhs = coherence_power(theta, cfg).value;
    Ok(PropertyReport::from_sides(lhs, rhs, tol))
}

/// Convexity: `C(tΘ₁ + (1−t)Θ₂) ≤ t C(Θ₁) + (1−t) C(Θ₂) + tol`.
pub fn verify_convexity(
    theta1: &QuantumChannel,
    theta2: &QuantumChannel,
    t: f64,
    cfg: &OptimizerConfig,
    tol: f64,
) -> Result<PropertyReport, MonotoneError> {
    let mixture = QuantumChannel::mix(theta1, theta2, t)?;
    let lhs = coherence_power(&mixture, cfg).value;
    let rhs =
        t * coherence_power(theta1, cfg).value + (1.0 - t) * coherence_power(theta2, cfg).value;
    Ok(PropertyReport::from_sides(lhs, rhs, tol))
}
