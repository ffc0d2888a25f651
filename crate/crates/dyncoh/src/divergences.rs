//! State divergences (relative entropy, trace distance) and their lifts to
//! channel divergences `sup_{σ∈S} D((Θ⊗1)σ, (Λ⊗1)σ)` over restricted input
//! classes.
//!
//! The auxiliary-system dimension is fixed to the input dimension, which is
//! where the supremum over all states is attained. For incoherent inputs the
//! ancilla drops out entirely and the supremum reduces to a maximum over
//! computational basis states; that reduction is exact and the evaluator
//! uses it. For unrestricted or separable inputs the evaluator is a
//! multi-start sampler with local refinement and reports a certified lower
//! bound together with the witness state that achieves it.

use crate::channels::{basis_density, FlagBasis, MeasurementSpec, QuantumChannel};
use crate::density::DensityMatrix;
use crate::matrix::{eig_hermitian, ComplexMatrix, ComplexVector, C64};
use crate::optim::nelder_mead_min;
use crate::statesets::random_pure_with;
use crate::tolerances::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivergenceError {
    #[error("channel dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("unsupported combination: {0}")]
    Unsupported(&'static str),

    #[error(transparent)]
    Channel(#[from] crate::channels::ChannelError),

    #[error(transparent)]
    State(#[from] crate::density::StateError),
}

/// The two divergences implemented throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceKind {
    RelativeEntropy,
    TraceDistance,
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceKind::RelativeEntropy => write!(f, "relative-entropy"),
            DivergenceKind::TraceDistance => write!(f, "trace-distance"),
        }
    }
}

/// Input class for channel divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateClass {
    AllStates,
    IncoherentStates,
    /// Separable inputs across the fixed bipartition of the channel input.
    SeparableStates {
        dim_a: usize,
        dim_b: usize,
    },
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateClass::AllStates => write!(f, "all"),
            StateClass::IncoherentStates => write!(f, "incoherent"),
            StateClass::SeparableStates { dim_a, dim_b } => {
                write!(f, "separable({dim_a}|{dim_b})")
            }
        }
    }
}

/// Destructive-measurement mode for measured channel divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementMode {
    No,
    All,
    Free,
}

impl std::fmt::Display for MeasurementMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasurementMode::No => write!(f, "no"),
            MeasurementMode::All => write!(f, "all"),
            MeasurementMode::Free => write!(f, "free"),
        }
    }
}

/// Default multi-start count for the heuristic supremum over unrestricted
/// inputs.
pub const DEFAULT_SUPREMUM_SAMPLES: usize = 64;
/// Default Nelder-Mead refinement budget for the same.
pub const DEFAULT_REFINE_BUDGET: usize = 400;

/// Eigenvalues of `σ` at or below this cut count as outside its support.
pub const SUPPORT_CUT: f64 = 1e-10;
/// Weight of `ρ` tolerated on the kernel of `σ` before the relative entropy
/// is reported as `+∞`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-9;

/// Relative entropy `S(ρ,σ) = tr(ρ log₂ ρ) − tr(ρ log₂ σ)` in bits.
///
/// Returns `+∞` when more than [`SUPPORT_LEAK_TOL`] of the weight of `ρ`
/// lies outside the support of `σ` (support cut at [`SUPPORT_CUT`]).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    relative_entropy_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn relative_entropy_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let tol = Tolerances::default();
    let (rho_eigs, _) = eig_hermitian(&rho.hermitized(), tol.herm).expect("hermitized input");
    let (sigma_eigs, sigma_vecs) =
        eig_hermitian(&sigma.hermitized(), tol.herm).expect("hermitized input");

    let plogp: f64 = rho_eigs
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum();

    let mut cross = 0.0;
    let mut leak = 0.0;
    for (j, &mu) in sigma_eigs.iter().enumerate() {
        let w = sigma_vecs.column(j);
        let r_j = quadratic_form(rho, &w).max(0.0);
        if mu <= SUPPORT_CUT {
            leak += r_j;
        } else {
            cross += r_j * mu.log2();
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return f64::INFINITY;
    }
    (plogp - cross).max(0.0)
}

/// Relative entropy with the second argument's spectrum clamped from below;
/// never returns `+∞`. Used inside minimizations that keep `σ` full rank by
/// explicit mixing.
pub(crate) fn relative_entropy_clamped(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let tol = Tolerances::default();
    let (rho_eigs, _) = eig_hermitian(&rho.hermitized(), tol.herm).expect("hermitized input");
    let (sigma_eigs, sigma_vecs) =
        eig_hermitian(&sigma.hermitized(), tol.herm).expect("hermitized input");
    let plogp: f64 = rho_eigs
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.log2())
        .sum();
    let mut cross = 0.0;
    for (j, &mu) in sigma_eigs.iter().enumerate() {
        let w = sigma_vecs.column(j);
        let r_j = quadratic_form(rho, &w).max(0.0);
        cross += r_j * mu.max(1e-300).log2();
    }
    plogp - cross
}

fn quadratic_form(m: &ComplexMatrix, v: &ComplexVector) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            acc += v[i].conj() * m[(i, j)] * v[j];
        }
    }
    acc.re
}

/// Trace distance `‖ρ−σ‖₁ = Σ|λ_i(ρ−σ)|`, unnormalized (range `[0, 2]`).
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    trace_distance_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn trace_distance_matrices(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let diff = rho.sub(sigma).hermitized();
    let (eigs, _) = eig_hermitian(&diff, f64::INFINITY).expect("hermitized difference");
    eigs.iter().map(|l| l.abs()).sum()
}

/// Dispatch on [`DivergenceKind`].
pub fn state_divergence(kind: DivergenceKind, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    match kind {
        DivergenceKind::RelativeEntropy => relative_entropy(rho, sigma),
        DivergenceKind::TraceDistance => trace_distance(rho, sigma),
    }
}

/// Helstrom projectors of the Hermitian difference `ρ−σ`: the projective
/// measurement `{P₊, 1−P₊}` whose outcome statistics achieve the trace
/// distance.
pub fn helstrom_measurement(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<MeasurementSpec, DivergenceError> {
    let diff = rho.matrix().sub(sigma.matrix()).hermitized();
    let (eigs, vecs) = eig_hermitian(&diff, f64::INFINITY).expect("hermitized difference");
    let d = diff.rows();
    let mut p_plus = ComplexMatrix::zeros(d, d);
    for (k, &l) in eigs.iter().enumerate() {
        if l > 0.0 {
            let v = vecs.column(k);
            p_plus = p_plus.add(&v.projector());
        }
    }
    let p_minus = ComplexMatrix::identity(d).sub(&p_plus);
    Ok(MeasurementSpec::new(
        vec![p_plus, p_minus],
        FlagBasis::Local,
    )?)
}

/// Result of a channel-divergence evaluation: the value, the input state
/// that achieves it, and whether the reduction used makes it exact.
#[derive(Debug, Clone)]
pub struct ChannelDivergence {
    pub value: f64,
    pub witness: DensityMatrix,
    /// True when the value comes from an exact finite reduction; false for
    /// sampled heuristics, where the value is a certified lower bound of the
    /// supremum (achieved by the witness).
    pub exact: bool,
    pub evaluations: usize,
}

fn check_same_dims(theta: &QuantumChannel, lambda: &QuantumChannel) -> Result<(), DivergenceError> {
    if theta.dim_in() != lambda.dim_in() || theta.dim_out() != lambda.dim_out() {
        return Err(DivergenceError::DimMismatch(format!(
            "{}→{} vs {}→{}",
            theta.dim_in(),
            theta.dim_out(),
            lambda.dim_in(),
            lambda.dim_out()
        )));
    }
    Ok(())
}

/// Channel divergence `D^S(Θ,Λ)` for the given input class.
///
/// * `IncoherentStates`: exact maximum over computational basis states (the
///   ancilla provably drops out, and joint convexity pins the maximum to a
///   vertex of the incoherent simplex).
/// * `AllStates`: multi-start over Haar-random pure inputs on the
///   ancilla-extended space (`samples` starts, ancilla dimension equal to
///   the input dimension) plus Nelder-Mead refinement with `refine_budget`
///   iterations; certified lower bound.
/// * `SeparableStates`: multi-start over product pure inputs including every
///   basis product; exact whenever both channels dephase their input first,
///   heuristic lower bound otherwise.
pub fn channel_divergence(
    kind: DivergenceKind,
    class: StateClass,
    theta: &QuantumChannel,
    lambda: &QuantumChannel,
    samples: usize,
    refine_budget: usize,
    seed: u64,
) -> Result<ChannelDivergence, DivergenceError> {
    check_same_dims(theta, lambda)?;
    match class {
        StateClass::IncoherentStates => incoherent_divergence(kind, theta, lambda),
        StateClass::AllStates => {
            all_states_divergence(kind, theta, lambda, samples, refine_budget, seed)
        }
        StateClass::SeparableStates { dim_a, dim_b } => separable_divergence(
            kind,
            theta,
            lambda,
            dim_a,
            dim_b,
            samples,
            refine_budget,
            seed,
        ),
    }
}

fn incoherent_divergence(
    kind: DivergenceKind,
    theta: &QuantumChannel,
    lambda: &QuantumChannel,
) -> Result<ChannelDivergence, DivergenceError> {
    let d = theta.dim_in();
    let mut best = f64::NEG_INFINITY;
    let mut best_index = 0;
    for i in 0..d {
        let a = theta.basis_image(i);
        let b = lambda.basis_image(i);
        let v = match kind {
            DivergenceKind::RelativeEntropy => relative_entropy_matrices(&a, &b),
            DivergenceKind::TraceDistance => trace_distance_matrices(&a, &b),
        };
        if v > best {
            best = v;
            best_index = i;
        }
    }
    Ok(ChannelDivergence {
        value: best,
        witness: basis_density(d, best_index),
        exact: true,
        evaluations: d,
    })
}

fn divergence_of_input(
    kind: DivergenceKind,
    theta_ext: &QuantumChannel,
    lambda_ext: &QuantumChannel,
    input: &ComplexMatrix,
) -> f64 {
    let a = theta_ext.apply_matrix(input);
    let b = lambda_ext.apply_matrix(input);
    match kind {
        DivergenceKind::RelativeEntropy => relative_entropy_matrices(&a, &b),
        DivergenceKind::TraceDistance => trace_distance_matrices(&a, &b),
    }
}

fn vector_from_params(params: &[f64], dim: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    let mut norm_sq = 0.0;
    for i in 0..dim {
        let re = params[2 * i];
        let im = params[2 * i + 1];
        v[i] = C64::new(re, im);
        norm_sq += re * re + im * im;
    }
    if norm_sq < 1e-300 {
        return ComplexVector::basis_state(dim, 0);
    }
    let n = norm_sq.sqrt();
    for i in 0..dim {
        v[i] /= n;
    }
    v
}

fn params_from_vector(v: &ComplexVector) -> Vec<f64> {
    let mut p = Vec::with_capacity(2 * v.dim());
    for i in 0..v.dim() {
        p.push(v[i].re);
        p.push(v[i].im);
    }
    p
}

fn all_states_divergence(
    kind: DivergenceKind,
    theta: &QuantumChannel,
    lambda: &QuantumChannel,
    samples: usize,
    refine_budget: usize,
    seed: u64,
) -> Result<ChannelDivergence, DivergenceError> {
    let d = theta.dim_in();
    let ancilla = QuantumChannel::identity(d);
    let theta_ext = QuantumChannel::tensor(theta, &ancilla);
    let lambda_ext = QuantumChannel::tensor(lambda, &ancilla);
    let ext_dim = d * d;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0usize;
    let mut starts: Vec<ComplexVector> = Vec::with_capacity(samples + d + 1);
    // Maximally entangled probe plus local basis states, then Haar samples.
    let mut omega = ComplexVector::zeros(ext_dim);
    for i in 0..d {
        omega[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    starts.push(omega);
    for i in 0..d {
        starts.push(ComplexVector::basis_state(d, i).tensor(&ComplexVector::basis_state(d, 0)));
    }
    for _ in 0..samples {
        starts.push(random_pure_with(ext_dim, &mut rng));
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_vec = starts[0].clone();
    for psi in &starts {
        let v = divergence_of_input(kind, &theta_ext, &lambda_ext, &psi.projector());
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best_vec = psi.clone();
        }
    }

    if refine_budget > 0 && best_value.is_finite() {
        let objective = |params: &[f64]| {
            let psi = vector_from_params(params, ext_dim);
            let v = divergence_of_input(kind, &theta_ext, &lambda_ext, &psi.projector());
            if v.is_finite() {
                -v
            } else {
                // Unbounded directions stall Nelder-Mead; cap them.
                -1e6
            }
        };
        let x0 = params_from_vector(&best_vec);
        let (x, neg_v) = nelder_mead_min(objective, &x0, 0.05, refine_budget);
        evaluations += refine_budget;
        if -neg_v > best_value {
            best_value = -neg_v;
            best_vec = vector_from_params(&x, ext_dim);
        }
    }

    Ok(ChannelDivergence {
        value: best_value,
        witness: DensityMatrix::from_pure(vec![d, d], &best_vec)?,
        exact: false,
        evaluations,
    })
}

#[allow(clippy::too_many_arguments)]
fn separable_divergence(
    kind: DivergenceKind,
    theta: &QuantumChannel,
    lambda: &QuantumChannel,
    dim_a: usize,
    dim_b: usize,
    samples: usize,
    refine_budget: usize,
    seed: u64,
) -> Result<ChannelDivergence, DivergenceError> {
    if dim_a * dim_b != theta.dim_in() {
        return Err(DivergenceError::DimMismatch(format!(
            "bipartition {dim_a}x{dim_b} does not match input dimension {}",
            theta.dim_in()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0usize;

    let mut starts: Vec<(ComplexVector, ComplexVector)> = Vec::new();
    for k in 0..dim_a {
        for m in 0..dim_b {
            starts.push((
                ComplexVector::basis_state(dim_a, k),
                ComplexVector::basis_state(dim_b, m),
            ));
        }
    }
    for _ in 0..samples {
        starts.push((
            random_pure_with(dim_a, &mut rng),
            random_pure_with(dim_b, &mut rng),
        ));
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_pair = starts[0].clone();
    for (a, b) in &starts {
        let input = a.tensor(b).projector();
        let v = divergence_of_input(kind, theta, lambda, &input);
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best_pair = (a.clone(), b.clone());
        }
    }

    if refine_budget > 0 && best_value.is_finite() {
        let objective = |params: &[f64]| {
            let a = vector_from_params(&params[..2 * dim_a], dim_a);
            let b = vector_from_params(&params[2 * dim_a..], dim_b);
            let v = divergence_of_input(kind, theta, lambda, &a.tensor(&b).projector());
            if v.is_finite() {
                -v
            } else {
                -1e6
            }
        };
        let mut x0 = params_from_vector(&best_pair.0);
        x0.extend(params_from_vector(&best_pair.1));
        let (x, neg_v) = nelder_mead_min(objective, &x0, 0.05, refine_budget);
        evaluations += refine_budget;
        if -neg_v > best_value {
            best_value = -neg_v;
            best_pair = (
                vector_from_params(&x[..2 * dim_a], dim_a),
                vector_from_params(&x[2 * dim_a..], dim_b),
            );
        }
    }

    let witness_vec = best_pair.0.tensor(&best_pair.1);
    Ok(ChannelDivergence {
        value: best_value,
        witness: DensityMatrix::from_pure(vec![dim_a, dim_b], &witness_vec)?,
        exact: false,
        evaluations,
    })
}

/// Measured channel divergence together with the optimal destructive
/// measurement when one is constructed.
#[derive(Debug, Clone)]
pub struct MeasuredChannelDivergence {
    pub value: f64,
    pub witness_input: DensityMatrix,
    /// The measurement achieving the value (trace distance: the Helstrom
    /// projective measurement on the optimal output pair).
    pub witness_measurement: Option<MeasurementSpec>,
    pub exact: bool,
}

/// Measured channel divergence `D^{S,M}(Θ,Λ)`.
///
/// Implemented cases: `No` defers to [`channel_divergence`]; trace distance
/// with `All` equals the unmeasured value, attained by the Helstrom
/// measurement of the optimal output pair (returned as witness). `Free` for
/// incoherent inputs coincides with `All`: every destructive-measurement
/// embedding has diagonal output and is therefore maximally incoherent.
/// Measured relative entropy and free separable measurements are not
/// implemented.
#[allow(clippy::too_many_arguments)]
pub fn channel_divergence_measured(
    kind: DivergenceKind,
    class: StateClass,
    mode: MeasurementMode,
    theta: &QuantumChannel,
    lambda: &QuantumChannel,
    samples: usize,
    refine_budget: usize,
    seed: u64,
) -> Result<MeasuredChannelDivergence, DivergenceError> {
    if mode == MeasurementMode::No {
        let base = channel_divergence(kind, class, theta, lambda, samples, refine_budget, seed)?;
        return Ok(MeasuredChannelDivergence {
            value: base.value,
            witness_input: base.witness,
            witness_measurement: None,
            exact: base.exact,
        });
    }
    if kind == DivergenceKind::RelativeEntropy {
        return Err(DivergenceError::Unsupported(
            "measured relative entropy (equals the relative entropy only for commuting pairs)",
        ));
    }
    if mode == MeasurementMode::Free && matches!(class, StateClass::SeparableStates { .. }) {
        return Err(DivergenceError::Unsupported(
            "free destructive measurements over separable POVMs",
        ));
    }
    let base = channel_divergence(kind, class, theta, lambda, samples, refine_budget, seed)?;
    let input = &base.witness;
    let (out_theta, out_lambda) = if input.dim() == theta.dim_in() {
        (theta.apply(input)?, lambda.apply(input)?)
    } else {
        // Ancilla-extended witness.
        let ancilla_dim = input.dim() / theta.dim_in();
        let ext = QuantumChannel::tensor(theta, &QuantumChannel::identity(ancilla_dim));
        let ext_l = QuantumChannel::tensor(lambda, &QuantumChannel::identity(ancilla_dim));
        (ext.apply(input)?, ext_l.apply(input)?)
    };
    let measurement = helstrom_measurement(&out_theta, &out_lambda)?;
    Ok(MeasuredChannelDivergence {
        value: base.value,
        witness_input: base.witness,
        witness_measurement: Some(measurement),
        exact: base.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{embed_measurement, random_channel_with, random_mio_channel_with};
    use crate::statesets::{random_mixed_with, random_pure_with};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn relative_entropy_of_identical_states_is_zero() {
        let mut r = rng(1);
        let rho = random_mixed_with(3, &mut r);
        assert!(relative_entropy(&rho, &rho).abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_pure_vs_mixed_is_one_bit() {
        let zero = basis_density(2, 0);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert!((relative_entropy(&zero, &mixed) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_disjoint_supports_is_infinite() {
        let zero = basis_density(2, 0);
        let one = basis_density(2, 1);
        assert!(relative_entropy(&zero, &one).is_infinite());
    }

    #[test]
    fn trace_distance_basics() {
        let mut r = rng(2);
        let rho = random_mixed_with(2, &mut r);
        assert!(trace_distance(&rho, &rho).abs() < 1e-12);
        let zero = basis_density(2, 0);
        let one = basis_density(2, 1);
        assert!((trace_distance(&zero, &one) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_matches_spectral_oracle() {
        // ‖X‖₁ = 2·max_P tr(P X) over projectors for traceless Hermitian X;
        // the maximum is the sum of positive eigenvalues of X.
        let mut r = rng(3);
        for _ in 0..10 {
            let rho = random_mixed_with(3, &mut r);
            let sigma = random_mixed_with(3, &mut r);
            let diff = rho.matrix().sub(sigma.matrix()).hermitized();
            let (eigs, _) = eig_hermitian(&diff, 1e-9).unwrap();
            let oracle: f64 = 2.0 * eigs.iter().filter(|&&l| l > 0.0).sum::<f64>();
            assert!((trace_distance(&rho, &sigma) - oracle).abs() <= 1e-10);
        }
    }

    #[test]
    fn data_processing_inequality_holds() {
        let mut r = rng(4);
        for _ in 0..50 {
            let rho = random_mixed_with(2, &mut r);
            let sigma = random_mixed_with(2, &mut r);
            let channel = random_channel_with(2, 2, 2, &mut r).unwrap();
            let out_r = channel.apply(&rho).unwrap();
            let out_s = channel.apply(&sigma).unwrap();
            assert!(
                relative_entropy(&out_r, &out_s) <= relative_entropy(&rho, &sigma) + 1e-9,
                "relative entropy DPI violated"
            );
            assert!(
                trace_distance(&out_r, &out_s) <= trace_distance(&rho, &sigma) + 1e-9,
                "trace distance DPI violated"
            );
        }
    }

    #[test]
    fn joint_convexity_holds() {
        let mut r = rng(5);
        for _ in 0..50 {
            let rho1 = random_mixed_with(2, &mut r);
            let rho2 = random_mixed_with(2, &mut r);
            let sig1 = random_mixed_with(2, &mut r);
            let sig2 = random_mixed_with(2, &mut r);
            let t: f64 = 0.37;
            let mix = |a: &DensityMatrix, b: &DensityMatrix| {
                DensityMatrix::new(
                    vec![2],
                    a.matrix()
                        .scale(C64::new(t, 0.0))
                        .add(&b.matrix().scale(C64::new(1.0 - t, 0.0))),
                )
                .unwrap()
            };
            let rho_mix = mix(&rho1, &rho2);
            let sig_mix = mix(&sig1, &sig2);
            for kind in [
                DivergenceKind::RelativeEntropy,
                DivergenceKind::TraceDistance,
            ] {
                let lhs = state_divergence(kind, &rho_mix, &sig_mix);
                let rhs = t * state_divergence(kind, &rho1, &sig1)
                    + (1.0 - t) * state_divergence(kind, &rho2, &sig2);
                assert!(lhs <= rhs + 1e-9, "{kind} joint convexity violated");
            }
        }
    }

    #[test]
    fn identical_channels_have_zero_divergence() {
        let mut r = rng(6);
        let theta = random_channel_with(2, 2, 2, &mut r).unwrap();
        for class in [StateClass::IncoherentStates, StateClass::AllStates] {
            let result = channel_divergence(
                DivergenceKind::TraceDistance,
                class,
                &theta,
                &theta,
                8,
                50,
                7,
            )
            .unwrap();
            assert!(result.value.abs() < 1e-10);
        }
    }

    #[test]
    fn hadamard_incoherent_trace_distance_anchors() {
        // Closed-form 2x2 eigenvalue oracles. Against the depolarizing
        // replacement: basis inputs give ‖|±⟩⟨±| − 1/2‖₁ = 1 (eigenvalues
        // ±1/2). Against dephasing, which fixes basis states, they give
        // ‖|±⟩⟨±| − |i⟩⟨i|‖₁ = √2 (eigenvalues ±1/√2).
        let h = QuantumChannel::hadamard();
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        let depolarize = QuantumChannel::replacement(&mixed, 2);
        let vs_replacement = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::IncoherentStates,
            &h,
            &depolarize,
            0,
            0,
            0,
        )
        .unwrap();
        assert!((vs_replacement.value - 1.0).abs() < 1e-12);
        assert!(vs_replacement.exact);

        let delta = QuantumChannel::dephasing(&[2]);
        let vs_dephasing = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::IncoherentStates,
            &h,
            &delta,
            0,
            0,
            0,
        )
        .unwrap();
        assert!((vs_dephasing.value - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn separable_class_reduces_to_basis_enumeration_for_dephased_channels() {
        // Θ, Λ of the form Φ∘Δ: the separable supremum collapses onto the
        // product basis; extra random product starts must not exceed it.
        let mut r = rng(8);
        let delta = QuantumChannel::dephasing(&[2, 2]);
        let phi1 = random_channel_with(4, 4, 2, &mut r).unwrap();
        let phi2 = random_channel_with(4, 4, 2, &mut r).unwrap();
        let theta = QuantumChannel::compose(&phi1, &delta).unwrap();
        let lambda = QuantumChannel::compose(&phi2, &delta).unwrap();

        let mut basis_best: f64 = f64::NEG_INFINITY;
        for k in 0..2 {
            for m in 0..2 {
                let input = basis_density(4, k * 2 + m);
                let v = trace_distance(
                    &theta.apply(&input).unwrap(),
                    &lambda.apply(&input).unwrap(),
                );
                basis_best = basis_best.max(v);
            }
        }
        let result = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::SeparableStates { dim_a: 2, dim_b: 2 },
            &theta,
            &lambda,
            32,
            100,
            9,
        )
        .unwrap();
        assert!(
            (result.value - basis_best).abs() <= 1e-9,
            "sampled {} vs basis enumeration {}",
            result.value,
            basis_best
        );
    }

    #[test]
    fn incoherent_divergence_unchanged_by_identity_ancilla() {
        // Tensoring an identity ancilla onto both channels and enumerating
        // the doubled basis gives exactly the same maximum.
        let mut r = rng(10);
        for kind in [
            DivergenceKind::TraceDistance,
            DivergenceKind::RelativeEntropy,
        ] {
            let theta = random_channel_with(2, 2, 2, &mut r).unwrap();
            let lambda = random_mio_channel_with(2, &mut r);
            let direct =
                channel_divergence(kind, StateClass::IncoherentStates, &theta, &lambda, 0, 0, 0)
                    .unwrap();
            let id = QuantumChannel::identity(2);
            let theta_ext = QuantumChannel::tensor(&theta, &id);
            let lambda_ext = QuantumChannel::tensor(&lambda, &id);
            let extended = channel_divergence(
                kind,
                StateClass::IncoherentStates,
                &theta_ext,
                &lambda_ext,
                0,
                0,
                0,
            )
            .unwrap();
            assert!(
                (direct.value - extended.value).abs() <= 1e-10,
                "{kind}: {} vs {}",
                direct.value,
                extended.value
            );
        }
    }

    #[test]
    fn all_states_heuristic_dominates_incoherent_reduction() {
        let mut r = rng(11);
        let theta = random_channel_with(2, 2, 2, &mut r).unwrap();
        let lambda = random_mio_channel_with(2, &mut r);
        let incoherent = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::IncoherentStates,
            &theta,
            &lambda,
            0,
            0,
            0,
        )
        .unwrap();
        let all = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::AllStates,
            &theta,
            &lambda,
            DEFAULT_SUPREMUM_SAMPLES,
            DEFAULT_REFINE_BUDGET,
            12,
        )
        .unwrap();
        assert!(all.value >= incoherent.value - 1e-9);
        assert!(!all.exact);
    }

    #[test]
    fn helstrom_witness_reproduces_trace_distance() {
        let mut r = rng(13);
        for _ in 0..10 {
            let rho = random_mixed_with(3, &mut r);
            let sigma = random_mixed_with(3, &mut r);
            let spec = helstrom_measurement(&rho, &sigma).unwrap();
            let channel = embed_measurement(&spec);
            let m_rho = channel.apply(&rho).unwrap();
            let m_sigma = channel.apply(&sigma).unwrap();
            let classical = trace_distance(&m_rho, &m_sigma);
            let quantum = trace_distance(&rho, &sigma);
            assert!(
                (classical - quantum).abs() <= 1e-9,
                "witness statistics {classical} vs {quantum}"
            );
        }
    }

    #[test]
    fn measured_trace_distance_equals_unmeasured() {
        let mut r = rng(14);
        let theta = random_channel_with(2, 2, 2, &mut r).unwrap();
        let lambda = random_mio_channel_with(2, &mut r);
        let unmeasured = channel_divergence(
            DivergenceKind::TraceDistance,
            StateClass::IncoherentStates,
            &theta,
            &lambda,
            0,
            0,
            0,
        )
        .unwrap();
        for mode in [MeasurementMode::All, MeasurementMode::Free] {
            let measured = channel_divergence_measured(
                DivergenceKind::TraceDistance,
                StateClass::IncoherentStates,
                mode,
                &theta,
                &lambda,
                0,
                0,
                0,
            )
            .unwrap();
            assert!((measured.value - unmeasured.value).abs() < 1e-12);
            let spec = measured.witness_measurement.expect("witness expected");
            // The witness measurement reproduces the value on the optimal pair.
            let input = &measured.witness_input;
            let channel = embed_measurement(&spec);
            let a = channel.apply(&theta.apply(input).unwrap()).unwrap();
            let b = channel.apply(&lambda.apply(input).unwrap()).unwrap();
            assert!((trace_distance(&a, &b) - measured.value).abs() <= 1e-9);
        }
    }

    #[test]
    fn free_measurement_embeddings_are_mio() {
        // Any POVM embedded per the destructive-measurement construction has
        // diagonal output, hence lies in MIO. Sampled check.
        let mut r = rng(15);
        for _ in 0..20 {
            let v1 = random_pure_with(2, &mut r);
            let p1 = v1.projector();
            let p2 = ComplexMatrix::identity(2).sub(&p1);
            let spec = MeasurementSpec::new(vec![p1, p2], FlagBasis::Local).unwrap();
            let ch = embed_measurement(&spec);
            assert!(ch.is_mio());
        }
    }

    #[test]
    fn measured_relative_entropy_unsupported() {
        let theta = QuantumChannel::hadamard();
        let delta = QuantumChannel::dephasing(&[2]);
        let err = channel_divergence_measured(
            DivergenceKind::RelativeEntropy,
            StateClass::IncoherentStates,
            MeasurementMode::All,
            &theta,
            &delta,
            0,
            0,
            0,
        );
        assert!(matches!(err, Err(DivergenceError::Unsupported(_))));
    }

    #[test]
    fn free_separable_measurements_unsupported() {
        let delta = QuantumChannel::dephasing(&[2, 2]);
        let err = channel_divergence_measured(
            DivergenceKind::TraceDistance,
            StateClass::SeparableStates { dim_a: 2, dim_b: 2 },
            MeasurementMode::Free,
            &delta,
            &delta,
            0,
            0,
            0,
        );
        assert!(matches!(err, Err(DivergenceError::Unsupported(_))));
    }
}
